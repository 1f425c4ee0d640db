#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "forage/report.h"
#include "xml_check.h"

using namespace forage;
using namespace forage::report;
using testing_xml::check_xml;
using testing_xml::count_occurrences;
namespace fs = std::filesystem;

namespace {

std::vector<AgentResult> synthetic(int n) {
    std::vector<AgentResult> rs;
    for (int i = 0; i < n; ++i) {
        AgentResult r;
        r.agent_id = i;
        r.yield = 1000.0 + 2000.0 * ((i * 37) % n) / n;
        r.spoilage = 0.2 + 0.3 * ((i * 53) % n) / n;
        r.mean_culture = 350.0 - 400.0 * r.spoilage + 0.01 * r.yield + (i % 7);
        r.std_culture = 1.0;
        rs.push_back(r);
    }
    return rs;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("scatter") {
    const std::vector<Point> pts = {{0, 0}, {1, 1}, {2, 4}, {3, 9}};
    FigureSpec spec;
    spec.title = "A & B <test>";
    const std::string svg = render_scatter(pts, {2.0, -1.0}, spec);
    const auto x = check_xml(svg);
    CHECK_MESSAGE(x.ok, x.error);
    CHECK(x.root == "svg");
    CHECK(count_occurrences(svg, "<circle") == 4);
    CHECK(count_occurrences(svg, "class=\"fit\"") == 1);
    CHECK(svg.find("A &amp; B &lt;test&gt;") != std::string::npos);
    CHECK(svg.find("viewBox=") != std::string::npos);
    CHECK(svg == render_scatter(pts, {2.0, -1.0}, spec));
    CHECK_THROWS(render_scatter(std::vector<Point>{}, {}, spec));
}

TEST_CASE("fit line stays inside fixed bounds") {
    const std::vector<Point> pts = {{0.5, 0.5}};
    FigureSpec spec;
    spec.bounds = Bounds{0, 1, 0, 1};
    const std::string far = render_scatter(pts, {0.0, 5.0}, spec);
    CHECK(count_occurrences(far, "class=\"fit\"") == 0);
    const std::string steep = render_scatter(pts, {100.0, -50.0}, spec);
    CHECK(count_occurrences(steep, "class=\"fit\"") == 1);
}

TEST_CASE("histogram") {
    const std::vector<double> v = {0.0, 0.1, 0.6, 1.0};
    FigureSpec spec;
    spec.bins = 2;
    spec.bounds = Bounds{0.0, 1.0, 0.0, 0.0};
    const std::string svg = render_histogram(v, spec);
    const auto x = check_xml(svg);
    CHECK_MESSAGE(x.ok, x.error);
    CHECK(count_occurrences(svg, "class=\"bar\"") == 2);
    CHECK(count_occurrences(svg, "<title>2</title>") == 2);

    spec.bins = 10;
    const std::string sparse = render_histogram(v, spec);
    CHECK(count_occurrences(sparse, "class=\"bar\"") == 4);

    const std::vector<double> same = {4.0, 4.0, 4.0};
    FigureSpec plain;
    const std::string one = render_histogram(same, plain);
    CHECK(check_xml(one).ok);
    CHECK(count_occurrences(one, "<title>3</title>") == 1);
}

TEST_CASE("heatmap cells") {
    std::vector<AgentResult> rs(3);
    rs[0].yield = 1100;
    rs[0].spoilage = 0.21;
    rs[0].mean_culture = 10;
    rs[1].yield = 1150;
    rs[1].spoilage = 0.22;
    rs[1].mean_culture = 20;
    rs[2].yield = 2900;
    rs[2].spoilage = 0.49;
    rs[2].mean_culture = 100;
    const Bounds b{1000, 3000, 0.2, 0.5};
    const HeatmapGrid g = bin_heatmap(rs, 4, 3, b);
    CHECK(g.count[g.index(0, 0)] == 2);
    CHECK(g.mean(0, 0) == 15.0);
    CHECK(g.count[g.index(3, 2)] == 1);
    CHECK(g.empty(1, 1));

    FigureSpec spec;
    spec.kind = FigureKind::Heatmap;
    spec.nx = 4;
    spec.ny = 3;
    spec.bounds = b;
    const std::string svg = render_heatmap(rs, spec);
    const auto x = check_xml(svg);
    CHECK_MESSAGE(x.ok, x.error);
    CHECK(count_occurrences(svg, "id=\"cell-") == 12);
    CHECK(count_occurrences(svg, "class=\"cell empty\"") == 10);
    CHECK(count_occurrences(svg, to_hex(kEmptyCell)) >= 10);
    const std::regex low("id=\"cell-0-0\"[^>]*fill=\"(#[0-9a-f]{6})\"");
    const std::regex high("id=\"cell-3-2\"[^>]*fill=\"(#[0-9a-f]{6})\"");
    std::smatch ml, mh;
    REQUIRE(std::regex_search(svg, ml, low));
    REQUIRE(std::regex_search(svg, mh, high));
    CHECK(ml[1] == to_hex(ramp_color(0.0)));
    CHECK(mh[1] == to_hex(ramp_color(1.0)));
}

TEST_CASE("color ramp") {
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double lum = relative_luminance(ramp_color(i / 100.0));
        CHECK(lum > prev);
        prev = lum;
    }
    const Rgb lo = ramp_color(-3.0), hi = ramp_color(7.0);
    CHECK(to_hex(lo) == to_hex(ramp_color(0.0)));
    CHECK(to_hex(hi) == to_hex(ramp_color(1.0)));
    CHECK(to_hex(Rgb{255, 0, 16}) == "#ff0010");
    CHECK(relative_luminance(Rgb{255, 255, 255}) == doctest::Approx(1.0));
    CHECK(relative_luminance(Rgb{0, 0, 0}) == 0.0);
}

TEST_CASE("xml escaping") {
    CHECK(xml_escape("a<b>&\"'") == "a&lt;b&gt;&amp;&quot;&apos;");
    CHECK(xml_escape("plain") == "plain");
}

TEST_CASE("analyze writes the report and four figures") {
    const fs::path dir = fs::temp_directory_path() / "forage_test_report";
    fs::remove_all(dir);
    auto rs = synthetic(60);
    rs[5].diverged = true;
    rs[5].mean_culture = kDivergedSentinel;
    const AnalysisOutputs out = analyze(rs, dir);
    CHECK(out.summary.n == 59);
    CHECK(out.files.size() == 6);
    for (const char* f : {kSpoilageFigure, kYieldFigure, kHistogramFigure, kHeatmapFigure}) {
        const std::string svg = slurp(dir / f);
        const auto x = check_xml(svg);
        CHECK_MESSAGE(x.ok, f, ": ", x.error);
        CHECK(x.root == "svg");
    }
    CHECK(count_occurrences(slurp(dir / kSpoilageFigure), "<circle") == 59);
    const std::string rep = slurp(dir / kReportFile);
    CHECK(rep.find("Y (x1)") != std::string::npos);
    CHECK(rep.find("p (x2)") != std::string::npos);
    CHECK(rep.find(stats::sig4(out.fit.coef(2))) != std::string::npos);
    CHECK(rep.find("corr(p, C) = " + stats::sig4(out.summary.corr_spoilage_culture.r)) != std::string::npos);
    CHECK(out.fit.coef(2) < 0.0);

    // Same input, same bytes.
    const std::string first = slurp(dir / kHeatmapFigure);
    analyze(rs, dir);
    CHECK(slurp(dir / kHeatmapFigure) == first);
    fs::remove_all(dir);
}
