#include "forage/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace forage::report {

namespace {

constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

Bounds padded(double x0, double x1, double y0, double y1) {
    auto widen = [](double& lo, double& hi) {
        if (hi - lo <= 0.0) {
            const double d = std::max(std::abs(lo) * 0.05, 1.0);
            lo -= d;
            hi += d;
        } else {
            const double d = 0.05 * (hi - lo);
            lo -= d;
            hi += d;
        }
    };
    widen(x0, x1);
    widen(y0, y1);
    return {x0, x1, y0, y1};
}

void check_bounds(const Bounds& b) {
    const bool finite = std::isfinite(b.x_min) && std::isfinite(b.x_max) && std::isfinite(b.y_min) &&
                        std::isfinite(b.y_max);
    if (!finite || !(b.x_max > b.x_min) || !(b.y_max > b.y_min)) {
        throw std::invalid_argument("figure bounds must be finite and ordered");
    }
}

// Maps data coordinates into the plot rectangle of an SVG canvas.
struct Canvas {
    FigureSpec spec;
    Bounds b;
    std::ostringstream body;

    double plot_w() const { return spec.width - kLeft - kRight; }
    double plot_h() const { return spec.height - kTop - kBottom; }
    double sx(double x) const { return kLeft + (x - b.x_min) / (b.x_max - b.x_min) * plot_w(); }
    double sy(double y) const { return kTop + (b.y_max - y) / (b.y_max - b.y_min) * plot_h(); }

    void axes(int ticks = 5) {
        body << "<g class=\"axes\" stroke=\"#333\" stroke-width=\"1\">\n";
        body << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h()) << "\" x2=\"" << num(kLeft + plot_w())
             << "\" y2=\"" << num(kTop + plot_h()) << "\"/>\n";
        body << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
             << num(kTop + plot_h()) << "\"/>\n";
        body << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
        for (int i = 0; i <= ticks; ++i) {
            const double fx = b.x_min + (b.x_max - b.x_min) * i / ticks;
            const double px = sx(fx);
            body << "<line x1=\"" << num(px) << "\" y1=\"" << num(kTop + plot_h()) << "\" x2=\"" << num(px)
                 << "\" y2=\"" << num(kTop + plot_h() + 5) << "\" stroke=\"#333\"/>\n";
            body << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + plot_h() + 18)
                 << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
            const double fy = b.y_min + (b.y_max - b.y_min) * i / ticks;
            const double py = sy(fy);
            body << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft)
                 << "\" y2=\"" << num(py) << "\" stroke=\"#333\"/>\n";
            body << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
                 << tick_label(fy) << "</text>\n";
        }
        body << "</g>\n";
    }

    std::string finish() const {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width << "\" height=\""
           << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n"
           << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
           << "\" fill=\"white\"/>\n"
           << "<g font-family=\"sans-serif\" fill=\"#111\">\n"
           << "<text x=\"" << num(spec.width / 2.0) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
           << xml_escape(spec.title) << "</text>\n"
           << "<text x=\"" << num(kLeft + plot_w() / 2.0) << "\" y=\"" << num(spec.height - 16.0)
           << "\" font-size=\"13\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n"
           << "<text x=\"18\" y=\"" << num(kTop + plot_h() / 2.0) << "\" font-size=\"13\" text-anchor=\"middle\""
           << " transform=\"rotate(-90 18 " << num(kTop + plot_h() / 2.0) << ")\">" << xml_escape(spec.y_label)
           << "</text>\n</g>\n"
           << body.str() << "</svg>\n";
        return os.str();
    }
};

// Portion of y = slope*x + intercept inside the box, if any.
std::optional<std::pair<Point, Point>> clip_line(stats::LineFit fit, const Bounds& b) {
    double x0 = b.x_min, x1 = b.x_max;
    if (fit.slope != 0.0) {
        double xa = (b.y_min - fit.intercept) / fit.slope;
        double xb = (b.y_max - fit.intercept) / fit.slope;
        if (xa > xb) std::swap(xa, xb);
        x0 = std::max(x0, xa);
        x1 = std::min(x1, xb);
    } else if (fit.intercept < b.y_min || fit.intercept > b.y_max) {
        return std::nullopt;
    }
    if (!(x1 >= x0)) return std::nullopt;
    return std::pair{Point{x0, fit.slope * x0 + fit.intercept}, Point{x1, fit.slope * x1 + fit.intercept}};
}

double lin_channel(int c) {
    const double v = c / 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

Rgb ramp_color(double t) {
    struct Stop {
        double t;
        Rgb c;
    };
    static constexpr Stop stops[] = {
        {0.00, {68, 1, 84}}, {0.25, {59, 82, 139}}, {0.50, {33, 145, 140}}, {0.75, {94, 201, 98}}, {1.00, {253, 231, 37}},
    };
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    for (std::size_t i = 1; i < std::size(stops); ++i) {
        if (t <= stops[i].t) {
            const Stop& a = stops[i - 1];
            const Stop& b = stops[i];
            const double u = (t - a.t) / (b.t - a.t);
            auto mix = [u](int x, int y) { return static_cast<int>(std::lround(x + (y - x) * u)); };
            return {mix(a.c.r, b.c.r), mix(a.c.g, b.c.g), mix(a.c.b, b.c.b)};
        }
    }
    return stops[std::size(stops) - 1].c;
}

double relative_luminance(Rgb c) {
    return 0.2126 * lin_channel(c.r) + 0.7152 * lin_channel(c.g) + 0.0722 * lin_channel(c.b);
}

std::string to_hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

std::string render_scatter(std::span<const Point> points, stats::LineFit fit, const FigureSpec& spec) {
    if (points.empty()) throw std::invalid_argument("render_scatter: no points");
    Bounds b;
    if (spec.bounds) {
        b = *spec.bounds;
    } else {
        auto [xmin, xmax] = std::minmax_element(points.begin(), points.end(),
                                                [](const Point& a, const Point& c) { return a.x < c.x; });
        auto [ymin, ymax] = std::minmax_element(points.begin(), points.end(),
                                                [](const Point& a, const Point& c) { return a.y < c.y; });
        b = padded(xmin->x, xmax->x, ymin->y, ymax->y);
    }
    check_bounds(b);
    Canvas cv{spec, b, {}};
    cv.axes();
    cv.body << "<g class=\"points\" fill=\"#1f77b4\" fill-opacity=\"0.7\">\n";
    for (const auto& p : points) {
        cv.body << "<circle cx=\"" << num(cv.sx(p.x)) << "\" cy=\"" << num(cv.sy(p.y)) << "\" r=\"3\"/>\n";
    }
    cv.body << "</g>\n";
    if (auto seg = clip_line(fit, b)) {
        cv.body << "<line class=\"fit\" x1=\"" << num(cv.sx(seg->first.x)) << "\" y1=\"" << num(cv.sy(seg->first.y))
                << "\" x2=\"" << num(cv.sx(seg->second.x)) << "\" y2=\"" << num(cv.sy(seg->second.y))
                << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
    }
    return cv.finish();
}

std::string render_histogram(std::span<const double> values, const FigureSpec& spec) {
    if (values.empty()) throw std::invalid_argument("render_histogram: no values");
    if (spec.bins < 1) throw std::invalid_argument("render_histogram: bins must be >= 1");
    stats::Histogram h = spec.bounds ? stats::histogram(values, spec.bins, spec.bounds->x_min, spec.bounds->x_max)
                                     : stats::histogram(values, spec.bins);
    const int peak = *std::max_element(h.counts.begin(), h.counts.end());
    Bounds b;
    if (h.hi > h.lo) {
        b = {h.lo, h.hi, 0.0, std::max(1.0, peak * 1.05)};
    } else {
        // A single repeated value gets a unit-wide bar.
        b = {h.lo - 0.5, h.lo + 0.5, 0.0, std::max(1.0, peak * 1.05)};
        h.lo -= 0.5;
        h.hi += 0.5;
    }
    check_bounds(b);
    Canvas cv{spec, b, {}};
    cv.axes();
    const double w = h.bin_width();
    cv.body << "<g class=\"bars\" fill=\"#4c72b0\" stroke=\"white\" stroke-width=\"0.5\">\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] == 0) continue;
        const double x0 = h.lo + w * static_cast<double>(i);
        const double top = cv.sy(h.counts[i]);
        cv.body << "<rect class=\"bar\" x=\"" << num(cv.sx(x0)) << "\" y=\"" << num(top) << "\" width=\""
                << num(cv.sx(x0 + w) - cv.sx(x0)) << "\" height=\"" << num(cv.sy(0.0) - top) << "\"><title>"
                << h.counts[i] << "</title></rect>\n";
    }
    cv.body << "</g>\n";
    return cv.finish();
}

HeatmapGrid bin_heatmap(std::span<const AgentResult> results, int nx, int ny, const Bounds& bounds) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("bin_heatmap: grid sizes must be >= 1");
    HeatmapGrid g{nx, ny, bounds, std::vector<double>(static_cast<std::size_t>(nx) * ny, 0.0),
                  std::vector<int>(static_cast<std::size_t>(nx) * ny, 0)};
    const double wx = (bounds.x_max - bounds.x_min) / nx;
    const double wy = (bounds.y_max - bounds.y_min) / ny;
    for (const auto& r : results) {
        if (r.diverged) continue;
        const int ix = wx > 0.0 ? std::clamp(static_cast<int>(std::floor((r.yield - bounds.x_min) / wx)), 0, nx - 1) : 0;
        const int iy =
            wy > 0.0 ? std::clamp(static_cast<int>(std::floor((r.spoilage - bounds.y_min) / wy)), 0, ny - 1) : 0;
        g.sum[g.index(ix, iy)] += r.mean_culture;
        g.count[g.index(ix, iy)] += 1;
    }
    return g;
}

std::string render_heatmap(std::span<const AgentResult> results, const FigureSpec& spec) {
    if (spec.nx < 1 || spec.ny < 1) throw std::invalid_argument("render_heatmap: grid sizes must be >= 1");
    Bounds b{0.0, 1.0, 0.0, 1.0};
    if (spec.bounds) {
        b = *spec.bounds;
    } else {
        bool any = false;
        for (const auto& r : results) {
            if (r.diverged) continue;
            if (!any) {
                b = {r.yield, r.yield, r.spoilage, r.spoilage};
                any = true;
            }
            b.x_min = std::min(b.x_min, r.yield);
            b.x_max = std::max(b.x_max, r.yield);
            b.y_min = std::min(b.y_min, r.spoilage);
            b.y_max = std::max(b.y_max, r.spoilage);
        }
        if (b.x_max <= b.x_min) {
            b.x_min -= 0.5;
            b.x_max += 0.5;
        }
        if (b.y_max <= b.y_min) {
            b.y_min -= 0.05;
            b.y_max += 0.05;
        }
    }
    check_bounds(b);
    const HeatmapGrid grid = bin_heatmap(results, spec.nx, spec.ny, b);

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            if (grid.empty(ix, iy)) continue;
            const double m = grid.mean(ix, iy);
            lo = any ? std::min(lo, m) : m;
            hi = any ? std::max(hi, m) : m;
            any = true;
        }
    }
    auto scale = [&](double v) { return hi > lo ? (v - lo) / (hi - lo) : 0.5; };

    FigureSpec layout = spec;
    Canvas cv{layout, b, {}};
    cv.axes();
    const double cw = cv.plot_w() / grid.nx;
    const double ch = cv.plot_h() / grid.ny;
    cv.body << "<g class=\"cells\" stroke=\"none\">\n";
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = kLeft + ix * cw;
            const double y = kTop + (grid.ny - 1 - iy) * ch;
            const bool empty = grid.empty(ix, iy);
            const Rgb fill = empty ? kEmptyCell : ramp_color(scale(grid.mean(ix, iy)));
            cv.body << "<rect id=\"cell-" << ix << '-' << iy << "\" class=\"" << (empty ? "cell empty" : "cell")
                    << "\" x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cw) << "\" height=\""
                    << num(ch) << "\" fill=\"" << to_hex(fill) << "\">";
            if (!empty) {
                cv.body << "<title>mean C " << tick_label(grid.mean(ix, iy)) << " (n=" << grid.count[grid.index(ix, iy)]
                        << ")</title>";
            }
            cv.body << "</rect>\n";
        }
    }
    cv.body << "</g>\n";

    // Legend: a vertical strip in the right margin area over the plot.
    const int steps = 20;
    const double lx = spec.width - kRight + 4.0;
    const double lh = cv.plot_h() / steps;
    cv.body << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int i = 0; i < steps; ++i) {
        const double t = (i + 0.5) / steps;
        cv.body << "<rect x=\"" << num(lx) << "\" y=\"" << num(kTop + (steps - 1 - i) * lh) << "\" width=\"10\" height=\""
                << num(lh) << "\" fill=\"" << to_hex(ramp_color(t)) << "\"/>\n";
    }
    cv.body << "<text x=\"" << num(lx + 5) << "\" y=\"" << num(kTop - 4) << "\" text-anchor=\"middle\">"
            << tick_label(hi) << "</text>\n";
    cv.body << "<text x=\"" << num(lx + 5) << "\" y=\"" << num(kTop + cv.plot_h() + 12) << "\" text-anchor=\"middle\">"
            << tick_label(lo) << "</text>\n";
    cv.body << "</g>\n";
    return cv.finish();
}

AnalysisOutputs analyze(std::span<const AgentResult> results, const std::filesystem::path& out_dir) {
    AnalysisOutputs out;
    out.summary = stats::summarize(results);
    out.fit = stats::ols_fit(stats::make_design(results));

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<double> ys, ps, cs;
    for (const auto& r : results) {
        if (r.diverged) continue;
        ys.push_back(r.yield);
        ps.push_back(r.spoilage);
        cs.push_back(r.mean_culture);
    }

    std::ostringstream rep;
    rep << "OLS regression of evaluated mean C on yield Y and spoilage p\n"
        << "agents used: " << out.summary.n << " (diverged, excluded: " << out.summary.diverged << ")\n\n"
        << stats::format_regression_table(out.fit) << '\n'
        << "Pearson corr(p, C) = " << stats::sig4(out.summary.corr_spoilage_culture.r)
        << (out.summary.corr_spoilage_culture.degenerate ? " (degenerate)" : "") << '\n'
        << "Pearson corr(Y, C) = " << stats::sig4(out.summary.corr_yield_culture.r)
        << (out.summary.corr_yield_culture.degenerate ? " (degenerate)" : "") << '\n'
        << "standardized effect of p (beta*sd) = " << stats::sig4(out.fit.coef(2) * out.summary.sd_spoilage) << '\n'
        << "standardized effect of Y (beta*sd) = " << stats::sig4(out.fit.coef(1) * out.summary.sd_yield) << '\n';

    auto emit = [&](const char* name, const std::string& content) {
        const auto path = out_dir / name;
        write_file(path, content);
        out.files.push_back(path);
    };
    emit(kReportFile, rep.str());
    {
        std::ostringstream csv;
        stats::write_regression_csv(csv, out.fit);
        emit(kRegressionCsv, csv.str());
    }

    auto scatter = [&](std::span<const double> x, const char* title, const char* xl, const char* name) {
        std::vector<Point> pts;
        for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], cs[i]});
        FigureSpec spec;
        spec.kind = FigureKind::Scatter;
        spec.title = title;
        spec.x_label = xl;
        spec.y_label = "mean cultural complexity C";
        emit(name, render_scatter(pts, stats::fit_line(x, cs), spec));
    };
    scatter(ps, "Cultural complexity vs spoilage", "spoilage probability p", kSpoilageFigure);
    scatter(ys, "Cultural complexity vs yield", "yield Y", kYieldFigure);

    FigureSpec hist;
    hist.kind = FigureKind::Histogram;
    hist.title = "Distribution of cultural complexity";
    hist.x_label = "mean cultural complexity C";
    hist.y_label = "agents";
    emit(kHistogramFigure, render_histogram(cs, hist));

    FigureSpec heat;
    heat.kind = FigureKind::Heatmap;
    heat.title = "Mean C over yield and spoilage";
    heat.x_label = "yield Y";
    heat.y_label = "spoilage probability p";
    heat.width = 680;
    emit(kHeatmapFigure, render_heatmap(results, heat));
    return out;
}

}  // namespace forage::report
