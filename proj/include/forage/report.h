#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forage/results.h"
#include "forage/stats.h"

namespace forage::report {

enum class FigureKind { Scatter, Histogram, Heatmap };

struct Bounds {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

struct FigureSpec {
    FigureKind kind = FigureKind::Scatter;
    std::string title;
    std::string x_label;
    std::string y_label;
    /// Unset bounds are fitted to the data.
    std::optional<Bounds> bounds;
    int width = 640;
    int height = 480;
    int bins = 20;  // histogram
    int nx = 20;    // heatmap columns (x axis)
    int ny = 20;    // heatmap rows (y axis)
    std::filesystem::path output;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Points plus a fit line clipped to the plot bounds.
std::string render_scatter(std::span<const Point> points, stats::LineFit fit, const FigureSpec& spec);

std::string render_histogram(std::span<const double> values, const FigureSpec& spec);

struct HeatmapGrid {
    int nx = 0;
    int ny = 0;
    Bounds bounds;
    std::vector<double> sum;
    std::vector<int> count;

    /// Row-major with row 0 at y_min.
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }
    bool empty(int ix, int iy) const { return count[index(ix, iy)] == 0; }
    double mean(int ix, int iy) const { return sum[index(ix, iy)] / count[index(ix, iy)]; }
};

/// Bins (Y, p) into nx x ny cells and averages mean_C per cell.
HeatmapGrid bin_heatmap(std::span<const AgentResult> results, int nx, int ny, const Bounds& bounds);

/// Cells colored by mean C on the ramp below; empty cells neutral gray.
std::string render_heatmap(std::span<const AgentResult> results, const FigureSpec& spec);

struct Rgb {
    int r = 0;
    int g = 0;
    int b = 0;
};

/// Dark blue through teal and green to yellow. Relative luminance rises
/// strictly with t in [0, 1].
Rgb ramp_color(double t);
double relative_luminance(Rgb c);
std::string to_hex(Rgb c);

inline constexpr Rgb kEmptyCell{200, 200, 200};

/// Escapes &, <, >, " and ' for XML text and attributes.
std::string xml_escape(const std::string& s);

struct AnalysisOutputs {
    stats::OlsFit fit;
    stats::Summary summary;
    std::vector<std::filesystem::path> files;
};

/// Regression report plus the four figures, all written under `out_dir`.
AnalysisOutputs analyze(std::span<const AgentResult> results, const std::filesystem::path& out_dir);

inline constexpr const char* kSpoilageFigure = "spoilage_vs_culture.svg";
inline constexpr const char* kYieldFigure = "yield_vs_culture.svg";
inline constexpr const char* kHistogramFigure = "culture_distribution.svg";
inline constexpr const char* kHeatmapFigure = "yield_spoilage_heatmap.svg";
inline constexpr const char* kReportFile = "report.txt";
inline constexpr const char* kRegressionCsv = "regression.csv";

}  // namespace forage::report
