#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "forage/results.h"

namespace forage::stats {

/// Raised by ols_fit when the design is singular or too ill-conditioned.
class SingularDesign : public std::runtime_error {
public:
    SingularDesign(int column, const std::string& name, const std::string& detail);
    int column() const { return column_; }

private:
    int column_;
};

struct Design {
    Eigen::MatrixXd x;  // n x k, column 0 conventionally the intercept
    Eigen::VectorXd y;
    std::vector<std::string> names;
};

struct OlsFit {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;
    Eigen::VectorXd t_stat;
    Eigen::VectorXd p_value;  // two-sided, normal approximation
    Eigen::VectorXd residuals;
    double r_squared = 0.0;
    double sigma2 = 0.0;  // RSS / (n - k)
    int n = 0;
    int k = 0;
};

inline constexpr double kMaxCondition = 1e12;

/// Least squares through a Householder QR of X. Standard errors come from
/// sigma^2 (R^T R)^-1.
OlsFit ols_fit(const Design& design);

/// mean_C ~ const + Y + p over the non-diverged rows.
Design make_design(std::span<const AgentResult> results);

/// Upper tail of the standard normal distribution.
double normal_sf(double z);

struct Correlation {
    double r = 0.0;
    bool degenerate = false;  // one side had zero variance; r reported as 0
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// One-regressor least squares; a constant x gives slope 0 through mean(y).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<int> counts;

    double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size()); }
};

/// Equal-width bins over [lo, hi]; the top edge belongs to the last bin and
/// out-of-range values are clamped into the end bins. A zero-width range
/// puts everything in bin 0.
Histogram histogram(std::span<const double> values, int bins, double lo, double hi);
Histogram histogram(std::span<const double> values, int bins);

struct Summary {
    int n = 0;
    int diverged = 0;
    double mean_yield = 0.0;
    double mean_spoilage = 0.0;
    double mean_culture = 0.0;
    double sd_yield = 0.0;
    double sd_spoilage = 0.0;
    Correlation corr_spoilage_culture;
    Correlation corr_yield_culture;
    Histogram culture_hist;
};

/// Statistics over the non-diverged rows.
Summary summarize(std::span<const AgentResult> results, int bins = 20);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

/// Fixed-width table: Parameter | Coefficient | p-value | StdErr, four
/// significant digits.
std::string format_regression_table(const OlsFit& fit);
void write_regression_csv(std::ostream& os, const OlsFit& fit);

/// Four-significant-digit rendering used by the table.
std::string sig4(double v);
/// p-values below 1e-6 print as "<0.000001".
std::string format_p_value(double p);

}  // namespace forage::stats
