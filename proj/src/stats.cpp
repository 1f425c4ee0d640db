#include "forage/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "forage/format.h"

namespace forage::stats {

SingularDesign::SingularDesign(int column, const std::string& name, const std::string& detail)
    : std::runtime_error("singular design at column " + std::to_string(column) + " (" + name + "): " + detail),
      column_(column) {}

namespace {

std::string column_name(const Design& d, int j) {
    return j < static_cast<int>(d.names.size()) ? d.names[static_cast<std::size_t>(j)] : "x" + std::to_string(j);
}

bool has_intercept(const Eigen::MatrixXd& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if ((x.col(j).array() == 1.0).all()) return true;
    }
    return false;
}

}  // namespace

OlsFit ols_fit(const Design& design) {
    const Eigen::MatrixXd& x = design.x;
    const Eigen::VectorXd& y = design.y;
    const auto n = x.rows();
    const auto k = x.cols();
    if (y.size() != n) throw std::invalid_argument("ols_fit: response length does not match design rows");
    if (k < 1 || n <= k) throw std::invalid_argument("ols_fit: need more observations than regressors");
    if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("ols_fit: non-finite entries in design");

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();

    // The column whose diagonal of R is smallest relative to its own norm is
    // the one (nearly) spanned by its predecessors.
    int worst = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < k; ++j) {
        const double col_norm = x.col(j).norm();
        const double ratio = col_norm > 0.0 ? std::abs(r(j, j)) / col_norm : 0.0;
        if (ratio < worst_ratio) {
            worst_ratio = ratio;
            worst = static_cast<int>(j);
        }
    }
    if (!(worst_ratio > 0.0)) throw SingularDesign(worst, column_name(design, worst), "column is linearly dependent");
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues();
    const double cond = sv(0) / sv(k - 1);
    if (!(cond < kMaxCondition)) {
        throw SingularDesign(worst, column_name(design, worst),
                             "condition number " + shortest(cond) + " exceeds " + shortest(kMaxCondition));
    }

    OlsFit fit;
    fit.names.reserve(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) fit.names.push_back(column_name(design, static_cast<int>(j)));
    fit.n = static_cast<int>(n);
    fit.k = static_cast<int>(k);

    const Eigen::VectorXd qty = (qr.householderQ().transpose() * y).head(k);
    fit.coef = r.triangularView<Eigen::Upper>().solve(qty);
    fit.residuals = y - x * fit.coef;
    const double rss = fit.residuals.squaredNorm();
    fit.sigma2 = rss / static_cast<double>(n - k);

    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();
    fit.std_err.resize(k);
    fit.t_stat.resize(k);
    fit.p_value.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        fit.std_err(j) = std::sqrt(fit.sigma2 * xtx_inv(j, j));
        const double b = fit.coef(j);
        const double se = fit.std_err(j);
        double t = 0.0;
        if (se > 0.0) {
            t = b / se;
        } else if (b != 0.0) {
            t = std::copysign(std::numeric_limits<double>::infinity(), b);
        }
        fit.t_stat(j) = t;
        fit.p_value(j) = std::clamp(2.0 * normal_sf(std::abs(t)), 0.0, 1.0);
    }

    const double tss = has_intercept(x) ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
    return fit;
}

Design make_design(std::span<const AgentResult> results) {
    std::vector<const AgentResult*> rows;
    for (const auto& r : results) {
        if (!r.diverged) rows.push_back(&r);
    }
    Design d;
    d.x.resize(static_cast<Eigen::Index>(rows.size()), 3);
    d.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        d.x(ii, 0) = 1.0;
        d.x(ii, 1) = rows[i]->yield;
        d.x(ii, 2) = rows[i]->spoilage;
        d.y(ii) = rows[i]->mean_culture;
    }
    d.names = {"const", "Y (x1)", "p (x2)"};
    return d;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return {0.0, true};
    return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: length mismatch");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) return {0.0, my};
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

Histogram histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    if (!(hi >= lo)) throw std::invalid_argument("histogram: bounds out of order");
    Histogram h{lo, hi, std::vector<int>(static_cast<std::size_t>(bins), 0)};
    const double width = (hi - lo) / bins;
    for (double v : values) {
        int idx = 0;
        if (width > 0.0) idx = std::clamp(static_cast<int>(std::floor((v - lo) / width)), 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(idx)];
    }
    return h;
}

Histogram histogram(std::span<const double> values, int bins) {
    if (values.empty()) return histogram(values, bins, 0.0, 0.0);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return histogram(values, bins, *mn, *mx);
}

Summary summarize(std::span<const AgentResult> results, int bins) {
    std::vector<double> ys, ps, cs;
    Summary s;
    for (const auto& r : results) {
        if (r.diverged) {
            ++s.diverged;
            continue;
        }
        ys.push_back(r.yield);
        ps.push_back(r.spoilage);
        cs.push_back(r.mean_culture);
    }
    if (cs.empty()) throw std::invalid_argument("summarize: no usable results");
    s.n = static_cast<int>(cs.size());
    s.mean_yield = mean(ys);
    s.mean_spoilage = mean(ps);
    s.mean_culture = mean(cs);
    s.sd_yield = sample_sd(ys);
    s.sd_spoilage = sample_sd(ps);
    s.corr_spoilage_culture = pearson(ps, cs);
    s.corr_yield_culture = pearson(ys, cs);
    s.culture_hist = histogram(cs, bins);
    return s;
}

std::string sig4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string format_p_value(double p) {
    if (p < 1e-6) return "<0.000001";
    return sig4(p);
}

std::string format_regression_table(const OlsFit& fit) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %14s %14s %14s\n", "Parameter", "Coefficient", "p-value", "StdErr");
    const std::string header = line;
    const std::string rule(header.size() - 1, '-');
    os << rule << '\n' << header << rule << '\n';
    for (int j = 0; j < fit.k; ++j) {
        std::snprintf(line, sizeof(line), "%-12s %14s %14s %14s\n", fit.names[static_cast<std::size_t>(j)].c_str(),
                      sig4(fit.coef(j)).c_str(), format_p_value(fit.p_value(j)).c_str(), sig4(fit.std_err(j)).c_str());
        os << line;
    }
    os << rule << '\n';
    os << "n = " << fit.n << "   R^2 = " << sig4(fit.r_squared) << "   sigma^2 = " << sig4(fit.sigma2) << '\n';
    return os.str();
}

void write_regression_csv(std::ostream& os, const OlsFit& fit) {
    os << "parameter,coefficient,p_value,std_err,t_stat\n";
    for (int j = 0; j < fit.k; ++j) {
        os << fit.names[static_cast<std::size_t>(j)] << ',' << shortest(fit.coef(j)) << ',' << shortest(fit.p_value(j))
           << ',' << shortest(fit.std_err(j)) << ',' << shortest(fit.t_stat(j)) << '\n';
    }
}

}  // namespace forage::stats
