#include "forage/mlp.h"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace forage {

namespace {

// Box-Muller on our own uniform stream; std::normal_distribution is not
// specified bit-for-bit across standard libraries.
double standard_normal(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void check_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
    for (int s : sizes) {
        if (s < 1) throw std::invalid_argument("Mlp layer sizes must be >= 1");
    }
}

}  // namespace

double Gradients::squared_norm() const {
    double s = 0.0;
    for (const auto& w : weights) s += w.squaredNorm();
    for (const auto& b : biases) s += b.squaredNorm();
    return s;
}

double Gradients::norm() const { return std::sqrt(squared_norm()); }

bool Gradients::all_finite() const {
    for (const auto& w : weights) {
        if (!w.allFinite()) return false;
    }
    for (const auto& b : biases) {
        if (!b.allFinite()) return false;
    }
    return true;
}

Gradients& Gradients::operator+=(const Gradients& other) {
    if (other.weights.size() != weights.size()) throw ContractError("gradient shape mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += other.weights[l];
        biases[l] += other.biases[l];
    }
    return *this;
}

Gradients& Gradients::operator*=(double s) {
    for (auto& w : weights) w *= s;
    for (auto& b : biases) b *= s;
    return *this;
}

Eigen::MatrixXd orthogonal_matrix(int rows, int cols, double gain, Rng& rng) {
    const bool tall = rows >= cols;
    const int r = tall ? rows : cols;
    const int c = tall ? cols : rows;
    Eigen::MatrixXd a(r, c);
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < r; ++i) a(i, j) = standard_normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, c);
    const Eigen::MatrixXd rr = qr.matrixQR().topLeftCorner(c, c).triangularView<Eigen::Upper>();
    // Sign fix makes the draw uniform over the orthogonal group.
    for (int j = 0; j < c; ++j) {
        if (rr(j, j) < 0.0) q.col(j) *= -1.0;
    }
    q *= gain;
    if (tall) return q;
    return q.transpose();
}

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    check_sizes(sizes_);
    const std::size_t layers = sizes_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        weights_.push_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
        biases_.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
    }
    m_w_ = weights_;
    v_w_ = weights_;
    m_b_ = biases_;
    v_b_ = biases_;
}

Mlp Mlp::orthogonal(std::vector<int> sizes, double output_gain, Rng& rng) {
    Mlp net(std::move(sizes));
    const std::size_t layers = net.num_layers();
    for (std::size_t l = 0; l < layers; ++l) {
        const double gain = (l + 1 == layers) ? output_gain : std::numbers::sqrt2;
        net.weights_[l] = orthogonal_matrix(net.sizes_[l + 1], net.sizes_[l], gain, rng);
    }
    return net;
}

Mlp Mlp::orthogonal(int in, int out, double output_gain, Rng& rng) {
    return orthogonal({in, kHiddenWidth, kHiddenWidth, out}, output_gain, rng);
}

std::size_t Mlp::num_parameters() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

Eigen::VectorXd Mlp::forward(std::span<const double> input, ForwardCache& cache) const {
    if (static_cast<int>(input.size()) != input_size()) {
        throw ContractError("Mlp::forward: expected input of size " + std::to_string(input_size()) +
                            ", got " + std::to_string(input.size()));
    }
    cache.owner = this;
    cache.version = version_;
    cache.inputs.resize(weights_.size());
    cache.pre.resize(weights_.size());
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        cache.inputs[l] = x;
        cache.pre[l] = weights_[l] * x + biases_[l];
        x = (l + 1 == weights_.size()) ? cache.pre[l] : Eigen::VectorXd(cache.pre[l].cwiseMax(0.0));
    }
    cache.output = x;
    return x;
}

Eigen::VectorXd Mlp::forward(std::span<const double> input) const {
    ForwardCache cache;
    return forward(input, cache);
}

Gradients Mlp::backward(const ForwardCache& cache, const Eigen::VectorXd& d_output) const {
    if (cache.owner != this || cache.version != version_ || cache.pre.size() != weights_.size()) {
        throw ContractError("Mlp::backward: cache does not belong to the current parameters");
    }
    if (d_output.size() != output_size()) throw ContractError("Mlp::backward: d_output size mismatch");
    Gradients g = zero_gradients();
    Eigen::VectorXd delta = d_output;
    for (std::size_t i = weights_.size(); i-- > 0;) {
        if (i + 1 != weights_.size()) {
            delta = delta.cwiseProduct((cache.pre[i].array() > 0.0).cast<double>().matrix());
        }
        g.weights[i].noalias() = delta * cache.inputs[i].transpose();
        g.biases[i] = delta;
        if (i > 0) delta = weights_[i].transpose() * delta;
    }
    return g;
}

Gradients Mlp::zero_gradients() const {
    Gradients g;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
    }
    return g;
}

void Mlp::adam_step(const Gradients& grads, const AdamConfig& cfg) {
    if (grads.weights.size() != weights_.size()) throw ContractError("adam_step: gradient shape mismatch");
    ++step_;
    const double t = static_cast<double>(step_);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        if (g.rows() != param.rows() || g.cols() != param.cols()) {
            throw ContractError("adam_step: gradient shape mismatch");
        }
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
        param.array() -= cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
    };
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        update(weights_[l], m_w_[l], v_w_[l], grads.weights[l]);
        update(biases_[l], m_b_[l], v_b_[l], grads.biases[l]);
    }
    touch();
}

std::vector<double> Mlp::flat_parameters() const {
    std::vector<double> flat;
    flat.reserve(num_parameters());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const auto& w = weights_[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        }
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) flat.push_back(biases_[l](r));
    }
    return flat;
}

void Mlp::set_flat_parameters(std::span<const double> flat) {
    if (flat.size() != num_parameters()) throw ContractError("set_flat_parameters: size mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        auto& w = weights_[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[k++];
        }
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = flat[k++];
    }
    touch();
}

// Snapshot format (text):
//   line 1: "forage-mlp 1"
//   line 2: number of sizes, then the sizes
//   then every parameter in flat_parameters() order, one per line, %.17g
void Mlp::save(std::ostream& os) const {
    os << "forage-mlp 1\n" << sizes_.size();
    for (int s : sizes_) os << ' ' << s;
    os << '\n' << std::setprecision(17);
    for (double v : flat_parameters()) os << v << '\n';
}

Mlp Mlp::load(std::istream& is) {
    std::string magic;
    int version = 0;
    std::size_t count = 0;
    if (!(is >> magic >> version >> count) || magic != "forage-mlp" || version != 1) {
        throw std::runtime_error("Mlp::load: bad snapshot header");
    }
    std::vector<int> sizes(count);
    for (auto& s : sizes) {
        if (!(is >> s)) throw std::runtime_error("Mlp::load: truncated layer sizes");
    }
    Mlp net(sizes);
    std::vector<double> flat(net.num_parameters());
    for (auto& v : flat) {
        if (!(is >> v)) throw std::runtime_error("Mlp::load: truncated parameters");
    }
    net.set_flat_parameters(flat);
    return net;
}

bool Mlp::operator==(const Mlp& other) const {
    return sizes_ == other.sizes_ && flat_parameters() == other.flat_parameters();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    if (!logits.allFinite()) throw DivergenceError("softmax: non-finite logits");
    const double mx = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - mx).exp().matrix();
    return e / e.sum();
}

double clip_global_norm(Gradients& grads, double max_norm) {
    if (!(max_norm > 0.0)) throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
    const double n = grads.norm();
    if (n > max_norm) grads *= max_norm / n;
    return n;
}

}  // namespace forage
