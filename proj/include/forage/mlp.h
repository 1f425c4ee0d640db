#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "forage/errors.h"
#include "forage/random.h"

namespace forage {

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Parameter-shaped container: one matrix and one vector per layer.
struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    double squared_norm() const;
    double norm() const;
    bool all_finite() const;
    Gradients& operator+=(const Gradients& other);
    Gradients& operator*=(double s);
};

/// Activations saved by forward() for the matching backward() call.
struct ForwardCache {
    const void* owner = nullptr;
    std::uint64_t version = 0;
    std::vector<Eigen::VectorXd> inputs;  // input to each layer
    std::vector<Eigen::VectorXd> pre;     // pre-activation of each layer
    Eigen::VectorXd output;
};

/// Fully connected network: rectified hidden layers, affine output.
class Mlp {
public:
    Mlp() = default;

    /// All-zero network with the given layer widths, input first.
    explicit Mlp(std::vector<int> sizes);

    /// Orthogonal weights with gain sqrt(2) on hidden layers and
    /// `output_gain` on the last; zero biases.
    static Mlp orthogonal(std::vector<int> sizes, double output_gain, Rng& rng);

    /// in -> 64 -> 64 -> out, the shape used for both actor and critic.
    static Mlp orthogonal(int in, int out, double output_gain, Rng& rng);

    const std::vector<int>& sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    std::size_t num_layers() const { return weights_.size(); }
    std::size_t num_parameters() const;

    Eigen::MatrixXd& weight(std::size_t layer) { return weights_.at(layer); }
    const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_.at(layer); }
    Eigen::VectorXd& bias(std::size_t layer) { return biases_.at(layer); }
    const Eigen::VectorXd& bias(std::size_t layer) const { return biases_.at(layer); }

    Eigen::VectorXd forward(std::span<const double> input, ForwardCache& cache) const;
    Eigen::VectorXd forward(std::span<const double> input) const;

    Gradients backward(const ForwardCache& cache, const Eigen::VectorXd& d_output) const;

    Gradients zero_gradients() const;

    void adam_step(const Gradients& grads, const AdamConfig& cfg);
    std::int64_t adam_steps() const { return step_; }

    /// Flat parameter view in layer order (W row-major, then b), used by
    /// gradient checks and snapshots.
    std::vector<double> flat_parameters() const;
    void set_flat_parameters(std::span<const double> flat);

    /// Marks parameters as changed so outstanding caches become stale.
    void touch() { ++version_; }

    void save(std::ostream& os) const;
    static Mlp load(std::istream& is);

    bool operator==(const Mlp& other) const;

private:
    std::vector<int> sizes_;
    std::vector<Eigen::MatrixXd> weights_;  // out x in
    std::vector<Eigen::VectorXd> biases_;
    std::vector<Eigen::MatrixXd> m_w_, v_w_;
    std::vector<Eigen::VectorXd> m_b_, v_b_;
    std::int64_t step_ = 0;
    std::uint64_t version_ = 0;
};

inline constexpr int kHiddenWidth = 64;

/// Max-subtracted softmax. Throws DivergenceError on non-finite logits.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Scales every gradient by max_norm / ||g|| when the global norm exceeds
/// max_norm. Returns the norm before clipping.
double clip_global_norm(Gradients& grads, double max_norm);

/// Orthogonal (rows x cols) matrix times gain, from a Gaussian draw.
Eigen::MatrixXd orthogonal_matrix(int rows, int cols, double gain, Rng& rng);

}  // namespace forage
