#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fimstar/numerics.hpp"

namespace fimstar {

/// Row-major batch of vectors: rows are samples.
struct Batch {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Batch() = default;
    Batch(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::span<double> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
    std::span<const double> row(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
};

/// Concatenates two batches column-wise (same row count).
Batch hconcat(const Batch& left, const Batch& right);
/// Columns [first, first + count) of a batch.
Batch columns(const Batch& b, int first, int count);

enum class Activation { relu, tanh, identity };

/// Fully connected network: ReLU hidden layers and a configurable output
/// activation. All weights and biases live in one flat parameter vector;
/// layer l stores its out x in weight matrix row-major, then its bias.
class Mlp {
public:
    Mlp() = default;
    /// Parameters drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    Mlp(std::vector<int> layer_dims, Activation output, PrngStream& init);
    /// Every parameter zero.
    static Mlp zeros(std::vector<int> layer_dims, Activation output);

    const std::vector<int>& dims() const { return dims_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    int layers() const { return static_cast<int>(dims_.size()) - 1; }
    Activation output_activation() const { return output_; }
    std::size_t param_count() const { return params_.size(); }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    std::vector<double>& param_vector() { return params_; }

    std::size_t weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }
    std::size_t bias_offset(int layer) const;

    bool same_shape(const Mlp& other) const { return dims_ == other.dims_ && output_ == other.output_; }
    bool all_finite() const;

private:
    void layout();

    std::vector<int> dims_;
    Activation output_ = Activation::identity;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

/// Post-activation values of every layer, kept for the backward pass.
/// act[0] is the input.
struct MlpTape {
    std::vector<Batch> act;
};

/// Forward pass with parameters `params` (same layout as net.params()).
Batch mlp_forward(const Mlp& net, std::span<const double> params, const Batch& input, MlpTape* tape = nullptr);
inline Batch mlp_forward(const Mlp& net, const Batch& input, MlpTape* tape = nullptr) {
    return mlp_forward(net, net.params(), input, tape);
}
std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input);

/// Reverse pass. d_output is dLoss/dOutput per sample. Parameter gradients
/// are added into `grad` (skipped when empty); dLoss/dInput is written to
/// `d_input` when non-null.
void mlp_backward(const Mlp& net, std::span<const double> params, const MlpTape& tape, const Batch& d_output,
                  std::span<double> grad, Batch* d_input = nullptr);

/// Directional derivative of the outputs along a parameter direction,
/// evaluated at the point recorded in `tape`.
Batch mlp_jvp_params(const Mlp& net, std::span<const double> params, const MlpTape& tape,
                     std::span<const double> direction);

/// Forward tangent of the outputs for an input tangent, plus the gradient
/// of sum_i <seed_i, output_tangent_i> with respect to the parameters
/// (added into `grad`). Exact for piecewise-linear networks: ReLU hidden
/// layers with an identity output; other output activations throw.
Batch mlp_input_tangent_grad(const Mlp& net, std::span<const double> params, const MlpTape& tape,
                             const Batch& input_tangent, const Batch& seed, std::span<double> grad);

/// A loss over a batch of network outputs: its value and dLoss/dOutput.
struct LossEval {
    double value = 0.0;
    Batch d_output;
};

/// Gradient of loss(forward(input)) with respect to all parameters.
std::vector<double> mlp_grad(const Mlp& net, const Batch& input,
                             const std::function<LossEval(const Batch&)>& loss, double* loss_value = nullptr);

}  // namespace fimstar
