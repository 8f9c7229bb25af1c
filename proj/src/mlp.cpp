#include "fimstar/mlp.hpp"

#include <cmath>
#include <string>

#include "fimstar/kernels.hpp"

namespace fimstar {

namespace {

void check_dims(bool ok, const std::string& what) {
    if (!ok) {
        throw DomainError("mlp: " + what);
    }
}

void apply_activation(Activation act, Batch& b) {
    switch (act) {
        case Activation::relu:
            for (double& v : b.data) {
                v = v > 0.0 ? v : 0.0;
            }
            break;
        case Activation::tanh:
            for (double& v : b.data) {
                v = std::tanh(v);
            }
            break;
        case Activation::identity:
            break;
    }
}

// Multiplies `grad` in place by the activation derivative, expressed
// through the post-activation values.
void scale_by_derivative(Activation act, const Batch& post, Batch& grad) {
    switch (act) {
        case Activation::relu:
            for (std::size_t i = 0; i < grad.data.size(); ++i) {
                if (!(post.data[i] > 0.0)) {
                    grad.data[i] = 0.0;
                }
            }
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < grad.data.size(); ++i) {
                grad.data[i] *= 1.0 - post.data[i] * post.data[i];
            }
            break;
        case Activation::identity:
            break;
    }
}

Activation layer_activation(const Mlp& net, int layer) {
    return layer + 1 == net.layers() ? net.output_activation() : Activation::relu;
}

}  // namespace

Batch hconcat(const Batch& left, const Batch& right) {
    check_dims(left.rows == right.rows, "hconcat row mismatch");
    Batch out(left.rows, left.cols + right.cols);
    for (int r = 0; r < left.rows; ++r) {
        auto dst = out.row(r);
        std::copy(left.row(r).begin(), left.row(r).end(), dst.begin());
        std::copy(right.row(r).begin(), right.row(r).end(), dst.begin() + left.cols);
    }
    return out;
}

Batch columns(const Batch& b, int first, int count) {
    check_dims(first >= 0 && count >= 0 && first + count <= b.cols, "column range out of bounds");
    Batch out(b.rows, count);
    for (int r = 0; r < b.rows; ++r) {
        const auto src = b.row(r);
        std::copy(src.begin() + first, src.begin() + first + count, out.row(r).begin());
    }
    return out;
}

Mlp::Mlp(std::vector<int> layer_dims, Activation output, PrngStream& init)
    : dims_(std::move(layer_dims)), output_(output) {
    layout();
    for (int l = 0; l < layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[static_cast<std::size_t>(l)]));
        const std::size_t begin = weight_offset(l);
        const std::size_t end = l + 1 < layers() ? weight_offset(l + 1) : params_.size();
        for (std::size_t i = begin; i < end; ++i) {
            params_[i] = init.uniform(-bound, bound);
        }
    }
}

Mlp Mlp::zeros(std::vector<int> layer_dims, Activation output) {
    Mlp net;
    net.dims_ = std::move(layer_dims);
    net.output_ = output;
    net.layout();
    return net;
}

void Mlp::layout() {
    check_dims(dims_.size() >= 2, "need at least input and output dimensions");
    for (int d : dims_) {
        check_dims(d >= 1, "layer dimensions must be positive");
    }
    offsets_.clear();
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        offsets_.push_back(total);
        total += static_cast<std::size_t>(dims_[l + 1]) * static_cast<std::size_t>(dims_[l] + 1);
    }
    params_.assign(total, 0.0);
}

std::size_t Mlp::bias_offset(int layer) const {
    const auto l = static_cast<std::size_t>(layer);
    return offsets_[l] + static_cast<std::size_t>(dims_[l + 1]) * static_cast<std::size_t>(dims_[l]);
}

bool Mlp::all_finite() const {
    for (double v : params_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

Batch mlp_forward(const Mlp& net, std::span<const double> params, const Batch& input, MlpTape* tape) {
    check_dims(input.cols == net.input_dim(),
               "input width " + std::to_string(input.cols) + " does not match " + std::to_string(net.input_dim()));
    check_dims(params.size() == net.param_count(), "parameter vector size mismatch");
    const auto& k = kernels::active();
    if (tape != nullptr) {
        tape->act.clear();
        tape->act.push_back(input);
    }
    Batch current = input;
    for (int l = 0; l < net.layers(); ++l) {
        const int in = net.dims()[static_cast<std::size_t>(l)];
        const int out = net.dims()[static_cast<std::size_t>(l) + 1];
        Batch next(input.rows, out);
        k.gemm_nt(static_cast<std::size_t>(input.rows), static_cast<std::size_t>(out), static_cast<std::size_t>(in),
                  current.data.data(), params.data() + net.weight_offset(l), params.data() + net.bias_offset(l),
                  next.data.data());
        apply_activation(layer_activation(net, l), next);
        if (tape != nullptr) {
            tape->act.push_back(next);
        }
        current = std::move(next);
    }
    return current;
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input) {
    Batch b(1, static_cast<int>(input.size()));
    std::copy(input.begin(), input.end(), b.data.begin());
    return mlp_forward(net, b).data;
}

void mlp_backward(const Mlp& net, std::span<const double> params, const MlpTape& tape, const Batch& d_output,
                  std::span<double> grad, Batch* d_input) {
    check_dims(static_cast<int>(tape.act.size()) == net.layers() + 1, "tape does not match network");
    check_dims(d_output.rows == tape.act.front().rows && d_output.cols == net.output_dim(),
               "output gradient shape mismatch");
    check_dims(grad.empty() || grad.size() == net.param_count(), "gradient buffer size mismatch");
    const auto& k = kernels::active();
    const auto rows = static_cast<std::size_t>(d_output.rows);

    Batch delta = d_output;
    scale_by_derivative(net.output_activation(), tape.act.back(), delta);
    for (int l = net.layers() - 1; l >= 0; --l) {
        const auto in = static_cast<std::size_t>(net.dims()[static_cast<std::size_t>(l)]);
        const auto out = static_cast<std::size_t>(net.dims()[static_cast<std::size_t>(l) + 1]);
        const Batch& x = tape.act[static_cast<std::size_t>(l)];
        if (!grad.empty()) {
            // dW += delta^T x ; db += column sums of delta
            k.gemm_acc(out, in, rows, delta.data.data(), 1, out, x.data.data(), grad.data() + net.weight_offset(l));
            double* db = grad.data() + net.bias_offset(l);
            for (std::size_t r = 0; r < rows; ++r) {
                k.axpy(out, 1.0, delta.data.data() + r * out, db);
            }
        }
        if (l == 0 && d_input == nullptr) {
            break;
        }
        Batch dx(d_output.rows, static_cast<int>(in));
        k.gemm_acc(rows, in, out, delta.data.data(), out, 1, params.data() + net.weight_offset(l), dx.data.data());
        if (l == 0) {
            *d_input = std::move(dx);
            break;
        }
        scale_by_derivative(Activation::relu, x, dx);
        delta = std::move(dx);
    }
}

Batch mlp_jvp_params(const Mlp& net, std::span<const double> params, const MlpTape& tape,
                     std::span<const double> direction) {
    check_dims(direction.size() == net.param_count(), "direction size mismatch");
    check_dims(static_cast<int>(tape.act.size()) == net.layers() + 1, "tape does not match network");
    const auto& k = kernels::active();
    const int rows = tape.act.front().rows;
    Batch tangent;  // tangent of the previous layer output; empty for the input
    for (int l = 0; l < net.layers(); ++l) {
        const auto in = static_cast<std::size_t>(net.dims()[static_cast<std::size_t>(l)]);
        const int out = net.dims()[static_cast<std::size_t>(l) + 1];
        const Batch& x = tape.act[static_cast<std::size_t>(l)];
        Batch next(rows, out);
        k.gemm_nt(static_cast<std::size_t>(rows), static_cast<std::size_t>(out), in, x.data.data(),
                  direction.data() + net.weight_offset(l), direction.data() + net.bias_offset(l), next.data.data());
        if (l > 0) {
            Batch through(rows, out);
            k.gemm_nt(static_cast<std::size_t>(rows), static_cast<std::size_t>(out), in, tangent.data.data(),
                      params.data() + net.weight_offset(l), nullptr, through.data.data());
            k.axpy(next.data.size(), 1.0, through.data.data(), next.data.data());
        }
        scale_by_derivative(layer_activation(net, l), tape.act[static_cast<std::size_t>(l) + 1], next);
        tangent = std::move(next);
    }
    return tangent;
}

Batch mlp_input_tangent_grad(const Mlp& net, std::span<const double> params, const MlpTape& tape,
                             const Batch& input_tangent, const Batch& seed, std::span<double> grad) {
    check_dims(net.output_activation() == Activation::identity,
               "input tangent gradient needs an identity output layer");
    check_dims(static_cast<int>(tape.act.size()) == net.layers() + 1, "tape does not match network");
    check_dims(input_tangent.rows == tape.act.front().rows && input_tangent.cols == net.input_dim(),
               "input tangent shape mismatch");
    check_dims(seed.rows == input_tangent.rows && seed.cols == net.output_dim(), "seed shape mismatch");
    check_dims(grad.empty() || grad.size() == net.param_count(), "gradient buffer size mismatch");
    const auto& k = kernels::active();
    const auto rows = static_cast<std::size_t>(input_tangent.rows);

    // Tangents per layer input; ReLU masks come from the primal tape.
    std::vector<Batch> tangents;
    tangents.push_back(input_tangent);
    for (int l = 0; l < net.layers(); ++l) {
        const auto in = static_cast<std::size_t>(net.dims()[static_cast<std::size_t>(l)]);
        const int out = net.dims()[static_cast<std::size_t>(l) + 1];
        Batch next(input_tangent.rows, out);
        k.gemm_nt(rows, static_cast<std::size_t>(out), in, tangents.back().data.data(),
                  params.data() + net.weight_offset(l), nullptr, next.data.data());
        scale_by_derivative(layer_activation(net, l), tape.act[static_cast<std::size_t>(l) + 1], next);
        tangents.push_back(std::move(next));
    }

    if (!grad.empty()) {
        Batch delta = seed;
        for (int l = net.layers() - 1; l >= 0; --l) {
            const auto in = static_cast<std::size_t>(net.dims()[static_cast<std::size_t>(l)]);
            const auto out = static_cast<std::size_t>(net.dims()[static_cast<std::size_t>(l) + 1]);
            k.gemm_acc(out, in, rows, delta.data.data(), 1, out, tangents[static_cast<std::size_t>(l)].data.data(),
                       grad.data() + net.weight_offset(l));
            if (l == 0) {
                break;
            }
            Batch prev(input_tangent.rows, static_cast<int>(in));
            k.gemm_acc(rows, in, out, delta.data.data(), out, 1, params.data() + net.weight_offset(l),
                       prev.data.data());
            scale_by_derivative(Activation::relu, tape.act[static_cast<std::size_t>(l)], prev);
            delta = std::move(prev);
        }
    }
    return tangents.back();
}

std::vector<double> mlp_grad(const Mlp& net, const Batch& input, const std::function<LossEval(const Batch&)>& loss,
                             double* loss_value) {
    MlpTape tape;
    const Batch out = mlp_forward(net, net.params(), input, &tape);
    const LossEval eval = loss(out);
    std::vector<double> grad(net.param_count(), 0.0);
    mlp_backward(net, net.params(), tape, eval.d_output, grad);
    if (loss_value != nullptr) {
        *loss_value = eval.value;
    }
    return grad;
}

}  // namespace fimstar
