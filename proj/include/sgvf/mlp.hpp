#pragma once

#include <cstdint>
#include <vector>

namespace sgvf {

// Dense row-major matrix. Rows index samples (or output units for weights).
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// Fully-connected SiLU network. weights[l] has shape layer_sizes[l+1] x
// layer_sizes[l]; hidden layers apply SiLU, the output layer is affine.
struct MlpModel {
    std::vector<int> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    int num_layers() const { return static_cast<int>(weights.size()); }
    std::size_t parameter_count() const;
    bool same_shape(const MlpModel& other) const;
};

double silu(double u);
double silu_derivative(double u);

// Uniform init in [-a, a] with a = sqrt(6 / (fan_in + fan_out)); biases zero.
// Identical (layer_sizes, seed) pairs produce identical parameters.
MlpModel mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Per-layer activations retained for the backward pass.
struct ForwardCache {
    Matrix input;                 // copy of the batch fed to the first layer
    std::vector<Matrix> pre;      // pre-activation per layer
    std::vector<Matrix> post;     // post-activation per hidden layer
};

// Batch forward: inputs is B x input_dim, result is B x output_dim. Dot
// products accumulate with a fixed 4-way split (see mlp.cpp); reruns of the
// same binary are bit-identical.
Matrix mlp_forward(const MlpModel& model, const Matrix& inputs, ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// Reverse-mode gradients of a scalar loss whose gradient w.r.t. the network
// output is `output_grads` (B x output_dim). `cache` must come from the
// matching mlp_forward call on the same model.
Gradients mlp_backward(const MlpModel& model, const ForwardCache& cache, const Matrix& output_grads);

void accumulate(Gradients& into, const Gradients& from);

struct AdamState {
    std::vector<Matrix> m_w;
    std::vector<Matrix> v_w;
    std::vector<std::vector<double>> m_b;
    std::vector<std::vector<double>> v_b;
    std::int64_t step_count = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState adam_init(const MlpModel& model, double lr);

// Bias-corrected Adam update. Throws TrainingError on non-finite gradients.
void adam_step(MlpModel& model, const Gradients& grads, AdamState& state);

} // namespace sgvf
