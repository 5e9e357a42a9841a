#include "sgvf/mlp.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "sgvf/errors.hpp"
#include "sgvf/rng.hpp"

namespace sgvf {

namespace {

// Dot product with four independent accumulators combined as
// (s0 + s1) + (s2 + s3). The fixed split keeps results reproducible while
// breaking the serial dependency chain.
double dot4(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void check_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw ConfigError("layer_sizes needs at least input and output entries");
    for (int s : sizes) {
        if (s < 1) throw ConfigError("layer sizes must be positive, got " + std::to_string(s));
    }
}

} // namespace

double silu(double u) { return u / (1.0 + std::exp(-u)); }

double silu_derivative(double u) {
    const double s = 1.0 / (1.0 + std::exp(-u));
    return s * (1.0 + u * (1.0 - s));
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (int l = 0; l < num_layers(); ++l) {
        n += weights[l].a.size() + biases[l].size();
    }
    return n;
}

bool MlpModel::same_shape(const MlpModel& other) const {
    return layer_sizes == other.layer_sizes;
}

MlpModel mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    check_sizes(layer_sizes);
    MlpModel model;
    model.layer_sizes = layer_sizes;
    Rng rng(seed);
    const int n_layers = static_cast<int>(layer_sizes.size()) - 1;
    model.weights.reserve(n_layers);
    model.biases.reserve(n_layers);
    for (int l = 0; l < n_layers; ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (double& v : w.a) v = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

Matrix mlp_forward(const MlpModel& model, const Matrix& inputs, ForwardCache* cache) {
    if (inputs.cols != model.input_dim()) {
        throw ShapeError("forward: input dim " + std::to_string(inputs.cols) + " != expected " +
                         std::to_string(model.input_dim()));
    }
    for (double v : inputs.a) {
        if (!std::isfinite(v)) throw DomainError("forward: non-finite input");
    }

    const int n_layers = model.num_layers();
    if (cache) {
        cache->input = inputs;
        cache->pre.assign(n_layers, Matrix());
        cache->post.assign(n_layers > 0 ? n_layers - 1 : 0, Matrix());
    }

    Matrix current = inputs;
    for (int l = 0; l < n_layers; ++l) {
        const Matrix& w = model.weights[l];
        const std::vector<double>& b = model.biases[l];
        Matrix next(current.rows, w.rows);
        for (int r = 0; r < current.rows; ++r) {
            const double* in_row = current.row(r);
            double* out_row = next.row(r);
            for (int o = 0; o < w.rows; ++o) {
                out_row[o] = dot4(in_row, w.row(o), w.cols) + b[o];
            }
        }
        if (cache) cache->pre[l] = next;
        if (l + 1 < n_layers) {
            for (double& v : next.a) v = silu(v);
            if (cache) cache->post[l] = next;
        }
        current = std::move(next);
    }
    return current;
}

Gradients mlp_backward(const MlpModel& model, const ForwardCache& cache, const Matrix& output_grads) {
    const int n_layers = model.num_layers();
    if (static_cast<int>(cache.pre.size()) != n_layers || cache.input.cols != model.input_dim()) {
        throw StateError("backward: cache does not match model");
    }
    if (output_grads.rows != cache.input.rows || output_grads.cols != model.output_dim()) {
        throw ShapeError("backward: output gradient shape mismatch");
    }

    Gradients grads;
    grads.weights.resize(n_layers);
    grads.biases.resize(n_layers);
    for (int l = 0; l < n_layers; ++l) {
        grads.weights[l] = Matrix(model.weights[l].rows, model.weights[l].cols);
        grads.biases[l].assign(model.biases[l].size(), 0.0);
    }

    const int batch = cache.input.rows;
    Matrix delta = output_grads; // gradient w.r.t. the layer pre-activation
    for (int l = n_layers - 1; l >= 0; --l) {
        const Matrix& w = model.weights[l];
        const Matrix& layer_in = (l == 0) ? cache.input : cache.post[l - 1];
        if (layer_in.rows != batch || layer_in.cols != w.cols) {
            throw StateError("backward: cache layer shape mismatch");
        }

        Matrix& gw = grads.weights[l];
        std::vector<double>& gb = grads.biases[l];
        for (int r = 0; r < batch; ++r) {
            const double* d_row = delta.row(r);
            const double* in_row = layer_in.row(r);
            for (int o = 0; o < w.rows; ++o) {
                const double d = d_row[o];
                if (d == 0.0) continue;
                double* gw_row = gw.row(o);
                for (int k = 0; k < w.cols; ++k) gw_row[k] += d * in_row[k];
                gb[o] += d;
            }
        }

        if (l == 0) break;

        Matrix prev_delta(batch, w.cols);
        for (int r = 0; r < batch; ++r) {
            const double* d_row = delta.row(r);
            double* p_row = prev_delta.row(r);
            for (int o = 0; o < w.rows; ++o) {
                const double d = d_row[o];
                if (d == 0.0) continue;
                const double* w_row = w.row(o);
                for (int k = 0; k < w.cols; ++k) p_row[k] += d * w_row[k];
            }
            const double* pre_row = cache.pre[l - 1].row(r);
            for (int k = 0; k < w.cols; ++k) p_row[k] *= silu_derivative(pre_row[k]);
        }
        delta = std::move(prev_delta);
    }
    return grads;
}

void accumulate(Gradients& into, const Gradients& from) {
    for (std::size_t l = 0; l < into.weights.size(); ++l) {
        for (std::size_t i = 0; i < into.weights[l].a.size(); ++i)
            into.weights[l].a[i] += from.weights[l].a[i];
        for (std::size_t i = 0; i < into.biases[l].size(); ++i)
            into.biases[l][i] += from.biases[l][i];
    }
}

AdamState adam_init(const MlpModel& model, double lr) {
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
    AdamState state;
    state.lr = lr;
    const int n_layers = model.num_layers();
    state.m_w.reserve(n_layers);
    state.v_w.reserve(n_layers);
    for (int l = 0; l < n_layers; ++l) {
        state.m_w.emplace_back(model.weights[l].rows, model.weights[l].cols);
        state.v_w.emplace_back(model.weights[l].rows, model.weights[l].cols);
        state.m_b.emplace_back(model.biases[l].size(), 0.0);
        state.v_b.emplace_back(model.biases[l].size(), 0.0);
    }
    return state;
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state) {
    if (grads.weights.size() != model.weights.size()) {
        throw ShapeError("adam: gradient layer count mismatch");
    }
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);

    auto update = [&](double& param, double g, double& m, double& v) {
        if (!std::isfinite(g)) {
            throw TrainingError("adam: non-finite gradient at step " + std::to_string(state.step_count));
        }
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        param -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    };

    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Matrix& w = model.weights[l];
        const Matrix& gw = grads.weights[l];
        if (gw.rows != w.rows || gw.cols != w.cols) throw ShapeError("adam: weight shape mismatch");
        for (std::size_t i = 0; i < w.a.size(); ++i) {
            update(w.a[i], gw.a[i], state.m_w[l].a[i], state.v_w[l].a[i]);
        }
        std::vector<double>& b = model.biases[l];
        const std::vector<double>& gb = grads.biases[l];
        if (gb.size() != b.size()) throw ShapeError("adam: bias shape mismatch");
        for (std::size_t i = 0; i < b.size(); ++i) {
            update(b[i], gb[i], state.m_b[l][i], state.v_b[l][i]);
        }
    }
}

} // namespace sgvf
