#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sgvf/mlp.hpp"

namespace sgvf::testutil {

// Fresh per-test scratch directory under the working directory.
inline std::filesystem::path tmp_dir(const std::string& name) {
    std::filesystem::path dir = std::filesystem::path("test_tmp") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Central finite differences of a scalar loss over every model parameter.
inline Gradients finite_difference_grads(MlpModel model,
                                         const std::function<double(const MlpModel&)>& loss,
                                         double h = 1e-4) {
    Gradients grads;
    grads.weights.reserve(model.weights.size());
    grads.biases.reserve(model.biases.size());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        grads.weights.emplace_back(model.weights[l].rows, model.weights[l].cols);
        grads.biases.emplace_back(model.biases[l].size(), 0.0);
    }
    auto central = [&](double& param) {
        const double saved = param;
        param = saved + h;
        const double up = loss(model);
        param = saved - h;
        const double down = loss(model);
        param = saved;
        return (up - down) / (2.0 * h);
    };
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        for (std::size_t i = 0; i < model.weights[l].a.size(); ++i) {
            grads.weights[l].a[i] = central(model.weights[l].a[i]);
        }
        for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
            grads.biases[l][i] = central(model.biases[l][i]);
        }
    }
    return grads;
}

// Worst relative error between analytic and finite-difference gradients,
// restricted to entries whose magnitude exceeds `floor`.
inline double max_relative_grad_error(const Gradients& analytic, const Gradients& numeric,
                                      double floor = 1e-6) {
    double worst = 0.0;
    auto compare = [&](double a, double n) {
        if (std::abs(a) <= floor && std::abs(n) <= floor) return;
        const double rel = std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
        worst = std::max(worst, rel);
    };
    for (std::size_t l = 0; l < analytic.weights.size(); ++l) {
        for (std::size_t i = 0; i < analytic.weights[l].a.size(); ++i) {
            compare(analytic.weights[l].a[i], numeric.weights[l].a[i]);
        }
        for (std::size_t i = 0; i < analytic.biases[l].size(); ++i) {
            compare(analytic.biases[l][i], numeric.biases[l][i]);
        }
    }
    return worst;
}

inline bool models_identical(const MlpModel& a, const MlpModel& b) {
    if (a.layer_sizes != b.layer_sizes) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        if (a.weights[l].a != b.weights[l].a) return false;
        if (a.biases[l] != b.biases[l]) return false;
    }
    return true;
}

} // namespace sgvf::testutil
