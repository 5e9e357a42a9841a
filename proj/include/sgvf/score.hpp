#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sgvf/datasets.hpp"
#include "sgvf/geometry.hpp"
#include "sgvf/mlp.hpp"
#include "sgvf/rng.hpp"
#include "sgvf/schedule.hpp"

namespace sgvf {

struct ScoreTrainConfig {
    int iterations = 10000;
    int batch_size = 512;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    std::vector<int> layer_sizes = {3, 64, 64, 64, 64, 2};

    void validate(int data_dim) const;
};

// Network approximating the score of the noise-smoothed waypoint
// distribution; takes (x, t) with t appended as a raw third input.
struct ScoreModel {
    MlpModel net;
    NoiseSchedule schedule;

    Vec2 eval(const Vec2& x, double t) const;
    // one shared t for the whole batch; points laid out as rows
    std::vector<Vec2> eval_batch(const std::vector<Vec2>& xs, double t) const;
};

// x = z + sigma(t) * eps
Vec2 perturb(const Vec2& z, double t, const Vec2& eps, const NoiseSchedule& schedule);

// Conditional score of the Gaussian perturbation kernel: -eps / sigma(t).
Vec2 dsm_target(const Vec2& eps, double t, const NoiseSchedule& schedule);

struct ScoreTrainResult {
    ScoreModel model;
    std::vector<double> loss_history; // batch MSE per iteration
};

// Denoising regression: each iteration draws (z, t, eps), perturbs, and fits
// the network to the conditional score target. Deterministic per seed.
ScoreTrainResult train_score(const PointCloud& waypoints, const ScoreTrainConfig& config,
                             const NoiseSchedule& schedule);

// Exact score of the equal-weight Gaussian mixture centered on the
// waypoints; the minimizer of the denoising objective at fixed sigma.
Vec2 oracle_mixture_score(const std::vector<Vec2>& waypoints, double sigma, const Vec2& x);

// log of the mixture density up to a constant (log-sum-exp of the kernels)
double mixture_log_density(const std::vector<Vec2>& waypoints, double sigma, const Vec2& x);

// Direction-preserving magnitude squash: tanh(k_s * |S|) * S / |S|, zero
// below the 1e-12 norm floor.
Vec2 normalize_score(const Vec2& score, double k_s);

// Draw n points from the mixture: uniform waypoint plus N(0, sigma^2 I).
std::vector<Vec2> sample_mixture(const std::vector<Vec2>& waypoints, double sigma, int n, Rng& rng);

struct SteinResidual {
    Mat2 residual;    // Monte-Carlo estimate of E[S f^T] + E[grad f]
    Mat2 std_error;   // per-entry standard error of the estimate
    double frobenius; // of the residual
    double frobenius_std_error; // of the std-error matrix
};

// Integration-by-parts check of a candidate score against samples of p,
// using the compact bump field f(x) = exp(-1/(1-r^2)) (x - c), r = |x-c|/R.
// The residual vanishes in expectation iff the candidate is the score of p.
SteinResidual stein_residual(const std::function<Vec2(const Vec2&)>& score_fn,
                             const std::vector<Vec2>& samples, const Vec2& bump_center,
                             double bump_radius);

void write_score_loss_csv(const std::vector<double>& history, const std::string& path);

} // namespace sgvf
