#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgvf/datasets.hpp"
#include "sgvf/geometry.hpp"
#include "sgvf/mlp.hpp"
#include "sgvf/rng.hpp"
#include "sgvf/score.hpp"

namespace sgvf {

struct TangentTrainConfig {
    int iterations = 10000;
    int batch_size = 512;
    double lr = 1e-3;
    int k_neighbors = 5;
    double neighbor_sigma = 0.05;
    double lambda_unit = 1.0;
    double lambda_orth = 1.0;
    double lambda_dir = 1.0;
    double k_s = 0.2;
    double t_eval = 1.0; // schedule time at which the frozen score is queried
    std::vector<int> layer_sizes = {2, 128, 2};
    std::uint64_t seed = 0;

    void validate(int data_dim) const;
};

struct TangentModel {
    MlpModel net;

    Vec2 eval(const Vec2& x) const;
    std::vector<Vec2> eval_batch(const std::vector<Vec2>& xs) const;
};

// (|s + v| - 1)^2; zero iff the composite lies on the unit sphere
double loss_unit(const Vec2& s, const Vec2& v);

// squared cosine between s and v; zero when either norm is below 1e-12
double loss_orth(const Vec2& s, const Vec2& v);

// 1 - mean cosine between v_x and its neighbor evaluations; degenerate
// cosines (either norm below 1e-12) contribute 0
double loss_dir(const Vec2& v_x, const std::vector<Vec2>& neighbor_vs);

// k Gaussian perturbations of x at scale neighbor_sigma
std::vector<Vec2> sample_neighbors(const Vec2& x, int k, double neighbor_sigma, Rng& rng);

struct TangentLossRecord {
    double unit = 0.0;
    double orth = 0.0;
    double dir = 0.0;
    double total = 0.0;
};

// Batch composite loss (means over xs) and, when grads_out is non-null, its
// exact gradient w.r.t. the tangent network parameters. Gradients flow
// through both the center and the neighbor evaluations; the score inputs
// `s_normalized` are treated as constants. neighbors holds k entries per
// sample, grouped by sample.
TangentLossRecord tangent_composite_loss(const MlpModel& net, const std::vector<Vec2>& xs,
                                         const std::vector<Vec2>& s_normalized,
                                         const std::vector<Vec2>& neighbors, int k,
                                         double lambda_unit, double lambda_orth, double lambda_dir,
                                         Gradients* grads_out);

struct TangentTrainResult {
    TangentModel model;
    std::vector<TangentLossRecord> loss_history;
};

// Fits the tangent field on top of a frozen score model. Batch points are
// drawn the same way as in score training (waypoint + schedule noise), the
// normalized score is evaluated at config.t_eval, and only the tangent
// parameters are updated.
TangentTrainResult train_tangent(const ScoreModel& score_model, const PointCloud& waypoints,
                                 const TangentTrainConfig& config);

void write_tangent_loss_csv(const std::vector<TangentLossRecord>& history, const std::string& path);

} // namespace sgvf
