#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgvf/datasets.hpp"
#include "sgvf/errors.hpp"
#include "sgvf/tangent.hpp"
#include "test_util.hpp"

using namespace sgvf;

TEST_CASE("unit-length loss") {
    CHECK(loss_unit({0.6, 0.0}, {0.0, 0.8}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(loss_unit({0.0, 0.0}, {0.0, 0.0}) == 1.0);
    CHECK(loss_unit({1.0, 0.0}, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("orthogonality loss") {
    CHECK(loss_orth({1.0, 0.0}, {0.0, 1.0}) == 0.0);
    CHECK(loss_orth({1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(loss_orth({1.0, 0.0}, {1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(loss_orth({0.0, 0.0}, {1.0, 1.0}) == 0.0); // degenerate norm guard
}

TEST_CASE("directional consistency loss") {
    const Vec2 v{1.0, 1.0};
    CHECK(loss_dir(v, {v * 2.0, v * 0.5, v * 7.0}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(loss_dir({1.0, 0.0}, {{-3.0, 0.0}}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(loss_dir({1.0, 0.0}, {{2.0, 0.0}, {0.0, 1.0}}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(loss_dir({1.0, 0.0}, {{0.0, 0.0}}) == doctest::Approx(1.0).epsilon(1e-12)); // guard
    CHECK_THROWS_AS(loss_dir({1.0, 0.0}, {}), ConfigError);
}

TEST_CASE("loss values are rotation equivariant") {
    Rng rng(71);
    for (int trial = 0; trial < 2000; ++trial) {
        const Vec2 s{rng.normal(), rng.normal()};
        const Vec2 v{rng.normal(), rng.normal()};
        const Vec2 w1{rng.normal(), rng.normal()};
        const Vec2 w2{rng.normal(), rng.normal()};
        const double angle = rng.uniform(0.0, 6.2831853);
        const double c = std::cos(angle);
        const double sn = std::sin(angle);
        auto rotate = [&](const Vec2& p) { return Vec2{c * p.x - sn * p.y, sn * p.x + c * p.y}; };

        CHECK(loss_unit(rotate(s), rotate(v)) ==
              doctest::Approx(loss_unit(s, v)).epsilon(1e-12));
        CHECK(loss_orth(rotate(s), rotate(v)) ==
              doctest::Approx(loss_orth(s, v)).epsilon(1e-12));
        CHECK(loss_dir(rotate(v), {rotate(w1), rotate(w2)}) ==
              doctest::Approx(loss_dir(v, {w1, w2})).epsilon(1e-12));
    }
}

TEST_CASE("neighbor sampler statistics") {
    Rng rng(5);
    const std::vector<Vec2> five = sample_neighbors({2.0, -1.0}, 5, 0.05, rng);
    CHECK(five.size() == 5);

    Rng rng2(6);
    const std::vector<Vec2> tight = sample_neighbors({2.0, -1.0}, 100, 1e-9, rng2);
    for (const Vec2& p : tight) {
        CHECK(p.x == doctest::Approx(2.0).epsilon(1e-7));
        CHECK(p.y == doctest::Approx(-1.0).epsilon(1e-7));
    }

    Rng rng3(8);
    const int n = 100000;
    Vec2 mean{0.0, 0.0};
    for (const Vec2& p : sample_neighbors({0.0, 0.0}, n, 0.05, rng3)) mean += p;
    mean = mean / n;
    const double tol = 3.0 * 0.05 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean.x) <= tol);
    CHECK(std::abs(mean.y) <= tol);
}

TEST_CASE("composite loss gradient matches finite differences") {
    const MlpModel net = mlp_init({2, 8, 2}, 31);
    Rng rng(32);
    const int batch = 3;
    const int k = 2;
    std::vector<Vec2> xs, s_vals, neighbors;
    for (int b = 0; b < batch; ++b) {
        const Vec2 x{rng.normal(), rng.normal()};
        xs.push_back(x);
        s_vals.push_back({0.4 * rng.normal(), 0.4 * rng.normal()});
        for (int j = 0; j < k; ++j) {
            neighbors.push_back({x.x + 0.05 * rng.normal(), x.y + 0.05 * rng.normal()});
        }
    }

    Gradients analytic;
    tangent_composite_loss(net, xs, s_vals, neighbors, k, 1.0, 1.0, 1.0, &analytic);

    auto loss = [&](const MlpModel& m) {
        return tangent_composite_loss(m, xs, s_vals, neighbors, k, 1.0, 1.0, 1.0, nullptr).total;
    };
    const Gradients numeric = testutil::finite_difference_grads(net, loss, 1e-5);
    CHECK(testutil::max_relative_grad_error(analytic, numeric) <= 1e-4);
}

TEST_CASE("composite loss gradient handles disabled terms") {
    const MlpModel net = mlp_init({2, 8, 2}, 77);
    Rng rng(78);
    std::vector<Vec2> xs{{0.2, -0.1}}, s_vals{{0.5, 0.1}}, neighbors{{0.22, -0.13}};
    for (double lu : {0.0, 1.0}) {
        for (double lo : {0.0, 1.0}) {
            for (double ld : {0.0, 1.0}) {
                if (lu == 0.0 && lo == 0.0 && ld == 0.0) continue;
                Gradients analytic;
                tangent_composite_loss(net, xs, s_vals, neighbors, 1, lu, lo, ld, &analytic);
                auto loss = [&](const MlpModel& m) {
                    return tangent_composite_loss(m, xs, s_vals, neighbors, 1, lu, lo, ld, nullptr)
                        .total;
                };
                const Gradients numeric = testutil::finite_difference_grads(net, loss, 1e-5);
                CHECK(testutil::max_relative_grad_error(analytic, numeric) <= 1e-4);
            }
        }
    }
}

namespace {

struct TrainedPair {
    ScoreTrainResult score;
    TangentTrainResult tangent;
    PointCloud holdout;
};

// small circle pipeline shared by the geometry checks below
TrainedPair train_small_circle(double lambda_unit, double lambda_orth, double lambda_dir) {
    PointCloud cloud = gen_circle({0.0, 0.0}, 1.0, 64, 0.01, 2);
    NoiseSchedule sched{0.01, 0.5};
    ScoreTrainConfig score_cfg;
    score_cfg.iterations = 2500;
    score_cfg.batch_size = 128;
    score_cfg.layer_sizes = {3, 32, 32, 2};
    score_cfg.seed = 3;

    TangentTrainConfig tan_cfg;
    tan_cfg.iterations = 2500;
    tan_cfg.batch_size = 128;
    tan_cfg.layer_sizes = {2, 64, 2};
    tan_cfg.seed = 4;
    tan_cfg.lambda_unit = lambda_unit;
    tan_cfg.lambda_orth = lambda_orth;
    tan_cfg.lambda_dir = lambda_dir;

    TrainedPair out;
    out.score = train_score(cloud, score_cfg, sched);
    out.tangent = train_tangent(out.score.model, cloud, tan_cfg);
    out.holdout = gen_circle({0.0, 0.0}, 1.0, 96, 0.01, 99);
    return out;
}

} // namespace

TEST_CASE("tangent training reaches near-orthogonal unit composition on a circle") {
    const TrainedPair pair = train_small_circle(1.0, 1.0, 1.0);

    double orth_sum = 0.0;
    double unit_dev_sum = 0.0;
    for (const Vec2& x : pair.holdout.points) {
        const Vec2 s = normalize_score(pair.score.model.eval(x, 1.0), 0.2);
        const Vec2 v = pair.tangent.model.eval(x);
        orth_sum += loss_orth(s, v);
        unit_dev_sum += std::abs((s + v).norm() - 1.0);
    }
    const double n = static_cast<double>(pair.holdout.size());
    CHECK(orth_sum / n < 0.1);
    CHECK(unit_dev_sum / n < 0.1);

    // per-term history is recorded each iteration
    REQUIRE(pair.tangent.loss_history.size() == 2500);
    const TangentLossRecord last = pair.tangent.loss_history.back();
    CHECK(last.total ==
          doctest::Approx(last.unit + last.orth + last.dir).epsilon(1e-12));
}

TEST_CASE("tangent training leaves the score model untouched") {
    PointCloud cloud = gen_circle({0.0, 0.0}, 1.0, 32, 0.01, 8);
    NoiseSchedule sched{0.01, 0.5};
    ScoreTrainConfig score_cfg;
    score_cfg.iterations = 50;
    score_cfg.batch_size = 32;
    score_cfg.layer_sizes = {3, 8, 2};
    score_cfg.seed = 5;
    const ScoreTrainResult score = train_score(cloud, score_cfg, sched);
    const MlpModel frozen = score.model.net;

    TangentTrainConfig tan_cfg;
    tan_cfg.iterations = 50;
    tan_cfg.batch_size = 32;
    tan_cfg.layer_sizes = {2, 8, 2};
    tan_cfg.seed = 6;
    const TangentTrainResult tangent = train_tangent(score.model, cloud, tan_cfg);
    CHECK(testutil::models_identical(score.model.net, frozen));
    CHECK(tangent.loss_history.size() == 50);
}

TEST_CASE("tangent training accepts single-term ablations") {
    PointCloud cloud = gen_circle({0.0, 0.0}, 1.0, 32, 0.01, 8);
    NoiseSchedule sched{0.01, 0.5};
    ScoreTrainConfig score_cfg;
    score_cfg.iterations = 40;
    score_cfg.batch_size = 32;
    score_cfg.layer_sizes = {3, 8, 2};
    score_cfg.seed = 5;
    const ScoreTrainResult score = train_score(cloud, score_cfg, sched);

    TangentTrainConfig tan_cfg;
    tan_cfg.iterations = 40;
    tan_cfg.batch_size = 32;
    tan_cfg.layer_sizes = {2, 8, 2};
    tan_cfg.seed = 6;
    tan_cfg.lambda_dir = 0.0;
    const TangentTrainResult result = train_tangent(score.model, cloud, tan_cfg);
    CHECK(result.loss_history.size() == 40);
    for (const TangentLossRecord& rec : result.loss_history) {
        CHECK(rec.unit >= 0.0);
        CHECK(rec.orth >= 0.0);
        CHECK(rec.orth <= 1.0);
        CHECK(rec.dir >= 0.0);
        CHECK(rec.dir <= 2.0);
    }

    TangentTrainConfig bad = tan_cfg;
    bad.lambda_unit = 0.0;
    bad.lambda_orth = 0.0;
    CHECK_THROWS_AS(train_tangent(score.model, cloud, bad), ConfigError);
}

TEST_CASE("tangent training is deterministic per seed") {
    PointCloud cloud = gen_circle({0.0, 0.0}, 1.0, 16, 0.01, 8);
    NoiseSchedule sched{0.01, 0.5};
    ScoreTrainConfig score_cfg;
    score_cfg.iterations = 20;
    score_cfg.batch_size = 16;
    score_cfg.layer_sizes = {3, 8, 2};
    score_cfg.seed = 5;
    const ScoreTrainResult score = train_score(cloud, score_cfg, sched);

    TangentTrainConfig tan_cfg;
    tan_cfg.iterations = 20;
    tan_cfg.batch_size = 16;
    tan_cfg.layer_sizes = {2, 8, 2};
    tan_cfg.seed = 9;
    const TangentTrainResult a = train_tangent(score.model, cloud, tan_cfg);
    const TangentTrainResult b = train_tangent(score.model, cloud, tan_cfg);
    CHECK(testutil::models_identical(a.model.net, b.model.net));
}
