#include "sgvf/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sgvf/csv.hpp"
#include "sgvf/errors.hpp"

namespace sgvf {

void ScoreTrainConfig::validate(int data_dim) const {
    if (iterations < 1) throw ConfigError("score.iterations must be positive");
    if (batch_size < 1) throw ConfigError("score.batch_size must be positive");
    if (!(lr > 0.0)) throw ConfigError("score.lr must be positive");
    if (layer_sizes.size() < 2) throw ConfigError("score.layer_sizes too short");
    if (layer_sizes.front() != data_dim + 1) {
        throw ConfigError("score network input width must be data dim + 1 (time coordinate)");
    }
    if (layer_sizes.back() != data_dim) {
        throw ConfigError("score network output width must equal the data dim");
    }
}

Vec2 ScoreModel::eval(const Vec2& x, double t) const {
    Matrix in(1, 3);
    in.at(0, 0) = x.x;
    in.at(0, 1) = x.y;
    in.at(0, 2) = t;
    const Matrix out = mlp_forward(net, in);
    return {out.at(0, 0), out.at(0, 1)};
}

std::vector<Vec2> ScoreModel::eval_batch(const std::vector<Vec2>& xs, double t) const {
    Matrix in(static_cast<int>(xs.size()), 3);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        in.at(static_cast<int>(i), 0) = xs[i].x;
        in.at(static_cast<int>(i), 1) = xs[i].y;
        in.at(static_cast<int>(i), 2) = t;
    }
    const Matrix out = mlp_forward(net, in);
    std::vector<Vec2> result(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        result[i] = {out.at(static_cast<int>(i), 0), out.at(static_cast<int>(i), 1)};
    }
    return result;
}

Vec2 perturb(const Vec2& z, double t, const Vec2& eps, const NoiseSchedule& schedule) {
    return z + schedule.sigma(t) * eps;
}

Vec2 dsm_target(const Vec2& eps, double t, const NoiseSchedule& schedule) {
    const double s = schedule.sigma(t);
    if (s < 1e-12) throw NumericError("dsm target undefined: sigma(t) below 1e-12");
    return eps * (-1.0 / s);
}

ScoreTrainResult train_score(const PointCloud& waypoints, const ScoreTrainConfig& config,
                             const NoiseSchedule& schedule) {
    waypoints.validate();
    schedule.validate();
    config.validate(2);

    ScoreTrainResult result;
    result.model.net = mlp_init(config.layer_sizes, config.seed);
    result.model.schedule = schedule;
    result.loss_history.reserve(static_cast<std::size_t>(config.iterations));

    AdamState opt = adam_init(result.model.net, config.lr);
    Rng rng(derive_seed(config.seed, 0x5c17));

    const int batch = config.batch_size;
    const std::size_t n_points = waypoints.size();
    Matrix inputs(batch, 3);
    Matrix targets(batch, 2);

    for (int iter = 0; iter < config.iterations; ++iter) {
        for (int b = 0; b < batch; ++b) {
            const Vec2& z = waypoints.points[rng.index(n_points)];
            const double t = rng.uniform();
            const Vec2 eps{rng.normal(), rng.normal()};
            const Vec2 x = perturb(z, t, eps, schedule);
            const Vec2 target = dsm_target(eps, t, schedule);
            inputs.at(b, 0) = x.x;
            inputs.at(b, 1) = x.y;
            inputs.at(b, 2) = t;
            targets.at(b, 0) = target.x;
            targets.at(b, 1) = target.y;
        }

        ForwardCache cache;
        const Matrix pred = mlp_forward(result.model.net, inputs, &cache);

        Matrix out_grad(batch, 2);
        double loss = 0.0;
        for (int b = 0; b < batch; ++b) {
            const double rx = pred.at(b, 0) - targets.at(b, 0);
            const double ry = pred.at(b, 1) - targets.at(b, 1);
            loss += rx * rx + ry * ry;
            out_grad.at(b, 0) = 2.0 * rx / batch;
            out_grad.at(b, 1) = 2.0 * ry / batch;
        }
        loss /= batch;
        if (!std::isfinite(loss)) {
            throw TrainingError("score training diverged at iteration " + std::to_string(iter));
        }
        result.loss_history.push_back(loss);

        const Gradients grads = mlp_backward(result.model.net, cache, out_grad);
        adam_step(result.model.net, grads, opt);
    }
    return result;
}

Vec2 oracle_mixture_score(const std::vector<Vec2>& waypoints, double sigma, const Vec2& x) {
    if (waypoints.empty()) throw ConfigError("mixture score needs at least one waypoint");
    if (!(sigma > 0.0)) throw ConfigError("mixture score needs sigma > 0");
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);

    // softmax weights via the max-shift trick
    double max_e = -std::numeric_limits<double>::infinity();
    std::vector<double> exponents(waypoints.size());
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        exponents[i] = -(x - waypoints[i]).norm_sq() * inv_two_sigma_sq;
        max_e = std::max(max_e, exponents[i]);
    }
    double total = 0.0;
    Vec2 acc{0.0, 0.0};
    const double inv_sigma_sq = 1.0 / (sigma * sigma);
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        const double w = std::exp(exponents[i] - max_e);
        total += w;
        acc += w * ((waypoints[i] - x) * inv_sigma_sq);
    }
    return acc / total;
}

double mixture_log_density(const std::vector<Vec2>& waypoints, double sigma, const Vec2& x) {
    if (waypoints.empty()) throw ConfigError("mixture density needs at least one waypoint");
    if (!(sigma > 0.0)) throw ConfigError("mixture density needs sigma > 0");
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    double max_e = -std::numeric_limits<double>::infinity();
    std::vector<double> exponents(waypoints.size());
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        exponents[i] = -(x - waypoints[i]).norm_sq() * inv_two_sigma_sq;
        max_e = std::max(max_e, exponents[i]);
    }
    double total = 0.0;
    for (double e : exponents) total += std::exp(e - max_e);
    return max_e + std::log(total) - std::log(static_cast<double>(waypoints.size()));
}

Vec2 normalize_score(const Vec2& score, double k_s) {
    if (!(k_s > 0.0)) throw ConfigError("k_s must be positive");
    const double n = score.norm();
    if (n < 1e-12) return {0.0, 0.0};
    // keep the squashed norm strictly below 1 even where tanh saturates
    const double squashed = std::min(std::tanh(k_s * n), 1.0 - 1e-12);
    return score * (squashed / n);
}

std::vector<Vec2> sample_mixture(const std::vector<Vec2>& waypoints, double sigma, int n, Rng& rng) {
    if (waypoints.empty()) throw ConfigError("cannot sample an empty mixture");
    std::vector<Vec2> samples;
    samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Vec2& z = waypoints[rng.index(waypoints.size())];
        samples.push_back({z.x + sigma * rng.normal(), z.y + sigma * rng.normal()});
    }
    return samples;
}

namespace {

// Bump field f(x) = phi(s) u with u = x - c, s = |u|^2 / R^2,
// phi(s) = exp(-1/(1-s)) for s < 1 and 0 otherwise. Its Jacobian is
// phi(s) I - phi(s) / (1-s)^2 * (2/R^2) u u^T.
struct BumpEval {
    Vec2 f{0.0, 0.0};
    Mat2 jacobian;
};

BumpEval eval_bump(const Vec2& x, const Vec2& center, double radius) {
    BumpEval out;
    const Vec2 u = x - center;
    const double s = u.norm_sq() / (radius * radius);
    if (s >= 1.0) return out;
    const double phi = std::exp(-1.0 / (1.0 - s));
    out.f = phi * u;
    const double dphi_ds = -phi / ((1.0 - s) * (1.0 - s));
    const Mat2 rank1 = outer(u, u) * (dphi_ds * 2.0 / (radius * radius));
    out.jacobian.a[0][0] = phi + rank1.a[0][0];
    out.jacobian.a[0][1] = rank1.a[0][1];
    out.jacobian.a[1][0] = rank1.a[1][0];
    out.jacobian.a[1][1] = phi + rank1.a[1][1];
    return out;
}

} // namespace

SteinResidual stein_residual(const std::function<Vec2(const Vec2&)>& score_fn,
                             const std::vector<Vec2>& samples, const Vec2& bump_center,
                             double bump_radius) {
    if (!(bump_radius > 0.0)) throw ConfigError("bump radius must be positive");
    if (samples.size() < 100) {
        throw StatsError("stein residual needs at least 100 samples, got " +
                         std::to_string(samples.size()));
    }

    const double n = static_cast<double>(samples.size());
    Mat2 mean;
    Mat2 mean_sq;
    for (const Vec2& x : samples) {
        const BumpEval bump = eval_bump(x, bump_center, bump_radius);
        Mat2 term = outer(score_fn(x), bump.f);
        term += bump.jacobian;
        mean += term;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) mean_sq.a[i][j] += term.a[i][j] * term.a[i][j];
    }

    SteinResidual out;
    out.residual = mean * (1.0 / n);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double m = out.residual.a[i][j];
            const double var = std::max(0.0, mean_sq.a[i][j] / n - m * m);
            out.std_error.a[i][j] = std::sqrt(var / n);
        }
    }
    out.frobenius = out.residual.frobenius();
    out.frobenius_std_error = out.std_error.frobenius();
    return out;
}

void write_score_loss_csv(const std::vector<double>& history, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "iteration,loss\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out << i << ',' << format_double(history[i]) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace sgvf
