#include "sgvf/tangent.hpp"

#include <cmath>
#include <string>

#include "sgvf/csv.hpp"
#include "sgvf/errors.hpp"

namespace sgvf {

namespace {
constexpr double kNormFloor = 1e-12;
}

void TangentTrainConfig::validate(int data_dim) const {
    if (iterations < 1) throw ConfigError("tangent.iterations must be positive");
    if (batch_size < 1) throw ConfigError("tangent.batch_size must be positive");
    if (!(lr > 0.0)) throw ConfigError("tangent.lr must be positive");
    if (k_neighbors < 1) throw ConfigError("tangent.k_neighbors must be at least 1");
    if (!(neighbor_sigma > 0.0)) throw ConfigError("tangent.neighbor_sigma must be positive");
    if (lambda_unit < 0.0 || lambda_orth < 0.0 || lambda_dir < 0.0) {
        throw ConfigError("loss weights must be non-negative");
    }
    if (lambda_unit == 0.0 && lambda_orth == 0.0 && lambda_dir == 0.0) {
        throw ConfigError("at least one loss weight must be positive");
    }
    if (!(k_s > 0.0)) throw ConfigError("tangent.k_s must be positive");
    if (!(t_eval >= 0.0 && t_eval <= 1.0)) throw ConfigError("tangent.t_eval must lie in [0,1]");
    if (layer_sizes.size() < 2 || layer_sizes.front() != data_dim || layer_sizes.back() != data_dim) {
        throw ConfigError("tangent network must map the data space to itself");
    }
}

Vec2 TangentModel::eval(const Vec2& x) const {
    Matrix in(1, 2);
    in.at(0, 0) = x.x;
    in.at(0, 1) = x.y;
    const Matrix out = mlp_forward(net, in);
    return {out.at(0, 0), out.at(0, 1)};
}

std::vector<Vec2> TangentModel::eval_batch(const std::vector<Vec2>& xs) const {
    Matrix in(static_cast<int>(xs.size()), 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        in.at(static_cast<int>(i), 0) = xs[i].x;
        in.at(static_cast<int>(i), 1) = xs[i].y;
    }
    const Matrix out = mlp_forward(net, in);
    std::vector<Vec2> result(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        result[i] = {out.at(static_cast<int>(i), 0), out.at(static_cast<int>(i), 1)};
    }
    return result;
}

double loss_unit(const Vec2& s, const Vec2& v) {
    const double d = (s + v).norm() - 1.0;
    return d * d;
}

double loss_orth(const Vec2& s, const Vec2& v) {
    const double c = cosine(s, v, kNormFloor);
    return c * c;
}

double loss_dir(const Vec2& v_x, const std::vector<Vec2>& neighbor_vs) {
    if (neighbor_vs.empty()) throw ConfigError("loss_dir needs at least one neighbor");
    double sum = 0.0;
    for (const Vec2& w : neighbor_vs) sum += cosine(v_x, w, kNormFloor);
    return 1.0 - sum / static_cast<double>(neighbor_vs.size());
}

std::vector<Vec2> sample_neighbors(const Vec2& x, int k, double neighbor_sigma, Rng& rng) {
    if (k < 1) throw ConfigError("neighbor count must be at least 1");
    if (!(neighbor_sigma > 0.0)) throw ConfigError("neighbor sigma must be positive");
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        out.push_back({x.x + neighbor_sigma * rng.normal(), x.y + neighbor_sigma * rng.normal()});
    }
    return out;
}

TangentLossRecord tangent_composite_loss(const MlpModel& net, const std::vector<Vec2>& xs,
                                         const std::vector<Vec2>& s_normalized,
                                         const std::vector<Vec2>& neighbors, int k,
                                         double lambda_unit, double lambda_orth, double lambda_dir,
                                         Gradients* grads_out) {
    const int batch = static_cast<int>(xs.size());
    if (s_normalized.size() != xs.size()) throw ShapeError("score/batch size mismatch");
    if (neighbors.size() != xs.size() * static_cast<std::size_t>(k)) {
        throw ShapeError("neighbor count must be batch * k");
    }

    // one stacked forward pass: centers first, then neighbors grouped by sample
    const int total_rows = batch * (1 + k);
    Matrix in(total_rows, 2);
    for (int b = 0; b < batch; ++b) {
        in.at(b, 0) = xs[static_cast<std::size_t>(b)].x;
        in.at(b, 1) = xs[static_cast<std::size_t>(b)].y;
    }
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        in.at(batch + static_cast<int>(i), 0) = neighbors[i].x;
        in.at(batch + static_cast<int>(i), 1) = neighbors[i].y;
    }

    ForwardCache cache;
    const Matrix out = mlp_forward(net, in, grads_out ? &cache : nullptr);
    auto v_at = [&](int row) { return Vec2{out.at(row, 0), out.at(row, 1)}; };

    Matrix out_grad;
    if (grads_out) out_grad = Matrix(total_rows, 2);
    auto add_grad = [&](int row, const Vec2& g) {
        out_grad.at(row, 0) += g.x;
        out_grad.at(row, 1) += g.y;
    };

    const double inv_batch = 1.0 / batch;
    TangentLossRecord record;
    for (int b = 0; b < batch; ++b) {
        const Vec2 s = s_normalized[static_cast<std::size_t>(b)];
        const Vec2 v = v_at(b);
        const double v_norm = v.norm();
        const double s_norm = s.norm();

        // unit-length term
        const Vec2 m = s + v;
        const double m_norm = m.norm();
        const double unit = (m_norm - 1.0) * (m_norm - 1.0);

        // orthogonality term
        const double c_sv = cosine(s, v, kNormFloor);
        const double orth = c_sv * c_sv;

        // directional consistency over the k neighbor evaluations
        double cos_sum = 0.0;
        for (int j = 0; j < k; ++j) {
            cos_sum += cosine(v, v_at(batch + b * k + j), kNormFloor);
        }
        const double dir = 1.0 - cos_sum / k;

        if (unit < 0.0 || orth < -1e-15 || orth > 1.0 + 1e-15 || dir < -1e-15 || dir > 2.0 + 1e-15) {
            throw TrainingError("tangent loss term out of range: unit=" + std::to_string(unit) +
                                " orth=" + std::to_string(orth) + " dir=" + std::to_string(dir));
        }

        record.unit += unit * inv_batch;
        record.orth += orth * inv_batch;
        record.dir += dir * inv_batch;

        if (!grads_out) continue;

        Vec2 g_center{0.0, 0.0};
        if (lambda_unit > 0.0 && m_norm >= kNormFloor) {
            g_center += m * (lambda_unit * 2.0 * (m_norm - 1.0) / m_norm);
        }
        if (lambda_orth > 0.0 && s_norm >= kNormFloor && v_norm >= kNormFloor) {
            const Vec2 s_hat = s / s_norm;
            const Vec2 v_hat = v / v_norm;
            g_center += (s_hat - c_sv * v_hat) * (lambda_orth * 2.0 * c_sv / v_norm);
        }
        if (lambda_dir > 0.0 && v_norm >= kNormFloor) {
            const Vec2 v_hat = v / v_norm;
            for (int j = 0; j < k; ++j) {
                const Vec2 w = v_at(batch + b * k + j);
                const double w_norm = w.norm();
                if (w_norm < kNormFloor) continue;
                const Vec2 w_hat = w / w_norm;
                const double c = cosine(v, w, kNormFloor);
                const double scale = -lambda_dir / k;
                add_grad(batch + b * k + j, (v_hat - c * w_hat) * (scale * inv_batch / w_norm));
                g_center += (w_hat - c * v_hat) * (scale / v_norm);
            }
        }
        add_grad(b, g_center * inv_batch);
    }
    record.total = lambda_unit * record.unit + lambda_orth * record.orth + lambda_dir * record.dir;

    if (grads_out) {
        *grads_out = mlp_backward(net, cache, out_grad);
    }
    return record;
}

TangentTrainResult train_tangent(const ScoreModel& score_model, const PointCloud& waypoints,
                                 const TangentTrainConfig& config) {
    waypoints.validate();
    config.validate(2);
    score_model.schedule.validate();

    TangentTrainResult result;
    result.model.net = mlp_init(config.layer_sizes, config.seed);
    result.loss_history.reserve(static_cast<std::size_t>(config.iterations));

    AdamState opt = adam_init(result.model.net, config.lr);
    Rng rng(derive_seed(config.seed, 0x7a9e));

    const int batch = config.batch_size;
    const int k = config.k_neighbors;
    std::vector<Vec2> xs(static_cast<std::size_t>(batch));
    std::vector<Vec2> neighbors(static_cast<std::size_t>(batch) * k);

    for (int iter = 0; iter < config.iterations; ++iter) {
        for (int b = 0; b < batch; ++b) {
            const Vec2& z = waypoints.points[rng.index(waypoints.size())];
            const double t = rng.uniform();
            const Vec2 eps{rng.normal(), rng.normal()};
            xs[static_cast<std::size_t>(b)] = perturb(z, t, eps, score_model.schedule);
        }
        for (int b = 0; b < batch; ++b) {
            for (int j = 0; j < k; ++j) {
                const Vec2& x = xs[static_cast<std::size_t>(b)];
                neighbors[static_cast<std::size_t>(b) * k + j] = {
                    x.x + config.neighbor_sigma * rng.normal(),
                    x.y + config.neighbor_sigma * rng.normal()};
            }
        }

        // frozen score, queried at the composition time
        std::vector<Vec2> s_vals = score_model.eval_batch(xs, config.t_eval);
        for (Vec2& s : s_vals) s = normalize_score(s, config.k_s);

        Gradients grads;
        TangentLossRecord record =
            tangent_composite_loss(result.model.net, xs, s_vals, neighbors, k, config.lambda_unit,
                                   config.lambda_orth, config.lambda_dir, &grads);
        if (!std::isfinite(record.total)) {
            throw TrainingError("tangent training diverged at iteration " + std::to_string(iter) +
                                " (unit=" + std::to_string(record.unit) +
                                ", orth=" + std::to_string(record.orth) +
                                ", dir=" + std::to_string(record.dir) + ")");
        }
        result.loss_history.push_back(record);
        adam_step(result.model.net, grads, opt);
    }
    return result;
}

void write_tangent_loss_csv(const std::vector<TangentLossRecord>& history, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "iteration,loss_unit,loss_orth,loss_dir,loss_total\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out << i << ',' << format_double(history[i].unit) << ',' << format_double(history[i].orth)
            << ',' << format_double(history[i].dir) << ',' << format_double(history[i].total)
            << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace sgvf
