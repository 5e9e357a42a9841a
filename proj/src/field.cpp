#include "sgvf/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sgvf/csv.hpp"
#include "sgvf/errors.hpp"

namespace sgvf {

MixedSample MixedField::sample(const Vec2& x) const {
    if (!score) throw StateError("mixed field has no score model");
    MixedSample out;
    out.s = normalize_score(score->eval(x, t_eval), k_s);
    out.v = tangent ? tangent->eval(x) : Vec2{0.0, 0.0};
    out.m = out.s + out.v;
    return out;
}

std::vector<MixedSample> MixedField::sample_batch(const std::vector<Vec2>& xs) const {
    if (!score) throw StateError("mixed field has no score model");
    std::vector<Vec2> s_vals = score->eval_batch(xs, t_eval);
    std::vector<Vec2> v_vals;
    if (tangent) v_vals = tangent->eval_batch(xs);
    std::vector<MixedSample> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i].s = normalize_score(s_vals[i], k_s);
        out[i].v = tangent ? v_vals[i] : Vec2{0.0, 0.0};
        out[i].m = out[i].s + out[i].v;
    }
    return out;
}

FieldFn MixedField::as_field_fn() const {
    return [this](const Vec2& x) { return sample(x).m; };
}

LyapunovOracle::LyapunovOracle(std::vector<Vec2> waypoints, double sigma)
    : waypoints_(std::move(waypoints)), sigma_(sigma) {
    if (waypoints_.empty()) throw ConfigError("lyapunov oracle needs waypoints");
    if (!(sigma_ > 0.0)) throw ConfigError("lyapunov oracle needs sigma > 0");
    log_p_star_ = -std::numeric_limits<double>::infinity();
    for (const Vec2& w : waypoints_) {
        log_p_star_ = std::max(log_p_star_, mixture_log_density(waypoints_, sigma_, w));
    }
}

double LyapunovOracle::value(const Vec2& x) const {
    const double v = log_p_star_ - mixture_log_density(waypoints_, sigma_, x);
    return std::max(0.0, v);
}

Vec2 LyapunovOracle::score(const Vec2& x) const {
    return oracle_mixture_score(waypoints_, sigma_, x);
}

double lyapunov_value(const std::vector<Vec2>& waypoints, double sigma, const Vec2& x) {
    return LyapunovOracle(waypoints, sigma).value(x);
}

double lyapunov_rate(const Vec2& s, const Vec2& m) { return -s.dot(m); }

RobustnessMargin robustness_margin(const Vec2& s, const Vec2& v) {
    constexpr double floor = 1e-12;
    RobustnessMargin out;
    const double s_norm = s.norm();
    const double v_norm = v.norm();
    if (s_norm < floor || v_norm < floor) {
        out.epsilon = 0.0;
        out.bound = -s_norm * s_norm;
    } else {
        out.epsilon = std::abs(s.dot(v)) / (s_norm * v_norm);
        out.bound = -(s_norm - out.epsilon * v_norm) * s_norm;
    }
    // holds identically; tolerate rounding plus the degenerate-norm floor
    const double rate = lyapunov_rate(s, s + v);
    const double slack = 1e-12 * (1.0 + v_norm) * (1.0 + s_norm * s_norm);
    if (rate > out.bound + slack) {
        throw NumericError("robustness bound violated: rate " + std::to_string(rate) +
                           " > bound " + std::to_string(out.bound));
    }
    return out;
}

Vec2 FieldGrid::point_at(int ix, int iy) const {
    return {bounds.x_min + cell_dx() * ix, bounds.y_min + cell_dy() * iy};
}

double FieldGrid::cell_dx() const { return nx > 1 ? (bounds.x_max - bounds.x_min) / (nx - 1) : 0.0; }
double FieldGrid::cell_dy() const { return ny > 1 ? (bounds.y_max - bounds.y_min) / (ny - 1) : 0.0; }

FieldGrid evaluate_field_grid(const FieldFn& field, const BoundingBox& bounds, int nx, int ny) {
    if (nx < 2 || ny < 2) throw ConfigError("grid resolution must be at least 2 per axis");
    if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
        throw ConfigError("grid bounds must have positive extent");
    }
    FieldGrid grid;
    grid.bounds = bounds;
    grid.nx = nx;
    grid.ny = ny;
    grid.vectors.resize(static_cast<std::size_t>(nx) * ny);
    grid.norms.resize(grid.vectors.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 u = field(grid.point_at(ix, iy));
            grid.vectors[grid.index(ix, iy)] = u;
            grid.norms[grid.index(ix, iy)] = u.norm();
        }
    }
    return grid;
}

FieldGrid export_field_grid(const FieldFn& field, const BoundingBox& bounds, int nx, int ny,
                            const std::string& path) {
    FieldGrid grid = evaluate_field_grid(field, bounds, nx, ny);
    std::ofstream out = open_output(path);
    out << "x,y,ux,uy,norm\n";
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 p = grid.point_at(ix, iy);
            const Vec2 u = grid.vectors[grid.index(ix, iy)];
            out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(u.x)
                << ',' << format_double(u.y) << ',' << format_double(grid.norms[grid.index(ix, iy)])
                << '\n';
        }
    }
    if (!out) throw IoError("write failed for '" + path + "'");
    return grid;
}

FieldGrid load_field_grid(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"x", "y", "ux", "uy", "norm"}) {
        throw FormatError("'" + path + "': expected header 'x,y,ux,uy,norm'");
    }
    std::vector<Vec2> points;
    std::vector<Vec2> vectors;
    std::vector<double> norms;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = "'" + path + "' line " + std::to_string(line_no);
        if (fields.size() != 5) throw FormatError(where + ": expected 5 columns");
        points.push_back({parse_double(fields[0], where), parse_double(fields[1], where)});
        vectors.push_back({parse_double(fields[2], where), parse_double(fields[3], where)});
        norms.push_back(parse_double(fields[4], where));
    }
    if (points.empty()) throw FormatError("'" + path + "': no grid rows");

    // infer the raster shape: x varies fastest
    int nx = 0;
    while (nx < static_cast<int>(points.size()) && points[static_cast<std::size_t>(nx)].y == points[0].y) ++nx;
    if (nx < 2 || points.size() % static_cast<std::size_t>(nx) != 0) {
        throw FormatError("'" + path + "': rows do not form a row-major raster");
    }
    FieldGrid grid;
    grid.nx = nx;
    grid.ny = static_cast<int>(points.size()) / nx;
    grid.bounds = {points.front().x, points[static_cast<std::size_t>(nx - 1)].x, points.front().y,
                   points.back().y};
    grid.vectors = std::move(vectors);
    grid.norms = std::move(norms);
    return grid;
}

std::vector<SingularComponent> scan_singularities(const FieldGrid& grid, double norm_threshold) {
    if (!(norm_threshold > 0.0)) throw ConfigError("singularity threshold must be positive");
    const int nx = grid.nx;
    const int ny = grid.ny;
    std::vector<char> mask(grid.norms.size());
    for (std::size_t i = 0; i < grid.norms.size(); ++i) {
        mask[i] = grid.norms[i] < norm_threshold ? 1 : 0;
    }

    std::vector<SingularComponent> components;
    std::vector<char> visited(mask.size(), 0);
    std::vector<std::pair<int, int>> stack;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t start = grid.index(ix, iy);
            if (!mask[start] || visited[start]) continue;
            SingularComponent comp;
            stack.clear();
            stack.emplace_back(ix, iy);
            visited[start] = 1;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                comp.cells.emplace_back(cx, cy);
                const int neighbors[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
                for (const auto& nb : neighbors) {
                    if (nb[0] < 0 || nb[0] >= nx || nb[1] < 0 || nb[1] >= ny) continue;
                    const std::size_t idx = grid.index(nb[0], nb[1]);
                    if (mask[idx] && !visited[idx]) {
                        visited[idx] = 1;
                        stack.emplace_back(nb[0], nb[1]);
                    }
                }
            }
            Vec2 centroid{0.0, 0.0};
            for (const auto& [cx, cy] : comp.cells) centroid += grid.point_at(cx, cy);
            comp.centroid = centroid / static_cast<double>(comp.cells.size());
            components.push_back(std::move(comp));
        }
    }
    return components;
}

std::vector<SingularComponent> scan_singularities(const FieldFn& field, const BoundingBox& bounds,
                                                  int nx, int ny, double norm_threshold) {
    return scan_singularities(evaluate_field_grid(field, bounds, nx, ny), norm_threshold);
}

double grid_median_norm(const FieldGrid& grid) {
    std::vector<double> norms = grid.norms;
    const std::size_t mid = norms.size() / 2;
    std::nth_element(norms.begin(), norms.begin() + mid, norms.end());
    return norms[mid];
}

Vec2 classical_gvf_circle(const Vec2& x, const Vec2& center, double radius, double k_n,
                          bool counterclockwise) {
    if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
    const Vec2 d = x - center;
    const double phi = d.norm_sq() - radius * radius;
    const Vec2 grad = 2.0 * d;
    const double grad_norm = grad.norm();
    if (grad_norm < 1e-12) return {0.0, 0.0};
    Vec2 tangent = grad.rot90() / grad_norm;
    if (!counterclockwise) tangent = -tangent;
    return tangent - k_n * phi * grad;
}

DiagnosticsReport run_diagnostics(const MixedField& field, const PointCloud& waypoints,
                                  const BoundingBox& bounds, int nx, int ny,
                                  double threshold_factor) {
    waypoints.validate();
    DiagnosticsReport report;
    const double sigma_eval = field.score->schedule.sigma(field.t_eval);
    LyapunovOracle oracle(waypoints.points, sigma_eval);

    FieldGrid grid = evaluate_field_grid(field.as_field_fn(), bounds, nx, ny);
    report.records.reserve(grid.vectors.size());
    double abs_cos_sum = 0.0;
    double m_norm_sum = 0.0;
    std::size_t nonpositive = 0;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 p = grid.point_at(ix, iy);
            const MixedSample s = field.sample(p);
            DiagnosticsRecord rec;
            rec.x = p;
            rec.s_norm = s.s.norm();
            rec.v_norm = s.v.norm();
            rec.m_norm = s.m.norm();
            rec.cos_sv = cosine(s.s, s.v);
            rec.lyapunov = oracle.value(p);
            rec.lyapunov_rate = lyapunov_rate(oracle.score(p), s.m);
            abs_cos_sum += std::abs(rec.cos_sv);
            m_norm_sum += rec.m_norm;
            if (rec.lyapunov_rate <= 0.0) ++nonpositive;
            report.records.push_back(rec);
        }
    }
    const double count = static_cast<double>(report.records.size());
    report.mean_abs_cos = abs_cos_sum / count;
    report.mean_m_norm = m_norm_sum / count;
    report.frac_rate_nonpositive = static_cast<double>(nonpositive) / count;
    report.scan_threshold = threshold_factor * grid_median_norm(grid);
    if (report.scan_threshold > 0.0) {
        report.singular_components = scan_singularities(grid, report.scan_threshold);
    }
    return report;
}

void write_diagnostics_csv(const DiagnosticsReport& report, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "x,y,s_norm,v_norm,m_norm,cos_sv,V,V_dot\n";
    for (const DiagnosticsRecord& r : report.records) {
        out << format_double(r.x.x) << ',' << format_double(r.x.y) << ',' << format_double(r.s_norm)
            << ',' << format_double(r.v_norm) << ',' << format_double(r.m_norm) << ','
            << format_double(r.cos_sv) << ',' << format_double(r.lyapunov) << ','
            << format_double(r.lyapunov_rate) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace sgvf
