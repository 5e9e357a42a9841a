#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgvf/datasets.hpp"
#include "sgvf/geometry.hpp"
#include "sgvf/score.hpp"
#include "sgvf/tangent.hpp"

namespace sgvf {

using FieldFn = std::function<Vec2(const Vec2&)>;

struct MixedSample {
    Vec2 s; // normalized score component
    Vec2 v; // tangent component
    Vec2 m; // s + v
};

// Guiding field m(x) = normalize(S(x, t_eval)) + v(x) over frozen networks.
struct MixedField {
    const ScoreModel* score = nullptr;
    const TangentModel* tangent = nullptr; // optional; null means m = s
    double k_s = 0.2;
    double t_eval = 1.0;

    MixedSample sample(const Vec2& x) const;
    Vec2 eval(const Vec2& x) const { return sample(x).m; }
    std::vector<MixedSample> sample_batch(const std::vector<Vec2>& xs) const;
    FieldFn as_field_fn() const;
};

// -log(p(x) / p*) for the waypoint mixture at scale sigma; p* is the mixture
// density maximized over the waypoint locations themselves. Non-negative by
// clamping. Precomputes the reference once; use lyapunov_value for one-offs.
class LyapunovOracle {
public:
    LyapunovOracle(std::vector<Vec2> waypoints, double sigma);
    double value(const Vec2& x) const;
    double sigma() const { return sigma_; }
    // gradient of -V, i.e. the analytic mixture score
    Vec2 score(const Vec2& x) const;

private:
    std::vector<Vec2> waypoints_;
    double sigma_;
    double log_p_star_;
};

double lyapunov_value(const std::vector<Vec2>& waypoints, double sigma, const Vec2& x);

// Time derivative of the Lyapunov value along dynamics xdot = m, with s the
// density gradient at x: -<s, m>.
double lyapunov_rate(const Vec2& s, const Vec2& m);

struct RobustnessMargin {
    double epsilon = 0.0; // |cos(s, v)|
    double bound = 0.0;   // upper bound on lyapunov_rate(s, s + v)
};

// Cosine error between s and v and the induced decrease bound
// -(1 - eps*|v|/|s|)|s|^2 = -|s|^2 + |s.v|, which lyapunov_rate(s, s+v)
// satisfies for every pair (equality when s.v <= 0).
RobustnessMargin robustness_margin(const Vec2& s, const Vec2& v);

struct FieldGrid {
    BoundingBox bounds;
    int nx = 0;
    int ny = 0;
    std::vector<Vec2> vectors; // row-major, y outer then x
    std::vector<double> norms;

    Vec2 point_at(int ix, int iy) const;
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * nx + ix;
    }
    double cell_dx() const;
    double cell_dy() const;
};

FieldGrid evaluate_field_grid(const FieldFn& field, const BoundingBox& bounds, int nx, int ny);

// CSV rows "x,y,ux,uy,norm" in the grid's row-major order, header included.
FieldGrid export_field_grid(const FieldFn& field, const BoundingBox& bounds, int nx, int ny,
                            const std::string& path);
FieldGrid load_field_grid(const std::string& path);

struct SingularComponent {
    std::vector<std::pair<int, int>> cells; // (ix, iy)
    Vec2 centroid;
};

// Connected regions (4-connectivity) of grid points where |field| falls
// below the threshold.
std::vector<SingularComponent> scan_singularities(const FieldFn& field, const BoundingBox& bounds,
                                                  int nx, int ny, double norm_threshold);
std::vector<SingularComponent> scan_singularities(const FieldGrid& grid, double norm_threshold);

// median of the grid norms; 0.05 * this is the default scan threshold
double grid_median_norm(const FieldGrid& grid);

// Level-set baseline for a circle: u = T(x) - k_n * grad(phi) * phi with
// phi = |x-c|^2 - R^2 and T the (counter)clockwise unit tangent. Zero at the
// center where the gradient vanishes.
Vec2 classical_gvf_circle(const Vec2& x, const Vec2& center, double radius, double k_n,
                          bool counterclockwise = true);

struct DiagnosticsRecord {
    Vec2 x;
    double s_norm = 0.0;
    double v_norm = 0.0;
    double m_norm = 0.0;
    double cos_sv = 0.0;
    double lyapunov = 0.0;
    double lyapunov_rate = 0.0;
};

struct DiagnosticsReport {
    std::vector<DiagnosticsRecord> records;
    std::vector<SingularComponent> singular_components;
    double mean_abs_cos = 0.0;
    double mean_m_norm = 0.0;
    double frac_rate_nonpositive = 0.0;
    double scan_threshold = 0.0;
};

// Grid sweep of the mixed field with the analytic mixture density providing
// V and its rate. threshold_factor scales the median norm into the
// singularity threshold.
DiagnosticsReport run_diagnostics(const MixedField& field, const PointCloud& waypoints,
                                  const BoundingBox& bounds, int nx, int ny,
                                  double threshold_factor);

void write_diagnostics_csv(const DiagnosticsReport& report, const std::string& path);

} // namespace sgvf
