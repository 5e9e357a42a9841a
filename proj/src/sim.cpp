#include "sgvf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgvf/csv.hpp"
#include "sgvf/errors.hpp"

namespace sgvf {

Integrator integrator_from_name(const std::string& name) {
    if (name == "euler") return Integrator::euler;
    if (name == "rk4") return Integrator::rk4;
    throw ConfigError("unknown integrator '" + name + "' (expected euler or rk4)");
}

const char* integrator_name(Integrator method) {
    return method == Integrator::euler ? "euler" : "rk4";
}

ProbeFn probe_from_field(const std::function<Vec2(const Vec2&)>& field) {
    return [field](const Vec2& x) { return FieldProbe{field(x), 0.0}; };
}

Trajectory integrate(const ProbeFn& field, const Vec2& x0, double dt, int steps, Integrator method) {
    if (!(dt > 0.0)) throw ConfigError("integration step must be positive");
    if (steps < 1) throw ConfigError("step count must be at least 1");
    if (!x0.finite()) throw DomainError("start point must be finite");

    Trajectory traj;
    traj.dt = dt;
    traj.method = method;
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);

    Vec2 x = x0;
    for (int n = 0; n <= steps; ++n) {
        const FieldProbe probe = field(x);
        if (!x.finite() || !probe.m.finite()) {
            traj.diverged = true;
            return traj;
        }
        traj.states.push_back({n * dt, x, probe.m, probe.s_norm});
        if (n == steps) break;

        if (method == Integrator::euler) {
            x = x + dt * probe.m;
        } else {
            const Vec2 k1 = probe.m;
            const Vec2 k2 = field(x + (dt / 2.0) * k1).m;
            const Vec2 k3 = field(x + (dt / 2.0) * k2).m;
            const Vec2 k4 = field(x + dt * k3).m;
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return traj;
}

double distance_to_waypoints(const Vec2& x, const std::vector<Vec2>& waypoints) {
    if (waypoints.empty()) throw ConfigError("distance_to_waypoints needs waypoints");
    double best = std::numeric_limits<double>::max();
    for (const Vec2& w : waypoints) best = std::min(best, (x - w).norm_sq());
    return std::sqrt(best);
}

double angle_swept(const Trajectory& traj, const Vec2& center) {
    if (traj.states.size() < 2) throw ConfigError("angle_swept needs at least two states");
    double total = 0.0;
    double prev = 0.0;
    bool have_prev = false;
    for (const TrajectoryState& st : traj.states) {
        const Vec2 r = st.x - center;
        if (r.norm() < 1e-15) throw DomainError("trajectory passes through the sweep center");
        const double angle = std::atan2(r.y, r.x);
        if (have_prev) {
            double delta = angle - prev;
            while (delta > 3.141592653589793238462643383279502884) {
                delta -= 2.0 * 3.141592653589793238462643383279502884;
            }
            while (delta <= -3.141592653589793238462643383279502884) {
                delta += 2.0 * 3.141592653589793238462643383279502884;
            }
            total += delta;
        }
        prev = angle;
        have_prev = true;
    }
    return total;
}

BranchAssignment assign_branch(const Trajectory& traj,
                               const std::vector<std::vector<Vec2>>& branch_waypoint_sets) {
    if (branch_waypoint_sets.empty()) throw ConfigError("assign_branch needs at least one branch");
    for (const auto& b : branch_waypoint_sets) {
        if (b.empty()) throw ConfigError("assign_branch: empty branch waypoint set");
    }

    const std::size_t n = traj.states.size();
    const std::size_t start = n / 2; // last 50% of states
    std::vector<int> votes(branch_waypoint_sets.size(), 0);
    for (std::size_t i = start; i < n; ++i) {
        int best = 0;
        double best_dist = std::numeric_limits<double>::max();
        for (std::size_t b = 0; b < branch_waypoint_sets.size(); ++b) {
            const double d = distance_to_waypoints(traj.states[i].x, branch_waypoint_sets[b]);
            if (d < best_dist) {
                best_dist = d;
                best = static_cast<int>(b);
            }
        }
        votes[static_cast<std::size_t>(best)] += 1;
    }

    BranchAssignment out;
    const auto winner = std::max_element(votes.begin(), votes.end());
    out.nearest_branch = static_cast<int>(winner - votes.begin());
    out.adherence = static_cast<double>(*winner) / static_cast<double>(n - start);
    out.branch_id = out.adherence >= 0.8 ? out.nearest_branch : -1;
    return out;
}

std::vector<StallEvent> detect_stalls(const Trajectory& traj, const std::vector<Vec2>& corners,
                                      double speed_threshold, int window, double corner_radius) {
    if (window < 2) throw ConfigError("stall window must be at least 2");
    std::vector<StallEvent> events;
    if (corners.empty()) return events;

    int run_start = -1;
    const int n = static_cast<int>(traj.states.size());
    for (int i = 0; i <= n; ++i) {
        bool stalled = false;
        if (i < n) {
            const TrajectoryState& st = traj.states[static_cast<std::size_t>(i)];
            stalled = st.m.norm() < speed_threshold &&
                      distance_to_waypoints(st.x, corners) < corner_radius;
        }
        if (stalled) {
            if (run_start < 0) run_start = i;
        } else if (run_start >= 0) {
            const int length = i - run_start;
            if (length >= window) events.push_back({run_start, length});
            run_start = -1;
        }
    }
    return events;
}

PathMetrics compute_path_metrics(const Trajectory& traj, const PointCloud& waypoints, Vec2 center,
                                 const std::vector<Vec2>& corners, double speed_threshold,
                                 int stall_window, double corner_radius) {
    waypoints.validate();
    if (traj.states.empty()) throw ConfigError("metrics need a non-empty trajectory");

    PathMetrics metrics;
    metrics.final_distance = distance_to_waypoints(traj.states.back().x, waypoints.points);

    const std::size_t n = traj.states.size();
    const std::size_t band_start = n - std::max<std::size_t>(1, n / 5);
    double acc = 0.0;
    for (std::size_t i = band_start; i < n; ++i) {
        acc += distance_to_waypoints(traj.states[i].x, waypoints.points);
    }
    metrics.mean_band_distance = acc / static_cast<double>(n - band_start);

    metrics.angle_swept = angle_swept(traj, center);
    if (!corners.empty()) {
        metrics.stall_events = detect_stalls(traj, corners, speed_threshold, stall_window, corner_radius);
    }
    if (waypoints.has_labels()) {
        std::vector<std::vector<Vec2>> branches;
        for (int b = 0; b < waypoints.branch_count(); ++b) branches.push_back(waypoints.branch(b));
        const BranchAssignment assignment = assign_branch(traj, branches);
        metrics.branch_id = assignment.branch_id;
        metrics.branch_adherence = assignment.adherence;
    }
    return metrics;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "t,x,y,ux,uy,s_norm\n";
    for (const TrajectoryState& st : traj.states) {
        out << format_double(st.t) << ',' << format_double(st.x.x) << ',' << format_double(st.x.y)
            << ',' << format_double(st.m.x) << ',' << format_double(st.m.y) << ','
            << format_double(st.s_norm) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

Trajectory load_trajectory_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"t", "x", "y", "ux", "uy", "s_norm"}) {
        throw FormatError("'" + path + "': expected header 't,x,y,ux,uy,s_norm'");
    }
    Trajectory traj;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = "'" + path + "' line " + std::to_string(line_no);
        if (fields.size() != 6) throw FormatError(where + ": expected 6 columns");
        TrajectoryState st;
        st.t = parse_double(fields[0], where);
        st.x = {parse_double(fields[1], where), parse_double(fields[2], where)};
        st.m = {parse_double(fields[3], where), parse_double(fields[4], where)};
        st.s_norm = parse_double(fields[5], where);
        traj.states.push_back(st);
    }
    if (traj.states.size() >= 2) traj.dt = traj.states[1].t - traj.states[0].t;
    return traj;
}

void write_metrics(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::string& path) {
    std::ofstream out = open_output(path);
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace sgvf
