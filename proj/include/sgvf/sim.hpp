#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgvf/datasets.hpp"
#include "sgvf/geometry.hpp"

namespace sgvf {

enum class Integrator { euler, rk4 };

Integrator integrator_from_name(const std::string& name);
const char* integrator_name(Integrator method);

// field value plus the score norm recorded alongside each state
struct FieldProbe {
    Vec2 m{0.0, 0.0};
    double s_norm = 0.0;
};
using ProbeFn = std::function<FieldProbe(const Vec2&)>;

ProbeFn probe_from_field(const std::function<Vec2(const Vec2&)>& field);

struct TrajectoryState {
    double t = 0.0;
    Vec2 x;
    Vec2 m;
    double s_norm = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryState> states;
    double dt = 0.0;
    Integrator method = Integrator::rk4;
    bool diverged = false; // hit a non-finite state; `states` holds the finite prefix
};

// Integrates xdot = m(x) for `steps` steps. On a non-finite state the partial
// trajectory is returned with the diverged flag set.
Trajectory integrate(const ProbeFn& field, const Vec2& x0, double dt, int steps, Integrator method);

double distance_to_waypoints(const Vec2& x, const std::vector<Vec2>& waypoints);

// Signed angle accumulated by x - center across consecutive states, each
// increment wrapped to (-pi, pi].
double angle_swept(const Trajectory& traj, const Vec2& center);

struct BranchAssignment {
    int branch_id = -1;      // -1 when no branch wins a 0.8 majority
    int nearest_branch = -1; // majority branch regardless of the threshold
    double adherence = 0.0;  // fraction of late states on the majority branch
};

// Nearest branch per state over the last half of the trajectory; the
// assignment is flagged ambiguous (branch_id -1) below 0.8 adherence.
BranchAssignment assign_branch(const Trajectory& traj,
                               const std::vector<std::vector<Vec2>>& branch_waypoint_sets);

struct StallEvent {
    int start_index = 0;
    int length = 0;
};

// Maximal runs of at least `window` consecutive states with |m| below
// speed_threshold while within corner_radius of some corner.
std::vector<StallEvent> detect_stalls(const Trajectory& traj, const std::vector<Vec2>& corners,
                                      double speed_threshold, int window, double corner_radius);

struct PathMetrics {
    double final_distance = 0.0;
    double mean_band_distance = 0.0; // mean waypoint distance over the final 20%
    double angle_swept = 0.0;
    std::vector<StallEvent> stall_events;
    int branch_id = -1;
    double branch_adherence = 0.0;
};

PathMetrics compute_path_metrics(const Trajectory& traj, const PointCloud& waypoints, Vec2 center,
                                 const std::vector<Vec2>& corners, double speed_threshold,
                                 int stall_window, double corner_radius);

// CSV with header "t,x,y,ux,uy,s_norm"
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

void write_metrics(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::string& path);

} // namespace sgvf
