#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgvf/geometry.hpp"
#include "sgvf/schedule.hpp"
#include "sgvf/score.hpp"
#include "sgvf/tangent.hpp"

namespace sgvf {

// Waypoint scenario parameters (defaults follow the stock experiments).
struct GenConfig {
    int n = 512; // points per branch
    double jitter = 0.01;
    Vec2 center{0.0, 0.0};
    double r = 1.0;
    double r1 = 1.0;
    double r2 = 2.0;
    Vec2 c1{-1.75, 0.0};
    Vec2 c2{1.75, 0.0};
    int sides = 4;
    double circumradius = 1.5;
};

struct SimConfig {
    double dt = 0.01;
    int steps = 5000;
    std::string method = "rk4";
    double speed_threshold = 0.1;
    int stall_window = 100;
    double corner_radius = 0.15;
};

struct DiagConfig {
    int resolution = 41;
    double margin = 1.0; // bounding-box inflation
    double threshold_factor = 0.05;
    int stein_samples = 100000;
    double bump_radius = 1.0;
    Vec2 bump_center{0.0, 0.0};
};

// One flat key=value config drives every command; unknown keys are rejected
// and the resolved state is echoed into each run directory.
struct RunConfig {
    std::string scenario = "concentric";
    std::uint64_t seed = 42;
    GenConfig gen;
    NoiseSchedule schedule;
    ScoreTrainConfig score;
    TangentTrainConfig tangent;
    double k_s = 0.2;
    double t_eval = 1.0;
    SimConfig sim;
    DiagConfig diag;
    bool disable_unit = false;
    bool disable_orth = false;
    bool disable_dir = false;
    std::string tangent_depth; // "", "shallow", or "deep"

    void set(const std::string& key, const std::string& value);
    void finalize(); // applies presets and derived seeds, then validates

    ScoreTrainConfig resolved_score_config() const;
    TangentTrainConfig resolved_tangent_config() const;

    std::string resolved_text() const;
};

RunConfig parse_config_file(const std::string& path);
void apply_overrides(RunConfig& config, const std::vector<std::string>& key_value_pairs);

std::vector<int> parse_layer_sizes(const std::string& text, const std::string& where);
std::string layer_sizes_to_string(const std::vector<int>& sizes);

} // namespace sgvf
