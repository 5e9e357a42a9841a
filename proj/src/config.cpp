#include "sgvf/config.hpp"

#include <fstream>
#include <sstream>

#include "sgvf/csv.hpp"
#include "sgvf/errors.hpp"
#include "sgvf/rng.hpp"
#include "sgvf/sim.hpp"

namespace sgvf {

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

double parse_double_value(const std::string& value, const std::string& key) {
    return parse_double(value, "key '" + key + "'");
}

int parse_int_value(const std::string& value, const std::string& key) {
    return static_cast<int>(parse_long(value, "key '" + key + "'"));
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::vector<int> parse_layer_sizes(const std::string& text, const std::string& where) {
    std::vector<int> sizes;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        sizes.push_back(static_cast<int>(parse_long(trim(token), where)));
    }
    if (sizes.size() < 2) throw ConfigError(where + ": layer sizes need at least two entries");
    return sizes;
}

std::string layer_sizes_to_string(const std::vector<int>& sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(sizes[i]);
    }
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "scenario") scenario = value;
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_long(value, "key 'seed'"));
    else if (key == "gen.n") gen.n = parse_int_value(value, key);
    else if (key == "gen.jitter") gen.jitter = parse_double_value(value, key);
    else if (key == "gen.center_x") gen.center.x = parse_double_value(value, key);
    else if (key == "gen.center_y") gen.center.y = parse_double_value(value, key);
    else if (key == "gen.r") gen.r = parse_double_value(value, key);
    else if (key == "gen.r1") gen.r1 = parse_double_value(value, key);
    else if (key == "gen.r2") gen.r2 = parse_double_value(value, key);
    else if (key == "gen.c1_x") gen.c1.x = parse_double_value(value, key);
    else if (key == "gen.c1_y") gen.c1.y = parse_double_value(value, key);
    else if (key == "gen.c2_x") gen.c2.x = parse_double_value(value, key);
    else if (key == "gen.c2_y") gen.c2.y = parse_double_value(value, key);
    else if (key == "gen.sides") gen.sides = parse_int_value(value, key);
    else if (key == "gen.circumradius") gen.circumradius = parse_double_value(value, key);
    else if (key == "schedule.sigma_min") schedule.sigma_min = parse_double_value(value, key);
    else if (key == "schedule.sigma_max") schedule.sigma_max = parse_double_value(value, key);
    else if (key == "score.iterations") score.iterations = parse_int_value(value, key);
    else if (key == "score.batch_size") score.batch_size = parse_int_value(value, key);
    else if (key == "score.lr") score.lr = parse_double_value(value, key);
    else if (key == "score.layer_sizes") score.layer_sizes = parse_layer_sizes(value, "key '" + key + "'");
    else if (key == "tangent.iterations") tangent.iterations = parse_int_value(value, key);
    else if (key == "tangent.batch_size") tangent.batch_size = parse_int_value(value, key);
    else if (key == "tangent.lr") tangent.lr = parse_double_value(value, key);
    else if (key == "tangent.k_neighbors") tangent.k_neighbors = parse_int_value(value, key);
    else if (key == "tangent.neighbor_sigma") tangent.neighbor_sigma = parse_double_value(value, key);
    else if (key == "tangent.lambda_unit") tangent.lambda_unit = parse_double_value(value, key);
    else if (key == "tangent.lambda_orth") tangent.lambda_orth = parse_double_value(value, key);
    else if (key == "tangent.lambda_dir") tangent.lambda_dir = parse_double_value(value, key);
    else if (key == "tangent.layer_sizes") tangent.layer_sizes = parse_layer_sizes(value, "key '" + key + "'");
    else if (key == "tangent.depth") {
        if (value != "shallow" && value != "deep") {
            throw ConfigError("key 'tangent.depth': expected shallow or deep, got '" + value + "'");
        }
        tangent_depth = value;
    }
    else if (key == "field.k_s") k_s = parse_double_value(value, key);
    else if (key == "field.t_eval") t_eval = parse_double_value(value, key);
    else if (key == "sim.dt") sim.dt = parse_double_value(value, key);
    else if (key == "sim.steps") sim.steps = parse_int_value(value, key);
    else if (key == "sim.method") sim.method = value;
    else if (key == "sim.speed_threshold") sim.speed_threshold = parse_double_value(value, key);
    else if (key == "sim.stall_window") sim.stall_window = parse_int_value(value, key);
    else if (key == "sim.corner_radius") sim.corner_radius = parse_double_value(value, key);
    else if (key == "diag.resolution") diag.resolution = parse_int_value(value, key);
    else if (key == "diag.margin") diag.margin = parse_double_value(value, key);
    else if (key == "diag.threshold_factor") diag.threshold_factor = parse_double_value(value, key);
    else if (key == "diag.stein_samples") diag.stein_samples = parse_int_value(value, key);
    else if (key == "diag.bump_radius") diag.bump_radius = parse_double_value(value, key);
    else if (key == "diag.bump_x") diag.bump_center.x = parse_double_value(value, key);
    else if (key == "diag.bump_y") diag.bump_center.y = parse_double_value(value, key);
    else if (key == "ablation.disable_unit") disable_unit = parse_bool(value, key);
    else if (key == "ablation.disable_orth") disable_orth = parse_bool(value, key);
    else if (key == "ablation.disable_dir") disable_dir = parse_bool(value, key);
    else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::finalize() {
    if (!tangent_depth.empty()) {
        tangent.layer_sizes = tangent_depth == "deep" ? std::vector<int>{2, 64, 64, 64, 64, 2}
                                                      : std::vector<int>{2, 128, 2};
    }
    tangent.k_s = k_s;
    tangent.t_eval = t_eval;
    schedule.validate();
    score.validate(2);
    // lambda switches are applied in resolved_tangent_config; validate the base here
    tangent.validate(2);
    if (sim.dt <= 0.0 || sim.steps < 1) throw ConfigError("sim.dt and sim.steps must be positive");
    integrator_from_name(sim.method);
    if (diag.resolution < 2) throw ConfigError("diag.resolution must be at least 2");
    if (scenario != "concentric" && scenario != "separated" && scenario != "circle" &&
        scenario != "square" && scenario != "hexagon" && scenario != "polygon") {
        throw ConfigError("unknown scenario '" + scenario + "'");
    }
}

ScoreTrainConfig RunConfig::resolved_score_config() const {
    ScoreTrainConfig cfg = score;
    cfg.seed = derive_seed(seed, 2);
    return cfg;
}

TangentTrainConfig RunConfig::resolved_tangent_config() const {
    TangentTrainConfig cfg = tangent;
    cfg.seed = derive_seed(seed, 3);
    if (disable_unit) cfg.lambda_unit = 0.0;
    if (disable_orth) cfg.lambda_orth = 0.0;
    if (disable_dir) cfg.lambda_dir = 0.0;
    return cfg;
}

std::string RunConfig::resolved_text() const {
    std::ostringstream out;
    out << "scenario=" << scenario << '\n';
    out << "seed=" << seed << '\n';
    out << "gen.n=" << gen.n << '\n';
    out << "gen.jitter=" << format_double(gen.jitter) << '\n';
    out << "gen.center_x=" << format_double(gen.center.x) << '\n';
    out << "gen.center_y=" << format_double(gen.center.y) << '\n';
    out << "gen.r=" << format_double(gen.r) << '\n';
    out << "gen.r1=" << format_double(gen.r1) << '\n';
    out << "gen.r2=" << format_double(gen.r2) << '\n';
    out << "gen.c1_x=" << format_double(gen.c1.x) << '\n';
    out << "gen.c1_y=" << format_double(gen.c1.y) << '\n';
    out << "gen.c2_x=" << format_double(gen.c2.x) << '\n';
    out << "gen.c2_y=" << format_double(gen.c2.y) << '\n';
    out << "gen.sides=" << gen.sides << '\n';
    out << "gen.circumradius=" << format_double(gen.circumradius) << '\n';
    out << "schedule.sigma_min=" << format_double(schedule.sigma_min) << '\n';
    out << "schedule.sigma_max=" << format_double(schedule.sigma_max) << '\n';
    out << "score.iterations=" << score.iterations << '\n';
    out << "score.batch_size=" << score.batch_size << '\n';
    out << "score.lr=" << format_double(score.lr) << '\n';
    out << "score.layer_sizes=" << layer_sizes_to_string(score.layer_sizes) << '\n';
    out << "tangent.iterations=" << tangent.iterations << '\n';
    out << "tangent.batch_size=" << tangent.batch_size << '\n';
    out << "tangent.lr=" << format_double(tangent.lr) << '\n';
    out << "tangent.k_neighbors=" << tangent.k_neighbors << '\n';
    out << "tangent.neighbor_sigma=" << format_double(tangent.neighbor_sigma) << '\n';
    out << "tangent.lambda_unit=" << format_double(tangent.lambda_unit) << '\n';
    out << "tangent.lambda_orth=" << format_double(tangent.lambda_orth) << '\n';
    out << "tangent.lambda_dir=" << format_double(tangent.lambda_dir) << '\n';
    out << "tangent.layer_sizes=" << layer_sizes_to_string(tangent.layer_sizes) << '\n';
    out << "field.k_s=" << format_double(k_s) << '\n';
    out << "field.t_eval=" << format_double(t_eval) << '\n';
    out << "sim.dt=" << format_double(sim.dt) << '\n';
    out << "sim.steps=" << sim.steps << '\n';
    out << "sim.method=" << sim.method << '\n';
    out << "sim.speed_threshold=" << format_double(sim.speed_threshold) << '\n';
    out << "sim.stall_window=" << sim.stall_window << '\n';
    out << "sim.corner_radius=" << format_double(sim.corner_radius) << '\n';
    out << "diag.resolution=" << diag.resolution << '\n';
    out << "diag.margin=" << format_double(diag.margin) << '\n';
    out << "diag.threshold_factor=" << format_double(diag.threshold_factor) << '\n';
    out << "diag.stein_samples=" << diag.stein_samples << '\n';
    out << "diag.bump_radius=" << format_double(diag.bump_radius) << '\n';
    out << "diag.bump_x=" << format_double(diag.bump_center.x) << '\n';
    out << "diag.bump_y=" << format_double(diag.bump_center.y) << '\n';
    out << "ablation.disable_unit=" << (disable_unit ? "true" : "false") << '\n';
    out << "ablation.disable_orth=" << (disable_orth ? "true" : "false") << '\n';
    out << "ablation.disable_dir=" << (disable_dir ? "true" : "false") << '\n';
    return out.str();
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    RunConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                              ": expected key=value");
        }
        config.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& key_value_pairs) {
    for (const std::string& pair : key_value_pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + pair + "' is not of the form key=value");
        }
        config.set(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
    }
}

} // namespace sgvf
