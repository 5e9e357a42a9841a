#pragma once

#include <cstdint>
#include <string>

#include "sgvf/mlp.hpp"

namespace sgvf {

// Run metadata persisted next to the parameters. k_s and t_eval describe how
// the network is composed into a guiding field; for score checkpoints they
// are carried through from the run config.
struct CheckpointMeta {
    double sigma_min = 0.01;
    double sigma_max = 0.5;
    double k_s = 0.2;
    double t_eval = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t iterations = 0;
    std::uint64_t config_digest = 0;
};

struct Checkpoint {
    MlpModel model;
    CheckpointMeta meta;
};

// Binary container: magic "SGVF1", header doubles/ints, layer sizes, then
// row-major little-endian f64 payloads (weights then biases per layer), and
// a trailing u64 byte count for truncation detection. Round-trips are
// bit-exact.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// FNV-1a, used to fingerprint the resolved run config in checkpoint headers
std::uint64_t fnv1a(const std::string& text);

} // namespace sgvf
