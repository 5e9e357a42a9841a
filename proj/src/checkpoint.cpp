#include "sgvf/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "sgvf/errors.hpp"

namespace sgvf {

namespace {

constexpr char kMagic[5] = {'S', 'G', 'V', 'F', '1'};

static_assert(sizeof(double) == 8, "f64 payload layout requires 8-byte double");

// Serialization is defined little-endian; byteswap on big-endian hosts.
template <typename T>
T to_le(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open '" + path + "' for writing");
    }
    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        offset_ += n;
    }
    void u32(std::uint32_t v) {
        v = to_le(v);
        bytes(&v, 4);
    }
    void u64(std::uint64_t v) {
        v = to_le(v);
        bytes(&v, 8);
    }
    void f64(double v) {
        auto bits = to_le(std::bit_cast<std::uint64_t>(v));
        bytes(&bits, 8);
    }
    std::uint64_t offset() const { return offset_; }
    void close(const std::string& path) {
        out_.flush();
        if (!out_) throw IoError("write failed for '" + path + "'");
    }

private:
    std::ofstream out_;
    std::uint64_t offset_ = 0;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open '" + path + "' for reading");
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            throw FormatError("'" + path_ + "': truncated at byte offset " + std::to_string(offset_));
        }
        offset_ += n;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return to_le(v);
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, 8);
        return to_le(v);
    }
    double f64() {
        std::uint64_t bits;
        bytes(&bits, 8);
        return std::bit_cast<double>(to_le(bits));
    }
    std::uint64_t offset() const { return offset_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    std::uint64_t offset_ = 0;
};

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    const MlpModel& model = ckpt.model;
    if (model.layer_sizes.size() < 2 || model.weights.size() + 1 != model.layer_sizes.size()) {
        throw StateError("checkpoint model has inconsistent layer shapes");
    }
    Writer w(path);
    w.bytes(kMagic, sizeof(kMagic));
    w.f64(ckpt.meta.sigma_min);
    w.f64(ckpt.meta.sigma_max);
    w.f64(ckpt.meta.k_s);
    w.f64(ckpt.meta.t_eval);
    w.u64(ckpt.meta.seed);
    w.u64(ckpt.meta.iterations);
    w.u64(ckpt.meta.config_digest);
    w.u32(static_cast<std::uint32_t>(model.layer_sizes.size()));
    for (int s : model.layer_sizes) w.u32(static_cast<std::uint32_t>(s));
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        for (double v : model.weights[l].a) w.f64(v);
        for (double v : model.biases[l]) w.f64(v);
    }
    w.u64(w.offset());
    w.close(path);
}

Checkpoint load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[5];
    r.bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("'" + path + "': bad magic at byte offset 0");
    }

    Checkpoint ckpt;
    ckpt.meta.sigma_min = r.f64();
    ckpt.meta.sigma_max = r.f64();
    ckpt.meta.k_s = r.f64();
    ckpt.meta.t_eval = r.f64();
    ckpt.meta.seed = r.u64();
    ckpt.meta.iterations = r.u64();
    ckpt.meta.config_digest = r.u64();

    const std::uint32_t n_sizes = r.u32();
    if (n_sizes < 2 || n_sizes > 64) {
        throw FormatError("'" + path + "': implausible layer count " + std::to_string(n_sizes) +
                          " at byte offset " + std::to_string(r.offset() - 4));
    }
    MlpModel& model = ckpt.model;
    model.layer_sizes.resize(n_sizes);
    for (std::uint32_t i = 0; i < n_sizes; ++i) {
        const std::uint64_t at = r.offset();
        const std::uint32_t s = r.u32();
        if (s < 1 || s > (1u << 20)) {
            throw FormatError("'" + path + "': bad layer size " + std::to_string(s) +
                              " at byte offset " + std::to_string(at));
        }
        model.layer_sizes[i] = static_cast<int>(s);
    }
    for (std::uint32_t l = 0; l + 1 < n_sizes; ++l) {
        Matrix w(model.layer_sizes[l + 1], model.layer_sizes[l]);
        for (double& v : w.a) v = r.f64();
        model.weights.push_back(std::move(w));
        std::vector<double> b(static_cast<std::size_t>(model.layer_sizes[l + 1]));
        for (double& v : b) v = r.f64();
        model.biases.push_back(std::move(b));
    }

    const std::uint64_t payload_bytes = r.offset();
    const std::uint64_t recorded = r.u64();
    if (recorded != payload_bytes) {
        throw FormatError("'" + path + "': length field " + std::to_string(recorded) +
                          " does not match payload size " + std::to_string(payload_bytes) +
                          " at byte offset " + std::to_string(payload_bytes));
    }
    return ckpt;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace sgvf
