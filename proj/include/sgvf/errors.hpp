#pragma once

#include <stdexcept>
#include <string>

namespace sgvf {

// Error taxonomy shared by the library and the CLI. Each kind maps to a
// distinct process exit code (see tools/sgvf_main.cpp).
enum class ErrorKind {
    config = 2,
    io = 3,
    format = 4,
    shape = 5,
    domain = 6,
    numeric = 7,
    training = 8,
    statistics = 9,
    state = 10,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(ErrorKind::config, msg) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};
struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error(ErrorKind::format, msg) {}
};
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(ErrorKind::shape, msg) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(ErrorKind::domain, msg) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(ErrorKind::numeric, msg) {}
};
struct TrainingError : Error {
    explicit TrainingError(const std::string& msg) : Error(ErrorKind::training, msg) {}
};
struct StatsError : Error {
    explicit StatsError(const std::string& msg) : Error(ErrorKind::statistics, msg) {}
};
struct StateError : Error {
    explicit StateError(const std::string& msg) : Error(ErrorKind::state, msg) {}
};

const char* error_kind_name(ErrorKind kind);

} // namespace sgvf
