#include "sgvf/errors.hpp"

namespace sgvf {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::io: return "io";
        case ErrorKind::format: return "format";
        case ErrorKind::shape: return "shape";
        case ErrorKind::domain: return "domain";
        case ErrorKind::numeric: return "numeric";
        case ErrorKind::training: return "training";
        case ErrorKind::statistics: return "statistics";
        case ErrorKind::state: return "state";
    }
    return "unknown";
}

} // namespace sgvf
