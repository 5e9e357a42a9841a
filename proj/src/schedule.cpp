#include "sgvf/schedule.hpp"

#include <cmath>
#include <string>

#include "sgvf/errors.hpp"

namespace sgvf {

void NoiseSchedule::validate() const {
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min)) {
        throw ConfigError("noise schedule requires 0 < sigma_min < sigma_max, got [" +
                          std::to_string(sigma_min) + ", " + std::to_string(sigma_max) + "]");
    }
}

double NoiseSchedule::sigma(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("sigma(t) requires t in [0,1], got " + std::to_string(t));
    }
    return std::pow(sigma_min, 1.0 - t) * std::pow(sigma_max, t);
}

} // namespace sgvf
