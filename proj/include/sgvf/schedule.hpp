#pragma once

namespace sgvf {

// Geometric noise schedule: sigma(t) = sigma_min^(1-t) * sigma_max^t,
// strictly increasing on [0, 1]. The lower end is kept at 0.1: the denoising
// targets scale as 1/sigma, so a much smaller sigma_min lets the t ~ 0
// samples dominate the unweighted regression and the composition-time slice
// never converges within the stock iteration budget.
struct NoiseSchedule {
    double sigma_min = 0.1;
    double sigma_max = 0.5;

    void validate() const;
    double sigma(double t) const;
};

} // namespace sgvf
