#pragma once

#include "uld/model.hpp"
#include "uld/rng.hpp"

namespace uld {

// Fixed-setting Schroedinger-Foellmer sampler: unit-time diffusion from the
// origin towards pi, with the drift estimated by N Monte Carlo samples and
// the SDE discretized at level l.
struct SfsConfig {
    int level = 6;
    long n_drift_samples = 1000;
    ModelPtr model;

    void validate() const {
        if (level < 0) throw ConfigError("sfs: level must be >= 0");
        if (n_drift_samples < 1) throw ConfigError("sfs: N must be >= 1");
        if (!model) throw ConfigError("sfs: model is not set");
    }
};

// Monte Carlo drift estimate b-hat(x, t): ratio of the sample means of
// grad f and f at the points x + sqrt(1 - t) Z^i, with f = pi / phi computed
// through U. Evaluated in log space with a shared max-shift.
Vec sfs_drift_estimate(const Vec& x, double t, long n_samples, const TargetModel& model,
                       RngStream& rng);

// One terminal sample X-tilde_1 of the Euler-discretized SF diffusion.
Vec sfs_sample(const SfsConfig& config, RngStream& rng);

} // namespace uld
