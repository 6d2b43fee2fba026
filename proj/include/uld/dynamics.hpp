#pragma once

#include <cmath>
#include <functional>

#include "uld/model.hpp"
#include "uld/rng.hpp"

namespace uld {

// One chain state u = (x, v) in R^d x R^d.
struct PhaseState {
    Vec x;
    Vec v;

    int dim() const { return static_cast<int>(x.size()); }
    bool operator==(const PhaseState& o) const { return x == o.x && v == o.v; }
};

PhaseState make_state(int d); // origin in both coordinates

struct DynamicsParams {
    double kappa = 4.5;
    double sigma = 3.0;

    // 2 kappa = sigma^2 makes pi the invariant density; reported, not enforced.
    bool satisfies_invariance_relation(double tol = 1e-12) const {
        return std::abs(2.0 * kappa - sigma * sigma) <= tol * sigma * sigma;
    }
};

using SigmaLSchedule = std::function<double(int)>;

// Default position-noise schedule sigma_l = 2^{-l}.
SigmaLSchedule default_sigma_schedule();
SigmaLSchedule constant_sigma_schedule(double value);

// Discretization level l: step 2^{-l}, 2^l steps per unit-time kernel.
struct LevelParams {
    int l = 0;
    double delta = 1.0;
    double sigma_l = 1.0;
    long steps = 1;

    static LevelParams at(int l, const SigmaLSchedule& schedule);
    static LevelParams at(int l); // default schedule
};

// Mean/diagonal-stddev of the one-step transition density p_l on R^{2d},
// position block first.
struct GaussianStepParams {
    Vec mean;
    Vec stddev;
};

// One Euler step of the discretized dynamics:
//   x' = x + v delta + sigma_l gamma
//   v' = v + (b(x) - kappa v) delta + sigma dB,   b = -grad U.
// gamma and dB are caller-supplied noise increments.
PhaseState euler_step(const PhaseState& state, const TargetModel& model, const DynamicsParams& dyn,
                      const LevelParams& level, const Vec& gamma, const Vec& dB);

// In-place variant used by the kernel layer; grad_buf avoids reallocation.
void euler_step_inplace(PhaseState& state, const TargetModel& model, const DynamicsParams& dyn,
                        const LevelParams& level, const double* gamma, const double* dB,
                        Vec& grad_buf);

// The unit-time kernel K_l: 2^l Euler steps with fresh N(0, delta I) noise.
// Consumes exactly 2^{l+1} d Gaussian variates from rng.
PhaseState apply_kernel(const PhaseState& state, const TargetModel& model,
                        const DynamicsParams& dyn, const LevelParams& level, RngStream& rng);

// Parameters of the one-step Gaussian transition from `state`. Requires
// sigma_l > 0, otherwise the full-state transition is degenerate and cannot
// be maximally coupled.
GaussianStepParams transition_params(const PhaseState& state, const TargetModel& model,
                                     const DynamicsParams& dyn, const LevelParams& level);

} // namespace uld
