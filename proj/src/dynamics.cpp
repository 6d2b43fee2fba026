#include "uld/dynamics.hpp"

#include <cmath>

namespace uld {

PhaseState make_state(int d) {
    if (d < 1) throw DimensionError("state dimension must be >= 1");
    return PhaseState{Vec(static_cast<std::size_t>(d), 0.0), Vec(static_cast<std::size_t>(d), 0.0)};
}

SigmaLSchedule default_sigma_schedule() {
    return [](int l) { return std::ldexp(1.0, -l); };
}

SigmaLSchedule constant_sigma_schedule(double value) {
    if (value < 0.0) throw ConfigError("sigma_l must be non-negative");
    return [value](int) { return value; };
}

LevelParams LevelParams::at(int l, const SigmaLSchedule& schedule) {
    if (l < 0) throw ConfigError("level must be >= 0");
    const double sl = schedule(l);
    if (sl < 0.0) throw ConfigError("sigma_l schedule produced a negative value");
    return LevelParams{l, std::ldexp(1.0, -l), sl, 1L << l};
}

LevelParams LevelParams::at(int l) { return at(l, default_sigma_schedule()); }

void euler_step_inplace(PhaseState& state, const TargetModel& model, const DynamicsParams& dyn,
                        const LevelParams& level, const double* gamma, const double* dB,
                        Vec& grad_buf) {
    const std::size_t d = state.x.size();
    model.gradient(state.x, grad_buf);
    for (std::size_t i = 0; i < d; ++i) {
        const double drift = -grad_buf[i];
        if (!std::isfinite(drift))
            throw NumericError("non-finite drift at coordinate " + std::to_string(i) +
                               " (model '" + model.name() + "')");
        const double xi = state.x[i];
        state.x[i] = xi + state.v[i] * level.delta + level.sigma_l * gamma[i];
        state.v[i] = state.v[i] + (drift - dyn.kappa * state.v[i]) * level.delta + dyn.sigma * dB[i];
    }
}

PhaseState euler_step(const PhaseState& state, const TargetModel& model, const DynamicsParams& dyn,
                      const LevelParams& level, const Vec& gamma, const Vec& dB) {
    const std::size_t d = state.x.size();
    if (state.v.size() != d || gamma.size() != d || dB.size() != d ||
        static_cast<int>(d) != model.dim())
        throw DimensionError("euler_step: state/model/noise dimension mismatch");
    PhaseState out = state;
    Vec grad_buf;
    euler_step_inplace(out, model, dyn, level, gamma.data(), dB.data(), grad_buf);
    return out;
}

PhaseState apply_kernel(const PhaseState& state, const TargetModel& model,
                        const DynamicsParams& dyn, const LevelParams& level, RngStream& rng) {
    const std::size_t d = state.x.size();
    if (state.v.size() != d || static_cast<int>(d) != model.dim())
        throw DimensionError("apply_kernel: state/model dimension mismatch");
    PhaseState out = state;
    Vec gamma, dB, grad_buf;
    const double scale = std::sqrt(level.delta);
    for (long k = 0; k < level.steps; ++k) {
        rng.normal_vec(d, scale, gamma);
        rng.normal_vec(d, scale, dB);
        rng.note_step();
        euler_step_inplace(out, model, dyn, level, gamma.data(), dB.data(), grad_buf);
    }
    return out;
}

GaussianStepParams transition_params(const PhaseState& state, const TargetModel& model,
                                     const DynamicsParams& dyn, const LevelParams& level) {
    const std::size_t d = state.x.size();
    if (state.v.size() != d || static_cast<int>(d) != model.dim())
        throw DimensionError("transition_params: state/model dimension mismatch");
    if (level.sigma_l <= 0.0)
        throw DegenerateError("transition_params: sigma_l = 0 makes the one-step transition "
                              "degenerate; the full state cannot be maximally coupled");
    GaussianStepParams p;
    p.mean.resize(2 * d);
    p.stddev.resize(2 * d);
    Vec grad = model.gradient(state.x);
    const double sqrt_delta = std::sqrt(level.delta);
    for (std::size_t i = 0; i < d; ++i) {
        p.mean[i] = state.x[i] + state.v[i] * level.delta;
        p.mean[d + i] = state.v[i] + (-grad[i] - dyn.kappa * state.v[i]) * level.delta;
        p.stddev[i] = level.sigma_l * sqrt_delta;
        p.stddev[d + i] = dyn.sigma * sqrt_delta;
    }
    return p;
}

} // namespace uld
