#include "uld/kernels.hpp"

#include <cmath>

namespace uld {

NoisePath NoisePath::draw(int l, int d, long count, RngStream& rng) {
    NoisePath path;
    path.l = l;
    path.delta = std::ldexp(1.0, -l);
    path.gammas.resize(static_cast<std::size_t>(count));
    path.brownian.resize(static_cast<std::size_t>(count));
    const double scale = std::sqrt(path.delta);
    for (long k = 0; k < count; ++k) {
        rng.normal_vec(static_cast<std::size_t>(d), scale, path.gammas[static_cast<std::size_t>(k)]);
        rng.normal_vec(static_cast<std::size_t>(d), scale, path.brownian[static_cast<std::size_t>(k)]);
        rng.note_step();
    }
    return path;
}

NoisePath NoisePath::coarsen() const {
    if (l < 1) throw ConfigError("cannot coarsen a level-0 path");
    NoisePath out;
    out.l = l - 1;
    out.delta = 2.0 * delta;
    const std::size_t n = gammas.size() / 2;
    out.gammas.resize(n);
    out.brownian.resize(n);
    const std::size_t d = gammas.empty() ? 0 : gammas[0].size();
    for (std::size_t k = 0; k < n; ++k) {
        out.gammas[k].resize(d);
        out.brownian[k].resize(d);
        for (std::size_t i = 0; i < d; ++i) {
            out.gammas[k][i] = gammas[2 * k][i] + gammas[2 * k + 1][i];
            out.brownian[k][i] = brownian[2 * k][i] + brownian[2 * k + 1][i];
        }
    }
    return out;
}

void advance_with_path(PhaseState& state, const NoisePath& path, std::size_t first,
                       std::size_t last, const TargetModel& model, const DynamicsParams& dyn,
                       const LevelParams& level) {
    Vec grad_buf;
    for (std::size_t k = first; k < last; ++k)
        euler_step_inplace(state, model, dyn, level, path.gammas[k].data(),
                           path.brownian[k].data(), grad_buf);
}

namespace {

void split_state(const Vec& y, PhaseState& out) {
    const std::size_t d = y.size() / 2;
    out.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(d));
    out.v.assign(y.begin() + static_cast<std::ptrdiff_t>(d), y.end());
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("mixture weight alpha must lie in (0, 1)");
}

} // namespace

CoupledPair sample_Q_l(const CoupledPair& pair, const LevelParams& level, const TargetModel& model,
                       const DynamicsParams& dyn, RngStream& rng) {
    const NoisePath path = NoisePath::draw(level.l, model.dim(), level.steps, rng);
    CoupledPair out = pair;
    advance_with_path(out.u, path, 0, path.gammas.size(), model, dyn, level);
    if (out.met)
        out.u_tilde = out.u;
    else
        advance_with_path(out.u_tilde, path, 0, path.gammas.size(), model, dyn, level);
    return out;
}

CoupledPair sample_P_l(const CoupledPair& pair, const LevelParams& level, const TargetModel& model,
                       const DynamicsParams& dyn, RngStream& rng) {
    const NoisePath path = NoisePath::draw(level.l, model.dim(), level.steps - 1, rng);
    CoupledPair out = pair;
    advance_with_path(out.u, path, 0, path.gammas.size(), model, dyn, level);
    if (out.met)
        out.u_tilde = out.u;
    else
        advance_with_path(out.u_tilde, path, 0, path.gammas.size(), model, dyn, level);

    const GaussianStepParams p1 = transition_params(out.u, model, dyn, level);
    const GaussianStepParams p2 =
        out.met ? p1 : transition_params(out.u_tilde, model, dyn, level);
    rng.note_step();
    const CoupledDraw draw = reflection_max_coupling(p1.mean, p2.mean, p1.stddev, rng);
    split_state(draw.y1, out.u);
    split_state(draw.y2, out.u_tilde);
    out.met = pair.met || draw.met;
    return out;
}

CoupledPair sample_K_check_l(const CoupledPair& pair, const LevelParams& level, double alpha,
                             const TargetModel& model, const DynamicsParams& dyn, RngStream& rng) {
    check_alpha(alpha);
    if (rng.uniform() < alpha) return sample_Q_l(pair, level, model, dyn, rng);
    return sample_P_l(pair, level, model, dyn, rng);
}

std::pair<PhaseState, PhaseState> sample_Kbar_l_lm1(const PhaseState& u_fine,
                                                    const PhaseState& u_coarse, int l,
                                                    const SigmaLSchedule& schedule,
                                                    const TargetModel& model,
                                                    const DynamicsParams& dyn, RngStream& rng) {
    if (l < 1) throw ConfigError("cross-level kernel requires l >= 1");
    const LevelParams fine_level = LevelParams::at(l, schedule);
    const LevelParams coarse_level = LevelParams::at(l - 1, schedule);
    const NoisePath fine_path = NoisePath::draw(l, model.dim(), fine_level.steps, rng);
    const NoisePath coarse_path = fine_path.coarsen();
    std::pair<PhaseState, PhaseState> out{u_fine, u_coarse};
    advance_with_path(out.first, fine_path, 0, fine_path.gammas.size(), model, dyn, fine_level);
    advance_with_path(out.second, coarse_path, 0, coarse_path.gammas.size(), model, dyn,
                      coarse_level);
    return out;
}

QuadState sample_Q_l_lm1(const QuadState& z, int l, const SigmaLSchedule& schedule,
                         const TargetModel& model, const DynamicsParams& dyn, RngStream& rng) {
    if (l < 1) throw ConfigError("quad kernel requires l >= 1");
    const LevelParams fine_level = LevelParams::at(l, schedule);
    const LevelParams coarse_level = LevelParams::at(l - 1, schedule);
    const NoisePath fine_path = NoisePath::draw(l, model.dim(), fine_level.steps, rng);
    const NoisePath coarse_path = fine_path.coarsen();

    QuadState out = z;
    advance_with_path(out.fine.u, fine_path, 0, fine_path.gammas.size(), model, dyn, fine_level);
    if (out.fine.met)
        out.fine.u_tilde = out.fine.u;
    else
        advance_with_path(out.fine.u_tilde, fine_path, 0, fine_path.gammas.size(), model, dyn,
                          fine_level);
    advance_with_path(out.coarse.u, coarse_path, 0, coarse_path.gammas.size(), model, dyn,
                      coarse_level);
    if (out.coarse.met)
        out.coarse.u_tilde = out.coarse.u;
    else
        advance_with_path(out.coarse.u_tilde, coarse_path, 0, coarse_path.gammas.size(), model,
                          dyn, coarse_level);
    return out;
}

QuadState sample_P_l_lm1(const QuadState& z, int l, const SigmaLSchedule& schedule,
                         const TargetModel& model, const DynamicsParams& dyn, RngStream& rng) {
    if (l < 1) throw ConfigError("quad kernel requires l >= 1");
    const LevelParams fine_level = LevelParams::at(l, schedule);
    const LevelParams coarse_level = LevelParams::at(l - 1, schedule);

    // 2^l - 1 fine increments; the first 2^l - 2 coarsen to the coarse path.
    const NoisePath fine_path = NoisePath::draw(l, model.dim(), fine_level.steps - 1, rng);
    NoisePath head = fine_path;
    head.gammas.resize(static_cast<std::size_t>(fine_level.steps - 2));
    head.brownian.resize(static_cast<std::size_t>(fine_level.steps - 2));
    const NoisePath coarse_path = head.coarsen();

    QuadState out = z;
    advance_with_path(out.fine.u, fine_path, 0, fine_path.gammas.size(), model, dyn, fine_level);
    if (out.fine.met)
        out.fine.u_tilde = out.fine.u;
    else
        advance_with_path(out.fine.u_tilde, fine_path, 0, fine_path.gammas.size(), model, dyn,
                          fine_level);
    advance_with_path(out.coarse.u, coarse_path, 0, coarse_path.gammas.size(), model, dyn,
                      coarse_level);
    if (out.coarse.met)
        out.coarse.u_tilde = out.coarse.u;
    else
        advance_with_path(out.coarse.u_tilde, coarse_path, 0, coarse_path.gammas.size(), model,
                          dyn, coarse_level);

    const GaussianStepParams f1 = transition_params(out.fine.u, model, dyn, fine_level);
    const GaussianStepParams f2 =
        out.fine.met ? f1 : transition_params(out.fine.u_tilde, model, dyn, fine_level);
    const GaussianStepParams c1 = transition_params(out.coarse.u, model, dyn, coarse_level);
    const GaussianStepParams c2 =
        out.coarse.met ? c1 : transition_params(out.coarse.u_tilde, model, dyn, coarse_level);

    rng.note_step();
    const PairedCoupledDraw draw = sync_pairwise_reflection_coupling(
        f1.mean, f2.mean, c1.mean, c2.mean, f1.stddev, c1.stddev, rng);
    split_state(draw.fine.y1, out.fine.u);
    split_state(draw.fine.y2, out.fine.u_tilde);
    split_state(draw.coarse.y1, out.coarse.u);
    split_state(draw.coarse.y2, out.coarse.u_tilde);
    out.fine.met = z.fine.met || draw.fine.met;
    out.coarse.met = z.coarse.met || draw.coarse.met;
    return out;
}

QuadState sample_K_check_l_lm1(const QuadState& z, double alpha, int l,
                               const SigmaLSchedule& schedule, const TargetModel& model,
                               const DynamicsParams& dyn, RngStream& rng) {
    check_alpha(alpha);
    if (z.fine.met && z.coarse.met) return sample_Q_l_lm1(z, l, schedule, model, dyn, rng);
    if (rng.uniform() < alpha) return sample_Q_l_lm1(z, l, schedule, model, dyn, rng);
    return sample_P_l_lm1(z, l, schedule, model, dyn, rng);
}

} // namespace uld
