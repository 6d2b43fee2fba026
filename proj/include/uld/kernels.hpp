#pragma once

#include <utility>

#include "uld/coupling.hpp"
#include "uld/dynamics.hpp"

namespace uld {

// A coupled pair of chains at one level. met implies u and u_tilde are
// bitwise identical, and no kernel in this module ever clears the flag.
struct CoupledPair {
    PhaseState u;
    PhaseState u_tilde;
    bool met = false;
};

// Z_{n,l,l-1}: fine pair at level l, coarse pair at level l-1.
struct QuadState {
    CoupledPair fine;
    CoupledPair coarse;
};

// Unit-time noise path at level l: per-step position noise gamma_k and
// Brownian increments dB_k, each N(0, delta_l I).
struct NoisePath {
    int l = 0;
    double delta = 1.0;
    std::vector<Vec> gammas;
    std::vector<Vec> brownian;

    // Draw `count` increments (count == 2^l for a full unit-time path).
    static NoisePath draw(int l, int d, long count, RngStream& rng);

    // Sum consecutive pairs: each coarse increment is N(0, delta_{l-1} I).
    NoisePath coarsen() const;
};

// Advance a state with the increments [first, last) of a path.
void advance_with_path(PhaseState& state, const NoisePath& path, std::size_t first,
                       std::size_t last, const TargetModel& model, const DynamicsParams& dyn,
                       const LevelParams& level);

// Common-random-numbers coupling of K_l with itself: one path drives both
// chains. Equal inputs give bitwise-equal outputs; unequal inputs never meet.
CoupledPair sample_Q_l(const CoupledPair& pair, const LevelParams& level, const TargetModel& model,
                       const DynamicsParams& dyn, RngStream& rng);

// Shared-noise advance to time 1 - delta_l, then a reflection maximal
// coupling of the two terminal one-step Gaussians. The only kernel that can
// set met on a previously unmet pair.
CoupledPair sample_P_l(const CoupledPair& pair, const LevelParams& level, const TargetModel& model,
                       const DynamicsParams& dyn, RngStream& rng);

// The mixture K-check_l = alpha Q-check_l + (1 - alpha) P-check_l.
CoupledPair sample_K_check_l(const CoupledPair& pair, const LevelParams& level, double alpha,
                             const TargetModel& model, const DynamicsParams& dyn, RngStream& rng);

// Cross-level kernel K-bar_{l,l-1}: one fine path, its coarsening drives the
// coarse chain; marginals K_l and K_{l-1}.
std::pair<PhaseState, PhaseState> sample_Kbar_l_lm1(const PhaseState& u_fine,
                                                    const PhaseState& u_coarse, int l,
                                                    const SigmaLSchedule& schedule,
                                                    const TargetModel& model,
                                                    const DynamicsParams& dyn, RngStream& rng);

// Quad-chain CRN kernel: one fine path shared by the fine pair, its
// coarsening shared by the coarse pair.
QuadState sample_Q_l_lm1(const QuadState& z, int l, const SigmaLSchedule& schedule,
                         const TargetModel& model, const DynamicsParams& dyn, RngStream& rng);

// Quad-chain meeting kernel: shared-noise advance to time 1 - delta_s per
// level, then a synchronous pairwise reflection maximal coupling of the two
// terminal steps. The extra fine increment on [1 - 2 delta_l, 1 - delta_l]
// is fine-only.
QuadState sample_P_l_lm1(const QuadState& z, int l, const SigmaLSchedule& schedule,
                         const TargetModel& model, const DynamicsParams& dyn, RngStream& rng);

// Mixture K-check_{l,l-1}: always Q-check once both pairs have met, otherwise
// Q-check with probability alpha, else P-check.
QuadState sample_K_check_l_lm1(const QuadState& z, double alpha, int l,
                               const SigmaLSchedule& schedule, const TargetModel& model,
                               const DynamicsParams& dyn, RngStream& rng);

} // namespace uld
