#pragma once

#include <cstdint>

#include "uld/kernels.hpp"

namespace uld {

// Vector-valued function of the chain state.
struct Observable {
    std::string name;
    int dim = 0;
    std::function<void(const PhaseState&, double*)> eval;

    Vec operator()(const PhaseState& u) const {
        Vec out(static_cast<std::size_t>(dim));
        eval(u, out.data());
        return out;
    }
};

Observable position_observable(int d);        // phi(u) = x
Observable first_coordinate_observable();     // phi(u) = x_1

struct EstimatorConfig {
    int l_star = 5;
    int l_max = 12;
    double level_exponent = 1.5; // P_L(l) proportional to 2^{-exponent l}
    double alpha = 0.8;
    int k = 100;
    bool strict_k = false; // disable the adaptive k <- tau/2 rule
    int M = 1000;
    long tau_cap = 100000;
    std::uint64_t seed = 0;
    Vec x0, v0; // initial point; empty means the origin
    SigmaLSchedule sigma_l = default_sigma_schedule();
    Observable observable;

    void validate() const;
};

struct ReplicateResult {
    int level = 0;
    Vec value;            // weighted estimator term
    long tau = 0;         // tau_L or max(tau_L, tau_{L-1})
    long long cost = 0;   // Euler-step units, nominal branch formula
    double weight = 0.0;  // 1 / P_L(L)
};

struct RunStats {
    Vec mean;
    Vec sample_variance;
    long long total_cost = 0;
};

struct SingleLevelRun {
    Vec estimate;
    long tau = 0;
    long long cost = 0;
};

struct IncrementRun {
    Vec estimate; // fine-level estimator minus coarse-level estimator
    long tau_fine = 0;
    long tau_coarse = 0;
    long tau_check = 0;
    long long cost = 0;
};

// Normalized truncated-geometric masses on {l_star, ..., l_max}.
Vec level_masses(const EstimatorConfig& config);
int sample_level(const EstimatorConfig& config, RngStream& rng);

// The (k, m) actually used for a realized stopping time tau: by default
// m = min(2k, tau - 1) with k halved to tau/2 when tau < k - 1; m is clamped
// up to k so the time-average window is never empty.
struct BurninWindow {
    int k = 0;
    int m = 0;
};
BurninWindow resolve_window(const EstimatorConfig& config, long tau);

// Lag-1 coupled pair at a single level: Utilde_0 = u0, U_0 = K_l(u0), then
// iterate K-check_l until max(m, tau - 1). Returns the time-averaged
// estimator of pi_l(phi) and the nominal cost tau 2^{l+1}.
SingleLevelRun run_single_level_pair(int level, const EstimatorConfig& config,
                                     const TargetModel& model, const DynamicsParams& dyn,
                                     const PhaseState& init, RngStream& rng);

// Quad chain at levels (l, l-1): tildes start at u0, non-tildes through
// K-bar_{l,l-1}; iterate K-check_{l,l-1} until max(m, tau_check - 1).
// Returns the coupled increment estimator and cost tau_check (2^{l+1} + 2^l).
IncrementRun run_increment_quad(int level, const EstimatorConfig& config, const TargetModel& model,
                                const DynamicsParams& dyn, const PhaseState& init, RngStream& rng);

// One replicate of the randomized-level debiased estimator: draw L, run the
// matching branch, divide by P_L(L).
ReplicateResult unbiased_replicate(const EstimatorConfig& config, const TargetModel& model,
                                   const DynamicsParams& dyn, RngStream& rng);

RunStats average_replicates(const std::vector<ReplicateResult>& results);

} // namespace uld
