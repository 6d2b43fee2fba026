#pragma once

#include <string>
#include <vector>

#include "uld/estimator.hpp"
#include "uld/sfs.hpp"

namespace uld {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares on (x, y) pairs.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

enum class ExperimentKind {
    Estimate,
    MseVsCost,
    WeakError,
    IncrementMoments,
    MeetingTails,
    SfsBaseline,
};

ExperimentKind parse_kind(const std::string& name);
std::string kind_name(ExperimentKind kind);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Estimate;

    // model selection
    std::string model = "gaussian";
    int dim = 2;
    Vec mu0;                 // gaussian toy mean; empty means the origin
    int d0 = 4;              // GL lattice side
    double t_bar = 2.0, gl_gamma = 0.1, gl_zeta = 0.5;
    int logistic_n = 100;

    EstimatorConfig est;
    DynamicsParams dyn;

    int repetitions = 50; // outer repeats for the MSE protocol
    int workers = 1;
    std::string out; // output prefix; empty disables file output
    bool record_wall_time = false;

    // sweep settings
    int sweep_l_lo = 4;
    int sweep_l_hi = 9;
    int ref_level = 11;       // weak-error reference discretization level
    int horizon = 4;          // weak-error unit-time kernels per replicate
    std::vector<int> m_grid;  // replicate counts for mse-vs-cost

    // SFS baseline
    int sfs_level = 6;
    long sfs_samples = 10000; // drift sample count N

    // reference expectation
    Vec reference;            // explicit override
    int ref_chain_level = 10; // logistic reference chain level
    long ref_kept_steps = 1000000;

    void validate() const;
};

struct RunSummary {
    std::vector<ReplicateResult> rows;
    Vec mean, variance, stderr_mean, mse;
    long long total_cost = 0;
    std::uint64_t gaussian_draws = 0;
    std::uint64_t noise_steps = 0; // conceptual noise steps; draws == 2 d steps
    std::size_t n_replicates = 0;
    double wall_time_s = 0.0;

    // sweep table (per level, per M, or per lag n, depending on the kind)
    std::vector<std::string> table_header;
    std::vector<Vec> table_rows;
    bool has_slope = false;
    SlopeFit slope;
};

ModelPtr build_model(const ExperimentSpec& spec);

// Reference expectation: analytic for the Gaussian toy, zero for double-well
// and Ginzburg-Landau, a long single-level chain for logistic.
Vec resolve_reference(const ExperimentSpec& spec, const TargetModel& model);

// Execute the experiment with per-replicate derived streams; results are
// independent of the worker count. Writes <out>.csv and <out>.json when an
// output prefix is set.
RunSummary run_experiment(const ExperimentSpec& spec, std::uint64_t seed);

} // namespace uld
