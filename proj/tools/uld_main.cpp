#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "uld/harness.hpp"

namespace {

void add_common_options(CLI::App& app, uld::ExperimentSpec& spec, std::uint64_t& seed) {
    app.set_config("--config", "", "flat key-value config file; flags override the file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    app.add_option("--model", spec.model, "gaussian|logistic|double-well|ginzburg-landau")
        ->check(CLI::IsMember({"gaussian", "logistic", "double-well", "ginzburg-landau"}));
    app.add_option("--dim", spec.dim, "state dimension (gaussian/double-well/logistic)");
    app.add_option("--d0", spec.d0, "Ginzburg-Landau lattice side (d = d0^3)");
    app.add_option("--mu0", spec.mu0, "gaussian toy mean, one value per coordinate");
    app.add_option("--logistic-n", spec.logistic_n, "logistic data size");
    app.add_option("--lstar", spec.est.l_star, "coarsest level l*");
    app.add_option("--lmax", spec.est.l_max, "finest level");
    app.add_option("--level-exponent", spec.est.level_exponent,
                   "level mass exponent: P_L(l) ~ 2^{-e l}");
    app.add_option("--alpha", spec.est.alpha, "Q-check mixture weight");
    app.add_option("--sigma", spec.dyn.sigma, "velocity noise scale");
    app.add_option("--kappa", spec.dyn.kappa, "friction");
    app.add_option("--k", spec.est.k, "burn-in k");
    app.add_flag("--strict-k", spec.est.strict_k, "disable the adaptive k <- tau/2 rule");
    app.add_option("--M", spec.est.M, "replicates per estimate");
    app.add_option("--reps", spec.repetitions, "outer repeats for the MSE protocol");
    app.add_option("--seed", seed, "global seed");
    app.add_option("--workers", spec.workers, "worker threads");
    app.add_option("--out", spec.out, "output prefix; writes <out>.csv and <out>.json");
    app.add_option("--x0", spec.est.x0, "initial position, one value per coordinate");
    app.add_option("--tau-cap", spec.est.tau_cap, "hard cap on kernel steps before meeting");
    app.add_flag("--wall-time", spec.record_wall_time, "record real wall times (non-deterministic)");
    app.add_option("--l-lo", spec.sweep_l_lo, "lowest sweep level");
    app.add_option("--l-hi", spec.sweep_l_hi, "highest sweep level");
    app.add_option("--ref-level", spec.ref_level, "weak-error reference level");
    app.add_option("--horizon", spec.horizon, "weak-error unit-time kernels");
    app.add_option("--m-grid", spec.m_grid, "replicate counts for mse-vs-cost");
    app.add_option("--reference", spec.reference, "explicit reference expectation");
    app.add_option("--sfs-level", spec.sfs_level, "SFS discretization level");
    app.add_option("--sfs-N", spec.sfs_samples, "SFS drift sample count");
    app.add_option("--ref-chain-level", spec.ref_chain_level, "logistic reference chain level");
    app.add_option("--ref-kept-steps", spec.ref_kept_steps, "logistic reference kept steps");
    std::function<void(const std::string&)> obs = [&spec](const std::string& name) {
        if (name == "position") spec.est.observable = uld::Observable{};
        else if (name == "first") spec.est.observable = uld::first_coordinate_observable();
        else throw CLI::ValidationError("--observable", "must be position or first");
    };
    app.add_option_function<std::string>("--observable", obs, "position (default) or first");
}

void print_summary(const uld::RunSummary& s) {
    auto print_vec = [](const char* label, const uld::Vec& v) {
        if (v.empty()) return;
        std::printf("%s:", label);
        for (double x : v) std::printf(" %.10g", x);
        std::printf("\n");
    };
    print_vec("mean", s.mean);
    print_vec("stderr", s.stderr_mean);
    print_vec("mse", s.mse);
    if (!s.table_rows.empty()) {
        for (std::size_t j = 0; j < s.table_header.size(); ++j)
            std::printf("%s%s", j ? "\t" : "", s.table_header[j].c_str());
        std::printf("\n");
        for (const auto& row : s.table_rows) {
            for (std::size_t j = 0; j < row.size(); ++j)
                std::printf("%s%.10g", j ? "\t" : "", row[j]);
            std::printf("\n");
        }
    }
    if (s.has_slope)
        std::printf("slope: %.6g (intercept %.6g, R^2 %.4f)\n", s.slope.slope, s.slope.intercept,
                    s.slope.r_squared);
    std::printf("replicates: %zu  total_cost: %lld  gaussians: %llu\n", s.n_replicates,
                s.total_cost, static_cast<unsigned long long>(s.gaussian_draws));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unbiased estimation with coupled underdamped Langevin chains"};
    app.require_subcommand(1);

    struct Cmd {
        uld::ExperimentSpec spec;
        std::uint64_t seed = 1;
    };
    std::vector<std::pair<CLI::App*, Cmd>> cmds;
    cmds.reserve(6);
    for (const auto kind :
         {uld::ExperimentKind::Estimate, uld::ExperimentKind::MseVsCost,
          uld::ExperimentKind::WeakError, uld::ExperimentKind::IncrementMoments,
          uld::ExperimentKind::MeetingTails, uld::ExperimentKind::SfsBaseline}) {
        CLI::App* sub = app.add_subcommand(uld::kind_name(kind));
        cmds.emplace_back(sub, Cmd{});
        cmds.back().second.spec.kind = kind;
    }
    for (auto& [sub, cmd] : cmds) add_common_options(*sub, cmd.spec, cmd.seed);

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [sub, cmd] : cmds) {
            if (!sub->parsed()) continue;
            const uld::RunSummary s = uld::run_experiment(cmd.spec, cmd.seed);
            print_summary(s);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
