#include "uld/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace uld {

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Run f(i) for i in [0, n) on `workers` threads. Tasks own their random
// streams, so scheduling cannot affect results.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

Vec observable_reference(const Observable& phi, const Vec& position_ref) {
    PhaseState u{position_ref, Vec(position_ref.size(), 0.0)};
    return phi(u);
}

std::uint64_t stream_id(ExperimentKind kind, std::uint64_t index) {
    return (static_cast<std::uint64_t>(kind) << 56) + index;
}

struct StreamTally {
    std::uint64_t normals = 0;
    std::uint64_t steps = 0;
};

} // namespace

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw ConfigError("fit_slope: need at least two points");
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        if (!std::isfinite(x) || !std::isfinite(y))
            throw NumericError("fit_slope: non-finite point");
        sx += x;
        sy += y;
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_slope: degenerate abscissae");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ssr = syy - fit.slope * sxy;
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ssr / syy;
    return fit;
}

ExperimentKind parse_kind(const std::string& name) {
    if (name == "estimate") return ExperimentKind::Estimate;
    if (name == "mse-vs-cost") return ExperimentKind::MseVsCost;
    if (name == "weak-error") return ExperimentKind::WeakError;
    if (name == "increment-moments") return ExperimentKind::IncrementMoments;
    if (name == "meeting-tails") return ExperimentKind::MeetingTails;
    if (name == "sfs-baseline") return ExperimentKind::SfsBaseline;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Estimate: return "estimate";
        case ExperimentKind::MseVsCost: return "mse-vs-cost";
        case ExperimentKind::WeakError: return "weak-error";
        case ExperimentKind::IncrementMoments: return "increment-moments";
        case ExperimentKind::MeetingTails: return "meeting-tails";
        case ExperimentKind::SfsBaseline: return "sfs-baseline";
    }
    throw ConfigError("invalid experiment kind");
}

void ExperimentSpec::validate() const {
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (kind == ExperimentKind::WeakError || kind == ExperimentKind::IncrementMoments) {
        if (sweep_l_hi <= sweep_l_lo) throw ConfigError("level sweep needs l_hi > l_lo");
        if (kind == ExperimentKind::WeakError && ref_level <= sweep_l_hi)
            throw ConfigError("weak-error reference level must exceed the sweep range");
        if (horizon < 1) throw ConfigError("weak-error horizon must be >= 1");
    }
}

ModelPtr build_model(const ExperimentSpec& spec) {
    if (spec.model == "gaussian") {
        Vec mu0 = spec.mu0;
        if (mu0.empty()) mu0.assign(static_cast<std::size_t>(spec.dim), 0.0);
        if (static_cast<int>(mu0.size()) != spec.dim)
            throw ConfigError("mu0 length does not match --dim");
        return make_gaussian_model(std::move(mu0));
    }
    if (spec.model == "double-well") return make_double_well_model(spec.dim);
    if (spec.model == "ginzburg-landau")
        return make_ginzburg_landau_model(spec.d0, spec.t_bar, spec.gl_gamma, spec.gl_zeta);
    if (spec.model == "logistic")
        return make_logistic_model(spec.est.seed, spec.logistic_n, spec.dim);
    throw ConfigError("unknown model '" + spec.model + "'");
}

Vec resolve_reference(const ExperimentSpec& spec, const TargetModel& model) {
    if (!spec.reference.empty()) {
        if (static_cast<int>(spec.reference.size()) != model.dim())
            throw ConfigError("explicit reference has the wrong length");
        return spec.reference;
    }
    const std::size_t d = static_cast<std::size_t>(model.dim());
    if (model.name() == "gaussian") {
        // U(x) = |x - mu0|^2 / 2: the position marginal mean is mu0 = -grad U(0).
        Vec zero(d, 0.0);
        Vec g = model.gradient(zero);
        for (double& v : g) v = -v;
        return g;
    }
    if (model.name() == "double-well" || model.name() == "ginzburg-landau") return Vec(d, 0.0);

    // Logistic: long single-level chain at a fine level.
    RngStream rng(spec.est.seed, stream_id(ExperimentKind::Estimate, 0xfefefefeull));
    const LevelParams lp = LevelParams::at(spec.ref_chain_level, spec.est.sigma_l);
    DynamicsParams dyn = spec.dyn;
    PhaseState u = make_state(model.dim());
    const long burn = 1000;
    for (long n = 0; n < burn; ++n) u = apply_kernel(u, model, dyn, lp, rng);
    Vec acc(d, 0.0);
    for (long n = 0; n < spec.ref_kept_steps; ++n) {
        u = apply_kernel(u, model, dyn, lp, rng);
        for (std::size_t j = 0; j < d; ++j) acc[j] += u.x[j];
    }
    for (double& v : acc) v /= static_cast<double>(spec.ref_kept_steps);
    return acc;
}

namespace {

void write_replicate_csv(const std::string& path, const RunSummary& summary,
                         const std::vector<double>& wall_times) {
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open '" + path + "' for writing");
    const std::size_t p = summary.rows.empty() ? 0 : summary.rows[0].value.size();
    out << "replicate_id,level,tau,cost_euler_steps,weight";
    for (std::size_t j = 0; j < p; ++j) out << ",value_" << j;
    out << ",wall_time_s\n";
    for (std::size_t i = 0; i < summary.rows.size(); ++i) {
        const auto& r = summary.rows[i];
        out << i << ',' << r.level << ',' << r.tau << ',' << r.cost << ',' << fmt(r.weight);
        for (double v : r.value) out << ',' << fmt(v);
        out << ',' << fmt(wall_times.empty() ? 0.0 : wall_times[i]) << '\n';
    }
}

void write_table_csv(const std::string& path, const RunSummary& summary) {
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open '" + path + "' for writing");
    for (std::size_t j = 0; j < summary.table_header.size(); ++j)
        out << (j ? "," : "") << summary.table_header[j];
    out << '\n';
    for (const auto& row : summary.table_rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << fmt(row[j]);
        out << '\n';
    }
}

json spec_echo(const ExperimentSpec& spec, std::uint64_t seed) {
    json j;
    j["kind"] = kind_name(spec.kind);
    j["model"] = spec.model;
    j["dim"] = spec.dim;
    j["d0"] = spec.d0;
    j["lstar"] = spec.est.l_star;
    j["lmax"] = spec.est.l_max;
    j["level_exponent"] = spec.est.level_exponent;
    j["alpha"] = spec.est.alpha;
    j["sigma"] = spec.dyn.sigma;
    j["kappa"] = spec.dyn.kappa;
    j["k"] = spec.est.k;
    j["strict_k"] = spec.est.strict_k;
    j["M"] = spec.est.M;
    j["reps"] = spec.repetitions;
    j["seed"] = seed;
    j["observable"] = spec.est.observable.name;
    j["kappa_sigma_relation_holds"] = spec.dyn.satisfies_invariance_relation(1e-9);
    return j;
}

void write_summary_json(const std::string& path, const ExperimentSpec& spec, std::uint64_t seed,
                        const RunSummary& s) {
    json j;
    j["mean"] = s.mean;
    j["variance"] = s.variance;
    j["stderr"] = s.stderr_mean;
    j["mse"] = s.mse;
    j["total_cost"] = s.total_cost;
    j["n_replicates"] = s.n_replicates;
    j["seed"] = seed;
    j["spec_echo"] = spec_echo(spec, seed);
    j["gaussian_draws"] = s.gaussian_draws;
    j["noise_steps"] = s.noise_steps;
    j["wall_time_s"] = s.wall_time_s;
    if (s.has_slope) {
        j["slope"] = s.slope.slope;
        j["intercept"] = s.slope.intercept;
        j["r_squared"] = s.slope.r_squared;
    }
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

EstimatorConfig prepared_config(const ExperimentSpec& spec, const TargetModel& model,
                                std::uint64_t seed) {
    EstimatorConfig cfg = spec.est;
    cfg.seed = seed;
    if (!cfg.observable.eval) cfg.observable = position_observable(model.dim());
    return cfg;
}

RunSummary run_estimate(const ExperimentSpec& spec, const TargetModel& model, std::uint64_t seed) {
    const EstimatorConfig cfg = prepared_config(spec, model, seed);
    cfg.validate();
    const std::size_t M = static_cast<std::size_t>(cfg.M);

    RunSummary s;
    s.rows.resize(M);
    std::vector<double> wall(M, 0.0);
    std::vector<StreamTally> tally(M);
    parallel_for(M, spec.workers, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        RngStream rng(seed, stream_id(spec.kind, i));
        s.rows[i] = unbiased_replicate(cfg, model, spec.dyn, rng);
        tally[i] = StreamTally{rng.normal_count(), rng.step_count()};
        if (spec.record_wall_time)
            wall[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    const RunStats stats = average_replicates(s.rows);
    s.mean = stats.mean;
    s.variance = stats.sample_variance;
    s.total_cost = stats.total_cost;
    s.n_replicates = M;
    s.stderr_mean.resize(s.mean.size());
    for (std::size_t j = 0; j < s.mean.size(); ++j)
        s.stderr_mean[j] = std::sqrt(s.variance[j] / static_cast<double>(M));
    for (const auto& t : tally) {
        s.gaussian_draws += t.normals;
        s.noise_steps += t.steps;
    }

    const Vec ref = observable_reference(cfg.observable, resolve_reference(spec, model));
    s.mse.resize(s.mean.size());
    for (std::size_t j = 0; j < s.mean.size(); ++j) {
        const double e = s.mean[j] - ref[j];
        s.mse[j] = e * e;
    }

    if (!spec.out.empty()) write_replicate_csv(spec.out + ".csv", s, wall);
    return s;
}

RunSummary run_mse_vs_cost(const ExperimentSpec& spec, const TargetModel& model,
                           std::uint64_t seed) {
    const EstimatorConfig cfg = prepared_config(spec, model, seed);
    cfg.validate();
    std::vector<int> grid = spec.m_grid;
    if (grid.empty()) grid = {250, 500, 1000, 2000};
    const int reps = spec.repetitions;
    const Vec ref = observable_reference(cfg.observable, resolve_reference(spec, model));

    // Flatten (grid point, repeat, replicate) into one task list.
    struct Task {
        std::size_t g, j, i;
        std::uint64_t id;
    };
    std::vector<Task> tasks;
    std::vector<std::vector<std::vector<ReplicateResult>>> results(grid.size());
    std::uint64_t id = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        results[g].resize(static_cast<std::size_t>(reps));
        for (int j = 0; j < reps; ++j) {
            results[g][static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(grid[g]));
            for (int i = 0; i < grid[g]; ++i)
                tasks.push_back(Task{g, static_cast<std::size_t>(j),
                                     static_cast<std::size_t>(i), id++});
        }
    }

    RunSummary s;
    std::vector<StreamTally> tally(tasks.size());
    parallel_for(tasks.size(), spec.workers, [&](std::size_t t) {
        const Task& task = tasks[t];
        RngStream rng(seed, stream_id(spec.kind, task.id));
        results[task.g][task.j][task.i] = unbiased_replicate(cfg, model, spec.dyn, rng);
        tally[t] = StreamTally{rng.normal_count(), rng.step_count()};
    });
    for (const auto& t : tally) {
        s.gaussian_draws += t.normals;
        s.noise_steps += t.steps;
    }

    s.table_header = {"M", "mse", "mean_cost"};
    std::vector<std::pair<double, double>> points;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double mse = 0.0, mean_cost = 0.0;
        for (int j = 0; j < reps; ++j) {
            const RunStats stats = average_replicates(results[g][static_cast<std::size_t>(j)]);
            for (std::size_t c = 0; c < stats.mean.size(); ++c) {
                const double e = stats.mean[c] - ref[c];
                mse += e * e;
            }
            mean_cost += static_cast<double>(stats.total_cost);
            s.total_cost += stats.total_cost;
            s.n_replicates += results[g][static_cast<std::size_t>(j)].size();
        }
        mse /= reps;
        mean_cost /= reps;
        s.table_rows.push_back(Vec{static_cast<double>(grid[g]), mse, mean_cost});
        points.emplace_back(std::log(mean_cost), std::log(mse));
    }
    s.slope = fit_slope(points);
    s.has_slope = true;
    if (!spec.out.empty()) write_table_csv(spec.out + ".csv", s);
    return s;
}

RunSummary run_weak_error(const ExperimentSpec& spec, const TargetModel& model,
                          std::uint64_t seed) {
    EstimatorConfig cfg = prepared_config(spec, model, seed);
    const int d = model.dim();
    const int l_lo = spec.sweep_l_lo, l_hi = spec.sweep_l_hi, l_ref = spec.ref_level;
    const std::size_t n_levels = static_cast<std::size_t>(l_hi - l_lo + 1);
    const std::size_t reps = static_cast<std::size_t>(cfg.M);

    // Finite-horizon weak error with shared noise: the reference-level path
    // drives every coarser chain through iterated coarsening, so the
    // per-replicate differences carry only the discretization effect.
    PhaseState u0 = make_state(d);
    if (!cfg.x0.empty()) u0.x = cfg.x0;
    else u0.x.assign(static_cast<std::size_t>(d), 1.0);
    if (!cfg.v0.empty()) u0.v = cfg.v0;

    std::vector<Vec> sums(reps); // per replicate: phi_1 at each level then ref
    std::vector<StreamTally> tally(reps);
    parallel_for(reps, spec.workers, [&](std::size_t r) {
        RngStream rng(seed, stream_id(spec.kind, r));
        std::vector<PhaseState> chains(n_levels, u0);
        PhaseState ref_chain = u0;
        const LevelParams ref_lp = LevelParams::at(l_ref, cfg.sigma_l);
        for (int t = 0; t < spec.horizon; ++t) {
            NoisePath path = NoisePath::draw(l_ref, d, ref_lp.steps, rng);
            advance_with_path(ref_chain, path, 0, path.gammas.size(), model, spec.dyn, ref_lp);
            for (int lev = l_ref - 1; lev >= l_lo; --lev) {
                path = path.coarsen();
                if (lev <= l_hi) {
                    const LevelParams lp = LevelParams::at(lev, cfg.sigma_l);
                    advance_with_path(chains[static_cast<std::size_t>(lev - l_lo)], path, 0,
                                      path.gammas.size(), model, spec.dyn, lp);
                }
            }
        }
        Vec row(n_levels + 1);
        for (std::size_t i = 0; i < n_levels; ++i) row[i] = chains[i].x[0];
        row[n_levels] = ref_chain.x[0];
        sums[r] = std::move(row);
        tally[r] = StreamTally{rng.normal_count(), rng.step_count()};
    });

    Vec mean(n_levels + 1, 0.0);
    for (const auto& row : sums)
        for (std::size_t i = 0; i < row.size(); ++i) mean[i] += row[i];
    for (double& v : mean) v /= static_cast<double>(reps);

    RunSummary s;
    s.n_replicates = reps;
    for (const auto& t : tally) {
        s.gaussian_draws += t.normals;
        s.noise_steps += t.steps;
    }
    s.table_header = {"level", "delta", "estimate", "reference", "abs_error"};
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < n_levels; ++i) {
        const int lev = l_lo + static_cast<int>(i);
        const double delta = std::ldexp(1.0, -lev);
        const double err = std::abs(mean[i] - mean[n_levels]);
        s.table_rows.push_back(Vec{static_cast<double>(lev), delta, mean[i], mean[n_levels], err});
        points.emplace_back(std::log(delta), std::log(err));
    }
    s.slope = fit_slope(points);
    s.has_slope = true;
    s.mean = {mean[n_levels]};
    if (!spec.out.empty()) write_table_csv(spec.out + ".csv", s);
    return s;
}

RunSummary run_increment_moments(const ExperimentSpec& spec, const TargetModel& model,
                                 std::uint64_t seed) {
    EstimatorConfig cfg = prepared_config(spec, model, seed);
    cfg.observable = first_coordinate_observable();
    const std::size_t reps = static_cast<std::size_t>(cfg.M);
    const int l_lo = spec.sweep_l_lo, l_hi = spec.sweep_l_hi;

    RunSummary s;
    s.table_header = {"level", "delta", "second_moment"};
    std::vector<std::pair<double, double>> points;
    for (int lev = l_lo; lev <= l_hi; ++lev) {
        EstimatorConfig level_cfg = cfg;
        level_cfg.l_star = std::min(cfg.l_star, lev - 1);
        level_cfg.l_max = std::max(cfg.l_max, level_cfg.l_star + 1);
        level_cfg.validate();
        const PhaseState init = make_state(model.dim());
        std::vector<double> sq(reps, 0.0);
        std::vector<StreamTally> tally(reps);
        parallel_for(reps, spec.workers, [&](std::size_t r) {
            RngStream rng(seed, stream_id(spec.kind,
                                          (static_cast<std::uint64_t>(lev) << 32) + r));
            const IncrementRun run =
                run_increment_quad(lev, level_cfg, model, spec.dyn, init, rng);
            sq[r] = run.estimate[0] * run.estimate[0];
            tally[r] = StreamTally{rng.normal_count(), rng.step_count()};
        });
        double m2 = 0.0;
        for (double v : sq) m2 += v;
        m2 /= static_cast<double>(reps);
        for (const auto& t : tally) {
            s.gaussian_draws += t.normals;
            s.noise_steps += t.steps;
        }
        const double delta = std::ldexp(1.0, -lev);
        s.table_rows.push_back(Vec{static_cast<double>(lev), delta, m2});
        points.emplace_back(std::log(delta), std::log(m2));
        s.n_replicates += reps;
    }
    s.slope = fit_slope(points);
    s.has_slope = true;
    if (!spec.out.empty()) write_table_csv(spec.out + ".csv", s);
    return s;
}

RunSummary run_meeting_tails(const ExperimentSpec& spec, const TargetModel& model,
                             std::uint64_t seed) {
    const EstimatorConfig cfg = prepared_config(spec, model, seed);
    cfg.validate();
    const std::size_t reps = static_cast<std::size_t>(cfg.M);
    const PhaseState init = make_state(model.dim());

    std::vector<long> taus(reps, 0);
    std::vector<StreamTally> tally(reps);
    parallel_for(reps, spec.workers, [&](std::size_t r) {
        RngStream rng(seed, stream_id(spec.kind, r));
        const SingleLevelRun run =
            run_single_level_pair(cfg.l_star, cfg, model, spec.dyn, init, rng);
        taus[r] = run.tau;
        tally[r] = StreamTally{rng.normal_count(), rng.step_count()};
    });

    long tau_max = 0;
    for (long t : taus) tau_max = std::max(tau_max, t);
    RunSummary s;
    s.n_replicates = reps;
    for (const auto& t : tally) {
        s.gaussian_draws += t.normals;
        s.noise_steps += t.steps;
    }
    s.table_header = {"n", "survival"};
    std::vector<std::pair<double, double>> points;
    for (long n = 0; n < tau_max; ++n) {
        std::size_t count = 0;
        for (long t : taus)
            if (t > n) ++count;
        const double survival = static_cast<double>(count) / static_cast<double>(reps);
        s.table_rows.push_back(Vec{static_cast<double>(n), survival});
        if (survival > 0.0) points.emplace_back(static_cast<double>(n), std::log(survival));
    }
    s.slope = fit_slope(points);
    s.has_slope = true;
    s.mean = {0.0};
    for (long t : taus) s.mean[0] += static_cast<double>(t);
    s.mean[0] /= static_cast<double>(reps);
    if (!spec.out.empty()) write_table_csv(spec.out + ".csv", s);
    return s;
}

RunSummary run_sfs_baseline(const ExperimentSpec& spec, const TargetModel& model,
                            std::uint64_t seed) {
    const std::size_t reps = static_cast<std::size_t>(spec.est.M);
    const std::size_t d = static_cast<std::size_t>(model.dim());
    SfsConfig sfs;
    sfs.level = spec.sfs_level;
    sfs.n_drift_samples = spec.sfs_samples;

    std::vector<Vec> samples(reps);
    std::vector<StreamTally> tally(reps);
    parallel_for(reps, spec.workers, [&](std::size_t r) {
        RngStream rng(seed, stream_id(spec.kind, r));
        SfsConfig local = sfs;
        local.model = std::shared_ptr<const TargetModel>(&model, [](const TargetModel*) {});
        samples[r] = sfs_sample(local, rng);
        tally[r] = StreamTally{rng.normal_count(), rng.step_count()};
    });

    RunSummary s;
    s.n_replicates = reps;
    for (const auto& t : tally) {
        s.gaussian_draws += t.normals;
        s.noise_steps += t.steps;
    }
    s.mean.assign(d, 0.0);
    s.variance.assign(d, 0.0);
    for (const auto& x : samples)
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += x[j];
    for (double& v : s.mean) v /= static_cast<double>(reps);
    if (reps > 1) {
        for (const auto& x : samples)
            for (std::size_t j = 0; j < d; ++j) {
                const double dev = x[j] - s.mean[j];
                s.variance[j] += dev * dev;
            }
        for (double& v : s.variance) v /= static_cast<double>(reps - 1);
    }
    s.stderr_mean.resize(d);
    for (std::size_t j = 0; j < d; ++j)
        s.stderr_mean[j] = std::sqrt(s.variance[j] / static_cast<double>(reps));
    const Vec ref = resolve_reference(spec, model);
    s.mse.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double e = s.mean[j] - ref[j];
        s.mse[j] = e * e;
    }
    s.total_cost = static_cast<long long>(reps) * (1LL << spec.sfs_level) * spec.sfs_samples;

    s.table_header = {"coordinate", "mean", "variance"};
    for (std::size_t j = 0; j < d; ++j)
        s.table_rows.push_back(Vec{static_cast<double>(j), s.mean[j], s.variance[j]});
    if (!spec.out.empty()) write_table_csv(spec.out + ".csv", s);
    return s;
}

} // namespace

RunSummary run_experiment(const ExperimentSpec& spec_in, std::uint64_t seed) {
    ExperimentSpec spec = spec_in;
    spec.est.seed = seed;
    spec.validate();
    const ModelPtr model = build_model(spec);

    const auto t0 = std::chrono::steady_clock::now();
    RunSummary s;
    switch (spec.kind) {
        case ExperimentKind::Estimate: s = run_estimate(spec, *model, seed); break;
        case ExperimentKind::MseVsCost: s = run_mse_vs_cost(spec, *model, seed); break;
        case ExperimentKind::WeakError: s = run_weak_error(spec, *model, seed); break;
        case ExperimentKind::IncrementMoments:
            s = run_increment_moments(spec, *model, seed);
            break;
        case ExperimentKind::MeetingTails: s = run_meeting_tails(spec, *model, seed); break;
        case ExperimentKind::SfsBaseline: s = run_sfs_baseline(spec, *model, seed); break;
    }
    if (spec.record_wall_time)
        s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!spec.out.empty()) write_summary_json(spec.out + ".json", spec, seed, s);
    return s;
}

} // namespace uld
