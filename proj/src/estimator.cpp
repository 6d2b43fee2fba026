#include "uld/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace uld {

Observable position_observable(int d) {
    return Observable{"position", d, [](const PhaseState& u, double* out) {
                          std::copy(u.x.begin(), u.x.end(), out);
                      }};
}

Observable first_coordinate_observable() {
    return Observable{"first", 1, [](const PhaseState& u, double* out) { out[0] = u.x[0]; }};
}

void EstimatorConfig::validate() const {
    if (l_star < 0) throw ConfigError("l_star must be >= 0");
    if (l_max <= l_star) throw ConfigError("l_max must exceed l_star");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (k < 0) throw ConfigError("k must be >= 0");
    if (M < 1) throw ConfigError("M must be >= 1");
    if (tau_cap < 1) throw ConfigError("tau_cap must be >= 1");
    if (!observable.eval || observable.dim < 1) throw ConfigError("observable is not configured");
}

Vec level_masses(const EstimatorConfig& config) {
    const int count = config.l_max - config.l_star + 1;
    Vec mass(static_cast<std::size_t>(count));
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
        mass[static_cast<std::size_t>(i)] =
            std::pow(2.0, -config.level_exponent * (config.l_star + i));
        total += mass[static_cast<std::size_t>(i)];
    }
    for (double& p : mass) p /= total;
    return mass;
}

int sample_level(const EstimatorConfig& config, RngStream& rng) {
    const Vec mass = level_masses(config);
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        acc += mass[i];
        if (u <= acc) return config.l_star + static_cast<int>(i);
    }
    return config.l_max;
}

BurninWindow resolve_window(const EstimatorConfig& config, long tau) {
    int k = config.k;
    if (!config.strict_k && tau < static_cast<long>(k) - 1)
        k = static_cast<int>(std::max(1L, tau / 2));
    int m = static_cast<int>(std::min<long>(2L * k, tau - 1));
    if (m < k) m = k;
    return BurninWindow{k, m};
}

namespace {

PhaseState resolve_init(const EstimatorConfig& config, const TargetModel& model) {
    PhaseState u0 = make_state(model.dim());
    if (!config.x0.empty()) {
        if (static_cast<int>(config.x0.size()) != model.dim())
            throw DimensionError("configured x0 does not match the model dimension");
        u0.x = config.x0;
    }
    if (!config.v0.empty()) {
        if (static_cast<int>(config.v0.size()) != model.dim())
            throw DimensionError("configured v0 does not match the model dimension");
        u0.v = config.v0;
    }
    return u0;
}

double state_gap(const CoupledPair& pair) {
    double s = 0.0;
    for (std::size_t i = 0; i < pair.u.x.size(); ++i) {
        const double dx = pair.u.x[i] - pair.u_tilde.x[i];
        const double dv = pair.u.v[i] - pair.u_tilde.v[i];
        s += dx * dx + dv * dv;
    }
    return std::sqrt(s);
}

// Eq-style time-averaged estimator from the recorded trajectories:
//   (1/(m-k+1)) sum_{n=k}^{m} phi(U_n)
//   + sum_{n=k+1}^{tau-1} min(1, (n-k)/(m-k+1)) (phi(U_n) - phi(Utilde_n)).
Vec time_averaged_estimate(const std::vector<Vec>& phi_u, const std::vector<Vec>& phi_t, int k,
                           int m, long tau, int p) {
    Vec est(static_cast<std::size_t>(p), 0.0);
    const double window = static_cast<double>(m - k + 1);
    for (int n = k; n <= m; ++n)
        for (int j = 0; j < p; ++j)
            est[static_cast<std::size_t>(j)] +=
                phi_u[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)];
    for (int j = 0; j < p; ++j) est[static_cast<std::size_t>(j)] /= window;
    for (long n = k + 1; n <= tau - 1; ++n) {
        const double w = std::min(1.0, static_cast<double>(n - k) / window);
        for (int j = 0; j < p; ++j)
            est[static_cast<std::size_t>(j)] +=
                w * (phi_u[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] -
                     phi_t[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)]);
    }
    return est;
}

void check_faithful(const CoupledPair& pair, const char* where) {
    if (pair.met && !(pair.u == pair.u_tilde))
        throw std::logic_error(std::string("faithfulness violated in ") + where);
}

} // namespace

SingleLevelRun run_single_level_pair(int level, const EstimatorConfig& config,
                                     const TargetModel& model, const DynamicsParams& dyn,
                                     const PhaseState& init, RngStream& rng) {
    config.validate();
    if (level < config.l_star) throw ConfigError("single-level run requires l >= l_star");
    const LevelParams lp = LevelParams::at(level, config.sigma_l);
    const Observable& phi = config.observable;

    // Lag-1 start: Utilde_0 = u0, U_0 = K_l(u0).
    CoupledPair pair;
    pair.u_tilde = init;
    pair.u = apply_kernel(init, model, dyn, lp, rng);
    pair.met = false;

    std::vector<Vec> phi_u{phi(pair.u)};
    std::vector<Vec> phi_t{phi(pair.u_tilde)};

    long tau = -1;
    long horizon = -1;
    for (long n = 1;; ++n) {
        pair = sample_K_check_l(pair, lp, config.alpha, model, dyn, rng);
        check_faithful(pair, "run_single_level_pair");
        phi_u.push_back(phi(pair.u));
        if (!pair.met) {
            phi_t.push_back(phi(pair.u_tilde));
            if (n >= config.tau_cap)
                throw NonMeetingError("pair failed to meet within " +
                                          std::to_string(config.tau_cap) +
                                          " kernel steps at level " + std::to_string(level),
                                      state_gap(pair));
        } else if (tau < 0) {
            tau = n;
            const BurninWindow w = resolve_window(config, tau);
            horizon = std::max<long>(w.m, tau - 1);
        }
        if (tau >= 0 && n >= horizon) break;
    }

    const BurninWindow w = resolve_window(config, tau);
    SingleLevelRun out;
    out.estimate = time_averaged_estimate(phi_u, phi_t, w.k, w.m, tau, phi.dim);
    out.tau = tau;
    out.cost = static_cast<long long>(tau) * (2LL << level);
    return out;
}

IncrementRun run_increment_quad(int level, const EstimatorConfig& config, const TargetModel& model,
                                const DynamicsParams& dyn, const PhaseState& init, RngStream& rng) {
    config.validate();
    if (level < config.l_star + 1) throw ConfigError("increment run requires l >= l_star + 1");
    const Observable& phi = config.observable;

    QuadState z;
    z.fine.u_tilde = init;
    z.coarse.u_tilde = init;
    auto start = sample_Kbar_l_lm1(init, init, level, config.sigma_l, model, dyn, rng);
    z.fine.u = std::move(start.first);
    z.coarse.u = std::move(start.second);
    z.fine.met = z.coarse.met = false;

    std::vector<Vec> phi_uf{phi(z.fine.u)}, phi_tf{phi(z.fine.u_tilde)};
    std::vector<Vec> phi_uc{phi(z.coarse.u)}, phi_tc{phi(z.coarse.u_tilde)};

    long tau_f = -1, tau_c = -1, horizon = -1;
    for (long n = 1;; ++n) {
        z = sample_K_check_l_lm1(z, config.alpha, level, config.sigma_l, model, dyn, rng);
        check_faithful(z.fine, "run_increment_quad (fine)");
        check_faithful(z.coarse, "run_increment_quad (coarse)");
        phi_uf.push_back(phi(z.fine.u));
        phi_uc.push_back(phi(z.coarse.u));
        if (!z.fine.met) phi_tf.push_back(phi(z.fine.u_tilde));
        if (!z.coarse.met) phi_tc.push_back(phi(z.coarse.u_tilde));
        if (z.fine.met && tau_f < 0) tau_f = n;
        if (z.coarse.met && tau_c < 0) tau_c = n;
        if ((!z.fine.met || !z.coarse.met) && n >= config.tau_cap)
            throw NonMeetingError(
                "quad chain failed to meet within " + std::to_string(config.tau_cap) +
                    " kernel steps at levels (" + std::to_string(level) + ", " +
                    std::to_string(level - 1) + "); unmet level: " +
                    (z.fine.met ? "coarse" : (z.coarse.met ? "fine" : "both")),
                std::max(state_gap(z.fine), state_gap(z.coarse)));
        if (tau_f >= 0 && tau_c >= 0) {
            if (horizon < 0) {
                const long tau_check = std::max(tau_f, tau_c);
                const BurninWindow w = resolve_window(config, tau_check);
                horizon = std::max<long>(w.m, tau_check - 1);
            }
            if (n >= horizon) break;
        }
    }

    const long tau_check = std::max(tau_f, tau_c);
    const BurninWindow w = resolve_window(config, tau_check);
    const Vec fine_est = time_averaged_estimate(phi_uf, phi_tf, w.k, w.m, tau_f, phi.dim);
    const Vec coarse_est = time_averaged_estimate(phi_uc, phi_tc, w.k, w.m, tau_c, phi.dim);

    IncrementRun out;
    out.estimate.resize(static_cast<std::size_t>(phi.dim));
    for (int j = 0; j < phi.dim; ++j)
        out.estimate[static_cast<std::size_t>(j)] =
            fine_est[static_cast<std::size_t>(j)] - coarse_est[static_cast<std::size_t>(j)];
    out.tau_fine = tau_f;
    out.tau_coarse = tau_c;
    out.tau_check = tau_check;
    out.cost = static_cast<long long>(tau_check) * ((2LL << level) + (1LL << level));
    return out;
}

ReplicateResult unbiased_replicate(const EstimatorConfig& config, const TargetModel& model,
                                   const DynamicsParams& dyn, RngStream& rng) {
    config.validate();
    const PhaseState init = resolve_init(config, model);
    const int level = sample_level(config, rng);
    const Vec mass = level_masses(config);
    const double weight = 1.0 / mass[static_cast<std::size_t>(level - config.l_star)];

    ReplicateResult result;
    result.level = level;
    result.weight = weight;
    if (level == config.l_star) {
        SingleLevelRun run = run_single_level_pair(level, config, model, dyn, init, rng);
        result.value = std::move(run.estimate);
        result.tau = run.tau;
        result.cost = run.cost;
    } else {
        IncrementRun run = run_increment_quad(level, config, model, dyn, init, rng);
        result.value = std::move(run.estimate);
        result.tau = run.tau_check;
        result.cost = run.cost;
    }
    for (double& v : result.value) {
        v *= weight;
        if (!std::isfinite(v)) throw NumericError("non-finite replicate value");
    }
    return result;
}

RunStats average_replicates(const std::vector<ReplicateResult>& results) {
    if (results.empty()) throw ConfigError("average_replicates: no results");
    const std::size_t p = results[0].value.size();
    RunStats stats;
    stats.mean.assign(p, 0.0);
    stats.sample_variance.assign(p, 0.0);
    for (const auto& r : results) {
        if (r.value.size() != p) throw DimensionError("average_replicates: ragged values");
        for (std::size_t j = 0; j < p; ++j) stats.mean[j] += r.value[j];
        stats.total_cost += r.cost;
    }
    for (double& m : stats.mean) m /= static_cast<double>(results.size());
    if (results.size() > 1) {
        for (const auto& r : results)
            for (std::size_t j = 0; j < p; ++j) {
                const double dev = r.value[j] - stats.mean[j];
                stats.sample_variance[j] += dev * dev;
            }
        for (double& v : stats.sample_variance) v /= static_cast<double>(results.size() - 1);
    }
    return stats;
}

} // namespace uld
