#include <cmath>

#include "doctest.h"
#include "uld/kernels.hpp"

using namespace uld;

namespace {

struct ZeroDriftModel final : TargetModel {
    explicit ZeroDriftModel(int d) : TargetModel("flat", d) {}
    double potential(const Vec&) const override { return 0.0; }
    void gradient(const Vec& x, Vec& g) const override { g.assign(x.size(), 0.0); }
};

double phi_neg(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

template <class F>
Moments sample_moments(int n, F&& draw) {
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s1 += x;
        s2 += x * x;
    }
    Moments m;
    m.mean = s1 / n;
    m.var = s2 / n - m.mean * m.mean;
    return m;
}

} // namespace

TEST_CASE("noise paths: sizes, counts, coarsening law") {
    RngStream rng(1, 0);
    const NoisePath path = NoisePath::draw(5, 4, 32, rng);
    CHECK(path.gammas.size() == 32);
    CHECK(path.brownian.size() == 32);
    CHECK(rng.normal_count() == 2u * 4u * 32u);
    CHECK(rng.step_count() == 32u);

    const NoisePath coarse = path.coarsen();
    CHECK(coarse.gammas.size() == 16);
    CHECK(coarse.delta == 2.0 * path.delta);
    for (std::size_t k = 0; k < 16; ++k)
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(coarse.gammas[k][i] == path.gammas[2 * k][i] + path.gammas[2 * k + 1][i]);

    // Coarsened increments are N(0, delta_{l-1}): variance check over many paths.
    double s2 = 0;
    int n = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const NoisePath c = NoisePath::draw(5, 4, 32, rng).coarsen();
        for (const auto& g : c.gammas)
            for (double x : g) {
                s2 += x * x;
                ++n;
            }
    }
    const double target = std::ldexp(1.0, -4);
    CHECK(std::abs(s2 / n - target) < 4.0 * target * std::sqrt(2.0 / n));
}

TEST_CASE("Q_l keeps met pairs bitwise equal and never merges unmet pairs") {
    const ModelPtr model = make_gaussian_model(2);
    DynamicsParams dyn;
    const LevelParams lp = LevelParams::at(3);
    RngStream rng(2, 0);

    CoupledPair met_pair;
    met_pair.u = met_pair.u_tilde = PhaseState{Vec{0.5, -0.5}, Vec{0.1, 0.2}};
    met_pair.met = true;
    for (int i = 0; i < 50; ++i) {
        met_pair = sample_Q_l(met_pair, lp, *model, dyn, rng);
        CHECK(met_pair.met);
        CHECK(met_pair.u == met_pair.u_tilde);
    }

    int coincidences = 0;
    for (int i = 0; i < 1000; ++i) {
        CoupledPair pair;
        pair.u = PhaseState{Vec{0.0, 0.0}, Vec{0.0, 0.0}};
        pair.u_tilde = PhaseState{Vec{1e-3, 0.0}, Vec{0.0, 0.0}};
        const CoupledPair out = sample_Q_l(pair, lp, *model, dyn, rng);
        CHECK_FALSE(out.met);
        if (out.u == out.u_tilde) ++coincidences;
    }
    CHECK(coincidences == 0);
}

TEST_CASE("Q_l drift-free velocity gap contracts by (1 - kappa delta)^steps") {
    ZeroDriftModel flat(1);
    DynamicsParams dyn{4.5, 3.0};
    const LevelParams lp = LevelParams::at(3);
    RngStream rng(3, 0);
    CoupledPair pair;
    pair.u = PhaseState{Vec{0.0}, Vec{2.0}};
    pair.u_tilde = PhaseState{Vec{0.0}, Vec{-1.0}};
    const CoupledPair out = sample_Q_l(pair, lp, flat, dyn, rng);
    const double factor = std::pow(1.0 - dyn.kappa * lp.delta, static_cast<double>(lp.steps));
    CHECK(out.u.v[0] - out.u_tilde.v[0] == doctest::Approx(3.0 * factor).epsilon(1e-12));
}

TEST_CASE("P_l meets equal chains immediately and preserves the K_l marginal") {
    const ModelPtr model = make_gaussian_model(1);
    DynamicsParams dyn;
    const LevelParams lp = LevelParams::at(3);
    RngStream rng(4, 0);

    CoupledPair pair;
    pair.u = pair.u_tilde = PhaseState{Vec{0.7}, Vec{-0.3}};
    const CoupledPair out = sample_P_l(pair, lp, *model, dyn, rng);
    CHECK(out.met);
    CHECK(out.u == out.u_tilde);

    const PhaseState start{Vec{0.7}, Vec{-0.3}};
    const int n = 10000;
    const Moments px = sample_moments(n, [&] {
        CoupledPair p;
        p.u = p.u_tilde = start;
        return sample_P_l(p, lp, *model, dyn, rng).u.x[0];
    });
    const Moments kx = sample_moments(n, [&] {
        return apply_kernel(start, *model, dyn, lp, rng).x[0];
    });
    const double se = std::sqrt((px.var + kx.var) / n);
    CHECK(std::abs(px.mean - kx.mean) < 4.0 * se);
    CHECK(std::abs(px.var - kx.var) < 4.0 * (px.var + kx.var) * std::sqrt(2.0 / n));
}

TEST_CASE("P_l met rate matches the closed-form overlap for drift-free chains") {
    ZeroDriftModel flat(1);
    DynamicsParams dyn{4.5, 3.0};
    const LevelParams lp = LevelParams::at(3, constant_sigma_schedule(0.5));

    // Under CRN with b = 0 the state gap evolves deterministically:
    // dx' = dx + dv delta, dv' = dv (1 - kappa delta), for the 2^l - 1
    // shared steps; the terminal maximal coupling then meets w.p.
    // 2 Phi(-|z| / 2) with z the standardized terminal mean gap.
    double dx = 1.0, dv = 0.5;
    for (long s = 0; s < lp.steps - 1; ++s) {
        const double ndx = dx + dv * lp.delta;
        dv *= 1.0 - dyn.kappa * lp.delta;
        dx = ndx;
    }
    const double zx = (dx + dv * lp.delta) / (lp.sigma_l * std::sqrt(lp.delta));
    const double zv = dv * (1.0 - dyn.kappa * lp.delta) / (dyn.sigma * std::sqrt(lp.delta));
    const double p = 2.0 * phi_neg(0.5 * std::sqrt(zx * zx + zv * zv));

    RngStream rng(5, 0);
    const int n = 20000;
    int met = 0;
    for (int i = 0; i < n; ++i) {
        CoupledPair pair;
        pair.u = PhaseState{Vec{0.0}, Vec{0.0}};
        pair.u_tilde = PhaseState{Vec{1.0}, Vec{0.5}};
        if (sample_P_l(pair, lp, flat, dyn, rng).met) ++met;
    }
    CHECK(std::abs(static_cast<double>(met) / n - p) < 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST_CASE("K_check_l: faithfulness, routing rate, alpha validation") {
    const ModelPtr model = make_gaussian_model(1);
    DynamicsParams dyn;
    const LevelParams lp = LevelParams::at(2);
    RngStream rng(6, 0);

    CoupledPair met_pair;
    met_pair.u = met_pair.u_tilde = make_state(1);
    met_pair.met = true;
    for (int i = 0; i < 200; ++i) {
        met_pair = sample_K_check_l(met_pair, lp, 0.5, *model, dyn, rng);
        CHECK(met_pair.met);
        CHECK(met_pair.u == met_pair.u_tilde);
    }

    CHECK_THROWS_AS(sample_K_check_l(met_pair, lp, 0.0, *model, dyn, rng), ConfigError);
    CHECK_THROWS_AS(sample_K_check_l(met_pair, lp, 1.0, *model, dyn, rng), ConfigError);

    // With alpha ~ 1 the P branch never fires: an unmet pair can never meet.
    CoupledPair apart;
    apart.u = PhaseState{Vec{0.0}, Vec{0.0}};
    apart.u_tilde = PhaseState{Vec{0.5}, Vec{0.0}};
    for (int i = 0; i < 1000; ++i)
        CHECK_FALSE(sample_K_check_l(apart, lp, 1.0 - 1e-12, *model, dyn, rng).met);

    // Meeting can only happen on the P branch, so the one-shot met rate of
    // K-check is (1 - alpha) times the met rate of P from the same start.
    const double alpha = 0.3;
    const int n = 20000;
    int met_p = 0, met_k = 0;
    for (int i = 0; i < n; ++i) {
        if (sample_P_l(apart, lp, *model, dyn, rng).met) ++met_p;
        if (sample_K_check_l(apart, lp, alpha, *model, dyn, rng).met) ++met_k;
    }
    const double p_hat = static_cast<double>(met_p) / n;
    const double k_hat = static_cast<double>(met_k) / n;
    const double se = std::sqrt(2.0 * p_hat * (1.0 - p_hat) / n);
    CHECK(std::abs(k_hat - (1.0 - alpha) * p_hat) < 4.0 * se);
}

TEST_CASE("Kbar_{l,l-1}: determinism and noiseless path coincidence") {
    const ModelPtr model = make_gaussian_model(2);
    DynamicsParams dyn;
    const SigmaLSchedule sched = default_sigma_schedule();
    const PhaseState start{Vec{0.3, -0.3}, Vec{0.1, 0.0}};

    RngStream a(7, 1), b(7, 1);
    const auto out1 = sample_Kbar_l_lm1(start, start, 4, sched, *model, dyn, a);
    const auto out2 = sample_Kbar_l_lm1(start, start, 4, sched, *model, dyn, b);
    CHECK(out1.first == out2.first);
    CHECK(out1.second == out2.second);

    // b = 0, kappa = 0, sigma = 0, constant sigma_l: both recursions
    // telescope to (x + v + s Sum gamma, v), so fine and coarse coincide.
    ZeroDriftModel flat(2);
    DynamicsParams free{0.0, 0.0};
    const SigmaLSchedule flat_sched = constant_sigma_schedule(0.7);
    RngStream rng(8, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto out = sample_Kbar_l_lm1(start, start, 4, flat_sched, flat, free, rng);
        for (int j = 0; j < 2; ++j) {
            CHECK(out.first.x[static_cast<std::size_t>(j)] ==
                  doctest::Approx(out.second.x[static_cast<std::size_t>(j)]).epsilon(1e-12));
            CHECK(out.first.v[static_cast<std::size_t>(j)] ==
                  doctest::Approx(out.second.v[static_cast<std::size_t>(j)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("Q_{l,l-1}: equal pairs stay equal, unmet fine pairs never merge") {
    const ModelPtr model = make_gaussian_model(1);
    DynamicsParams dyn;
    const SigmaLSchedule sched = default_sigma_schedule();
    RngStream rng(9, 0);

    QuadState met;
    met.fine.u = met.fine.u_tilde = make_state(1);
    met.coarse.u = met.coarse.u_tilde = make_state(1);
    met.fine.met = met.coarse.met = true;
    for (int i = 0; i < 50; ++i) {
        met = sample_Q_l_lm1(met, 3, sched, *model, dyn, rng);
        CHECK(met.fine.u == met.fine.u_tilde);
        CHECK(met.coarse.u == met.coarse.u_tilde);
    }

    for (int i = 0; i < 1000; ++i) {
        QuadState z;
        z.fine.u = make_state(1);
        z.fine.u_tilde = PhaseState{Vec{1e-3}, Vec{0.0}};
        z.coarse.u = z.coarse.u_tilde = make_state(1);
        z.coarse.met = true;
        const QuadState out = sample_Q_l_lm1(z, 3, sched, *model, dyn, rng);
        CHECK_FALSE(out.fine.met);
        CHECK_FALSE(out.fine.u == out.fine.u_tilde);
    }
}

TEST_CASE("Q_{l,l-1} fine marginal matches apply_kernel moments") {
    const ModelPtr model = make_gaussian_model(1);
    DynamicsParams dyn;
    const SigmaLSchedule sched = default_sigma_schedule();
    const LevelParams fine_lp = LevelParams::at(3, sched);
    const PhaseState start{Vec{0.4}, Vec{0.2}};
    RngStream rng(10, 0);
    const int n = 10000;
    const Moments qx = sample_moments(n, [&] {
        QuadState z;
        z.fine.u = z.fine.u_tilde = start;
        z.coarse.u = z.coarse.u_tilde = start;
        return sample_Q_l_lm1(z, 3, sched, *model, dyn, rng).fine.u.x[0];
    });
    const Moments kx = sample_moments(n, [&] {
        return apply_kernel(start, *model, dyn, fine_lp, rng).x[0];
    });
    const double se = std::sqrt((qx.var + kx.var) / n);
    CHECK(std::abs(qx.mean - kx.mean) < 4.0 * se);
    CHECK(std::abs(qx.var - kx.var) < 4.0 * (qx.var + kx.var) * std::sqrt(2.0 / n));
}

TEST_CASE("P_{l,l-1}: met closure and exact draw accounting") {
    const ModelPtr model = make_gaussian_model(2);
    DynamicsParams dyn;
    const SigmaLSchedule sched = default_sigma_schedule();
    const int l = 4;

    RngStream rng(11, 0);
    QuadState met;
    met.fine.u = met.fine.u_tilde = make_state(2);
    met.coarse.u = met.coarse.u_tilde = make_state(2);
    met.fine.met = met.coarse.met = true;
    for (int i = 0; i < 50; ++i) {
        met = sample_P_l_lm1(met, l, sched, *model, dyn, rng);
        CHECK(met.fine.met);
        CHECK(met.coarse.met);
        CHECK(met.fine.u == met.fine.u_tilde);
        CHECK(met.coarse.u == met.coarse.u_tilde);
    }

    // One call: 2^l - 1 fine path steps plus the terminal coupling step,
    // each worth 2 d Gaussians.
    RngStream counter(11, 1);
    QuadState z;
    z.fine.u = z.fine.u_tilde = make_state(2);
    z.coarse.u = z.coarse.u_tilde = make_state(2);
    (void)sample_P_l_lm1(z, l, sched, *model, dyn, counter);
    CHECK(counter.step_count() == static_cast<std::uint64_t>(1 << l));
    CHECK(counter.normal_count() == static_cast<std::uint64_t>((2 << l) * 2));
}

TEST_CASE("P_{l,l-1} per-level marginals match apply_kernel moments") {
    const ModelPtr model = make_gaussian_model(1);
    DynamicsParams dyn;
    const SigmaLSchedule sched = default_sigma_schedule();
    const PhaseState start{Vec{-0.2}, Vec{0.6}};
    RngStream rng(12, 0);
    const int n = 10000;
    auto draw_quad = [&] {
        QuadState z;
        z.fine.u = z.fine.u_tilde = start;
        z.coarse.u = z.coarse.u_tilde = start;
        return sample_P_l_lm1(z, 4, sched, *model, dyn, rng);
    };
    const Moments fine_v = sample_moments(n, [&] { return draw_quad().fine.u.v[0]; });
    const Moments coarse_v = sample_moments(n, [&] { return draw_quad().coarse.u.v[0]; });
    const Moments k4 = sample_moments(n, [&] {
        return apply_kernel(start, *model, dyn, LevelParams::at(4, sched), rng).v[0];
    });
    const Moments k3 = sample_moments(n, [&] {
        return apply_kernel(start, *model, dyn, LevelParams::at(3, sched), rng).v[0];
    });
    CHECK(std::abs(fine_v.mean - k4.mean) < 4.0 * std::sqrt((fine_v.var + k4.var) / n));
    CHECK(std::abs(coarse_v.mean - k3.mean) < 4.0 * std::sqrt((coarse_v.var + k3.var) / n));
    CHECK(std::abs(fine_v.var - k4.var) < 4.0 * (fine_v.var + k4.var) * std::sqrt(2.0 / n));
    CHECK(std::abs(coarse_v.var - k3.var) < 4.0 * (coarse_v.var + k3.var) * std::sqrt(2.0 / n));
}

TEST_CASE("K_check_{l,l-1}: always Q once both pairs are met; met monotone") {
    const ModelPtr model = make_gaussian_model(1);
    DynamicsParams dyn;
    const SigmaLSchedule sched = default_sigma_schedule();

    // Fully-met quads must route to Q without consuming the mixture uniform:
    // a twin stream driving sample_Q_l_lm1 directly reproduces every draw.
    QuadState met;
    met.fine.u = met.fine.u_tilde = PhaseState{Vec{0.1}, Vec{0.1}};
    met.coarse.u = met.coarse.u_tilde = PhaseState{Vec{0.1}, Vec{0.1}};
    met.fine.met = met.coarse.met = true;
    QuadState twin_state = met;
    RngStream a(13, 0), b(13, 0);
    for (int i = 0; i < 200; ++i) {
        met = sample_K_check_l_lm1(met, 0.5, 3, sched, *model, dyn, a);
        twin_state = sample_Q_l_lm1(twin_state, 3, sched, *model, dyn, b);
        CHECK(met.fine.u == twin_state.fine.u);
        CHECK(met.coarse.u == twin_state.coarse.u);
    }

    // Met flags never clear along a random trajectory.
    RngStream rng(13, 1);
    QuadState z;
    z.fine.u = make_state(1);
    z.fine.u_tilde = PhaseState{Vec{0.2}, Vec{0.0}};
    z.coarse.u = make_state(1);
    z.coarse.u_tilde = PhaseState{Vec{0.2}, Vec{0.0}};
    bool fine_met = false, coarse_met = false;
    for (int i = 0; i < 400; ++i) {
        z = sample_K_check_l_lm1(z, 0.7, 3, sched, *model, dyn, rng);
        if (fine_met) CHECK(z.fine.met);
        if (coarse_met) CHECK(z.coarse.met);
        fine_met = z.fine.met;
        coarse_met = z.coarse.met;
        if (z.fine.met) CHECK(z.fine.u == z.fine.u_tilde);
        if (z.coarse.met) CHECK(z.coarse.u == z.coarse.u_tilde);
    }

    CHECK_THROWS_AS(sample_K_check_l_lm1(z, 1.5, 3, sched, *model, dyn, rng), ConfigError);
}
