#include <cmath>

#include "doctest.h"
#include "uld/coupling.hpp"

using namespace uld;

namespace {

// Numeric overlap integral of two 1-d Gaussian densities (trapezoid rule);
// independent oracle for the maximal meeting probability.
double overlap_1d(double mu1, double mu2, double sd) {
    auto density = [sd](double x, double mu) {
        const double z = (x - mu) / sd;
        return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
    };
    const double lo = std::min(mu1, mu2) - 10.0 * sd;
    const double hi = std::max(mu1, mu2) + 10.0 * sd;
    const int n = 200000;
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double f = std::min(density(x, mu1), density(x, mu2));
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    return acc * h;
}

// Monte Carlo overlap E_p[min(1, q/p)] with an independent stream; works in
// any dimension with diagonal covariance.
double overlap_mc(const Vec& mu1, const Vec& mu2, const Vec& sd, int n, std::uint64_t seed) {
    RngStream rng(seed, 999);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double log_ratio = 0.0;
        for (std::size_t j = 0; j < mu1.size(); ++j) {
            const double y = mu1[j] + sd[j] * rng.normal();
            const double z1 = (y - mu1[j]) / sd[j];
            const double z2 = (y - mu2[j]) / sd[j];
            log_ratio += 0.5 * (z1 * z1 - z2 * z2);
        }
        acc += std::min(1.0, std::exp(log_ratio));
    }
    return acc / n;
}

} // namespace

TEST_CASE("identical laws always meet, bitwise") {
    RngStream rng(1, 0);
    const Vec mu{0.3, -1.2, 4.0};
    const Vec sd{1.0, 0.5, 2.0};
    for (int i = 0; i < 1000; ++i) {
        const CoupledDraw d = reflection_max_coupling(mu, mu, sd, rng);
        CHECK(d.met);
        CHECK(d.y1 == d.y2);
    }
}

TEST_CASE("met rate matches the numeric overlap at separation 2") {
    RngStream rng(2, 0);
    const int n = 100000;
    int met = 0;
    for (int i = 0; i < n; ++i) {
        const CoupledDraw d = reflection_max_coupling(Vec{0.0}, Vec{2.0}, Vec{1.0}, rng);
        if (d.met) {
            CHECK(d.y1 == d.y2);
            ++met;
        }
    }
    const double p = overlap_1d(0.0, 2.0, 1.0); // = 2 Phi(-1) ~ 0.3173
    CHECK(p == doctest::Approx(0.31731).epsilon(1e-3));
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(static_cast<double>(met) / n - p) < 3.0 * se);
}

TEST_CASE("vanishing overlap at separation 10") {
    RngStream rng(3, 0);
    const int n = 100000;
    int met = 0;
    for (int i = 0; i < n; ++i)
        if (reflection_max_coupling(Vec{0.0}, Vec{10.0}, Vec{1.0}, rng).met) ++met;
    CHECK(static_cast<double>(met) / n < 1e-3);
}

TEST_CASE("degenerate scales are rejected") {
    RngStream rng(4, 0);
    CHECK_THROWS_AS(reflection_max_coupling(Vec{0.0}, Vec{1.0}, Vec{0.0}, rng), DegenerateError);
    CHECK_THROWS_AS(reflection_max_coupling(Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{1.0, -1.0}, rng),
                    DegenerateError);
    CHECK_THROWS_AS(reflection_max_coupling(Vec{0.0}, Vec{1.0, 2.0}, Vec{1.0}, rng),
                    DimensionError);
}

TEST_CASE("both output slots have the correct marginal moments") {
    RngStream rng(5, 0);
    const Vec mu1{0.5}, mu2{-0.7}, sd{1.3};
    const int n = 100000;
    double s1 = 0, s2 = 0, t1 = 0, t2 = 0;
    for (int i = 0; i < n; ++i) {
        const CoupledDraw d = reflection_max_coupling(mu1, mu2, sd, rng);
        s1 += d.y1[0];
        s2 += d.y1[0] * d.y1[0];
        t1 += d.y2[0];
        t2 += d.y2[0] * d.y2[0];
    }
    const double se_mean = 4.0 * sd[0] / std::sqrt(static_cast<double>(n));
    const double var = sd[0] * sd[0];
    const double se_var = 4.0 * var * std::sqrt(2.0 / n);
    CHECK(std::abs(s1 / n - mu1[0]) < se_mean);
    CHECK(std::abs(t1 / n - mu2[0]) < se_mean);
    CHECK(std::abs(s2 / n - (var + mu1[0] * mu1[0])) < se_var + 2.0 * std::abs(mu1[0]) * se_mean);
    CHECK(std::abs(t2 / n - (var + mu2[0] * mu2[0])) < se_var + 2.0 * std::abs(mu2[0]) * se_mean);
}

TEST_CASE("maximality holds in a 3-d diagonal case") {
    const Vec mu1{0.0, 1.0, -0.5}, mu2{0.8, 0.2, 0.0}, sd{1.0, 0.5, 2.0};
    const double p = overlap_mc(mu1, mu2, sd, 200000, 77);
    RngStream rng(6, 0);
    const int n = 100000;
    int met = 0;
    for (int i = 0; i < n; ++i)
        if (reflection_max_coupling(mu1, mu2, sd, rng).met) ++met;
    const double se = std::sqrt(p * (1.0 - p) * (1.0 / n + 1.0 / 200000.0));
    CHECK(std::abs(static_cast<double>(met) / n - p) < 3.5 * se);
}

TEST_CASE("sync pairwise coupling: per-level trivial outcomes") {
    RngStream rng(7, 0);
    const Vec mu{0.1, 0.2}, far{50.0, -50.0}, sd{1.0, 1.0};
    for (int i = 0; i < 200; ++i) {
        const PairedCoupledDraw both =
            sync_pairwise_reflection_coupling(mu, mu, mu, mu, sd, sd, rng);
        CHECK(both.fine.met);
        CHECK(both.coarse.met);
        CHECK(both.fine.y1 == both.fine.y2);
        CHECK(both.coarse.y1 == both.coarse.y2);

        const PairedCoupledDraw mixed =
            sync_pairwise_reflection_coupling(mu, mu, mu, far, sd, sd, rng);
        CHECK(mixed.fine.met);
        CHECK_FALSE(mixed.coarse.met);
    }
}

TEST_CASE("sync pairwise coupling: per-level met rates stay maximal") {
    const Vec f1{0.0}, f2{1.0}, c1{0.0}, c2{1.6}, sd{1.0};
    const double pf = overlap_1d(0.0, 1.0, 1.0);
    const double pc = overlap_1d(0.0, 1.6, 1.0);
    RngStream rng(8, 0);
    const int n = 100000;
    int met_f = 0, met_c = 0;
    for (int i = 0; i < n; ++i) {
        const PairedCoupledDraw d =
            sync_pairwise_reflection_coupling(f1, f2, c1, c2, sd, sd, rng);
        if (d.fine.met) ++met_f;
        if (d.coarse.met) ++met_c;
    }
    CHECK(std::abs(static_cast<double>(met_f) / n - pf) < 3.0 * std::sqrt(pf * (1 - pf) / n));
    CHECK(std::abs(static_cast<double>(met_c) / n - pc) < 3.0 * std::sqrt(pc * (1 - pc) / n));
}
