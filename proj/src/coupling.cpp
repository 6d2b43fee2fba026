#include "uld/coupling.hpp"

#include <cmath>

namespace uld {

namespace {

void check_inputs(const Vec& mu1, const Vec& mu2, const Vec& stddev) {
    const std::size_t m = mu1.size();
    if (mu2.size() != m || stddev.size() != m)
        throw DimensionError("reflection coupling: mu1/mu2/stddev length mismatch");
    for (std::size_t i = 0; i < m; ++i)
        if (!(stddev[i] > 0.0))
            throw DegenerateError("reflection coupling: stddev must be strictly positive");
}

// Accept test for the reflection construction, in log space:
//   log W <= log phi(xi + z) - log phi(xi) = -(z . xi) - |z|^2 / 2.
bool accept(double log_w, const Vec& z, const Vec& xi) {
    double dot = 0.0, zz = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        dot += z[i] * xi[i];
        zz += z[i] * z[i];
    }
    return log_w <= -dot - 0.5 * zz;
}

CoupledDraw build(const Vec& mu1, const Vec& mu2, const Vec& stddev, const Vec& xi, bool met) {
    const std::size_t m = mu1.size();
    CoupledDraw out;
    out.met = met;
    out.y1.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.y1[i] = mu1[i] + stddev[i] * xi[i];
    if (met) {
        out.y2 = out.y1;
        return out;
    }
    // Householder reflection of xi through e = z / |z|.
    Vec z(m);
    double norm2 = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        z[i] = (mu1[i] - mu2[i]) / stddev[i];
        norm2 += z[i] * z[i];
        dot += z[i] * xi[i];
    }
    const double scale = 2.0 * dot / norm2;
    out.y2.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.y2[i] = mu2[i] + stddev[i] * (xi[i] - scale * z[i]);
    return out;
}

} // namespace

CoupledDraw reflection_max_coupling(const Vec& mu1, const Vec& mu2, const Vec& stddev,
                                    RngStream& rng) {
    check_inputs(mu1, mu2, stddev);
    const std::size_t m = mu1.size();
    Vec xi;
    rng.normal_vec(m, 1.0, xi);
    const double log_w = std::log(rng.uniform());
    Vec z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = (mu1[i] - mu2[i]) / stddev[i];
    return build(mu1, mu2, stddev, xi, accept(log_w, z, xi));
}

PairedCoupledDraw sync_pairwise_reflection_coupling(const Vec& fine_mu1, const Vec& fine_mu2,
                                                    const Vec& coarse_mu1, const Vec& coarse_mu2,
                                                    const Vec& fine_stddev,
                                                    const Vec& coarse_stddev, RngStream& rng) {
    check_inputs(fine_mu1, fine_mu2, fine_stddev);
    check_inputs(coarse_mu1, coarse_mu2, coarse_stddev);
    const std::size_t m = fine_mu1.size();
    if (coarse_mu1.size() != m)
        throw DimensionError("sync pairwise coupling: fine/coarse dimension mismatch");

    // One underlying (xi, W) drives both levels.
    Vec xi;
    rng.normal_vec(m, 1.0, xi);
    const double log_w = std::log(rng.uniform());

    PairedCoupledDraw out;
    Vec z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = (fine_mu1[i] - fine_mu2[i]) / fine_stddev[i];
    out.fine = build(fine_mu1, fine_mu2, fine_stddev, xi, accept(log_w, z, xi));
    for (std::size_t i = 0; i < m; ++i) z[i] = (coarse_mu1[i] - coarse_mu2[i]) / coarse_stddev[i];
    out.coarse = build(coarse_mu1, coarse_mu2, coarse_stddev, xi, accept(log_w, z, xi));
    return out;
}

} // namespace uld
