#include "uld/sfs.hpp"

#include <cmath>
#include <limits>

namespace uld {

Vec sfs_drift_estimate(const Vec& x, double t, long n_samples, const TargetModel& model,
                       RngStream& rng) {
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("sfs drift: t must lie in [0, 1)");
    const std::size_t d = x.size();
    if (static_cast<int>(d) != model.dim())
        throw DimensionError("sfs drift: state/model dimension mismatch");

    const double spread = std::sqrt(1.0 - t);
    std::vector<Vec> points(static_cast<std::size_t>(n_samples), Vec(d));
    Vec log_f(static_cast<std::size_t>(n_samples));
    double shift = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < n_samples; ++i) {
        Vec& p = points[static_cast<std::size_t>(i)];
        double half_norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            p[j] = x[j] + spread * rng.normal();
            half_norm2 += 0.5 * p[j] * p[j];
        }
        // log f(p) = -U(p) + |p|^2 / 2, up to the constant that cancels.
        const double lf = -model.potential(p) + half_norm2;
        if (!std::isfinite(lf))
            throw NumericError("sfs drift: non-finite log-density at a sample point");
        log_f[static_cast<std::size_t>(i)] = lf;
        shift = std::max(shift, lf);
    }

    // grad f(p) = f(p) (p - grad U(p)); the shared shift cancels in the ratio.
    Vec numerator(d, 0.0), grad(d);
    double denominator = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const Vec& p = points[static_cast<std::size_t>(i)];
        const double w = std::exp(log_f[static_cast<std::size_t>(i)] - shift);
        model.gradient(p, grad);
        for (std::size_t j = 0; j < d; ++j) numerator[j] += w * (p[j] - grad[j]);
        denominator += w;
    }
    if (!(denominator > 0.0) || !std::isfinite(denominator))
        throw NumericError("sfs drift: denominator underflow after max-shift (N = " +
                           std::to_string(n_samples) + ", t = " + std::to_string(t) + ")");
    for (double& v : numerator) v /= denominator;
    return numerator;
}

Vec sfs_sample(const SfsConfig& config, RngStream& rng) {
    config.validate();
    const TargetModel& model = *config.model;
    const std::size_t d = static_cast<std::size_t>(model.dim());
    const long steps = 1L << config.level;
    const double delta = std::ldexp(1.0, -config.level);
    const double noise_scale = std::sqrt(delta);

    Vec x(d, 0.0);
    for (long k = 0; k < steps; ++k) {
        const Vec drift = sfs_drift_estimate(x, k * delta, config.n_drift_samples, model, rng);
        for (std::size_t j = 0; j < d; ++j)
            x[j] += drift[j] * delta + noise_scale * rng.normal();
    }
    return x;
}

} // namespace uld
