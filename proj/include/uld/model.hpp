#pragma once

#include <memory>
#include <string>
#include <vector>

#include "uld/errors.hpp"

namespace uld {

using Vec = std::vector<double>;

// Target density pi(x) ∝ exp(-(2 kappa / sigma^2) U(x)), supplied through its
// potential U and gradient. The sampler drift is b = -grad U.
class TargetModel {
public:
    virtual ~TargetModel() = default;

    const std::string& name() const { return name_; }
    int dim() const { return d_; }

    virtual double potential(const Vec& x) const = 0;
    virtual void gradient(const Vec& x, Vec& g) const = 0;

    Vec gradient(const Vec& x) const {
        Vec g(static_cast<std::size_t>(d_));
        gradient(x, g);
        return g;
    }

protected:
    TargetModel(std::string name, int d) : name_(std::move(name)), d_(d) {
        if (d < 1) throw DimensionError("model dimension must be >= 1");
    }
    void check_dim(const Vec& x) const {
        if (static_cast<int>(x.size()) != d_)
            throw DimensionError("model '" + name_ + "': input has length " +
                                 std::to_string(x.size()) + ", expected " + std::to_string(d_));
    }

    std::string name_;
    int d_;
};

using ModelPtr = std::shared_ptr<const TargetModel>;

// U(x) = ||x - mu0||^2 / 2. With 2 kappa = sigma^2 the position marginal is
// N(mu0, I) and the velocity marginal is N(0, I); used as the analytic
// unbiasedness oracle.
ModelPtr make_gaussian_model(Vec mu0);
ModelPtr make_gaussian_model(int d); // mu0 = 0

// U(x) = ||x||^4 / 4 - ||x||^2 / 2.
ModelPtr make_double_well_model(int d);

// Discretized Ginzburg-Landau free energy on a periodic d0^3 lattice.
ModelPtr make_ginzburg_landau_model(int d0, double t_bar, double gamma, double zeta);

struct LogisticData {
    std::vector<Vec> covariates; // n rows of length d, standardized
    std::vector<int> labels;     // n entries in {0, 1}
};

// Synthetic Bayesian logistic regression posterior: covariates uniform on
// {-1,1}^d then column-standardized, labels Bernoulli(logistic(alpha^T x))
// under a hidden alpha ~ N(0, I). Deterministic given the seed.
ModelPtr make_logistic_model(std::uint64_t seed, int n, int d);

// Posterior for explicitly supplied data (no standardization applied).
ModelPtr make_logistic_model_from_data(LogisticData data);

const LogisticData& logistic_data(const TargetModel& model);

// CSV round-trip of logistic datasets: one row per observation, d covariate
// columns then the label.
void write_logistic_csv(const std::string& path, const TargetModel& model);
ModelPtr read_logistic_csv(const std::string& path);

} // namespace uld
