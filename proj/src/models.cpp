#include "uld/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "uld/rng.hpp"

namespace uld {

namespace {

double logistic(double w) { return 1.0 / (1.0 + std::exp(-w)); }

// log(1 + e^w) without overflow.
double softplus(double w) {
    if (w > 0.0) return w + std::log1p(std::exp(-w));
    return std::log1p(std::exp(w));
}

class GaussianModel final : public TargetModel {
public:
    explicit GaussianModel(Vec mu0)
        : TargetModel("gaussian", static_cast<int>(mu0.size())), mu0_(std::move(mu0)) {}

    double potential(const Vec& x) const override {
        check_dim(x);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = x[i] - mu0_[i];
            s += r * r;
        }
        return 0.5 * s;
    }

    void gradient(const Vec& x, Vec& g) const override {
        check_dim(x);
        g.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] - mu0_[i];
    }

    const Vec& mu0() const { return mu0_; }

private:
    Vec mu0_;
};

class DoubleWellModel final : public TargetModel {
public:
    explicit DoubleWellModel(int d) : TargetModel("double-well", d) {}

    double potential(const Vec& x) const override {
        check_dim(x);
        double n2 = 0.0;
        for (double xi : x) n2 += xi * xi;
        return 0.25 * n2 * n2 - 0.5 * n2;
    }

    void gradient(const Vec& x, Vec& g) const override {
        check_dim(x);
        double n2 = 0.0;
        for (double xi : x) n2 += xi * xi;
        g.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = (n2 - 1.0) * x[i];
    }
};

class GinzburgLandauModel final : public TargetModel {
public:
    GinzburgLandauModel(int d0, double t_bar, double gamma, double zeta)
        : TargetModel("ginzburg-landau", d0 * d0 * d0),
          d0_(d0),
          t_bar_(t_bar),
          gamma_(gamma),
          zeta_(zeta) {
        if (d0 < 2) throw ConfigError("lattice side length must be >= 2");
        if (t_bar <= 0.0 || gamma <= 0.0 || zeta <= 0.0)
            throw ConfigError("GL parameters must be positive");
    }

    double potential(const Vec& psi) const override {
        check_dim(psi);
        double u = 0.0;
        for (int i = 0; i < d0_; ++i)
            for (int j = 0; j < d0_; ++j)
                for (int k = 0; k < d0_; ++k) {
                    const double p = psi[idx(i, j, k)];
                    const double dx = psi[idx(i + 1, j, k)] - p;
                    const double dy = psi[idx(i, j + 1, k)] - p;
                    const double dz = psi[idx(i, j, k + 1)] - p;
                    u += 0.5 * (1.0 - t_bar_) * p * p +
                         0.5 * gamma_ * t_bar_ * (dx * dx + dy * dy + dz * dz) +
                         0.25 * zeta_ * t_bar_ * p * p * p * p;
                }
        return u;
    }

    void gradient(const Vec& psi, Vec& g) const override {
        check_dim(psi);
        g.resize(psi.size());
        for (int i = 0; i < d0_; ++i)
            for (int j = 0; j < d0_; ++j)
                for (int k = 0; k < d0_; ++k) {
                    const double p = psi[idx(i, j, k)];
                    const double stencil =
                        6.0 * p - (psi[idx(i + 1, j, k)] + psi[idx(i - 1, j, k)] +
                                   psi[idx(i, j + 1, k)] + psi[idx(i, j - 1, k)] +
                                   psi[idx(i, j, k + 1)] + psi[idx(i, j, k - 1)]);
                    g[idx(i, j, k)] =
                        (1.0 - t_bar_) * p + gamma_ * t_bar_ * stencil + zeta_ * t_bar_ * p * p * p;
                }
    }

private:
    std::size_t idx(int i, int j, int k) const {
        const int w = d0_;
        i = (i % w + w) % w;
        j = (j % w + w) % w;
        k = (k % w + w) % w;
        return static_cast<std::size_t>((i * w + j) * w + k);
    }

    int d0_;
    double t_bar_, gamma_, zeta_;
};

class LogisticModel final : public TargetModel {
public:
    explicit LogisticModel(LogisticData data)
        : TargetModel("logistic",
                      data.covariates.empty() ? 1 : static_cast<int>(data.covariates[0].size())),
          data_(std::move(data)) {
        const std::size_t n = data_.covariates.size();
        if (n == 0 || data_.labels.size() != n)
            throw DimensionError("logistic model: empty data or covariate/label count mismatch");
        const std::size_t d = static_cast<std::size_t>(d_);
        for (const auto& row : data_.covariates)
            if (row.size() != d) throw DimensionError("logistic model: ragged covariate rows");
        // Precision = (1/n) X^T X.
        precision_.assign(d * d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b)
                    precision_[a * d + b] += data_.covariates[i][a] * data_.covariates[i][b];
        for (double& p : precision_) p /= static_cast<double>(n);
    }

    double potential(const Vec& alpha) const override {
        check_dim(alpha);
        const std::size_t d = alpha.size();
        double u = 0.0;
        for (std::size_t i = 0; i < data_.covariates.size(); ++i) {
            double t = 0.0;
            for (std::size_t a = 0; a < d; ++a) t += alpha[a] * data_.covariates[i][a];
            u -= data_.labels[i] * t - softplus(t);
        }
        for (std::size_t a = 0; a < d; ++a) {
            double pa = 0.0;
            for (std::size_t b = 0; b < d; ++b) pa += precision_[a * d + b] * alpha[b];
            u += 0.5 * alpha[a] * pa;
        }
        return u;
    }

    void gradient(const Vec& alpha, Vec& g) const override {
        check_dim(alpha);
        const std::size_t d = alpha.size();
        g.assign(d, 0.0);
        for (std::size_t i = 0; i < data_.covariates.size(); ++i) {
            double t = 0.0;
            for (std::size_t a = 0; a < d; ++a) t += alpha[a] * data_.covariates[i][a];
            const double r = logistic(t) - data_.labels[i];
            for (std::size_t a = 0; a < d; ++a) g[a] += r * data_.covariates[i][a];
        }
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) g[a] += precision_[a * d + b] * alpha[b];
    }

    const LogisticData& data() const { return data_; }
    const Vec& precision() const { return precision_; }

private:
    LogisticData data_;
    Vec precision_; // d x d row-major
};

} // namespace

ModelPtr make_gaussian_model(Vec mu0) { return std::make_shared<GaussianModel>(std::move(mu0)); }

ModelPtr make_gaussian_model(int d) { return make_gaussian_model(Vec(static_cast<std::size_t>(d), 0.0)); }

ModelPtr make_double_well_model(int d) { return std::make_shared<DoubleWellModel>(d); }

ModelPtr make_ginzburg_landau_model(int d0, double t_bar, double gamma, double zeta) {
    return std::make_shared<GinzburgLandauModel>(d0, t_bar, gamma, zeta);
}

ModelPtr make_logistic_model_from_data(LogisticData data) {
    return std::make_shared<LogisticModel>(std::move(data));
}

ModelPtr make_logistic_model(std::uint64_t seed, int n, int d) {
    if (n < 2 || d < 1) throw ConfigError("logistic data needs n >= 2, d >= 1");
    LogisticData data;
    data.covariates.assign(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(d), 0.0));

    // Draw and standardize column by column; a zero-variance column is
    // redrawn from a shifted stream.
    for (int a = 0; a < d; ++a) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            RngStream col_rng(seed, 0x10000u + static_cast<std::uint64_t>(a) + (attempt << 32));
            double mean = 0.0;
            for (int i = 0; i < n; ++i) {
                const double v = col_rng.uniform() < 0.5 ? -1.0 : 1.0;
                data.covariates[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = v;
                mean += v;
            }
            mean /= n;
            double ss = 0.0;
            for (int i = 0; i < n; ++i) {
                const double r =
                    data.covariates[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] - mean;
                ss += r * r;
            }
            if (ss == 0.0) continue; // degenerate column, redraw
            const double sd = std::sqrt(ss / (n - 1));
            for (int i = 0; i < n; ++i) {
                auto& v = data.covariates[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
                v = (v - mean) / sd;
            }
            break;
        }
    }

    RngStream label_rng(seed, 0x20000u);
    Vec alpha(static_cast<std::size_t>(d));
    for (double& ai : alpha) ai = label_rng.normal();
    data.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = 0.0;
        for (int a = 0; a < d; ++a)
            t += alpha[static_cast<std::size_t>(a)] *
                 data.covariates[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
        data.labels[static_cast<std::size_t>(i)] = label_rng.uniform() < logistic(t) ? 1 : 0;
    }
    return make_logistic_model_from_data(std::move(data));
}

const LogisticData& logistic_data(const TargetModel& model) {
    const auto* lm = dynamic_cast<const LogisticModel*>(&model);
    if (!lm) throw ConfigError("model '" + model.name() + "' carries no logistic dataset");
    return lm->data();
}

void write_logistic_csv(const std::string& path, const TargetModel& model) {
    const LogisticData& data = logistic_data(model);
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open '" + path + "' for writing");
    char buf[32];
    for (std::size_t i = 0; i < data.covariates.size(); ++i) {
        for (double v : data.covariates[i]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        out << data.labels[i] << '\n';
    }
}

ModelPtr read_logistic_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericError("cannot open '" + path + "' for reading");
    LogisticData data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Vec row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw NumericError("malformed logistic CSV row");
        data.labels.push_back(static_cast<int>(row.back()));
        row.pop_back();
        data.covariates.push_back(std::move(row));
    }
    return make_logistic_model_from_data(std::move(data));
}

} // namespace uld
