#include "mdens/models.hpp"

#include "mdens/error.hpp"

#include <cmath>
#include <numeric>

namespace mdens {
namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double mu = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    return ss / static_cast<double>(x.size() - 1);
}

struct MeanPass {
    std::vector<double> mbar;
    std::vector<double> z;
};

// Z_t(theta) = X_t - m_t(theta); presample deviations X_s - eta = mu0 - eta, Z_s = 0.
MeanPass invert_mean(const ThetaVector& theta, std::span<const double> x, double mu0) {
    const std::size_t n = x.size();
    const std::size_t p = theta.ar.size();
    const std::size_t q = theta.ma.size();
    MeanPass out{std::vector<double>(n), std::vector<double>(n)};
    const double presample_dev = mu0 - theta.eta;
    for (std::size_t t = 0; t < n; ++t) {
        double m = theta.eta;
        for (std::size_t j = 1; j <= p; ++j) {
            const double dev = t >= j ? x[t - j] - theta.eta : presample_dev;
            m += theta.ar[j - 1] * dev;
        }
        for (std::size_t j = 1; j <= q && j <= t; ++j) {
            m -= theta.ma[j - 1] * out.z[t - j];
        }
        out.mbar[t] = m;
        out.z[t] = x[t] - m;
    }
    return out;
}

// Guarantees sigma_t^2 >= alpha_0 / (1 - sum beta) by lifting the presample variance.
std::vector<double> variance_pass(const ThetaVector& theta, std::span<const double> z,
                                  double presample_variance) {
    const std::size_t n = z.size();
    const std::size_t Q = theta.alpha.size() - 1;
    const std::size_t P = theta.beta.size();
    const double floor = volatility_floor(theta);
    const double presample_sigma2 = std::max(presample_variance, floor * floor);
    std::vector<double> s2(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = theta.alpha[0];
        for (std::size_t j = 1; j <= Q; ++j) {
            const double z2 = t >= j ? z[t - j] * z[t - j] : presample_variance;
            v += theta.alpha[j] * z2;
        }
        for (std::size_t j = 1; j <= P; ++j) {
            v += theta.beta[j - 1] * (t >= j ? s2[t - j] : presample_sigma2);
        }
        s2[t] = v;
    }
    return s2;
}

}  // namespace

SeriesSample simulate(const ModelSpec& spec, const ThetaVector& theta, std::size_t n,
                      std::size_t burn_in, RngStream& stream) {
    validate_theta(spec, theta);
    if (n == 0) throw InvalidParameter("simulation length n must be positive");

    const std::size_t lag = static_cast<std::size_t>(spec.max_lag());
    const std::size_t total = burn_in + n;
    const std::size_t p = theta.ar.size();
    const std::size_t q = theta.ma.size();
    const std::size_t Q = theta.alpha.size() - 1;
    const std::size_t P = theta.beta.size();
    const bool hetero = spec.heteroscedastic();

    // Presample state: X = eta, Z = 0 in the mean recursion, unconditional level in the
    // variance recursion (the volatility floor when no finite variance exists).
    double sigma2_start = theta.alpha[0];
    double z2_start = theta.alpha[0];
    if (hetero) {
        const double innov_var = spec.innovation.variance();
        const double alpha_sum = std::accumulate(theta.alpha.begin() + 1, theta.alpha.end(), 0.0);
        const double beta_sum = std::accumulate(theta.beta.begin(), theta.beta.end(), 0.0);
        const double persistence = innov_var * alpha_sum + beta_sum;
        if (std::isfinite(innov_var) && persistence < 1.0) {
            sigma2_start = theta.alpha[0] / (1.0 - persistence);
            z2_start = sigma2_start * innov_var;
        } else {
            sigma2_start = theta.alpha[0] / (1.0 - beta_sum);
            z2_start = sigma2_start;
        }
    }

    const std::size_t len = lag + total;
    std::vector<double> dev(len, 0.0), z(len, 0.0), z2(len, z2_start), s2(len, sigma2_start);
    std::vector<double> mean(total), vol(total), innov(total), x(total);

    for (std::size_t k = 0; k < total; ++k) {
        const std::size_t t = k + lag;
        double v = theta.alpha[0];
        if (hetero) {
            for (std::size_t j = 1; j <= Q; ++j) v += theta.alpha[j] * z2[t - j];
            for (std::size_t j = 1; j <= P; ++j) v += theta.beta[j - 1] * s2[t - j];
        }
        double m = theta.eta;
        for (std::size_t j = 1; j <= p; ++j) m += theta.ar[j - 1] * dev[t - j];
        for (std::size_t j = 1; j <= q; ++j) m -= theta.ma[j - 1] * z[t - j];

        const double sigma = std::sqrt(v);
        const double eps = sample(spec.innovation, stream);
        const double shock = sigma * eps;
        const double value = m + shock;

        s2[t] = v;
        z[t] = shock;
        z2[t] = shock * shock;
        dev[t] = value - theta.eta;
        mean[k] = m;
        vol[k] = sigma;
        innov[k] = eps;
        x[k] = value;
    }

    auto tail = [burn_in](std::vector<double>& values) {
        return std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(burn_in),
                                   values.end());
    };
    return SeriesSample{tail(x), tail(mean), tail(vol), tail(innov), theta, spec};
}

FilterOutput filter(const ModelSpec& spec, const ThetaVector& theta, std::span<const double> x,
                    const FilterInit& init) {
    validate_theta(spec, theta);
    const std::size_t needed = static_cast<std::size_t>(spec.max_lag()) + 1;
    if (x.size() < needed) {
        throw InsufficientData("filter needs at least " + std::to_string(needed) +
                               " observations, got " + std::to_string(x.size()));
    }

    const double mu0 = init.presample_mean.value_or(mean_of(x));
    MeanPass pass = invert_mean(theta, x, mu0);

    const std::size_t n = x.size();
    std::vector<double> sbar(n);
    if (spec.heteroscedastic()) {
        const double v0 = init.presample_variance.value_or(variance_of(pass.z));
        const auto s2 = variance_pass(theta, pass.z, v0);
        for (std::size_t t = 0; t < n; ++t) sbar[t] = std::sqrt(s2[t]);
    } else {
        std::fill(sbar.begin(), sbar.end(), std::sqrt(theta.alpha[0]));
    }

    std::vector<double> resid(n);
    for (std::size_t t = 0; t < n; ++t) resid[t] = pass.z[t] / sbar[t];
    return FilterOutput{std::move(pass.mbar), std::move(sbar), std::move(resid), theta, spec};
}

std::vector<double> forgetting_diagnostic(const ModelSpec& spec, const ThetaVector& theta,
                                          std::span<const double> x, std::size_t t_max) {
    validate_theta(spec, theta);
    if (t_max > x.size()) {
        throw InsufficientData("t_max exceeds the series length");
    }
    const double mu = mean_of(x);
    const double sd = std::sqrt(variance_of(x));
    const double var_a = variance_of(invert_mean(theta, x, mu).z);

    const FilterInit init_a{mu, var_a};
    const FilterInit init_b{mu + (sd > 0.0 ? sd : 1.0), var_a > 0.0 ? 2.0 * var_a : 1.0};
    const auto a = filter(spec, theta, x, init_a);
    const auto b = filter(spec, theta, x, init_b);

    std::vector<double> d(t_max);
    for (std::size_t t = 0; t < t_max; ++t) {
        const double var_gap = std::fabs(a.sbar[t] * a.sbar[t] - b.sbar[t] * b.sbar[t]);
        d[t] = var_gap + std::fabs(a.mbar[t] - b.mbar[t]);
    }
    return d;
}

UnconditionalMoments unconditional_moments(const ModelSpec& spec, const ThetaVector& theta) {
    validate_theta(spec, theta);
    UnconditionalMoments out{theta.eta, std::nullopt};

    const double innov_var = spec.innovation.variance();
    if (!std::isfinite(innov_var)) return out;

    double shock_var = theta.alpha[0] * innov_var;
    if (spec.heteroscedastic()) {
        const double alpha_sum = std::accumulate(theta.alpha.begin() + 1, theta.alpha.end(), 0.0);
        const double beta_sum = std::accumulate(theta.beta.begin(), theta.beta.end(), 0.0);
        const double persistence = innov_var * alpha_sum + beta_sum;
        if (!(persistence < 1.0)) return out;
        shock_var = innov_var * theta.alpha[0] / (1.0 - persistence);
    }

    if (theta.ar.empty()) {
        double psi2 = 1.0;
        for (double b : theta.ma) psi2 += b * b;
        out.variance = shock_var * psi2;
    } else if (theta.ar.size() == 1 && theta.ma.empty()) {
        out.variance = shock_var / (1.0 - theta.ar[0] * theta.ar[0]);
    }
    return out;
}

}  // namespace mdens
