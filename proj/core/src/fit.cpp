#include "mdens/fit.hpp"

#include "mdens/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdens {
namespace {

constexpr double kBetaMass = 0.999;  // sum beta <= 0.999
constexpr double kMaxPacf = 0.995;   // start values are pulled inside this radius

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
    const double mu = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    return ss / static_cast<double>(x.size());
}

void require_length(std::span<const double> x, std::size_t needed, const char* what) {
    if (x.size() < needed) {
        throw InsufficientData(std::string(what) + " needs at least " + std::to_string(needed) +
                               " observations, got " + std::to_string(x.size()));
    }
}

// Unconstrained coordinates:
//   [eta] [atanh pacf(ar)] [atanh pacf(ma)] [log alpha_0 .. log alpha_Q] [beta logits]
// The alpha block is absent for homoscedastic (CLS) fits.
class ThetaCoder {
public:
    ThetaCoder(const ModelSpec& spec, bool with_variance)
        : p_(static_cast<std::size_t>(spec.ar_order)),
          q_(static_cast<std::size_t>(spec.ma_order)),
          alphas_(with_variance ? static_cast<std::size_t>(spec.arch_order) + 1 : 0),
          betas_(with_variance ? static_cast<std::size_t>(spec.garch_order) : 0) {}

    [[nodiscard]] std::size_t size() const { return 1 + p_ + q_ + alphas_ + betas_; }

    [[nodiscard]] ThetaVector decode(std::span<const double> u) const {
        ThetaVector theta;
        std::size_t k = 0;
        theta.eta = u[k++];
        theta.ar = pacf_block(u.subspan(k, p_));
        k += p_;
        theta.ma = pacf_block(u.subspan(k, q_));
        k += q_;
        if (alphas_ == 0) {
            theta.alpha = {1.0};
            return theta;
        }
        theta.alpha.resize(alphas_);
        for (std::size_t j = 0; j < alphas_; ++j) theta.alpha[j] = std::exp(u[k++]);
        double denom = 1.0;
        for (std::size_t j = 0; j < betas_; ++j) denom += std::exp(u[k + j]);
        theta.beta.resize(betas_);
        for (std::size_t j = 0; j < betas_; ++j) theta.beta[j] = kBetaMass * std::exp(u[k + j]) / denom;
        return theta;
    }

    [[nodiscard]] std::vector<double> encode(const ThetaVector& theta) const {
        std::vector<double> u;
        u.reserve(size());
        u.push_back(theta.eta);
        for (double r : coefficients_to_pacf(theta.ar)) u.push_back(std::atanh(clamp_pacf(r)));
        for (double r : coefficients_to_pacf(theta.ma)) u.push_back(std::atanh(clamp_pacf(r)));
        if (alphas_ == 0) return u;
        for (std::size_t j = 0; j < alphas_; ++j) {
            u.push_back(std::log(std::max(theta.alpha[j], 1e-8)));
        }
        double mass = 0.0;
        std::vector<double> w(betas_);
        for (std::size_t j = 0; j < betas_; ++j) {
            w[j] = std::max(theta.beta[j], 1e-6) / kBetaMass;
            mass += w[j];
        }
        if (mass >= 0.999) {
            for (double& wj : w) wj *= 0.99 / mass;
            mass = 0.99;
        }
        for (double wj : w) u.push_back(std::log(wj / (1.0 - mass)));
        return u;
    }

    // Initial simplex edge lengths in coordinate units.
    [[nodiscard]] std::vector<double> steps(double data_scale, double base) const {
        std::vector<double> s(size(), 5.0 * base);
        s[0] = base * (data_scale > 0.0 ? data_scale : 1.0);
        for (std::size_t k = 1; k <= p_ + q_; ++k) s[k] = 2.0 * base;
        return s;
    }

private:
    static double clamp_pacf(double r) { return std::clamp(r, -kMaxPacf, kMaxPacf); }

    static std::vector<double> pacf_block(std::span<const double> u) {
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::tanh(u[i]);
        return pacf_to_coefficients(r);
    }

    std::size_t p_, q_, alphas_, betas_;
};

double cls_objective(const ModelSpec& spec, const ThetaVector& theta, std::span<const double> x) {
    const auto out = filter(spec, theta, x);
    const std::size_t t0 = static_cast<std::size_t>(spec.max_lag());
    double acc = 0.0;
    for (std::size_t t = t0; t < x.size(); ++t) acc += out.resid[t] * out.resid[t];
    return acc / static_cast<double>(x.size());
}

double mean_squared_resid(const ModelSpec& spec, const ThetaVector& theta,
                          std::span<const double> x) {
    const auto out = filter(spec, theta, x);
    const std::size_t t0 = static_cast<std::size_t>(spec.max_lag());
    double acc = 0.0;
    for (std::size_t t = t0; t < x.size(); ++t) acc += out.resid[t] * out.resid[t];
    return acc / static_cast<double>(x.size() - t0);
}

template <class F>
Objective guarded(const ThetaCoder& coder, F&& f) {
    return [&coder, f = std::forward<F>(f)](std::span<const double> u) -> double {
        try {
            return f(coder.decode(u));
        } catch (const std::invalid_argument&) {
            return std::numeric_limits<double>::infinity();
        }
    };
}

ThetaEstimate finish(const ModelSpec& spec, const ThetaCoder& coder, const OptimizeResult& opt,
                     std::span<const double> x) {
    ThetaEstimate est;
    est.spec = spec;
    est.theta = coder.decode(opt.argmin);
    est.objective_value = opt.value;
    est.iterations = opt.iterations;
    est.converged = opt.converged;
    est.innovation_variance = mean_squared_resid(spec, est.theta, x);
    return est;
}

ThetaEstimate degenerate_garch(const ModelSpec& spec, std::span<const double> x) {
    ThetaEstimate est;
    est.spec = spec;
    est.theta.eta = mean_of(x);
    est.theta.alpha.assign(static_cast<std::size_t>(spec.arch_order) + 1, 0.0);
    est.theta.alpha[0] = kMinAlpha0;
    est.theta.beta.assign(static_cast<std::size_t>(spec.garch_order), 0.0);
    est.objective_value = negative_gaussian_qlik(spec, est.theta, x);
    est.converged = false;
    est.innovation_variance = 0.0;
    return est;
}

}  // namespace

std::vector<double> pacf_to_coefficients(std::span<const double> pacf) {
    std::vector<double> phi;
    phi.reserve(pacf.size());
    for (std::size_t k = 0; k < pacf.size(); ++k) {
        const double r = pacf[k];
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r * phi[k - 1 - j];
        next[k] = r;
        phi = std::move(next);
    }
    return phi;
}

std::vector<double> coefficients_to_pacf(std::span<const double> coeffs) {
    std::vector<double> phi(coeffs.begin(), coeffs.end());
    std::vector<double> pacf(phi.size());
    for (std::size_t k = phi.size(); k > 0; --k) {
        const double r = phi[k - 1];
        pacf[k - 1] = r;
        const double denom = 1.0 - r * r;
        if (!(denom > 0.0)) throw InvalidParameter("polynomial is not stable");
        std::vector<double> lower(k - 1);
        for (std::size_t j = 0; j + 1 < k; ++j) lower[j] = (phi[j] + r * phi[k - 2 - j]) / denom;
        phi = std::move(lower);
    }
    return pacf;
}

double negative_gaussian_qlik(const ModelSpec& spec, const ThetaVector& theta,
                              std::span<const double> x) {
    const auto out = filter(spec, theta, x);
    const std::size_t t0 = static_cast<std::size_t>(spec.max_lag());
    double acc = 0.0;
    for (std::size_t t = t0; t < x.size(); ++t) {
        acc += 2.0 * std::log(out.sbar[t]) + out.resid[t] * out.resid[t];
    }
    return acc / static_cast<double>(x.size());
}

ThetaEstimate fit_arma(std::span<const double> x, int p, int q, const OptimizerConfig& config) {
    config.validate();
    const ModelSpec spec = ModelSpec::arma(p, q);
    spec.validate();
    require_length(x, 10 * static_cast<std::size_t>(p + q + 1), "ARMA fit");

    const ThetaCoder coder(spec, false);
    ThetaVector start;
    start.eta = mean_of(x);
    start.ar.assign(static_cast<std::size_t>(p), 0.0);
    start.ma.assign(static_cast<std::size_t>(q), 0.0);
    start.alpha = {1.0};

    if (p == 0 && q == 0) {
        ThetaEstimate est;
        est.spec = spec;
        est.theta = start;
        est.objective_value = cls_objective(spec, start, x);
        est.converged = true;
        est.innovation_variance = mean_squared_resid(spec, start, x);
        return est;
    }

    const auto objective =
        guarded(coder, [&](const ThetaVector& theta) { return cls_objective(spec, theta, x); });
    const auto init = coder.encode(start);
    const auto steps = coder.steps(std::sqrt(variance_of(x)), config.initial_step);
    const auto opt = optimize(objective, init, config, steps);
    return finish(spec, coder, opt, x);
}

ThetaEstimate fit_garch(std::span<const double> x, int P, int Q, const OptimizerConfig& config) {
    config.validate();
    const ModelSpec spec = ModelSpec::garch(P, Q);
    spec.validate();
    require_length(x, 50 * static_cast<std::size_t>(P + Q + 1), "GARCH fit");

    const double mu = mean_of(x);
    const double var = variance_of(x);
    if (!(var > 0.0)) return degenerate_garch(spec, x);

    if (P == 0 && Q == 0) {
        // log a + S / a is minimized at a = S.
        ThetaEstimate est;
        est.spec = spec;
        est.theta.eta = mu;
        est.theta.alpha = {var};
        est.objective_value = negative_gaussian_qlik(spec, est.theta, x);
        est.converged = true;
        est.innovation_variance = mean_squared_resid(spec, est.theta, x);
        return est;
    }

    const ThetaCoder coder(spec, true);
    const auto objective = guarded(
        coder, [&](const ThetaVector& theta) { return negative_gaussian_qlik(spec, theta, x); });

    // Pick the best of a few persistence levels as the simplex start.
    constexpr double kStarts[][2] = {{0.05, 0.90}, {0.10, 0.80}, {0.15, 0.60}, {0.10, 0.30}};
    std::vector<double> init;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : kStarts) {
        const double alpha_mass = Q > 0 ? s[0] : 0.0;
        const double beta_mass = P > 0 ? s[1] : 0.0;
        ThetaVector theta;
        theta.eta = mu;
        theta.alpha.assign(static_cast<std::size_t>(Q) + 1, Q > 0 ? alpha_mass / Q : 0.0);
        theta.alpha[0] = var * (1.0 - alpha_mass - beta_mass);
        theta.beta.assign(static_cast<std::size_t>(P), P > 0 ? beta_mass / P : 0.0);
        auto u = coder.encode(theta);
        const double value = objective(u);
        if (value < best) {
            best = value;
            init = std::move(u);
        }
    }

    const auto steps = coder.steps(std::sqrt(var), config.initial_step);
    const auto opt = optimize(objective, init, config, steps);
    return finish(spec, coder, opt, x);
}

ThetaEstimate fit_arma_garch(std::span<const double> x, int p, int q, int P, int Q,
                             const OptimizerConfig& config) {
    if (p == 0 && q == 0) return fit_garch(x, P, Q, config);
    config.validate();
    const ModelSpec spec = ModelSpec::arma_garch(p, q, P, Q);
    spec.validate();
    require_length(x, 10 * static_cast<std::size_t>(p + q + 1), "ARMA-GARCH fit");
    require_length(x, 50 * static_cast<std::size_t>(P + Q + 1), "ARMA-GARCH fit");

    const auto mean_fit = fit_arma(x, p, q, config);
    const auto shocks = filter(mean_fit.spec, mean_fit.theta, x).resid;
    const auto vol_fit = fit_garch(shocks, P, Q, config);

    ThetaVector start = mean_fit.theta;
    start.alpha = vol_fit.theta.alpha;
    start.alpha[0] = std::max(start.alpha[0], 1e-6);
    start.beta = vol_fit.theta.beta;

    const ThetaCoder coder(spec, true);
    const auto objective = guarded(
        coder, [&](const ThetaVector& theta) { return negative_gaussian_qlik(spec, theta, x); });
    const auto init = coder.encode(start);
    const auto steps = coder.steps(std::sqrt(variance_of(x)), config.initial_step);
    const auto opt = optimize(objective, init, config, steps);
    return finish(spec, coder, opt, x);
}

ThetaEstimate fit_model(const ModelSpec& spec, std::span<const double> x,
                        const OptimizerConfig& config) {
    spec.validate();
    ThetaEstimate est;
    switch (spec.family) {
        case ModelFamily::Arma:
            est = fit_arma(x, spec.ar_order, spec.ma_order, config);
            break;
        case ModelFamily::Garch:
            est = fit_garch(x, spec.garch_order, spec.arch_order, config);
            break;
        case ModelFamily::ArmaGarch:
            est = fit_arma_garch(x, spec.ar_order, spec.ma_order, spec.garch_order,
                                 spec.arch_order, config);
            break;
    }
    // fit_arma_garch with p = q = 0 hands back a GARCH-family estimate; keep the caller's family.
    est.spec.family = spec.family;
    est.spec.innovation = spec.innovation;
    return est;
}

}  // namespace mdens
