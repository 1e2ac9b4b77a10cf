#include "mdens/error.hpp"
#include "mdens/models.hpp"

#include <cmath>
#include <numeric>

namespace mdens {
namespace {

void check_order(int value, const char* name) {
    if (value < 0 || value > kMaxOrder) {
        throw InvalidSpec(std::string(name) + " must lie in [0, " + std::to_string(kMaxOrder) +
                          "], got " + std::to_string(value));
    }
}

void check_size(std::size_t actual, std::size_t expected, const char* name) {
    if (actual != expected) {
        throw InvalidParameter(std::string(name) + " has " + std::to_string(actual) +
                               " coefficients, model expects " + std::to_string(expected));
    }
}

}  // namespace

ModelSpec ModelSpec::arma(int p, int q, InnovationSpec innov) {
    return {ModelFamily::Arma, p, q, 0, 0, innov};
}

ModelSpec ModelSpec::garch(int P, int Q, InnovationSpec innov) {
    return {ModelFamily::Garch, 0, 0, P, Q, innov};
}

ModelSpec ModelSpec::arma_garch(int p, int q, int P, int Q, InnovationSpec innov) {
    return {ModelFamily::ArmaGarch, p, q, P, Q, innov};
}

void ModelSpec::validate() const {
    check_order(ar_order, "AR order p");
    check_order(ma_order, "MA order q");
    check_order(garch_order, "GARCH order P");
    check_order(arch_order, "ARCH order Q");
    if (family == ModelFamily::Arma && (garch_order != 0 || arch_order != 0)) {
        throw InvalidSpec("ARMA family requires P = Q = 0");
    }
    if (family == ModelFamily::Garch && (ar_order != 0 || ma_order != 0)) {
        throw InvalidSpec("GARCH family requires p = q = 0");
    }
    innovation.validate();
}

int ModelSpec::max_lag() const {
    return std::max({ar_order, ma_order, garch_order, arch_order});
}

bool polynomial_is_stable(std::span<const double> coeffs) {
    std::vector<double> phi(coeffs.begin(), coeffs.end());
    for (std::size_t k = phi.size(); k > 0; --k) {
        const double r = phi[k - 1];
        if (!std::isfinite(r) || std::fabs(r) >= 1.0) return false;
        const double denom = 1.0 - r * r;
        std::vector<double> lower(k - 1);
        for (std::size_t j = 0; j + 1 < k; ++j) {
            lower[j] = (phi[j] + r * phi[k - 2 - j]) / denom;
        }
        phi = std::move(lower);
    }
    return true;
}

void validate_theta(const ModelSpec& spec, const ThetaVector& theta) {
    spec.validate();
    check_size(theta.ar.size(), static_cast<std::size_t>(spec.ar_order), "ar");
    check_size(theta.ma.size(), static_cast<std::size_t>(spec.ma_order), "ma");
    check_size(theta.alpha.size(), static_cast<std::size_t>(spec.arch_order) + 1, "alpha");
    check_size(theta.beta.size(), static_cast<std::size_t>(spec.garch_order), "beta");

    if (!std::isfinite(theta.eta)) throw InvalidParameter("eta must be finite");
    if (!(theta.alpha[0] > 0.0) || !std::isfinite(theta.alpha[0])) {
        throw InvalidParameter("alpha_0 must be > 0");
    }
    for (std::size_t j = 1; j < theta.alpha.size(); ++j) {
        if (!(theta.alpha[j] >= 0.0) || !std::isfinite(theta.alpha[j])) {
            throw InvalidParameter("alpha_" + std::to_string(j) + " must be >= 0");
        }
    }
    for (std::size_t j = 0; j < theta.beta.size(); ++j) {
        if (!(theta.beta[j] >= 0.0) || !std::isfinite(theta.beta[j])) {
            throw InvalidParameter("beta_" + std::to_string(j + 1) + " must be >= 0");
        }
    }
    const double beta_sum = std::accumulate(theta.beta.begin(), theta.beta.end(), 0.0);
    if (!(beta_sum < 1.0)) {
        throw InvalidParameter("sum of beta coefficients must be < 1 (got " +
                               std::to_string(beta_sum) + ")");
    }
    if (!polynomial_is_stable(theta.ar)) {
        throw InvalidParameter("AR polynomial must have all roots outside the unit disc");
    }
    if (!polynomial_is_stable(theta.ma)) {
        throw InvalidParameter("MA polynomial must have all roots outside the unit disc");
    }
}

double volatility_floor(const ThetaVector& theta) {
    const double beta_sum = std::accumulate(theta.beta.begin(), theta.beta.end(), 0.0);
    return std::sqrt(theta.alpha.at(0) / (1.0 - beta_sum));
}

std::string to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::Arma:
            return "arma";
        case ModelFamily::Garch:
            return "garch";
        case ModelFamily::ArmaGarch:
            return "arma-garch";
    }
    return "unknown";
}

}  // namespace mdens
