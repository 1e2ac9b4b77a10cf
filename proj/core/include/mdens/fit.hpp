#pragma once

#include "mdens/models.hpp"
#include "mdens/optimize.hpp"

#include <span>
#include <vector>

namespace mdens {

struct ThetaEstimate {
    ThetaVector theta;
    ModelSpec spec;
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Mean squared standardized residual over the estimation sample. For ARMA fits,
    /// where the filter runs with sigma = 1, this is the innovation variance estimate.
    double innovation_variance = 0.0;
};

/// Smallest alpha_0 reported for zero-spread input.
inline constexpr double kMinAlpha0 = 1e-12;

/// (1/n) sum_{t >= t0} [log sbar_t^2 + (X_t - mbar_t)^2 / sbar_t^2], t0 = max(p,q,P,Q) + 1.
double negative_gaussian_qlik(const ModelSpec& spec, const ThetaVector& theta,
                              std::span<const double> x);

/// Conditional least squares for ARMA(p, q); the returned theta carries alpha = {1}
/// so that filtering it yields the homoscedastic residual estimator.
ThetaEstimate fit_arma(std::span<const double> x, int p, int q, const OptimizerConfig& config = {});

/// Gaussian QML for GARCH(P, Q) with an estimated location.
ThetaEstimate fit_garch(std::span<const double> x, int P, int Q, const OptimizerConfig& config = {});

/// Joint Gaussian QML, started from fit_arma and fit_garch on its residuals.
/// With p = q = 0 this is fit_garch.
ThetaEstimate fit_arma_garch(std::span<const double> x, int p, int q, int P, int Q,
                             const OptimizerConfig& config = {});

/// Dispatch on spec.family; the estimate's spec keeps spec.innovation.
ThetaEstimate fit_model(const ModelSpec& spec, std::span<const double> x,
                        const OptimizerConfig& config = {});

/// Monahan's map from partial autocorrelations in (-1, 1) to coefficients c of a
/// stable polynomial 1 - sum c_k z^k, and its inverse (step-down recursion).
std::vector<double> pacf_to_coefficients(std::span<const double> pacf);
std::vector<double> coefficients_to_pacf(std::span<const double> coeffs);

}  // namespace mdens
