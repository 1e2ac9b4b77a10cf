#pragma once

#include "mdens/innovations.hpp"
#include "mdens/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdens {

enum class ModelFamily { Arma, Garch, ArmaGarch };

inline constexpr int kMaxOrder = 10;

/// Model family and orders.
///
/// ar_order/ma_order are the ARMA orders (p, q); garch_order is the number of
/// lagged variances (P, coefficients beta) and arch_order the number of lagged
/// squared shocks (Q, coefficients alpha_1..alpha_Q).
struct ModelSpec {
    ModelFamily family = ModelFamily::Arma;
    int ar_order = 0;
    int ma_order = 0;
    int garch_order = 0;
    int arch_order = 0;
    InnovationSpec innovation = InnovationSpec::gaussian();

    static ModelSpec arma(int p, int q, InnovationSpec innov = InnovationSpec::gaussian());
    static ModelSpec garch(int P, int Q, InnovationSpec innov = InnovationSpec::gaussian());
    static ModelSpec arma_garch(int p, int q, int P, int Q,
                                InnovationSpec innov = InnovationSpec::gaussian());

    /// Throws InvalidSpec.
    void validate() const;
    /// max(p, q, P, Q)
    [[nodiscard]] int max_lag() const;
    [[nodiscard]] bool heteroscedastic() const { return family != ModelFamily::Arma; }

    bool operator==(const ModelSpec&) const = default;
};

/// Parameter vector theta.
///
/// Mean part: X_t - eta = sum a_j (X_{t-j} - eta) + Z_t - sum b_j Z_{t-j}.
/// Variance part: sigma_t^2 = alpha_0 + sum alpha_j Z_{t-j}^2 + sum beta_j sigma_{t-j}^2.
/// For the ARMA family alpha = {alpha_0} is the constant innovation scale and beta is empty.
struct ThetaVector {
    double eta = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    std::vector<double> alpha;
    std::vector<double> beta;

    bool operator==(const ThetaVector&) const = default;
};

/// True when all roots of 1 - sum c_k z^k lie outside the closed unit disc.
/// Uses the Schur-Cohn step-down (all reflection coefficients inside (-1, 1)).
bool polynomial_is_stable(std::span<const double> coeffs);

/// Throws InvalidParameter naming the violated constraint.
void validate_theta(const ModelSpec& spec, const ThetaVector& theta);

/// sqrt(alpha_0 / (1 - sum beta)), the lower bound of every volatility path.
double volatility_floor(const ThetaVector& theta);

/// Simulated path together with the true conditional mean, volatility and innovations.
struct SeriesSample {
    std::vector<double> x;
    std::vector<double> true_mean;
    std::vector<double> true_vol;
    std::vector<double> true_innov;
    ThetaVector theta_true;
    ModelSpec spec;
};

/// Truncated recursions evaluated on observed data.
struct FilterOutput {
    std::vector<double> mbar;
    std::vector<double> sbar;
    std::vector<double> resid;
    ThetaVector theta;
    ModelSpec spec;
};

/// Presample placeholders used by filter(). Empty fields take the defaults:
/// X_s = sample mean of x, and Z_s^2 = sigma_s^2 = sample variance of the
/// inverted ARMA innovations Z_t(theta) (the sample variance of x for pure GARCH).
struct FilterInit {
    std::optional<double> presample_mean;
    std::optional<double> presample_variance;
};

/// Returns the last n points of a (burn_in + n) path started from X = eta and
/// the unconditional variance.
SeriesSample simulate(const ModelSpec& spec, const ThetaVector& theta, std::size_t n,
                      std::size_t burn_in, RngStream& stream);

FilterOutput filter(const ModelSpec& spec, const ThetaVector& theta, std::span<const double> x,
                    const FilterInit& init = {});

/// d_t = |sbar_t^2(A) - sbar_t^2(B)| + |mbar_t(A) - mbar_t(B)|, t = 1..t_max, for the
/// default initialization A and B = (mean + sd, 2 * variance).
std::vector<double> forgetting_diagnostic(const ModelSpec& spec, const ThetaVector& theta,
                                          std::span<const double> x, std::size_t t_max);

struct UnconditionalMoments {
    double mean = 0.0;
    std::optional<double> variance;
};

/// Closed-form moments: variance for ARMA(1,0), ARMA(0,q) and any stationary GARCH
/// part; absent when it has no closed form here or does not exist.
UnconditionalMoments unconditional_moments(const ModelSpec& spec, const ThetaVector& theta);

std::string to_string(ModelFamily family);

}  // namespace mdens
