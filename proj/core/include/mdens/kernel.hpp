#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdens {

enum class KernelFamily { Quadratic, Biweight };

/// Symmetric probability kernel supported on [-1, 1].
struct KernelSpec {
    KernelFamily family = KernelFamily::Quadratic;
    bool operator==(const KernelSpec&) const = default;
};

/// Quadratic (Epanechnikov): 3/4 (1 - u^2); biweight: 15/16 (1 - u^2)^2; zero outside [-1, 1].
double kernel_eval(KernelSpec k, double u);

/// Closed-form integral of K over [lo, hi].
double kernel_integral(KernelSpec k, double lo, double hi);

/// Self-convolution (K * K)(u), supported on [-2, 2].
double kernel_convolution(KernelSpec k, double u);

/// Scaled kernel K_b(x) = K(x / b) / b.
inline double scaled_kernel(KernelSpec k, double x, double b) { return kernel_eval(k, x / b) / b; }

KernelSpec parse_kernel(std::string_view text);
std::string to_string(KernelSpec k);

enum class BandwidthSelector { Silverman, Lscv, FixedRate };

inline constexpr double kDefaultKappa = 2.0 / 7.0;

struct BandwidthRule {
    BandwidthSelector selector = BandwidthSelector::Silverman;
    double kappa = kDefaultKappa;  // residual estimator rate, in (1/5, 1/2)
    double fixed_constant = 1.0;   // FixedRate: b = C n^(-1/5)

    /// Throws InvalidParameter.
    void validate() const;
};

BandwidthSelector parse_selector(std::string_view text);
std::string to_string(BandwidthSelector s);

/// 0.9 min(sd, IQR / 1.34) n^(-1/5); falls back to sd when the IQR is zero.
/// Throws DegenerateData for fewer than two points or zero spread.
double silverman_bandwidth(std::span<const double> x);

/// LSCV(b) = int fhat_b^2 - (2 / n) sum_i fhat_{b,-i}(X_i), with the exact K * K formula.
double lscv_objective(std::span<const double> x, KernelSpec k, double b);

/// 40-point geometric grid spanning [0.05, 2] * sd(x).
std::vector<double> default_lscv_grid(std::span<const double> x);

/// Grid argmin of lscv_objective (first minimizer on ties).
double lscv_bandwidth(std::span<const double> x, KernelSpec k, std::span<const double> grid);

/// b_base * n^(1/5 - kappa). Throws InvalidParameter unless kappa is in (1/5, 1/2).
double adjust_rate(double b_base, std::size_t n, double kappa);

struct BandwidthChoice {
    double base = 0.0;      // Parzen-Rosenblatt bandwidth
    double adjusted = 0.0;  // residual-estimator bandwidth
};

/// Applies the rule's base selector on x, then adjust_rate for the residual estimator.
BandwidthChoice select_bandwidth(std::span<const double> x, KernelSpec k, const BandwidthRule& rule);

}  // namespace mdens
