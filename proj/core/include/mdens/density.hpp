#pragma once

#include "mdens/kernel.hpp"
#include "mdens/models.hpp"

#include <span>
#include <string>
#include <vector>

namespace mdens {

struct DensityQuery {
    std::vector<double> grid;  // strictly increasing evaluation points
    KernelSpec kernel;
    double bandwidth = 0.0;

    /// Throws InvalidParameter.
    void validate() const;
};

enum class EstimatorTag { ParzenRosenblatt, ResidualFeasible, ResidualUnfeasible };

std::string to_string(EstimatorTag tag);

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> values;
    EstimatorTag tag = EstimatorTag::ParzenRosenblatt;
    double bandwidth = 0.0;
    std::size_t n = 0;
    std::vector<std::string> notes;
};

/// (1/n) sum_i K_b(v - X_i).
DensityEstimate parzen_rosenblatt(std::span<const double> x, const DensityQuery& q);

/// Naive double sum
///   f(v) = (1/n^2) sum_{i,j} K_b[(v - mbar_i) / sbar_i - resid_j] / sbar_i.
DensityEstimate residual_density(const FilterOutput& f, const DensityQuery& q);

/// Same values as residual_density: the residuals are sorted once and each inner sum
/// runs over the residuals inside the kernel window only.
DensityEstimate residual_density_fast(const FilterOutput& f, const DensityQuery& q);

/// The double sum on the true conditional means, volatilities and innovations.
DensityEstimate oracle_density(const SeriesSample& s, const DensityQuery& q);

/// Building blocks shared by the estimators above. All three spans have equal length n >= 1.
std::vector<double> double_sum_naive(std::span<const double> mean, std::span<const double> scale,
                                     std::span<const double> resid, const DensityQuery& q);
std::vector<double> double_sum_windowed(std::span<const double> mean,
                                        std::span<const double> scale,
                                        std::span<const double> resid, const DensityQuery& q);

struct IntegrationResult {
    double value = 0.0;
    bool coverage_ok = true;
    std::string warning;
};

/// Trapezoid rule over the estimate's grid. Flags grids coarser than bandwidth / 5 or
/// ending where the estimate is still positive.
IntegrationResult integrate_estimate(const DensityEstimate& e);

/// `points` equally spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// Grid spanning the support of the Parzen-Rosenblatt estimate (padded by the bandwidth).
std::vector<double> support_grid(std::span<const double> x, double bandwidth, std::size_t points);

/// Grid spanning the support of the residual estimate built from f with the given bandwidth.
std::vector<double> support_grid(const FilterOutput& f, double bandwidth, std::size_t points);

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace mdens
