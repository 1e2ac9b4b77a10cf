#pragma once

#include "mdens/density.hpp"
#include "mdens/fit.hpp"
#include "mdens/kernel.hpp"
#include "mdens/models.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdens {

/// The three simulation designs:
///   ArT5          X_t = 0.5 X_{t-1} + eps_t, eps ~ t(5)
///   GarchT5       X_t = sigma_t eps_t, sigma_t^2 = 0.1 + 0.1 X_{t-1}^2 + 0.8 sigma_{t-1}^2,
///                 eps ~ standardized t(5)
///   ArGarchGauss  X_t = 0.5 X_{t-1} + Z_t, Z_t = sigma_t eps_t with the GARCH(1,1) above
///                 driven by Z, eps ~ N(0, 1)
enum class SetupId { ArT5, GarchT5, ArGarchGauss };

/// Seed used for the reference reports and the acceptance suite.
inline constexpr std::uint64_t kShippedSeed = 20261014;

/// Stream ids at and above this value are reserved for truth simulations;
/// replications use stream ids below it.
inline constexpr std::uint64_t kTruthStreamBase = std::uint64_t{1} << 63;

struct SetupModel {
    ModelSpec spec;
    ThetaVector theta;
};

SetupModel setup_model(SetupId id);
std::string to_string(SetupId id);
/// Accepts ar_t5, garch_t5, ar_garch_gauss. Throws InvalidSpec.
SetupId parse_setup(std::string_view text);
/// 100 for the AR design, 200 for the two GARCH designs.
std::size_t default_sample_size(SetupId id);

/// 10 equally spaced points from 0 to 5.
std::vector<double> default_grid();

/// Plug-in truth f_X(v) ~ (1/N) sum_i f_eps((v - m_i) / sigma_i) / sigma_i along one long
/// simulated path (after burn_in).
std::vector<double> truth_density(const ModelSpec& spec, const ThetaVector& theta,
                                  std::span<const double> grid, std::size_t samples,
                                  RngStream& stream, std::size_t burn_in = 1000);
std::vector<double> truth_density(SetupId id, std::span<const double> grid, std::size_t samples,
                                  RngStream& stream);
double truth_density(SetupId id, double v, std::size_t samples, RngStream& stream);

/// Stream used for the truth of a report: (seed, kTruthStreamBase + setup index).
RngStream truth_stream(SetupId id, std::uint64_t seed);

struct McConfig {
    SetupId setup = SetupId::ArT5;
    std::size_t n = 100;
    std::size_t reps = 1000;
    BandwidthRule rule;
    KernelSpec kernel;
    std::uint64_t seed = kShippedSeed;
    std::vector<double> grid = default_grid();
    std::size_t truth_samples = 500000;
    std::size_t burn_in = 1000;
    OptimizerConfig optimizer;
    unsigned threads = 1;

    /// Throws InvalidParameter.
    void validate() const;
};

struct ReplicationRecord {
    std::uint64_t stream_id = 0;
    bool included = false;
    double base_bandwidth = 0.0;
    double adjusted_bandwidth = 0.0;
    std::vector<double> pr;   // Parzen-Rosenblatt values on the grid
    std::vector<double> res;  // residual estimator values on the grid
    std::string failure;      // reason for exclusion
};

struct McReport {
    McConfig config;
    std::vector<double> truth;
    std::vector<double> rmse_pr;   // sqrt(mean squared error) / truth
    std::vector<double> rmse_res;
    std::size_t included = 0;
    std::size_t excluded = 0;
    std::vector<std::string> notes;
    std::vector<ReplicationRecord> replications;  // in stream-id order
};

/// Replication r uses stream (seed, r): simulate, choose the base bandwidth on the data,
/// Parzen-Rosenblatt at the base bandwidth, fit the design's model family, filter, then
/// the residual estimator at the rate-adjusted bandwidth. Replications whose fit fails or
/// does not converge are excluded and counted.
McReport run_setup(const McConfig& config);
/// Same, against a precomputed truth on config.grid.
McReport run_setup(const McConfig& config, std::span<const double> truth);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

/// Ordinary least squares y = intercept + slope x with the usual slope standard error.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct RateConfig {
    SetupId setup = SetupId::ArT5;
    double v = 2.0;
    std::vector<std::size_t> n_list{250, 500, 1000, 2000};
    std::size_t reps = 500;
    BandwidthRule rule;
    KernelSpec kernel;
    std::uint64_t seed = kShippedSeed;
    std::size_t truth_samples = 500000;
    std::size_t burn_in = 1000;
    OptimizerConfig optimizer;
    unsigned threads = 1;
};

struct RateReport {
    RateConfig config;
    std::vector<std::size_t> n_values;  // distinct, increasing
    double truth = 0.0;
    std::vector<double> rmse_pr;        // unnormalized RMSE at v for each n
    std::vector<double> rmse_res;
    std::vector<std::size_t> excluded;
    LinearFit fit_pr;                   // log RMSE against log n
    LinearFit fit_res;
    std::vector<std::string> notes;
};

/// Duplicate sample sizes are collapsed with a note; fewer than three distinct sizes
/// throws InvalidParameter. Each sample size gets its own seed derived from config.seed.
RateReport rate_regression(const RateConfig& config);

/// Seed for the k-th sample size of a rate run.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace mdens
