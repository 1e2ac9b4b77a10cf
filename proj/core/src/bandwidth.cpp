#include "mdens/error.hpp"
#include "mdens/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdens {
namespace {

double sample_sd(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mu = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / (n - 1.0));
}

// Linear-interpolation quantile on sorted data (Hyndman-Fan type 7).
double quantile_sorted(const std::vector<double>& sorted, double prob) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void require_spread(std::span<const double> x, const char* what) {
    if (x.size() < 2) throw DegenerateData(std::string(what) + " needs at least two points");
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (!(*mx > *mn)) throw DegenerateData(std::string(what) + ": data has zero spread");
}

}  // namespace

void BandwidthRule::validate() const {
    if (!(kappa > 0.2 && kappa < 0.5)) {
        throw InvalidParameter("kappa must lie in the open interval (1/5, 1/2)");
    }
    if (selector == BandwidthSelector::FixedRate && !(fixed_constant > 0.0)) {
        throw InvalidParameter("fixed-rate bandwidth constant must be > 0");
    }
}

BandwidthSelector parse_selector(std::string_view text) {
    if (text == "silverman") return BandwidthSelector::Silverman;
    if (text == "lscv" || text == "cv") return BandwidthSelector::Lscv;
    if (text == "fixed" || text == "fixed-rate") return BandwidthSelector::FixedRate;
    throw InvalidSpec("unknown bandwidth rule '" + std::string(text) +
                      "' (expected silverman, lscv, fixed)");
}

std::string to_string(BandwidthSelector s) {
    switch (s) {
        case BandwidthSelector::Silverman:
            return "silverman";
        case BandwidthSelector::Lscv:
            return "lscv";
        case BandwidthSelector::FixedRate:
            return "fixed";
    }
    return "unknown";
}

double silverman_bandwidth(std::span<const double> x) {
    require_spread(x, "Silverman bandwidth");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = sample_sd(x);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double lo = std::min(sd, iqr / 1.34);
    if (!(lo > 0.0)) lo = sd;
    return 0.9 * lo * std::pow(static_cast<double>(x.size()), -0.2);
}

double lscv_objective(std::span<const double> x, KernelSpec k, double b) {
    if (!(b > 0.0)) throw InvalidParameter("bandwidth must be > 0");
    if (x.size() < 2) throw DegenerateData("LSCV needs at least two points");
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();

    // Pairwise sums over i < j; sorted data lets the inner loop stop at the support edge.
    double conv_sum = 0.0;
    double leave_out_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double u = (s[j] - s[i]) / b;
            if (u >= 2.0) break;
            conv_sum += kernel_convolution(k, u);
            leave_out_sum += kernel_eval(k, u);
        }
    }
    const double nd = static_cast<double>(n);
    const double integral_sq = (nd * kernel_convolution(k, 0.0) + 2.0 * conv_sum) / (nd * nd * b);
    const double cross = 2.0 * (2.0 * leave_out_sum) / (nd * (nd - 1.0) * b);
    return integral_sq - cross;
}

std::vector<double> default_lscv_grid(std::span<const double> x) {
    require_spread(x, "LSCV grid");
    const double sd = sample_sd(x);
    constexpr int kPoints = 40;
    const double lo = std::log(0.05 * sd);
    const double hi = std::log(2.0 * sd);
    std::vector<double> grid(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (kPoints - 1));
    }
    return grid;
}

double lscv_bandwidth(std::span<const double> x, KernelSpec k, std::span<const double> grid) {
    require_spread(x, "LSCV bandwidth");
    if (grid.empty()) throw InvalidParameter("LSCV grid must be nonempty");
    if (!std::is_sorted(grid.begin(), grid.end()) || !(grid.front() > 0.0)) {
        throw InvalidParameter("LSCV grid must be positive and sorted");
    }
    double best_b = grid.front();
    double best = std::numeric_limits<double>::infinity();
    for (double b : grid) {
        const double value = lscv_objective(x, k, b);
        if (value < best) {
            best = value;
            best_b = b;
        }
    }
    return best_b;
}

double adjust_rate(double b_base, std::size_t n, double kappa) {
    if (!(kappa > 0.2 && kappa < 0.5)) {
        throw InvalidParameter("kappa must lie in the open interval (1/5, 1/2)");
    }
    if (!(b_base > 0.0)) throw InvalidParameter("base bandwidth must be > 0");
    if (n == 0) throw InvalidParameter("sample size must be positive");
    return b_base * std::pow(static_cast<double>(n), 0.2 - kappa);
}

BandwidthChoice select_bandwidth(std::span<const double> x, KernelSpec k, const BandwidthRule& rule) {
    rule.validate();
    BandwidthChoice out;
    switch (rule.selector) {
        case BandwidthSelector::Silverman:
            out.base = silverman_bandwidth(x);
            break;
        case BandwidthSelector::Lscv:
            out.base = lscv_bandwidth(x, k, default_lscv_grid(x));
            break;
        case BandwidthSelector::FixedRate:
            if (x.empty()) throw InsufficientData("bandwidth selection needs data");
            out.base = rule.fixed_constant * std::pow(static_cast<double>(x.size()), -0.2);
            break;
    }
    out.adjusted = adjust_rate(out.base, x.size(), rule.kappa);
    return out;
}

}  // namespace mdens
