#include "mdens/density.hpp"

#include "mdens/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mdens {
namespace {

// Widens the search window so that every term the naive sum evaluates as nonzero
// is also visited by the windowed sum, whatever the rounding of L +- b.
constexpr double kWindowSlack = 1e-9;

void check_triplet(std::span<const double> mean, std::span<const double> scale,
                   std::span<const double> resid) {
    if (mean.empty()) throw InsufficientData("density estimate needs at least one observation");
    if (mean.size() != scale.size() || mean.size() != resid.size()) {
        throw InvalidParameter("mean, scale and residual sequences must have equal length");
    }
}

DensityEstimate make_estimate(const DensityQuery& q, std::vector<double> values, EstimatorTag tag,
                              std::size_t n) {
    return DensityEstimate{q.grid, std::move(values), tag, q.bandwidth, n, {}};
}

// Pure GARCH: at v = location every L_{v,i} collapses to ~0 and the estimator loses
// its advantage; record such grid points.
void flag_singular_points(const FilterOutput& f, DensityEstimate& e) {
    if (f.spec.family != ModelFamily::Garch) return;
    for (double v : e.grid) {
        if (std::fabs(v - f.theta.eta) <= e.bandwidth) {
            std::ostringstream note;
            note << "grid point v=" << v << " is within one bandwidth of the fitted location "
                 << f.theta.eta << " (degenerate point for a pure GARCH fit)";
            e.notes.push_back(note.str());
        }
    }
}

}  // namespace

void DensityQuery::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw InvalidParameter("bandwidth must be a positive finite number");
    }
    if (grid.empty()) throw InvalidParameter("density grid must be nonempty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw InvalidParameter("density grid must be strictly increasing");
    }
}

std::string to_string(EstimatorTag tag) {
    switch (tag) {
        case EstimatorTag::ParzenRosenblatt:
            return "parzen_rosenblatt";
        case EstimatorTag::ResidualFeasible:
            return "residual_feasible";
        case EstimatorTag::ResidualUnfeasible:
            return "residual_unfeasible";
    }
    return "unknown";
}

DensityEstimate parzen_rosenblatt(std::span<const double> x, const DensityQuery& q) {
    q.validate();
    if (x.empty()) throw InsufficientData("density estimate needs at least one observation");
    const double b = q.bandwidth;
    std::vector<double> values(q.grid.size());
    for (std::size_t g = 0; g < q.grid.size(); ++g) {
        CompensatedSum acc;
        for (double xi : x) acc.add(kernel_eval(q.kernel, (q.grid[g] - xi) / b));
        values[g] = acc.value() / (static_cast<double>(x.size()) * b);
    }
    return make_estimate(q, std::move(values), EstimatorTag::ParzenRosenblatt, x.size());
}

std::vector<double> double_sum_naive(std::span<const double> mean, std::span<const double> scale,
                                     std::span<const double> resid, const DensityQuery& q) {
    q.validate();
    check_triplet(mean, scale, resid);
    const std::size_t n = mean.size();
    const double b = q.bandwidth;
    std::vector<double> values(q.grid.size());
    for (std::size_t g = 0; g < q.grid.size(); ++g) {
        CompensatedSum outer;
        for (std::size_t i = 0; i < n; ++i) {
            const double location = (q.grid[g] - mean[i]) / scale[i];
            CompensatedSum inner;
            for (std::size_t j = 0; j < n; ++j) {
                inner.add(kernel_eval(q.kernel, (location - resid[j]) / b));
            }
            outer.add(inner.value() / scale[i]);
        }
        const double nd = static_cast<double>(n);
        values[g] = outer.value() / (nd * nd * b);
    }
    return values;
}

std::vector<double> double_sum_windowed(std::span<const double> mean,
                                        std::span<const double> scale,
                                        std::span<const double> resid, const DensityQuery& q) {
    q.validate();
    check_triplet(mean, scale, resid);
    const std::size_t n = mean.size();
    const double b = q.bandwidth;
    const double reach = b * (1.0 + kWindowSlack);

    std::vector<double> sorted(resid.begin(), resid.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> values(q.grid.size());
    for (std::size_t g = 0; g < q.grid.size(); ++g) {
        CompensatedSum outer;
        for (std::size_t i = 0; i < n; ++i) {
            const double location = (q.grid[g] - mean[i]) / scale[i];
            const auto first = std::lower_bound(sorted.begin(), sorted.end(), location - reach);
            const auto last = std::upper_bound(first, sorted.end(), location + reach);
            if (first == last) continue;
            CompensatedSum inner;
            for (auto it = first; it != last; ++it) {
                inner.add(kernel_eval(q.kernel, (location - *it) / b));
            }
            outer.add(inner.value() / scale[i]);
        }
        const double nd = static_cast<double>(n);
        values[g] = outer.value() / (nd * nd * b);
    }
    return values;
}

DensityEstimate residual_density(const FilterOutput& f, const DensityQuery& q) {
    auto e = make_estimate(q, double_sum_naive(f.mbar, f.sbar, f.resid, q),
                           EstimatorTag::ResidualFeasible, f.resid.size());
    flag_singular_points(f, e);
    return e;
}

DensityEstimate residual_density_fast(const FilterOutput& f, const DensityQuery& q) {
    auto e = make_estimate(q, double_sum_windowed(f.mbar, f.sbar, f.resid, q),
                           EstimatorTag::ResidualFeasible, f.resid.size());
    flag_singular_points(f, e);
    return e;
}

DensityEstimate oracle_density(const SeriesSample& s, const DensityQuery& q) {
    if (s.true_mean.size() != s.x.size() || s.true_vol.size() != s.x.size() ||
        s.true_innov.size() != s.x.size()) {
        throw InvalidParameter("oracle estimator needs the true mean, volatility and innovations");
    }
    return make_estimate(q, double_sum_windowed(s.true_mean, s.true_vol, s.true_innov, q),
                         EstimatorTag::ResidualUnfeasible, s.x.size());
}

IntegrationResult integrate_estimate(const DensityEstimate& e) {
    IntegrationResult out;
    if (e.grid.size() != e.values.size() || e.grid.size() < 2) {
        out.coverage_ok = false;
        out.warning = "integration needs at least two grid points with values";
        return out;
    }
    CompensatedSum acc;
    double max_step = 0.0;
    double peak = 0.0;
    for (std::size_t i = 1; i < e.grid.size(); ++i) {
        const double h = e.grid[i] - e.grid[i - 1];
        max_step = std::max(max_step, h);
        acc.add(0.5 * h * (e.values[i] + e.values[i - 1]));
    }
    for (double v : e.values) peak = std::max(peak, v);
    out.value = acc.value();

    std::ostringstream warn;
    if (max_step > e.bandwidth / 5.0) {
        warn << "grid spacing " << max_step << " exceeds bandwidth/5 = " << e.bandwidth / 5.0 << "; ";
    }
    if (peak == 0.0) {
        warn << "estimate vanishes on the whole grid (grid outside the support); ";
    } else {
        const double edge = std::max(e.values.front(), e.values.back());
        if (edge > 1e-12 * peak) warn << "estimate is still positive at the grid ends; ";
    }
    out.warning = warn.str();
    out.coverage_ok = out.warning.empty();
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points == 0) throw InvalidParameter("grid needs at least one point");
    if (points == 1) return {lo};
    if (!(hi > lo)) throw InvalidParameter("grid upper end must exceed the lower end");
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
    grid.back() = hi;
    return grid;
}

std::vector<double> support_grid(std::span<const double> x, double bandwidth, std::size_t points) {
    if (x.empty()) throw InsufficientData("support grid needs data");
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    return linear_grid(*mn - 1.01 * bandwidth, *mx + 1.01 * bandwidth, points);
}

std::vector<double> support_grid(const FilterOutput& f, double bandwidth, std::size_t points) {
    if (f.resid.empty()) throw InsufficientData("support grid needs data");
    const auto [emin, emax] = std::minmax_element(f.resid.begin(), f.resid.end());
    // v = mbar_i + sbar_i (resid_j + u b) with |u| <= 1 spans the support.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < f.mbar.size(); ++i) {
        lo = std::min(lo, f.mbar[i] + f.sbar[i] * (*emin - 1.01 * bandwidth));
        hi = std::max(hi, f.mbar[i] + f.sbar[i] * (*emax + 1.01 * bandwidth));
    }
    return linear_grid(lo, hi, points);
}

}  // namespace mdens
