#include "mdens/montecarlo.hpp"

#include "mdens/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace mdens {
namespace {

ThetaVector garch11_theta() {
    ThetaVector theta;
    theta.alpha = {0.1, 0.1};
    theta.beta = {0.8};
    return theta;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

template <class Work>
void parallel_for(std::size_t count, unsigned threads, Work&& work) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
        });
    }
}

ReplicationRecord run_replication(const McConfig& config, const SetupModel& model,
                                  std::uint64_t stream_id) {
    ReplicationRecord rec;
    rec.stream_id = stream_id;
    try {
        RngStream stream(config.seed, stream_id);
        const auto sample = simulate(model.spec, model.theta, config.n, config.burn_in, stream);
        const auto bw = select_bandwidth(sample.x, config.kernel, config.rule);
        rec.base_bandwidth = bw.base;
        rec.adjusted_bandwidth = bw.adjusted;

        rec.pr = parzen_rosenblatt(sample.x, {config.grid, config.kernel, bw.base}).values;

        const auto est = fit_model(model.spec, sample.x, config.optimizer);
        if (!est.converged) {
            rec.failure = "fit did not converge";
            return rec;
        }
        const auto filtered = filter(est.spec, est.theta, sample.x);
        rec.res = residual_density_fast(filtered, {config.grid, config.kernel, bw.adjusted}).values;
        rec.included = true;
    } catch (const std::invalid_argument& e) {
        rec.failure = e.what();
    }
    return rec;
}

// E(alpha eps^2 + beta)^3 for Gaussian eps (E eps^4 = 3, E eps^6 = 15); the sixth moment
// of a GARCH(1,1) shock is finite iff this is below 1.
double gaussian_sixth_moment_factor(double alpha, double beta) {
    return beta * beta * beta + 3.0 * beta * beta * alpha + 9.0 * beta * alpha * alpha +
           15.0 * alpha * alpha * alpha;
}

}  // namespace

SetupModel setup_model(SetupId id) {
    switch (id) {
        case SetupId::ArT5: {
            ThetaVector theta;
            theta.ar = {0.5};
            theta.alpha = {1.0};
            return {ModelSpec::arma(1, 0, InnovationSpec::student_t(5.0)), theta};
        }
        case SetupId::GarchT5:
            return {ModelSpec::garch(1, 1, InnovationSpec::standardized_t(5.0)), garch11_theta()};
        case SetupId::ArGarchGauss: {
            ThetaVector theta = garch11_theta();
            theta.ar = {0.5};
            return {ModelSpec::arma_garch(1, 0, 1, 1, InnovationSpec::gaussian()), theta};
        }
    }
    throw InvalidSpec("unknown setup");
}

std::string to_string(SetupId id) {
    switch (id) {
        case SetupId::ArT5:
            return "ar_t5";
        case SetupId::GarchT5:
            return "garch_t5";
        case SetupId::ArGarchGauss:
            return "ar_garch_gauss";
    }
    return "unknown";
}

SetupId parse_setup(std::string_view text) {
    if (text == "ar_t5") return SetupId::ArT5;
    if (text == "garch_t5") return SetupId::GarchT5;
    if (text == "ar_garch_gauss") return SetupId::ArGarchGauss;
    throw InvalidSpec("unknown setup '" + std::string(text) +
                      "' (expected ar_t5, garch_t5, ar_garch_gauss)");
}

std::size_t default_sample_size(SetupId id) { return id == SetupId::ArT5 ? 100 : 200; }

std::vector<double> default_grid() { return linear_grid(0.0, 5.0, 10); }

std::vector<double> truth_density(const ModelSpec& spec, const ThetaVector& theta,
                                  std::span<const double> grid, std::size_t samples,
                                  RngStream& stream, std::size_t burn_in) {
    if (samples == 0) throw InvalidParameter("truth needs at least one sample");
    const auto path = simulate(spec, theta, samples, burn_in, stream);
    const InnovationDensity f_eps(spec.innovation);
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < samples; ++i) {
            const double s = path.true_vol[i];
            acc.add(f_eps((grid[g] - path.true_mean[i]) / s) / s);
        }
        out[g] = acc.value() / static_cast<double>(samples);
    }
    return out;
}

std::vector<double> truth_density(SetupId id, std::span<const double> grid, std::size_t samples,
                                  RngStream& stream) {
    const auto model = setup_model(id);
    return truth_density(model.spec, model.theta, grid, samples, stream);
}

double truth_density(SetupId id, double v, std::size_t samples, RngStream& stream) {
    const double grid[] = {v};
    return truth_density(id, grid, samples, stream).front();
}

RngStream truth_stream(SetupId id, std::uint64_t seed) {
    return RngStream(seed, kTruthStreamBase + static_cast<std::uint64_t>(id));
}

void McConfig::validate() const {
    if (reps < 2) throw InvalidParameter("Monte Carlo needs reps >= 2");
    if (n < 2) throw InvalidParameter("Monte Carlo sample size must be >= 2");
    if (reps >= kTruthStreamBase) throw InvalidParameter("too many replications");
    if (truth_samples < 1) throw InvalidParameter("truth_samples must be positive");
    rule.validate();
    optimizer.validate();
    DensityQuery{grid, kernel, 1.0}.validate();
}

McReport run_setup(const McConfig& config) {
    config.validate();
    auto stream = truth_stream(config.setup, config.seed);
    const auto model = setup_model(config.setup);
    const auto truth =
        truth_density(model.spec, model.theta, config.grid, config.truth_samples, stream,
                      config.burn_in);
    return run_setup(config, truth);
}

McReport run_setup(const McConfig& config, std::span<const double> truth) {
    config.validate();
    if (truth.size() != config.grid.size()) {
        throw InvalidParameter("truth must have one value per grid point");
    }
    const auto model = setup_model(config.setup);

    McReport report;
    report.config = config;
    report.truth.assign(truth.begin(), truth.end());
    report.replications.resize(config.reps);
    parallel_for(config.reps, config.threads, [&](std::size_t r) {
        report.replications[r] = run_replication(config, model, r);
    });

    const std::size_t g_count = config.grid.size();
    std::vector<CompensatedSum> se_pr(g_count), se_res(g_count);
    for (const auto& rec : report.replications) {
        if (!rec.included) {
            ++report.excluded;
            continue;
        }
        ++report.included;
        for (std::size_t g = 0; g < g_count; ++g) {
            const double dp = rec.pr[g] - truth[g];
            const double dr = rec.res[g] - truth[g];
            se_pr[g].add(dp * dp);
            se_res[g].add(dr * dr);
        }
    }

    report.rmse_pr.resize(g_count);
    report.rmse_res.resize(g_count);
    const double used = static_cast<double>(report.included);
    for (std::size_t g = 0; g < g_count; ++g) {
        report.rmse_pr[g] = std::sqrt(se_pr[g].value() / used) / truth[g];
        report.rmse_res[g] = std::sqrt(se_res[g].value() / used) / truth[g];
    }

    if (report.included == 0) {
        report.notes.push_back("warning: every replication was excluded");
    } else if (10 * report.excluded > config.reps) {
        std::ostringstream note;
        note << "warning: " << report.excluded << " of " << config.reps
             << " replications excluded (more than 10%)";
        report.notes.push_back(note.str());
    }
    if (config.rule.selector == BandwidthSelector::FixedRate) {
        report.notes.push_back("fixed-rate base bandwidth is also rate-adjusted for the residual estimator");
    }
    if (config.setup == SetupId::GarchT5) {
        report.notes.push_back("v = 0 equals the GARCH location, where (v - m) / sigma does not depend on sigma and the residual estimator is not expected to win");
    }
    if (config.setup == SetupId::ArGarchGauss) {
        std::ostringstream note;
        note << "sixth-moment factor E(0.1 eps^2 + 0.8)^3 = "
             << gaussian_sixth_moment_factor(0.1, 0.8) << " for the GARCH noise driven by Z";
        report.notes.push_back(note.str());
    }
    return report;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidParameter("least squares needs at least two (x, y) pairs");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidParameter("least squares needs distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - fit.intercept - fit.slope * x[i];
            rss += e * e;
        }
        fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt));
}

RateReport rate_regression(const RateConfig& config) {
    RateReport report;
    report.config = config;

    std::vector<std::size_t> sizes = config.n_list;
    std::sort(sizes.begin(), sizes.end());
    const auto dup = std::unique(sizes.begin(), sizes.end());
    if (dup != sizes.end()) {
        report.notes.push_back("duplicate sample sizes collapsed");
        sizes.erase(dup, sizes.end());
    }
    if (sizes.size() < 3) {
        throw InvalidParameter("rate regression needs at least three distinct sample sizes");
    }
    report.n_values = sizes;

    auto stream = truth_stream(config.setup, config.seed);
    const auto model = setup_model(config.setup);
    const double grid[] = {config.v};
    const auto truth = truth_density(model.spec, model.theta, grid, config.truth_samples, stream,
                                     config.burn_in);
    report.truth = truth.front();

    std::vector<double> log_n, log_pr, log_res;
    for (std::size_t n : sizes) {
        McConfig mc;
        mc.setup = config.setup;
        mc.n = n;
        mc.reps = config.reps;
        mc.rule = config.rule;
        mc.kernel = config.kernel;
        mc.seed = derived_seed(config.seed, n);
        mc.grid = {config.v};
        mc.truth_samples = config.truth_samples;
        mc.burn_in = config.burn_in;
        mc.optimizer = config.optimizer;
        mc.threads = config.threads;
        const auto mc_report = run_setup(mc, truth);

        const double rmse_pr = mc_report.rmse_pr.front() * report.truth;
        const double rmse_res = mc_report.rmse_res.front() * report.truth;
        report.rmse_pr.push_back(rmse_pr);
        report.rmse_res.push_back(rmse_res);
        report.excluded.push_back(mc_report.excluded);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_pr.push_back(std::log(rmse_pr));
        log_res.push_back(std::log(rmse_res));
    }
    report.fit_pr = least_squares(log_n, log_pr);
    report.fit_res = least_squares(log_n, log_res);
    return report;
}

}  // namespace mdens
