#include "mdens_cli/cli.hpp"

#include "mdens/csv_io.hpp"
#include "mdens/density.hpp"
#include "mdens/error.hpp"
#include "mdens/fit.hpp"
#include "mdens/kernel.hpp"
#include "mdens/models.hpp"
#include "mdens/montecarlo.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace mdens::cli {
namespace {

struct SeedOption {
    std::uint64_t value = 0;
    CLI::Option* opt = nullptr;

    void add(CLI::App* app) {
        opt = app->add_option("--seed", value, "RNG seed (random and printed when omitted)");
    }

    std::uint64_t resolve(std::ostream& err) {
        if (opt->count() == 0) {
            std::random_device rd;
            value = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        }
        err << "seed: " << value << '\n';
        return value;
    }
};

struct ModelOptions {
    std::string model;
    int ar_order = 1;
    int ma_order = 0;
    int garch_order = 1;
    int arch_order = 1;
    std::string innov = "gaussian";

    void add(CLI::App* app) {
        app->add_option("--model", model, "arma | garch | arma-garch | const");
        app->add_option("--ar-order", ar_order, "AR order p")->capture_default_str();
        app->add_option("--ma-order", ma_order, "MA order q")->capture_default_str();
        app->add_option("--garch-order", garch_order, "number of lagged variances P")
            ->capture_default_str();
        app->add_option("--arch-order", arch_order, "number of lagged squared shocks Q")
            ->capture_default_str();
        app->add_option("--innov", innov, "innovation law recorded with the fit")
            ->capture_default_str();
    }

    [[nodiscard]] ModelSpec spec() const {
        const auto law = parse_innovation(innov);
        if (model == "arma") return ModelSpec::arma(ar_order, ma_order, law);
        if (model == "garch") return ModelSpec::garch(garch_order, arch_order, law);
        if (model == "arma-garch") {
            return ModelSpec::arma_garch(ar_order, ma_order, garch_order, arch_order, law);
        }
        if (model == "const") return ModelSpec::garch(0, 0, law);
        throw InvalidSpec("unknown model '" + model + "' (expected arma, garch, arma-garch, const)");
    }

    [[nodiscard]] std::string canonical(const ModelSpec& s) const {
        std::ostringstream o;
        o << "model=" << (model.empty() ? to_string(s.family) : model) << " p=" << s.ar_order
          << " q=" << s.ma_order << " P=" << s.garch_order << " Q=" << s.arch_order
          << " innov=" << to_string(s.innovation);
        return o.str();
    }
};

struct BandwidthOptions {
    std::string rule = "silverman";
    std::string kappa = "2/7";
    double fixed_constant = 1.0;
    std::string kernel = "quadratic";

    void add(CLI::App* app) {
        app->add_option("--rule", rule, "silverman | lscv | fixed")->capture_default_str();
        app->add_option("--kappa", kappa, "residual-estimator rate exponent, e.g. 2/7")
            ->capture_default_str();
        app->add_option("--fixed-constant", fixed_constant, "C in b = C n^(-1/5) for --rule fixed")
            ->capture_default_str();
        app->add_option("--kernel", kernel, "quadratic | biweight")->capture_default_str();
    }

    [[nodiscard]] BandwidthRule bandwidth_rule() const {
        BandwidthRule r;
        r.selector = parse_selector(rule);
        r.kappa = parse_real(kappa);
        r.fixed_constant = fixed_constant;
        r.validate();
        return r;
    }

    [[nodiscard]] KernelSpec kernel_spec() const { return parse_kernel(kernel); }

    [[nodiscard]] std::string canonical() const {
        const auto r = bandwidth_rule();
        std::ostringstream o;
        o << "rule=" << to_string(r.selector) << " kappa=" << format_double(r.kappa);
        if (r.selector == BandwidthSelector::FixedRate) {
            o << " fixed_constant=" << format_double(r.fixed_constant);
        }
        o << " kernel=" << to_string(kernel_spec());
        return o.str();
    }
};

std::string join(std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

// Writes through `writer` to the named file, or to `out` when the name is empty.
template <class Writer>
void emit(const std::string& path, std::ostream& out, Writer&& writer) {
    if (path.empty()) {
        writer(out);
        return;
    }
    std::ostringstream buffer;
    writer(buffer);
    write_text_file(path, buffer.str());
}

// ---- simulate ----

struct SimulateCommand {
    std::string setup;
    std::vector<double> ar, ma, garch, alpha, beta;
    double eta = 0.0;
    std::string innov = "gaussian";
    std::size_t n = 0;
    std::size_t burn_in = 1000;
    bool keep_truth = false;
    std::string out_path;
    SeedOption seed;

    void add(CLI::App* app) {
        app->add_option("--setup", setup, "ar_t5 | garch_t5 | ar_garch_gauss");
        app->add_option("--ar", ar, "AR coefficients a_1..a_p")->delimiter(',');
        app->add_option("--ma", ma, "MA coefficients b_1..b_q")->delimiter(',');
        app->add_option("--garch", garch, "GARCH(1,1) shorthand alpha_0,alpha_1,beta_1")
            ->delimiter(',');
        app->add_option("--alpha", alpha, "alpha_0..alpha_Q (for ARMA: the innovation scale alpha_0)")
            ->delimiter(',');
        app->add_option("--beta", beta, "beta_1..beta_P")->delimiter(',');
        app->add_option("--eta", eta, "location")->capture_default_str();
        app->add_option("--innov", innov, "gaussian | t<dof> | std_t<dof>")->capture_default_str();
        app->add_option("--n", n, "series length (default: 100/200 for setups, else 500)");
        app->add_option("--burn-in", burn_in, "discarded warm-up length")->capture_default_str();
        app->add_flag("--keep-truth", keep_truth, "add the true m, sigma, eps columns");
        app->add_option("--out", out_path, "output CSV (default: standard output)");
        seed.add(app);
    }

    int run(std::ostream& out, std::ostream& err) {
        ModelSpec spec;
        ThetaVector theta;
        std::size_t length = n;
        if (!setup.empty()) {
            if (!ar.empty() || !ma.empty() || !garch.empty() || !alpha.empty() || !beta.empty()) {
                throw InvalidSpec("--setup cannot be combined with explicit coefficients");
            }
            const auto id = parse_setup(setup);
            const auto m = setup_model(id);
            spec = m.spec;
            theta = m.theta;
            if (length == 0) length = default_sample_size(id);
        } else {
            const auto law = parse_innovation(innov);
            theta.eta = eta;
            theta.ar = ar;
            theta.ma = ma;
            if (!garch.empty()) {
                if (garch.size() != 3) {
                    throw InvalidSpec("--garch takes exactly three values alpha_0,alpha_1,beta_1");
                }
                if (!alpha.empty() || !beta.empty()) {
                    throw InvalidSpec("--garch cannot be combined with --alpha/--beta");
                }
                alpha = {garch[0], garch[1]};
                beta = {garch[2]};
            }
            const int p = static_cast<int>(ar.size());
            const int q = static_cast<int>(ma.size());
            const bool hetero = !beta.empty() || alpha.size() > 1;
            if (hetero) {
                const int P = static_cast<int>(beta.size());
                const int Q = static_cast<int>(alpha.size()) - 1;
                spec = (p || q) ? ModelSpec::arma_garch(p, q, P, Q, law) : ModelSpec::garch(P, Q, law);
                theta.alpha = alpha;
                theta.beta = beta;
            } else {
                spec = ModelSpec::arma(p, q, law);
                theta.alpha = alpha.empty() ? std::vector<double>{1.0} : alpha;
            }
            if (length == 0) length = 500;
        }
        spec.validate();
        validate_theta(spec, theta);
        if (length == 0) throw InvalidParameter("--n must be positive");

        const auto s = seed.resolve(err);
        RngStream stream(s, 0);
        const auto sample = simulate(spec, theta, length, burn_in, stream);

        std::ostringstream canon;
        canon << "command=simulate family=" << to_string(spec.family) << " eta=" << format_double(theta.eta)
              << " ar=" << join(theta.ar) << " ma=" << join(theta.ma) << " alpha=" << join(theta.alpha)
              << " beta=" << join(theta.beta) << " innov=" << to_string(spec.innovation)
              << " n=" << length << " burn_in=" << burn_in << " seed=" << s;
        const auto header = header_comment(canon.str());
        emit(out_path, out, [&](std::ostream& o) { write_series_csv(o, sample, keep_truth, header); });
        return kExitOk;
    }
};

// ---- fit ----

std::vector<std::pair<std::string, double>> named_parameters(const ThetaEstimate& est) {
    std::vector<std::pair<std::string, double>> p;
    p.emplace_back("eta", est.theta.eta);
    for (std::size_t j = 0; j < est.theta.ar.size(); ++j) p.emplace_back("a" + std::to_string(j + 1), est.theta.ar[j]);
    for (std::size_t j = 0; j < est.theta.ma.size(); ++j) p.emplace_back("b" + std::to_string(j + 1), est.theta.ma[j]);
    if (est.spec.family == ModelFamily::Arma) {
        p.emplace_back("innovation_variance", est.innovation_variance);
    } else {
        for (std::size_t j = 0; j < est.theta.alpha.size(); ++j) {
            p.emplace_back("alpha" + std::to_string(j), est.theta.alpha[j]);
        }
        for (std::size_t j = 0; j < est.theta.beta.size(); ++j) {
            p.emplace_back("beta" + std::to_string(j + 1), est.theta.beta[j]);
        }
    }
    return p;
}

struct FitCommand {
    std::string input;
    std::string out_path;
    ModelOptions model;

    void add(CLI::App* app) {
        app->add_option("--input", input, "series CSV with an x column")->required();
        app->add_option("--out", out_path, "parameter CSV");
        model.add(app);
        model.model = "arma";
    }

    int run(std::ostream& out, std::ostream&) {
        const auto spec = model.spec();
        const auto table = read_series_csv(std::filesystem::path(input));
        const auto est = fit_model(spec, table.x);
        const auto params = named_parameters(est);

        std::ostringstream canon;
        canon << "command=fit " << model.canonical(spec) << " n=" << table.x.size()
              << " input_hash=" << std::hex << fnv1a64(join(table.x));
        out << "model: " << model.model << " (n = " << table.x.size() << ")\n";
        for (const auto& [name, value] : params) {
            out << "  " << std::left << std::setw(20) << name << format_double(value) << '\n';
        }
        out << "objective: " << format_double(est.objective_value) << '\n';
        out << "iterations: " << est.iterations << '\n';
        out << "converged=" << (est.converged ? "true" : "false") << '\n';
        if (!out_path.empty()) {
            std::ostringstream csv;
            csv << "# " << header_comment(canon.str()) << '\n' << "parameter,value\n";
            for (const auto& [name, value] : params) csv << name << ',' << format_double(value) << '\n';
            csv << "objective," << format_double(est.objective_value) << '\n';
            csv << "iterations," << est.iterations << '\n';
            csv << "converged," << (est.converged ? 1 : 0) << '\n';
            write_text_file(out_path, csv.str());
        }
        return kExitOk;
    }
};

// ---- density ----

struct DensityCommand {
    std::string setup;
    std::string input;
    std::size_t n = 0;
    std::string grid = "0:5:10";
    std::string estimator = "residual";
    std::string out_path;
    ModelOptions model;
    BandwidthOptions bandwidth;
    SeedOption seed;

    void add(CLI::App* app) {
        auto* src = app->add_option("--setup", setup, "simulate the input from a design");
        app->add_option("--input", input, "series CSV (x, optionally m, sigma, eps)")->excludes(src);
        app->add_option("--n", n, "series length for --setup");
        app->add_option("--grid", grid, "lo:hi:points or a comma list")->capture_default_str();
        app->add_option("--estimator", estimator, "pr | residual | oracle")->capture_default_str();
        app->add_option("--out", out_path, "output CSV (default: standard output)");
        model.add(app);
        bandwidth.add(app);
        seed.add(app);
    }

    int run(std::ostream& out, std::ostream& err) {
        if (setup.empty() && input.empty()) throw InvalidParameter("density needs --setup or --input");
        if (estimator != "pr" && estimator != "residual" && estimator != "oracle") {
            throw InvalidParameter("unknown estimator '" + estimator + "' (expected pr, residual, oracle)");
        }
        const auto points = parse_grid(grid);
        const auto rule = bandwidth.bandwidth_rule();
        const auto kernel = bandwidth.kernel_spec();

        SeriesSample sample;
        bool have_truth = false;
        ModelSpec spec;
        std::ostringstream canon;
        canon << "command=density estimator=" << estimator << ' ' << bandwidth.canonical()
              << " grid=" << join(points);
        if (!setup.empty()) {
            const auto id = parse_setup(setup);
            const auto m = setup_model(id);
            const auto s = seed.resolve(err);
            const std::size_t length = n ? n : default_sample_size(id);
            RngStream stream(s, 0);
            sample = simulate(m.spec, m.theta, length, 1000, stream);
            have_truth = true;
            spec = model.model.empty() ? m.spec : model.spec();
            canon << " setup=" << setup << " n=" << length << " seed=" << s;
        } else {
            const auto table = read_series_csv(std::filesystem::path(input));
            have_truth = table.has_truth();
            if (have_truth) {
                sample = table.to_sample();
            } else {
                sample.x = table.x;
            }
            if (model.model.empty()) model.model = "arma";
            spec = model.spec();
            canon << " n=" << table.x.size() << " input_hash=" << std::hex << fnv1a64(join(table.x))
                  << std::dec;
        }
        if (estimator != "pr") canon << ' ' << model.canonical(spec);

        const auto choice = select_bandwidth(sample.x, kernel, rule);
        DensityEstimate est;
        if (estimator == "pr") {
            est = parzen_rosenblatt(sample.x, {points, kernel, choice.base});
        } else if (estimator == "oracle") {
            if (!have_truth) {
                throw InvalidParameter(
                    "the oracle estimator needs true m, sigma, eps columns (simulate with --keep-truth)");
            }
            est = oracle_density(sample, {points, kernel, choice.adjusted});
        } else {
            const auto fit = fit_model(spec, sample.x);
            if (!fit.converged) err << "warning: model fit did not converge\n";
            const auto filtered = filter(fit.spec, fit.theta, sample.x);
            est = residual_density_fast(filtered, {points, kernel, choice.adjusted});
        }
        const auto header = header_comment(canon.str());
        emit(out_path, out, [&](std::ostream& o) { write_estimate_csv(o, est, header); });
        return kExitOk;
    }
};

// ---- mc ----

struct McCommand {
    std::string setup = "ar_t5";
    std::size_t n = 0;
    std::size_t reps = 1000;
    std::string grid = "0:5:10";
    std::size_t truth_samples = 500000;
    unsigned threads = 1;
    std::string out_path;
    std::string plot_path;
    BandwidthOptions bandwidth;
    SeedOption seed;

    void add(CLI::App* app) {
        app->add_option("--setup", setup, "ar_t5 | garch_t5 | ar_garch_gauss")->capture_default_str();
        app->add_option("--n", n, "sample size (default: 100 for ar_t5, 200 otherwise)");
        app->add_option("--reps", reps, "replications")->capture_default_str();
        app->add_option("--grid", grid, "lo:hi:points or a comma list")->capture_default_str();
        app->add_option("--truth-samples", truth_samples, "path length for the true density")
            ->capture_default_str();
        threads = default_threads();
        app->add_option("--threads", threads, "worker threads (env MDENS_THREADS)")->capture_default_str();
        app->add_option("--out", out_path, "report CSV");
        app->add_option("--plot-data", plot_path, "plot-data file (v, normalized RMSE per estimator)");
        bandwidth.add(app);
        seed.add(app);
    }

    int run(std::ostream& out, std::ostream& err) {
        McConfig cfg;
        cfg.setup = parse_setup(setup);
        cfg.n = n ? n : default_sample_size(cfg.setup);
        cfg.reps = reps;
        cfg.rule = bandwidth.bandwidth_rule();
        cfg.kernel = bandwidth.kernel_spec();
        cfg.grid = parse_grid(grid);
        cfg.truth_samples = truth_samples;
        cfg.threads = threads;
        cfg.validate();
        cfg.seed = seed.resolve(err);

        const auto report = run_setup(cfg);

        std::ostringstream canon;
        canon << "command=mc setup=" << to_string(cfg.setup) << " n=" << cfg.n << " reps=" << cfg.reps
              << ' ' << bandwidth.canonical() << " grid=" << join(cfg.grid)
              << " truth_samples=" << cfg.truth_samples << " seed=" << cfg.seed;
        const auto header = header_comment(canon.str());

        out << "setup " << to_string(cfg.setup) << ", n = " << cfg.n << ", reps = " << cfg.reps
            << " (" << report.included << " included, " << report.excluded << " excluded), rule "
            << to_string(cfg.rule.selector) << ", kappa = " << format_double(cfg.rule.kappa) << '\n';
        out << std::setw(8) << "v" << std::setw(12) << "f_true" << std::setw(12) << "nrmse_pr"
            << std::setw(12) << "nrmse_res" << "  better\n";
        std::size_t wins = 0;
        for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
            const bool res_better = report.rmse_res[g] < report.rmse_pr[g];
            wins += res_better ? 1 : 0;
            char line[128];
            std::snprintf(line, sizeof line, "%8.4f%12.6f%12.6f%12.6f  %s\n", cfg.grid[g], report.truth[g],
                          report.rmse_pr[g], report.rmse_res[g], res_better ? "residual" : "parzen");
            out << line;
        }
        out << "residual estimator better at " << wins << " of " << cfg.grid.size() << " points\n";
        for (const auto& note : report.notes) out << "note: " << note << '\n';

        if (!out_path.empty()) {
            std::ostringstream csv;
            write_report_csv(csv, report, header);
            write_text_file(out_path, csv.str());
        }
        if (!plot_path.empty()) {
            std::ostringstream dat;
            write_plot_data(dat, report, header);
            write_text_file(plot_path, dat.str());
        }
        return kExitOk;
    }
};

// ---- rate ----

struct RateCommand {
    std::string setup = "ar_t5";
    double v = 2.0;
    std::vector<std::size_t> n_list{250, 500, 1000, 2000};
    std::size_t reps = 500;
    std::size_t truth_samples = 500000;
    unsigned threads = 1;
    std::string out_path;
    BandwidthOptions bandwidth;
    SeedOption seed;

    void add(CLI::App* app) {
        app->add_option("--setup", setup, "ar_t5 | garch_t5 | ar_garch_gauss")->capture_default_str();
        app->add_option("--v", v, "evaluation point")->capture_default_str();
        app->add_option("--n-list", n_list, "sample sizes")->delimiter(',')->capture_default_str();
        app->add_option("--reps", reps, "replications per sample size")->capture_default_str();
        app->add_option("--truth-samples", truth_samples, "path length for the true density")
            ->capture_default_str();
        threads = default_threads();
        app->add_option("--threads", threads, "worker threads (env MDENS_THREADS)")->capture_default_str();
        app->add_option("--out", out_path, "rate CSV");
        bandwidth.add(app);
        seed.add(app);
    }

    int run(std::ostream& out, std::ostream& err) {
        RateConfig cfg;
        cfg.setup = parse_setup(setup);
        cfg.v = v;
        cfg.n_list = n_list;
        cfg.reps = reps;
        cfg.rule = bandwidth.bandwidth_rule();
        cfg.kernel = bandwidth.kernel_spec();
        cfg.truth_samples = truth_samples;
        cfg.threads = threads;
        cfg.seed = seed.resolve(err);

        const auto report = rate_regression(cfg);
        for (const auto& note : report.notes) err << "warning: " << note << '\n';

        std::ostringstream canon;
        canon << "command=rate setup=" << to_string(cfg.setup) << " v=" << format_double(cfg.v) << " n_list=";
        for (std::size_t k = 0; k < report.n_values.size(); ++k) {
            canon << (k ? "," : "") << report.n_values[k];
        }
        canon << " reps=" << cfg.reps << ' ' << bandwidth.canonical() << " truth_samples=" << cfg.truth_samples
              << " seed=" << cfg.seed;

        out << "setup " << to_string(cfg.setup) << ", v = " << format_double(cfg.v)
            << ", f_true = " << format_double(report.truth) << '\n';
        out << std::setw(8) << "n" << std::setw(14) << "rmse_pr" << std::setw(14) << "rmse_res"
            << std::setw(10) << "excluded\n";
        for (std::size_t k = 0; k < report.n_values.size(); ++k) {
            char line[128];
            std::snprintf(line, sizeof line, "%8zu%14.6g%14.6g%9zu\n", report.n_values[k], report.rmse_pr[k],
                          report.rmse_res[k], report.excluded[k]);
            out << line;
        }
        out << "slope_pr  = " << format_double(report.fit_pr.slope) << " (se "
            << format_double(report.fit_pr.slope_se) << ")\n";
        out << "slope_res = " << format_double(report.fit_res.slope) << " (se "
            << format_double(report.fit_res.slope_se) << ")\n";
        if (!out_path.empty()) {
            std::ostringstream csv;
            write_rate_csv(csv, report, header_comment(canon.str()));
            write_text_file(out_path, csv.str());
        }
        return kExitOk;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Marginal density estimation for location-scale time series", "mdens"};
    app.set_version_flag("--version", version());
    app.set_config("--config", "", "TOML-style file with one [section] per command; flags override it");
    app.allow_config_extras(false);
    app.require_subcommand(1);

    SimulateCommand simulate_cmd;
    FitCommand fit_cmd;
    DensityCommand density_cmd;
    McCommand mc_cmd;
    RateCommand rate_cmd;
    auto* simulate_app = app.add_subcommand("simulate", "simulate a series to CSV");
    auto* fit_app = app.add_subcommand("fit", "fit a model to a series");
    auto* density_app = app.add_subcommand("density", "estimate the marginal density on a grid");
    auto* mc_app = app.add_subcommand("mc", "Monte Carlo comparison of the two estimators");
    auto* rate_app = app.add_subcommand("rate", "log-log RMSE slope across sample sizes");
    simulate_cmd.add(simulate_app);
    fit_cmd.add(fit_app);
    density_cmd.add(density_app);
    mc_cmd.add(mc_app);
    rate_cmd.add(rate_app);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (simulate_app->parsed()) return simulate_cmd.run(out, err);
        if (fit_app->parsed()) return fit_cmd.run(out, err);
        if (density_app->parsed()) return density_cmd.run(out, err);
        if (mc_app->parsed()) return mc_cmd.run(out, err);
        if (rate_app->parsed()) return rate_cmd.run(out, err);
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace mdens::cli
