#include "mdens/csv_io.hpp"
#include "mdens_cli/cli.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace fs = std::filesystem;
using namespace mdens;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name) {
    fs::path dir = MDENS_TEST_TMP;
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        if (!l.empty() && l[0] != '#') out.push_back(l);
    }
    return out;
}

std::string column(const std::string& line, std::size_t k) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string s; std::getline(ss, s, ',');) f.push_back(s);
    return f.at(k);
}

}  // namespace

TEST(CliHelpers, ParseReal) {
    EXPECT_DOUBLE_EQ(cli::parse_real("2/7"), 2.0 / 7.0);
    EXPECT_EQ(cli::parse_real("0.25"), 0.25);
    EXPECT_THROW(cli::parse_real("2/0"), std::invalid_argument);
    EXPECT_THROW(cli::parse_real("abc"), std::invalid_argument);
}

TEST(CliHelpers, ParseGrid) {
    const auto g = cli::parse_grid("0:5:10");
    ASSERT_EQ(g.size(), 10u);
    EXPECT_EQ(g.back(), 5.0);
    EXPECT_EQ(cli::parse_grid("1,2.5,4"), (std::vector<double>{1, 2.5, 4}));
    EXPECT_THROW(cli::parse_grid("0:5"), std::invalid_argument);
    EXPECT_THROW(cli::parse_grid("0:5:2.5"), std::invalid_argument);
}

TEST(CliHelpers, HashAndHeader) {
    EXPECT_EQ(cli::fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(cli::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    const auto h = cli::header_comment("k=v");
    EXPECT_EQ(h.rfind("mdens " + cli::version() + " config=", 0), 0u);
    EXPECT_NE(h.find("k=v"), std::string::npos);
}

TEST(CliHelpers, ThreadsFromEnvironment) {
    ::setenv("MDENS_THREADS", "3", 1);
    EXPECT_EQ(cli::default_threads(), 3u);
    ::setenv("MDENS_THREADS", "zero", 1);
    EXPECT_GE(cli::default_threads(), 1u);
    ::unsetenv("MDENS_THREADS");
    EXPECT_GE(cli::default_threads(), 1u);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"simulate", "--no-such-flag"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
    const auto v = run({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find(cli::version()), std::string::npos);
}

TEST(CliSimulate, SetupRowCountAndSeedEcho) {
    const auto r = run({"simulate", "--setup", "ar_t5", "--n", "100", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = data_lines(r.out);
    ASSERT_EQ(rows.size(), 101u);
    EXPECT_EQ(rows[0], "x");
    EXPECT_NE(r.err.find("seed: 7"), std::string::npos);
    EXPECT_EQ(r.out.rfind("# mdens ", 0), 0u);
    EXPECT_EQ(run({"simulate", "--setup", "ar_t5", "--n", "100", "--seed", "7"}).out, r.out);
}

TEST(CliSimulate, GarchSchema) {
    auto r = run({"simulate", "--garch", "0.1,0.1,0.8", "--innov", "std_t5", "--n", "200", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(data_lines(r.out)[0], "x");
    r = run({"simulate", "--garch", "0.1,0.1,0.8", "--innov", "std_t5", "--n", "200", "--seed", "1", "--keep-truth"});
    ASSERT_EQ(r.code, 0);
    const auto rows = data_lines(r.out);
    EXPECT_EQ(rows[0], "x,m,sigma,eps");
    EXPECT_EQ(rows.size(), 201u);
}

TEST(CliSimulate, RandomSeedIsPrinted) {
    const auto r = run({"simulate", "--ar", "0.3", "--n", "5"});
    ASSERT_EQ(r.code, 0);
    const auto pos = r.err.find("seed: ");
    ASSERT_NE(pos, std::string::npos);
    const std::string seed = r.err.substr(pos + 6, r.err.find('\n', pos) - pos - 6);
    const auto again = run({"simulate", "--ar", "0.3", "--n", "5", "--seed", seed});
    EXPECT_EQ(data_lines(again.out), data_lines(r.out));
}

TEST(CliSimulate, InvalidBetaSum) {
    const auto r = run({"simulate", "--garch", "0.1,0.1,1.0", "--n", "50"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("beta"), std::string::npos);
    EXPECT_EQ(run({"simulate", "--alpha", "0.1,0.1", "--beta", "0.6,0.5"}).code, 2);
    EXPECT_EQ(run({"simulate", "--garch", "0.1,0.1"}).code, 2);
    EXPECT_EQ(run({"simulate", "--setup", "garch_t5", "--ar", "0.5"}).code, 2);
}

TEST(CliSimulate, OutputFileAndIoError) {
    const auto path = tmp("sim.csv");
    ASSERT_EQ(run({"simulate", "--setup", "garch_t5", "--seed", "3", "--out", path.string()}).code, 0);
    EXPECT_EQ(data_lines(slurp(path)).size(), 201u);
    EXPECT_EQ(run({"simulate", "--setup", "garch_t5", "--out", "/nonexistent/dir/x.csv"}).code, 3);
}

TEST(CliFit, GarchOnSetupData) {
    const auto path = tmp("garch.csv");
    ASSERT_EQ(run({"simulate", "--setup", "garch_t5", "--n", "2000", "--seed", "11", "--out", path.string()}).code, 0);
    const auto csv = tmp("garch_fit.csv");
    const auto r = run({"fit", "--input", path.string(), "--model", "garch", "--out", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("converged="), std::string::npos);
    std::map<std::string, double> p;
    for (const auto& l : data_lines(slurp(csv))) {
        if (l == "parameter,value") continue;
        p[column(l, 0)] = std::stod(column(l, 1));
    }
    for (const char* name : {"alpha0", "alpha1", "beta1"}) {
        ASSERT_TRUE(p.count(name)) << name;
        EXPECT_GT(p[name], 0.0);
        EXPECT_LT(p[name], 1.0);
    }
}

TEST(CliFit, TooShort) {
    const auto path = tmp("short.csv");
    std::ofstream(path) << "x\n1\n2\n3\n4\n5\n";
    const auto r = run({"fit", "--input", path.string(), "--model", "arma"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("observations"), std::string::npos) << r.err;
}

TEST(CliFit, ConstantModel) {
    const auto path = tmp("const.csv");
    ASSERT_EQ(run({"simulate", "--alpha", "2.0", "--eta", "1.0", "--n", "300", "--seed", "5", "--out", path.string()}).code, 0);
    const auto csv = tmp("const_fit.csv");
    ASSERT_EQ(run({"fit", "--input", path.string(), "--model", "const", "--out", csv.string()}).code, 0);
    const auto x = read_series_csv(path).x;
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / 300.0;
    double v = 0;
    for (double e : x) v += (e - m) * (e - m);
    v /= 300.0;
    const auto rows = data_lines(slurp(csv));
    EXPECT_EQ(rows[1], "eta," + format_double(m));
    EXPECT_NEAR(std::stod(column(rows[2], 1)), v, 1e-12);
    EXPECT_EQ(column(rows[2], 0), "alpha0");
}

TEST(CliFit, MissingInputAndUnknownModel) {
    EXPECT_EQ(run({"fit", "--input", "/nonexistent.csv"}).code, 3);
    const auto path = tmp("short.csv");
    EXPECT_EQ(run({"fit", "--input", path.string(), "--model", "egarch"}).code, 2);
    EXPECT_EQ(run({"fit"}).code, 2);
}

TEST(CliDensity, SetupPipeline) {
    const auto r = run({"density", "--setup", "ar_t5", "--n", "100", "--grid", "0:5:10", "--rule", "silverman",
                        "--kappa", "2/7", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = data_lines(r.out);
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows[0], "v,value,estimator_tag,bandwidth,n");
    EXPECT_EQ(column(rows[1], 2), "residual_feasible");
    EXPECT_EQ(column(rows[1], 4), "100");
}

TEST(CliDensity, EstimatorsShareSchema) {
    const std::vector<std::string> base{"density", "--setup", "garch_t5", "--seed", "2", "--estimator"};
    auto args = base;
    args.push_back("pr");
    const auto pr = data_lines(run(args).out);
    args.back() = "residual";
    const auto res = data_lines(run(args).out);
    args.back() = "oracle";
    const auto orc = data_lines(run(args).out);
    ASSERT_EQ(pr.size(), res.size());
    ASSERT_EQ(pr.size(), orc.size());
    EXPECT_EQ(pr[0], res[0]);
    int differing = 0;
    for (std::size_t i = 1; i < pr.size(); ++i) {
        EXPECT_EQ(column(pr[i], 0), column(res[i], 0));
        EXPECT_EQ(column(pr[i], 4), column(res[i], 4));
        differing += column(pr[i], 1) != column(res[i], 1);
    }
    EXPECT_GT(differing, 0);
}

TEST(CliDensity, OracleNeedsTruth) {
    const auto plain = tmp("plain.csv");
    const auto truth = tmp("truth.csv");
    ASSERT_EQ(run({"simulate", "--setup", "ar_t5", "--seed", "4", "--out", plain.string()}).code, 0);
    ASSERT_EQ(run({"simulate", "--setup", "ar_t5", "--seed", "4", "--keep-truth", "--out", truth.string()}).code, 0);
    const auto bad = run({"density", "--input", plain.string(), "--estimator", "oracle"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("--keep-truth"), std::string::npos);
    const auto ok = run({"density", "--input", truth.string(), "--estimator", "oracle"});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_EQ(column(data_lines(ok.out)[1], 2), "residual_unfeasible");
    EXPECT_EQ(run({"density", "--input", plain.string(), "--estimator", "kde"}).code, 2);
    EXPECT_EQ(run({"density", "--input", plain.string(), "--kappa", "1/5"}).code, 2);
    EXPECT_EQ(run({"density"}).code, 2);
}

TEST(CliMc, SmokeRunAndFiles) {
    const auto csv = tmp("mc.csv");
    const auto dat = tmp("mc.dat");
    const auto start = std::chrono::steady_clock::now();
    const auto r = run({"mc", "--setup", "ar_t5", "--reps", "10", "--seed", "1", "--truth-samples", "50000", "--out",
                        csv.string(), "--plot-data", dat.string()});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(secs, 30.0);
    EXPECT_NE(r.out.find("nrmse_res"), std::string::npos);
    const auto rows = data_lines(slurp(csv));
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows[0], "setup,n,v,f_true,rmse_pr,rmse_res,bandwidth_rule,kappa,reps,excluded,seed");
    EXPECT_EQ(data_lines(slurp(dat)).size(), 10u);
}

TEST(CliMc, UnknownSetup) {
    const auto r = run({"mc", "--setup", "arch_t3"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("unknown setup"), std::string::npos);
}

TEST(CliMc, GoldenReport) {
    const auto csv = tmp("golden_run.csv");
    const auto r = run({"mc", "--setup", "ar_t5", "--reps", "20", "--truth-samples", "100000", "--seed", "20261014",
                        "--threads", "2", "--out", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto want = slurp(fs::path(MDENS_GOLDEN_DIR) / "mc_ar_t5_reps20.csv");
    ASSERT_FALSE(want.empty());
    EXPECT_EQ(slurp(csv), want);
}

TEST(CliMc, ConfigFileWithFlagOverride) {
    const auto cfg = tmp("mdens.toml");
    std::ofstream(cfg) << "[mc]\nsetup = \"garch_t5\"\nreps = 4\ntruth-samples = 20000\nseed = 9\n";
    const auto csv = tmp("cfg.csv");
    auto r = run({"--config", cfg.string(), "mc", "--reps", "3", "--out", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = data_lines(slurp(csv));
    EXPECT_EQ(column(rows[1], 0), "garch_t5");
    EXPECT_EQ(column(rows[1], 8), "3");
    EXPECT_EQ(column(rows[1], 10), "9");
    std::ofstream(cfg) << "[mc]\nrepz = 4\n";
    EXPECT_EQ(run({"--config", cfg.string(), "mc"}).code, 2);
    EXPECT_EQ(run({"--config", "/nonexistent.toml", "mc"}).code, 3);
}

TEST(CliMc, HeaderIndependentOfThreads) {
    const auto a = tmp("t1.csv");
    const auto b = tmp("t3.csv");
    for (const auto& [path, threads] : {std::pair{a, "1"}, std::pair{b, "3"}}) {
        ASSERT_EQ(run({"mc", "--reps", "4", "--truth-samples", "20000", "--seed", "5", "--threads", threads, "--out",
                       path.string()})
                      .code,
                  0);
    }
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST(CliRate, SlopesAndErrors) {
    auto r = run({"rate", "--n-list", "100,200,200,400", "--reps", "5", "--truth-samples", "20000", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("duplicate"), std::string::npos);
    EXPECT_NE(r.out.find("slope_res"), std::string::npos);
    EXPECT_NE(r.out.find("se "), std::string::npos);
    r = run({"rate", "--n-list", "250", "--reps", "5"});
    EXPECT_EQ(r.code, 2);
}
