#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "config.hpp"
#include "json.hpp"

using jtel::cli::run_cli;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "jtel-cli");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string cfg(const std::string& name) { return std::string(JTEL_CONFIG_DIR) + "/" + name; }

// Model file in the test's working directory.
std::string write_cfg(const std::string& name, const std::string& body) {
    const fs::path dir = fs::current_path() / "cli_test_configs";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream(path) << body;
    return path.string();
}

const char* kFlat =
    "c_plus = 0.3\nc_minus = -0.2\nlambda_plus = 1\nlambda_minus = 1\nh_plus = 0\nh_minus = 0\n"
    "r_plus = 0\nr_minus = 0\ns0 = 100\nsigma0 = +1\n";

int count_lines(const std::string& s, bool skip_comments) {
    std::istringstream in(s);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        if (skip_comments && !line.empty() && line[0] == '#') continue;
        ++n;
    }
    return n;
}

}  // namespace

TEST(Config, ParsesSample) {
    const auto c = jtel::cli::load_config(cfg("asymmetric.cfg"));
    EXPECT_DOUBLE_EQ(c.params.c_plus, 0.15);
    EXPECT_EQ(c.params.sigma0, jtel::Regime::plus);
}

TEST(Config, RejectsMalformed) {
    auto parse = [](const std::string& body) {
        std::istringstream in(body);
        return jtel::cli::parse_config(in);
    };
    const std::string good(kFlat);
    EXPECT_NO_THROW(parse(good));
    EXPECT_THROW(parse(good + "bogus = 1\n"), std::invalid_argument);
    EXPECT_THROW(parse(good + "s0 = 90\n"), std::invalid_argument);
    EXPECT_THROW(parse(good.substr(0, good.find("s0"))), std::invalid_argument);
    std::string bad_sigma = good;
    bad_sigma.replace(bad_sigma.find("+1"), 2, "1");
    EXPECT_THROW(parse(bad_sigma), std::invalid_argument);
    std::string bad_num = good;
    bad_num.replace(bad_num.find("0.3"), 3, "0.3x");
    EXPECT_THROW(parse(bad_num), std::invalid_argument);
}

TEST(Cli, PriceSeriesJson) {
    const CliRun r = run({"price", "--config", cfg("asymmetric.cfg"), "--strike", "100", "--maturity", "1"});
    ASSERT_EQ(r.code, jtel::cli::kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"method", "price", "u", "U", "y", "regime_case", "n_minus", "n_plus", "m_minus", "m_plus",
                            "n_terms", "tail_bound", "discount", "lower_bound", "merton_n0", "series_price",
                            "std_error", "n_paths", "seed"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["method"], "series");
    EXPECT_NEAR(j["price"].get<double>(), 9.5521, 1e-3);
    EXPECT_TRUE(j["std_error"].is_null());
}

TEST(Cli, PriceMertonAndSymmetric) {
    const CliRun m = run({"price", "--config", cfg("merton.cfg"), "--strike", "100", "--maturity", "1", "--method", "merton"});
    ASSERT_EQ(m.code, 0) << m.err;
    EXPECT_NEAR(nlohmann::json::parse(m.out)["price"].get<double>(), 9.0521, 1e-4);
    const CliRun s = run({"price", "--config", cfg("symmetric.cfg"), "--strike", "100", "--maturity", "1", "--method",
                       "symmetric"});
    ASSERT_EQ(s.code, 0) << s.err;
    const auto j = nlohmann::json::parse(s.out);
    EXPECT_NEAR(j["price"].get<double>(), j["series_price"].get<double>(), 1e-9);
    const CliRun bad = run({"price", "--config", cfg("asymmetric.cfg"), "--strike", "100", "--maturity", "1", "--method",
                         "symmetric"});
    EXPECT_EQ(bad.code, jtel::cli::kExitUsage);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, jtel::cli::kExitUsage);
    EXPECT_EQ(run({"price", "--strike", "100"}).code, jtel::cli::kExitUsage);
    EXPECT_EQ(run({"price", "--config", "/nonexistent.cfg", "--strike", "1", "--maturity", "1"}).code,
              jtel::cli::kExitUsage);
    const std::string arb = write_cfg("arb.cfg",
                                      "c_plus = 0.15\nc_minus = -0.1\nlambda_plus = 1\nlambda_minus = 1.5\n"
                                      "h_plus = 0.2\nh_minus = 0.15\nr_plus = 0.05\nr_minus = 0.04\ns0 = 100\nsigma0 = +1\n");
    EXPECT_EQ(run({"price", "--config", arb, "--strike", "100", "--maturity", "1"}).code, jtel::cli::kExitArbitrage);
    const CliRun inf = run({"quantile", "--config", cfg("quantile.cfg"), "--strike", "100", "--maturity", "1", "--budget",
                         "1000"});
    EXPECT_EQ(inf.code, jtel::cli::kExitInfeasible);
    EXPECT_NE(inf.err.find("perfect"), std::string::npos);
    const CliRun div = run({"limit-check", "--levels", "1,4", "--z", "400", "--t", "50"});
    EXPECT_EQ(div.code, jtel::cli::kExitNumerical) << div.out << div.err;
}

TEST(Cli, SimulateRowsAndDeterminism) {
    const std::vector<std::string> args = {"simulate", "--config", cfg("asymmetric.cfg"), "--paths", "3",
                                           "--grid", "10", "--seed", "4"};
    const CliRun a = run(args);
    const CliRun b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("path_id,t,regime,X,J,S,B", 0), 0u);
    EXPECT_EQ(count_lines(a.out, false), 1 + 3 * 11);
}

TEST(Cli, DensityNormalized) {
    const CliRun r = run({"density", "--config", cfg("asymmetric.cfg"), "--t", "1", "--points", "4001"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,p_continuous");
    std::vector<double> x, p;
    double atom = 0.0;
    while (std::getline(in, line)) {
        if (line.rfind("# atom", 0) == 0) {
            std::istringstream a(line.substr(6));
            double ax;
            a >> ax >> atom;
            continue;
        }
        const auto comma = line.find(',');
        x.push_back(std::stod(line.substr(0, comma)));
        p.push_back(std::stod(line.substr(comma + 1)));
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) mass += 0.5 * (p[i] + p[i - 1]) * (x[i] - x[i - 1]);
    EXPECT_NEAR(mass + atom, 1.0, 1e-5);
    EXPECT_GT(atom, 0.0);
}

TEST(Cli, QuantileModes) {
    const std::string base[] = {"quantile", "--config", cfg("quantile.cfg"), "--strike", "100", "--maturity", "1"};
    std::vector<std::string> args(std::begin(base), std::end(base));
    auto with = [&](const std::string& flag, const std::string& v) {
        auto a = args;
        a.push_back(flag);
        a.push_back(v);
        return run(a);
    };
    const CliRun b = with("--budget", "5");
    ASSERT_EQ(b.code, 0) << b.err;
    const auto j = nlohmann::json::parse(b.out);
    for (const char* key : {"mode", "regime_case", "perfect_price", "gamma", "success_probability", "budget", "target",
                            "residual", "n_thresholds", "n_full_slices", "atom_gap"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_GT(j["success_probability"].get<double>(), 0.0);
    EXPECT_EQ(with("--epsilon", "0.05").code, 0);
    const CliRun s = with("--survival", "1");
    ASSERT_EQ(s.code, 0);
    EXPECT_EQ(nlohmann::json::parse(s.out)["success_probability"].get<double>(), 1.0);
    EXPECT_EQ(run(args).code, jtel::cli::kExitUsage);
    auto two = args;
    two.insert(two.end(), {"--budget", "5", "--epsilon", "0.1"});
    EXPECT_EQ(run(two).code, jtel::cli::kExitUsage);
}

TEST(Cli, ArbDemoAndMc) {
    const std::string flat = write_cfg("flat.cfg", kFlat);
    const CliRun a = run({"arb-demo", "--config", flat, "--lower", "105", "--upper", "115", "--paths", "2000"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(nlohmann::json::parse(a.out)["min_profit"].get<double>(), 0.0);
    const CliRun m = run({"mc", "--config", cfg("asymmetric.cfg"), "--strike", "100", "--maturity", "1", "--paths",
                       "20000", "--measure", "reweighted"});
    ASSERT_EQ(m.code, 0) << m.err;
    EXPECT_GT(nlohmann::json::parse(m.out)["std_error"].get<double>(), 0.0);
    EXPECT_EQ(run({"mc", "--config", cfg("asymmetric.cfg"), "--strike", "100", "--maturity", "1", "--measure", "x"}).code,
              jtel::cli::kExitUsage);
}

TEST(Cli, HedgeReport) {
    const CliRun r = run({"hedge", "--config", cfg("asymmetric.cfg"), "--strike", "100", "--maturity", "1", "--paths", "5",
                       "--grid", "500"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j.contains("mean_abs_error"));
}

TEST(Cli, JsonEmitsNonFiniteAsNull) {
    nlohmann::ordered_json j;
    j["a"] = std::numeric_limits<double>::quiet_NaN();
    j["b"] = 0.1;
    const std::string out = jtel::cli::dump_json(j);
    EXPECT_NE(out.find("null"), std::string::npos);
    EXPECT_NE(out.find("0.10000000000000001"), std::string::npos);
}
