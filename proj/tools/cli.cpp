#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "jtel/density.hpp"
#include "jtel/error.hpp"
#include "jtel/hedging.hpp"
#include "jtel/mc.hpp"
#include "jtel/pricer.hpp"
#include "jtel/quantile.hpp"

namespace jtel::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json or_null(int index) { return index < 0 ? Json(nullptr) : Json(index); }

struct PriceArgs {
    std::string config;
    double strike = 0.0;
    double maturity = 0.0;
    std::string method = "series";
    long paths = 1000000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

Json cmd_price(const PriceArgs& a) {
    const ModelConfig cfg = load_config(a.config);
    const ModelParams& p = cfg.params;
    const CallSpec spec{a.strike, a.maturity};
    spec.validate();
    Json j;
    j["method"] = a.method;
    j["price"] = nullptr;
    j["u"] = nullptr;
    j["U"] = nullptr;
    j["y"] = std::log(a.strike / p.s0);
    j["regime_case"] = nullptr;
    j["n_minus"] = nullptr;
    j["n_plus"] = nullptr;
    j["m_minus"] = nullptr;
    j["m_plus"] = nullptr;
    j["n_terms"] = nullptr;
    j["tail_bound"] = nullptr;
    j["discount"] = nullptr;
    j["lower_bound"] = nullptr;
    j["merton_n0"] = nullptr;
    j["series_price"] = nullptr;
    j["std_error"] = nullptr;
    j["n_paths"] = nullptr;
    j["seed"] = nullptr;

    if (a.method == "series") {
        const PriceBreakdown b = call_price(p, spec, cfg.controls);
        j["price"] = b.price;
        j["u"] = b.u;
        j["U"] = b.U;
        j["regime_case"] = series_case_name(b.series_case);
        j["n_minus"] = or_null(b.n_minus);
        j["n_plus"] = or_null(b.n_plus);
        j["m_minus"] = or_null(b.m_minus);
        j["m_plus"] = or_null(b.m_plus);
        j["n_terms"] = b.terms.size();
        j["tail_bound"] = b.tail_bound;
        j["discount"] = b.discount;
        j["lower_bound"] = b.lower_bound;
    } else if (a.method == "mc") {
        p.validate();
        const McEstimate e = mc_call_price(p, spec, Measure::martingale, {a.paths, a.seed, a.workers});
        j["price"] = e.mean;
        j["std_error"] = e.std_error;
        j["n_paths"] = e.n_paths;
        j["seed"] = e.seed;
    } else if (a.method == "merton") {
        // Single-regime market from the + regime of the config; the jump
        // factor 1 + h_plus is written 1 - h in the Merton form.
        const MertonResult m = merton_price(p.c_plus, p.r_plus, -p.h_plus, p.s0, a.strike, a.maturity);
        j["price"] = m.price;
        j["u"] = m.u;
        j["U"] = m.U;
        j["merton_n0"] = m.n0;
    } else if (a.method == "symmetric") {
        const double c = 0.5 * (p.c_plus - p.c_minus);
        const double r = p.r_plus;
        const double h = p.h_minus;
        if (!close(p.lambda_plus, p.lambda_minus) || !close(p.r_plus, p.r_minus) ||
            !close(p.c_plus, r + c) || !close(p.c_minus, r - c) || !close(p.h_plus, -h)) {
            throw std::invalid_argument(
                "symmetric method needs lambda+ = lambda-, r+ = r-, c+- = r +- c and h+ = -h-");
        }
        const SymmetricCheck s = symmetric_price_check(p.lambda_plus, r, c, h, p.s0, p.sigma0, spec, cfg.controls);
        j["price"] = s.explicit_price;
        j["u"] = s.u_explicit;
        j["series_price"] = s.series_price;
        j["n_minus"] = or_null(s.n_minus);
        j["n_plus"] = or_null(s.n_plus);
    } else {
        throw CLI::ValidationError("--method", "unknown method '" + a.method + "'");
    }
    return j;
}

struct SimulateArgs {
    std::string config;
    long paths = 1;
    std::uint64_t seed = 1;
    int grid = 100;
    double horizon = 1.0;
    std::string out;
};

void write_paths(const SimulateArgs& a, std::ostream& os) {
    const ModelConfig cfg = load_config(a.config);
    const ModelParams& p = cfg.params;
    p.validate();
    if (a.paths < 1 || a.grid < 1) throw std::invalid_argument("--paths and --grid must be positive");
    if (!(a.horizon > 0.0)) throw std::invalid_argument("--horizon must be positive");
    os << "path_id,t,regime,X,J,S,B\n";
    for (long i = 0; i < a.paths; ++i) {
        const RegimePath path = sample_path(p, a.horizon, a.seed, static_cast<std::uint64_t>(i));
        for (int k = 0; k <= a.grid; ++k) {
            const double t = k == a.grid ? a.horizon : a.horizon * k / a.grid;
            os << i << ',' << fmt(t) << ',' << sign(regime_at(path, t)) << ','
               << fmt(telegraph_value(path, p.c_plus, p.c_minus, t)) << ','
               << fmt(jump_value(path, p.h_plus, p.h_minus, t)) << ',' << fmt(stock_price(path, p, t)) << ','
               << fmt(bond_price(path, p, t)) << '\n';
        }
    }
}

struct DensityArgs {
    std::string config;
    double t = 1.0;
    int points = 400;
    std::string sigma;
};

void write_density(const DensityArgs& a, std::ostream& os) {
    const ModelConfig cfg = load_config(a.config);
    Regime sigma = cfg.params.sigma0;
    if (a.sigma == "+1") {
        sigma = Regime::plus;
    } else if (a.sigma == "-1") {
        sigma = Regime::minus;
    } else if (!a.sigma.empty()) {
        throw std::invalid_argument("--sigma must be +1 or -1");
    }
    if (!(a.t > 0.0)) throw std::invalid_argument("--t must be positive");
    if (a.points < 2) throw std::invalid_argument("--points must be at least 2");
    const DensityParams dp = DensityParams::from_model(cfg.params);
    dp.validate();
    const double lo = dp.c_minus * a.t;
    const double hi = dp.c_plus * a.t;
    std::vector<double> xs(a.points);
    for (int i = 0; i < a.points; ++i) xs[i] = i == a.points - 1 ? hi : lo + (hi - lo) * i / (a.points - 1);
    const std::vector<double> ps = density_grid(xs, a.t, sigma, dp);
    os << "x,p_continuous\n";
    for (int i = 0; i < a.points; ++i) os << fmt(xs[i]) << ',' << fmt(ps[i]) << '\n';
    const DensityValue atom = p_n(dp.c(sigma) * a.t, a.t, 0, sigma, dp);
    os << "# atom " << fmt(atom.atom_x) << ' ' << fmt(atom.atom_weight) << '\n';
}

struct HedgeArgs {
    std::string config;
    double strike = 0.0;
    double maturity = 0.0;
    int paths = 1000;
    int grid = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

Json cmd_hedge(const HedgeArgs& a) {
    const ModelConfig cfg = load_config(a.config);
    const BacktestReport r =
        replication_backtest(cfg.params, {a.strike, a.maturity}, {a.paths, a.grid, a.seed, a.workers}, cfg.controls);
    Json j;
    j["price"] = r.price;
    j["mean_abs_error"] = r.mean_abs_error;
    j["max_abs_error"] = r.max_abs_error;
    j["admissible"] = r.admissible;
    j["min_capital"] = r.min_capital;
    j["max_self_financing_defect"] = r.max_self_financing_defect;
    j["max_jump_defect"] = r.max_jump_defect;
    j["max_left_continuity_gap"] = r.max_left_continuity_gap;
    j["switches"] = r.switches;
    j["n_paths"] = r.n_paths;
    j["n_steps"] = r.n_steps;
    j["seed"] = a.seed;
    return j;
}

struct QuantileArgs {
    std::string config;
    double strike = 0.0;
    double maturity = 0.0;
    double budget = std::nan("");
    double epsilon = std::nan("");
    double survival = std::nan("");
};

Json cmd_quantile(const QuantileArgs& a) {
    const ModelConfig cfg = load_config(a.config);
    const CallSpec spec{a.strike, a.maturity};
    const int modes = !std::isnan(a.budget) + !std::isnan(a.epsilon) + !std::isnan(a.survival);
    if (modes != 1) throw CLI::ValidationError("quantile", "give exactly one of --budget, --epsilon, --survival");
    const QuantileModel model = QuantileModel::build(cfg.params, spec, cfg.controls);

    Json j;
    j["mode"] = !std::isnan(a.epsilon) ? "epsilon" : (!std::isnan(a.survival) ? "survival" : "budget");
    j["regime_case"] = threshold_case_name(model.kind);
    j["perfect_price"] = model.perfect_price;

    QuantileSolution sol;
    bool perfect = false;
    if (!std::isnan(a.epsilon)) {
        sol = solve_dual(a.epsilon, model);
    } else {
        double v0 = a.budget;
        if (!std::isnan(a.survival)) {
            v0 = insurance_budget(a.survival, cfg.params, spec, cfg.controls);
            // A sure survivor is owed the full claim: the perfect hedge.
            perfect = a.survival == 1.0;
        }
        if (!perfect) sol = solve_budget_gamma(v0, model);
    }
    if (perfect) {
        j["gamma"] = 0.0;
        j["success_probability"] = 1.0;
        j["budget"] = model.perfect_price;
        j["target"] = model.perfect_price;
        j["residual"] = 0.0;
        j["n_thresholds"] = 0;
        j["n_full_slices"] = model.n_terms;
        j["atom_gap"] = false;
        return j;
    }
    int full = 0;
    for (const Threshold& th : sol.thresholds) full += th.full;
    j["gamma"] = sol.gamma;
    j["success_probability"] = sol.success_probability;
    j["budget"] = sol.budget;
    j["target"] = sol.target;
    j["residual"] = sol.residual;
    j["n_thresholds"] = sol.thresholds.size() - full;
    j["n_full_slices"] = full;
    j["atom_gap"] = sol.atom_gap;
    return j;
}

struct LimitArgs {
    double vc = 0.2;
    double va = 0.1;
    double mu = 0.05;
    double lambda0 = 2.0;
    std::vector<double> levels{1, 4, 16, 64};
    std::vector<double> z{-1.0, 0.5, 1.0};
    double t = 1.0;
};

Json cmd_limit(const LimitArgs& a, bool& diverged) {
    const LimitReport rep = limit_scaling_check({a.vc, a.va, a.mu, a.lambda0}, a.levels, a.z, a.t);
    Json levels = Json::array();
    for (const LimitLevel& l : rep.levels) {
        Json row;
        row["level"] = l.level;
        row["z"] = l.z;
        row["mgf"] = l.mgf;
        row["limit"] = l.limit;
        row["rel_error"] = l.rel_error;
        levels.push_back(row);
    }
    Json j;
    j["levels"] = levels;
    j["monotone"] = rep.monotone;
    j["diverged"] = rep.diverged;
    diverged = rep.diverged;
    return j;
}

struct McArgs {
    std::string config;
    double strike = 0.0;
    double maturity = 0.0;
    long paths = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string measure = "martingale";
};

Json cmd_mc(const McArgs& a) {
    const ModelConfig cfg = load_config(a.config);
    cfg.params.validate();
    const Measure m = measure_from_string(a.measure);
    const McEstimate e = mc_call_price(cfg.params, {a.strike, a.maturity}, m, {a.paths, a.seed, a.workers});
    Json j;
    j["measure"] = measure_name(m);
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["n_paths"] = e.n_paths;
    j["seed"] = e.seed;
    return j;
}

struct ArbArgs {
    std::string config;
    double lower = 0.0;
    double upper = 0.0;
    double maturity = 1.0;
    long paths = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

Json cmd_arb(const ArbArgs& a) {
    const ModelConfig cfg = load_config(a.config);
    const ArbitrageDemo d = arbitrage_demo(cfg.params, a.lower, a.upper, a.maturity, {a.paths, a.seed, a.workers});
    Json j;
    j["mean_profit"] = d.profit.mean;
    j["profit_std_error"] = d.profit.std_error;
    j["p_profit_positive"] = d.positive.mean;
    j["p_profit_positive_std_error"] = d.positive.std_error;
    j["p_exit_upper"] = d.upper_exit.mean;
    j["p_exit_upper_std_error"] = d.upper_exit.std_error;
    j["min_profit"] = d.min_profit;
    j["max_profit"] = d.max_profit;
    j["losing_paths"] = d.losing_paths;
    j["n_paths"] = d.profit.n_paths;
    j["seed"] = d.profit.seed;
    return j;
}

void emit(std::ostream& os, const Json& j) { os << dump_json(j) << '\n'; }

// Writes to --out when given, else to the default stream.
template <class Write>
void to_target(const std::string& path, std::ostream& fallback, Write&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    write(f);
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Jump-telegraph market model: pricing, hedging and simulation"};
    app.require_subcommand(1);

    PriceArgs price;
    auto* price_cmd = app.add_subcommand("price", "Call price");
    price_cmd->add_option("--config", price.config, "Model file")->required();
    price_cmd->add_option("--strike", price.strike)->required();
    price_cmd->add_option("--maturity", price.maturity)->required();
    price_cmd->add_option("--method", price.method, "series | mc | merton | symmetric")
        ->check(CLI::IsMember({"series", "mc", "merton", "symmetric"}));
    price_cmd->add_option("--paths", price.paths);
    price_cmd->add_option("--seed", price.seed);
    price_cmd->add_option("--workers", price.workers);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Sample paths on a time grid as CSV");
    sim_cmd->add_option("--config", sim.config)->required();
    sim_cmd->add_option("--paths", sim.paths);
    sim_cmd->add_option("--seed", sim.seed);
    sim_cmd->add_option("--grid", sim.grid);
    sim_cmd->add_option("--horizon", sim.horizon);
    sim_cmd->add_option("--out", sim.out);

    DensityArgs dens;
    auto* dens_cmd = app.add_subcommand("density", "Telegraph density on its support as CSV");
    dens_cmd->add_option("--config", dens.config)->required();
    dens_cmd->add_option("--t", dens.t);
    dens_cmd->add_option("--points", dens.points);
    dens_cmd->add_option("--sigma", dens.sigma, "+1 or -1 (default: config sigma0)");

    HedgeArgs hedge;
    auto* hedge_cmd = app.add_subcommand("hedge", "Replication backtest of a call");
    hedge_cmd->add_option("--config", hedge.config)->required();
    hedge_cmd->add_option("--strike", hedge.strike)->required();
    hedge_cmd->add_option("--maturity", hedge.maturity)->required();
    hedge_cmd->add_option("--paths", hedge.paths);
    hedge_cmd->add_option("--grid", hedge.grid);
    hedge_cmd->add_option("--seed", hedge.seed);
    hedge_cmd->add_option("--workers", hedge.workers);

    QuantileArgs quant;
    auto* quant_cmd = app.add_subcommand("quantile", "Quantile hedge of a call");
    quant_cmd->add_option("--config", quant.config)->required();
    quant_cmd->add_option("--strike", quant.strike)->required();
    quant_cmd->add_option("--maturity", quant.maturity)->required();
    quant_cmd->add_option("--budget", quant.budget);
    quant_cmd->add_option("--epsilon", quant.epsilon);
    quant_cmd->add_option("--survival", quant.survival);

    LimitArgs lim;
    auto* lim_cmd = app.add_subcommand("limit-check", "MGF distance to the geometric Brownian limit");
    lim_cmd->add_option("--vc", lim.vc);
    lim_cmd->add_option("--va", lim.va);
    lim_cmd->add_option("--mu", lim.mu);
    lim_cmd->add_option("--lambda0", lim.lambda0);
    lim_cmd->add_option("--levels", lim.levels)->delimiter(',');
    lim_cmd->add_option("--z", lim.z)->delimiter(',');
    lim_cmd->add_option("--t", lim.t);

    McArgs mc;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo call price");
    mc_cmd->add_option("--config", mc.config)->required();
    mc_cmd->add_option("--strike", mc.strike)->required();
    mc_cmd->add_option("--maturity", mc.maturity)->required();
    mc_cmd->add_option("--paths", mc.paths);
    mc_cmd->add_option("--seed", mc.seed);
    mc_cmd->add_option("--workers", mc.workers);
    mc_cmd->add_option("--measure", mc.measure, "physical | martingale | reweighted")
        ->check(CLI::IsMember({"physical", "martingale", "reweighted"}));

    ArbArgs arb;
    auto* arb_cmd = app.add_subcommand("arb-demo", "Level-crossing strategy in a market without jumps");
    arb_cmd->add_option("--config", arb.config)->required();
    arb_cmd->add_option("--lower", arb.lower)->required();
    arb_cmd->add_option("--upper", arb.upper)->required();
    arb_cmd->add_option("--maturity", arb.maturity);
    arb_cmd->add_option("--paths", arb.paths);
    arb_cmd->add_option("--seed", arb.seed);
    arb_cmd->add_option("--workers", arb.workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*price_cmd) {
            emit(out, cmd_price(price));
        } else if (*sim_cmd) {
            to_target(sim.out, out, [&](std::ostream& os) { write_paths(sim, os); });
        } else if (*dens_cmd) {
            write_density(dens, out);
        } else if (*hedge_cmd) {
            emit(out, cmd_hedge(hedge));
        } else if (*quant_cmd) {
            emit(out, cmd_quantile(quant));
        } else if (*lim_cmd) {
            bool diverged = false;
            emit(out, cmd_limit(lim, diverged));
            if (diverged) {
                err << "error: mgf series diverged at some level\n";
                return kExitNumerical;
            }
        } else if (*mc_cmd) {
            emit(out, cmd_mc(mc));
        } else if (*arb_cmd) {
            emit(out, cmd_arb(arb));
        }
    } catch (const InfeasibleBudgetError& e) {
        err << "error: " << e.what() << " (perfect-hedge price " << fmt(e.perfect_price()) << ")\n";
        return kExitInfeasible;
    } catch (const ArbitrageError& e) {
        err << "error: no martingale measure: " << e.what() << '\n';
        return kExitArbitrage;
    } catch (const NumericalError& e) {
        err << "error: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace jtel::cli
