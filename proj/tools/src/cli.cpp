#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "ltcoin/coin_sim.hpp"
#include "ltcoin/errors.hpp"
#include "ltcoin/keyrate.hpp"
#include "ltcoin/lt_decomposition.hpp"

namespace ltcoin::cli {

namespace {

constexpr double kSimulateDefaultEpsilon = 1e-3;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
    if (cfg.output.empty()) {
        out << content;
    } else {
        write_atomically(cfg.output, content);
    }
}

ScanOptions scan_options(const RunConfig& cfg) {
    ScanOptions o;
    o.dark_count = cfg.dark_count;
    o.det_efficiency = cfg.det_efficiency;
    o.receiver_delta = cfg.receiver_delta;
    o.p_zc = cfg.p_zc;
    o.tol = cfg.tol;
    o.z_weight = cfg.z_weight;
    return o;
}

std::string curve_csv(const RunConfig& cfg, DeltaMethod method) {
    const FlawModel model(cfg.delta, cfg.protocol);
    const ScanResult res = scan(cfg.protocol, model, SideChannelBudget(cfg.effective_epsilon()), cfg.rates, cfg.grid(),
                                method, scan_options(cfg));
    std::ostringstream os;
    os << "distance_km,eta,y_z,e_z,delta_bound,e_ph_u,r_per_pulse,r_bps\n";
    for (const auto& r : res.rows) {
        os << num(r.distance_km) << ',' << num(r.eta) << ',' << num(r.y_z) << ',' << num(r.e_z) << ','
           << num(r.delta_bound) << ',' << num(r.e_ph_u) << ',' << num(r.r_per_pulse) << ',' << num(r.r_bps) << '\n';
    }
    return os.str();
}

std::string fmax_text(const RunConfig& cfg) {
    SequentialLimit s;
    s.l_fib_km = cfg.l_fib_km;
    s.l_act_km = cfg.l_act_km;
    s.refractive_index = cfg.refractive_index;
    s.speed_of_light = cfg.speed_of_light;
    std::ostringstream os;
    os << "l_fib_km = " << num(s.l_fib_km) << '\n'
       << "l_act_km = " << num(s.l_act_km) << '\n'
       << "refractive_index = " << num(s.refractive_index) << '\n'
       << "speed_of_light = " << num(s.speed_of_light) << '\n'
       << "f_max_hz = " << num(sequential_fmax(s)) << '\n'
       << "f_max_relativistic_hz = " << num(sequential_fmax_relativistic(s)) << '\n';
    return os.str();
}

void delta_block(std::ostringstream& os, const FlawModel& model, const SideChannelBudget& budget, DeltaMethod method,
                 const RunConfig& cfg) {
    const DeltaBound d = compute_delta(model, budget, method, cfg.tol);
    os << "[" << to_string(method) << "]\n"
       << "delta = " << num(d.delta) << '\n'
       << "method = " << to_string(d.method) << '\n'
       << "duality_gap = " << num(d.duality_gap) << '\n';
    if (method == DeltaMethod::Analytic) {
        os << "oracle_gap = n/a\n";
        return;
    }
    const CoinFunctional f = method == DeltaMethod::GllpSdp
                                 ? gllp_functional(model)
                                 : coin_functional(model, lt_coeffs(model), primed_basis(model));
    const GramProblem p = build_gram_problem(model, budget, f);
    const double oracle = oracle_search(p, cfg.oracle_iters, cfg.seed);
    os << "certified_objective = " << num(d.certified_lower_objective) << '\n'
       << "oracle_objective = " << num(oracle) << '\n'
       << "oracle_gap = " << num(oracle - d.certified_lower_objective) << '\n'
       << "slack_min_eig = " << num(d.slack_min_eig_shifted) << '\n';
}

std::string delta_text(const RunConfig& cfg) {
    const FlawModel model(cfg.delta, cfg.protocol);
    const SideChannelBudget budget(cfg.effective_epsilon());
    std::ostringstream os;
    os << "protocol = " << to_string(cfg.protocol) << '\n'
       << "delta_flaw = " << num(cfg.delta) << '\n'
       << "epsilon = " << num(budget.epsilon) << '\n';
    delta_block(os, model, budget, DeltaMethod::Sdp, cfg);
    if (cfg.protocol == Protocol::ThreeState) delta_block(os, model, budget, DeltaMethod::Analytic, cfg);
    return os.str();
}

std::string simulate_text(const RunConfig& cfg, bool& pass) {
    const FlawModel model(cfg.delta, cfg.protocol);
    const SideChannelBudget budget(cfg.effective_epsilon());
    const LtCoefficients coeffs = lt_coeffs(model);
    const PrimedBasis basis = primed_basis(model);
    const TagPlan plan =
        tag_plan(model, coeffs, cfg.rates.p_za, cfg.rates.p_xa, cfg.rates.p_zb, cfg.rates.p_xb, cfg.p_zc);
    ChannelParams ch;
    ch.distance_km = cfg.sim_distance_km;
    ch.dark_count = cfg.dark_count;
    ch.det_efficiency = cfg.det_efficiency;
    ch.receiver_delta = cfg.receiver_delta;
    const YieldTable yields = channel_yields(cfg.protocol, model, ch);

    const CoinFunctional f = coin_functional(model, coeffs, basis);
    const GramProblem problem = build_gram_problem(model, budget, f);
    const DeltaBound sdp = solve_delta_sdp(problem, cfg.tol);
    const DeltaBound delta = cfg.delta_method == DeltaMethod::Sdp ? sdp : compute_delta(model, budget, cfg.delta_method);
    const ExplicitStates states = explicit_states_from_gram(sdp.primal_gram, problem, f, coin_branches(model, coeffs, basis));

    TagPlan simulated = plan;
    for (auto& v : simulated.p_tag_given_event[index(Tag::Ref)]) v *= cfg.corrupt_ref;

    std::ostringstream os;
    os << "# protocol=" << to_string(cfg.protocol) << " delta=" << num(cfg.delta) << " epsilon=" << num(budget.epsilon)
       << " distance_km=" << num(cfg.sim_distance_km) << " rounds=" << cfg.rounds << " Delta=" << num(delta.delta)
       << " p_flip=" << num(states.p_flip_states) << '\n';
    pass = true;
    auto line = [&](const std::string& name, double expected, double observed, double band, bool ok) {
        char buf[320];
        std::snprintf(buf, sizeof buf, "%s expected=%.17g observed=%.17g band=%.17g %s\n", name.c_str(), expected,
                      observed, band, ok ? "PASS" : "FAIL");
        os << buf;
        pass = pass && ok;
    };
    line("explicit_states.p_flip", states.p_flip_functional, states.p_flip_states, 1e-10,
         std::abs(states.p_flip_functional - states.p_flip_states) <= 1e-10);
    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
        const Tallies t = simulate_tally(cfg.rounds, simulated, yields, seed, states.p_flip_states);
        const std::string pre = "seed=" + std::to_string(seed) + " ";
        for (const Report& r : {band_checks(t, plan, yields), accounting_checks(t, plan)}) {
            for (const auto& c : r.checks) line(pre + c.name, c.expected, c.observed, c.band, c.pass);
        }
        const CoinMargin m = check_coin_inequality(t, delta, plan);
        line(pre + "coin_inequality", m.rhs, m.lhs, m.margin, !m.violated);
    }
    return os.str();
}

}  // namespace

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InvalidArgument("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw InvalidArgument("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw InvalidArgument("cannot rename onto " + target.string() + ": " + ec.message());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified key rates for flawed sources with side channels", "ltcoin"};
    app.require_subcommand(1);
    struct Command {
        CLI::App* app;
        std::string config_path;
        std::map<std::string, std::string> flags;
    };
    std::map<std::string, Command> cmds;
    const std::vector<std::pair<std::string, std::string>> names = {
        {"curve", "key-rate curve with the LT coin bound (CSV)"},
        {"gllp-curve", "key-rate curve with the GLLP bound (CSV)"},
        {"fmax", "sequential repetition-rate limits"},
        {"delta", "Delta with its certificate diagnostics"},
        {"simulate", "Monte Carlo validation report"},
    };
    for (const auto& [name, help] : names) {
        Command& c = cmds[name];
        c.app = app.add_subcommand(name, help);
        c.app->add_option("--config", c.config_path, "flat key = value file; flags override it");
        for (const auto& k : config_keys()) c.app->add_option("--" + k.key, c.flags[k.key], k.help);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    Command& cmd = cmds[sub->get_name()];
    RunConfig cfg;
    try {
        std::map<std::string, std::string> values;
        if (!cmd.config_path.empty()) values = read_config_file(cmd.config_path);
        for (const auto& k : config_keys()) {
            if (sub->count("--" + k.key) > 0) values[k.key] = cmd.flags[k.key];
        }
        if (sub->get_name() == "simulate" && !values.contains("epsilon") && !values.contains("epsilon_components")) {
            cfg.epsilon = kSimulateDefaultEpsilon;
        }
        apply_all(cfg, values);
        cfg.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        const std::string name = sub->get_name();
        if (name == "curve") {
            emit(cfg, curve_csv(cfg, cfg.delta_method), out);
        } else if (name == "gllp-curve") {
            if (cfg.protocol != Protocol::BB84) throw InvalidArgument("gllp-curve requires protocol = bb84");
            emit(cfg, curve_csv(cfg, DeltaMethod::GllpSdp), out);
        } else if (name == "fmax") {
            emit(cfg, fmax_text(cfg), out);
        } else if (name == "delta") {
            emit(cfg, delta_text(cfg), out);
        } else {
            bool pass = false;
            emit(cfg, simulate_text(cfg, pass), out);
            if (!pass) {
                err << "validation failed\n";
                return kValidation;
            }
        }
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const UndefinedRate& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const InternalConsistency& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

}  // namespace ltcoin::cli
