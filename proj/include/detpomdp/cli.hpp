#pragma once

// Command-line surface: validate, generate, solve, reachable, bounds,
// check-separated, simulate, oracle-check. Every command is deterministic
// given its inputs; random generation always requires an explicit seed.
//
// Exit codes: 0 success, 1 usage error, 2 model error, 3 resource cap,
// 4 internal invariant failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "detpomdp/analysis.hpp"
#include "detpomdp/errors.hpp"
#include "detpomdp/model.hpp"
#include "detpomdp/model_io.hpp"
#include "detpomdp/reachability.hpp"
#include "detpomdp/solver.hpp"

namespace detpomdp::cli {

// Belief literal used in command output: sorted map of state label to exact
// weight, or the token CEMETERY for δ_∂.
inline std::string format_belief(const DetPomdpModel& m, const Belief& b) {
    if (b.is_cemetery()) return "CEMETERY";
    std::string s = "{";
    for (const auto& [p, w] : b.entries()) {
        if (s.size() > 1) s += ", ";
        s += m.states[p.v] + ": " + w.str();
    }
    return s + "}";
}

struct CommonOptions {
    std::string model_path;
    std::string belief_spec;  // file path or inline JSON object
    std::string format = "text";
    int threads = 1;
    std::uint64_t cap_beliefs = 10'000'000;
    std::uint64_t cap_closure = 100'000;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline DetPomdpModel load_model(const CommonOptions& opts) {
    if (opts.model_path.empty()) throw ModelError("--model is required");
    DetPomdpModel m = parse_model(read_file(opts.model_path));
    ValidationReport rep = validate_model(m);
    if (!rep.ok) {
        std::string msg = "model '" + opts.model_path + "' is invalid:";
        for (const auto& issue : rep.issues)
            if (issue.severity == ValidationIssue::Severity::error)
                msg += "\n  " + issue.path + ": " + issue.message;
        throw ModelError(msg);
    }
    return m;
}

// Belief from --belief (inline JSON object or file), else the model document.
inline Belief resolve_belief(const DetPomdpModel& m, const CommonOptions& opts) {
    std::string text;
    if (!opts.belief_spec.empty()) {
        text = opts.belief_spec;
        if (text.find('{') == std::string::npos) text = read_file(opts.belief_spec);
    } else {
        auto b = m.initial_belief_value();
        if (!b) throw ModelError("no initial belief: pass --belief or add one to the model");
        return *b;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(std::string("belief is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ModelError("belief must be a JSON object of label -> rational");
    std::vector<std::pair<StateIndex, Rational>> w;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto pos = std::find(m.states.begin(), m.states.end(), it.key());
        if (pos == m.states.end()) throw ModelError("belief on unknown state '" + it.key() + "'");
        Rational r = it.value().is_number_integer()
                         ? Rational(it.value().get<std::int64_t>())
                         : Rational::parse(it.value().get<std::string>());
        w.emplace_back(static_cast<StateIndex>(pos - m.states.begin()), r);
    }
    return make_belief(w, m.n_states());
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write file '" + path + "'");
    out << content;
}

inline std::vector<std::int64_t> parse_int_list(const std::string& csv) {
    std::vector<std::int64_t> vals;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) vals.push_back(std::stoll(item));
    }
    return vals;
}

inline const char* label_or_dash(const std::vector<std::string>& labels, std::int32_t idx) {
    return idx < 0 ? "-" : labels[static_cast<std::size_t>(idx)].c_str();
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-horizon Det-POMDP modeling, solving and analysis"};
    app.require_subcommand(1);

    CommonOptions common;
    auto add_common = [&common](CLI::App* cmd, bool with_belief = true) {
        cmd->add_option("--model", common.model_path, "model document (JSON)");
        if (with_belief)
            cmd->add_option("--belief", common.belief_spec,
                            "initial belief: JSON file or inline {\"label\":\"p/q\", ...}; "
                            "overrides the model's initial_belief");
        cmd->add_option("--format", common.format, "output format: text or csv")
            ->check(CLI::IsMember({"text", "csv"}));
        cmd->add_option("--threads", common.threads, "worker threads (results are identical)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--cap-beliefs", common.cap_beliefs, "reachable-belief count cap");
        cmd->add_option("--cap-closure", common.cap_closure, "mapping-closure size cap");
    };

    // ---- validate ----
    auto* validate = app.add_subcommand("validate", "check a model document");
    add_common(validate, false);

    // ---- generate ----
    auto* generate = app.add_subcommand("generate", "write a generated model document");
    generate->require_subcommand(1);
    std::string gen_out;

    auto* gen_tb = generate->add_subcommand("tight-bound", "bound-attaining separated instance");
    std::int32_t tb_n = 3;
    gen_tb->add_option("--n", tb_n, "number of states (>= 3)");
    gen_tb->add_option("--out", gen_out, "output path")->required();

    auto* gen_tk = generate->add_subcommand("tank", "partially observed tank instance");
    std::string tk_preset, tk_thresholds, tk_prices;
    std::int64_t tk_xmax = -1, tk_umax = -1, tk_b0_lo = -1, tk_b0_hi = -1;
    std::int32_t tk_horizon = -1;
    std::uint64_t tk_b0_seed = 1;
    gen_tk->add_option("--preset", tk_preset, "instance-1 or instance-2")
        ->check(CLI::IsMember({"instance-1", "instance-2"}));
    gen_tk->add_option("--x-max", tk_xmax, "states are 0..x-max");
    gen_tk->add_option("--u-max", tk_umax, "controls are 0..u-max");
    gen_tk->add_option("--thresholds", tk_thresholds, "comma-separated observation thresholds");
    gen_tk->add_option("--horizon", tk_horizon, "number of decision steps");
    gen_tk->add_option("--prices", tk_prices, "comma-separated price cycle");
    gen_tk->add_option("--b0-lo", tk_b0_lo, "embedded initial-belief support lower bound");
    gen_tk->add_option("--b0-hi", tk_b0_hi, "embedded initial-belief support upper bound");
    gen_tk->add_option("--b0-seed", tk_b0_seed, "seed for the embedded initial belief");
    gen_tk->add_option("--out", gen_out, "output path")->required();

    auto* gen_rd = generate->add_subcommand("random", "seeded random instance");
    std::uint64_t rd_seed = 0;
    RandomSizes rd_sizes;
    RandomOptions rd_opts;
    gen_rd->add_option("--seed", rd_seed, "generator seed")->required();
    gen_rd->add_option("--nx", rd_sizes.nx, "number of states");
    gen_rd->add_option("--nu", rd_sizes.nu, "number of controls");
    gen_rd->add_option("--no", rd_sizes.no, "number of observations");
    gen_rd->add_option("--horizon", rd_sizes.horizon, "number of decision steps");
    gen_rd->add_flag("--affine", rd_opts.affine, "shift dynamics with a structure annotation");
    gen_rd->add_flag("--product", rd_opts.product, "multiplicative dynamics on power labels");
    gen_rd->add_flag("--cyclic", rd_opts.cyclic, "shift dynamics modulo |X|");
    gen_rd->add_flag("--full-admissible", rd_opts.full_admissible, "every control admissible");
    gen_rd->add_flag("--guarded-admissible", rd_opts.guarded_admissible,
                     "admissible iff the structural image stays on the grid");
    gen_rd->add_flag("--inf-costs", rd_opts.allow_infinite_costs, "allow +inf cost entries");
    gen_rd->add_flag("--isolate-boundaries", rd_opts.isolate_boundaries,
                     "boundary states get dedicated observations");
    gen_rd->add_option("--out", gen_out, "output path")->required();

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "optimal expected cost from b0");
    add_common(solve_cmd);

    // ---- reachable ----
    auto* reach_cmd = app.add_subcommand("reachable", "per-time reachable-belief cardinalities");
    add_common(reach_cmd);
    bool reach_admissible_only = false;
    std::int32_t reach_depth = -1;
    reach_cmd->add_flag("--admissible-only", reach_admissible_only,
                        "expand only controls admissible at the whole support");
    reach_cmd->add_option("--depth", reach_depth, "enumerate layers 0..depth (default horizon)");

    // ---- bounds ----
    auto* bounds_cmd = app.add_subcommand("bounds", "theoretical bounds vs. enumeration");
    add_common(bounds_cmd);

    // ---- check-separated ----
    auto* sep_cmd = app.add_subcommand("check-separated", "Separated-Det-POMDP classification");
    add_common(sep_cmd, false);

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "closed-loop rollout under the optimal policy");
    add_common(sim_cmd);
    std::string sim_x0;
    sim_cmd->add_option("--x0", sim_x0, "true initial state label")->required();

    // ---- oracle-check ----
    auto* oracle_cmd = app.add_subcommand("oracle-check",
                                          "solve vs. brute-force policy enumeration");
    add_common(oracle_cmd, false);
    std::uint64_t oc_count = 50, oc_seed = 1;
    oracle_cmd->add_option("--count", oc_count, "number of random instances");
    oracle_cmd->add_option("--seed", oc_seed, "base seed");

    std::vector<std::string> argv_like(args.rbegin(), args.rend());
    try {
        app.parse(std::vector<std::string>(argv_like));  // CLI11 takes reversed args
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (validate->parsed()) {
            DetPomdpModel m = parse_model(detail::read_file(common.model_path));
            ValidationReport rep = validate_model(m);
            for (const auto& issue : rep.issues) {
                out << (issue.severity == ValidationIssue::Severity::error ? "error" : "warning")
                    << "  " << issue.path << ": " << issue.message << "\n";
            }
            out << (rep.ok ? "ok" : "invalid") << "\n";
            return rep.ok ? 0 : 2;
        }

        if (generate->parsed()) {
            DetPomdpModel m;
            std::vector<std::string> warnings;
            if (gen_tb->parsed()) {
                m = gen_tight_bound(tb_n);
            } else if (gen_tk->parsed()) {
                TankParams p;
                if (tk_preset == "instance-1") p = TankParams::preset_instance_1();
                else if (tk_preset == "instance-2") p = TankParams::preset_instance_2();
                else p = TankParams::preset_instance_1();
                if (tk_xmax >= 0) {
                    p.states.clear();
                    for (std::int64_t x = 0; x <= tk_xmax; ++x) p.states.push_back(x);
                }
                if (tk_umax >= 0) {
                    p.controls.clear();
                    for (std::int64_t u = 0; u <= tk_umax; ++u) p.controls.push_back(u);
                }
                if (!tk_thresholds.empty()) p.thresholds = detail::parse_int_list(tk_thresholds);
                if (tk_horizon > 0) p.horizon = tk_horizon;
                if (!tk_prices.empty()) {
                    p.prices.clear();
                    for (std::int64_t c : detail::parse_int_list(tk_prices))
                        p.prices.emplace_back(c);
                }
                if (tk_b0_lo >= 0 && tk_b0_hi >= tk_b0_lo) p.b0_range = {{tk_b0_lo, tk_b0_hi}};
                p.b0_seed = tk_b0_seed;
                GenOutput g = gen_tank(p);
                m = std::move(g.model);
                warnings = std::move(g.warnings);
            } else {
                m = gen_random(rd_seed, rd_sizes, rd_opts);
            }
            for (const auto& w : warnings) err << "warning: " << w << "\n";
            detail::write_file(gen_out, serialize_model(m));
            out << "wrote " << gen_out << " (|X|=" << m.states.size()
                << ", |U|=" << m.controls.size() << ", |O|=" << m.observations.size()
                << ", T=" << m.horizon << ")\n";
            return 0;
        }

        if (solve_cmd->parsed()) {
            DetPomdpModel m = detail::load_model(common);
            Belief b0 = detail::resolve_belief(m, common);
            auto start = std::chrono::steady_clock::now();
            SolveResult res = solve(m, b0, {.cap = common.cap_beliefs, .admissible_only = true});
            auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
            std::uint64_t reach = res.layers.total_distinct();
            if (common.format == "csv") {
                out << "value,value_decimal,reachable_beliefs,seconds\n";
                out << res.optimal_value.str() << ","
                    << (res.optimal_value.is_finite()
                            ? std::to_string(res.optimal_value.value.to_double())
                            : "inf")
                    << "," << reach << "," << seconds.count() << "\n";
            } else {
                out << "optimal value: " << res.optimal_value.str();
                if (res.optimal_value.is_finite())
                    out << "  (~" << res.optimal_value.value.to_double() << ")";
                out << "\nreachable beliefs (admissible expansion): " << reach << "\n";
                out << "wall time: " << seconds.count() << " s\n";
            }
            return 0;
        }

        if (reach_cmd->parsed()) {
            DetPomdpModel m = detail::load_model(common);
            Belief b0 = detail::resolve_belief(m, common);
            std::int32_t depth = reach_depth < 0 ? m.horizon : reach_depth;
            ReachLayers layers = reachable_layers(
                m, b0, depth, {.cap = common.cap_beliefs, .admissible_only = reach_admissible_only});
            out << "t,layer_size,cumulative_size,cemetery_reached\n";
            for (std::size_t t = 0; t < layers.layers.size(); ++t) {
                out << t << "," << layers.layer_size[t] << "," << layers.cumulative_size[t] << ","
                    << (layers.cemetery_in_layer[t] ? 1 : 0) << "\n";
            }
            if (common.format == "text")
                out << "total distinct beliefs: " << layers.total_distinct() << "\n";
            return 0;
        }

        if (bounds_cmd->parsed()) {
            DetPomdpModel m = detail::load_model(common);
            Belief b0 = detail::resolve_belief(m, common);
            BoundsReport rep =
                verify_bounds(m, b0, {.cap = common.cap_beliefs},
                              {.dynamics_cap = common.cap_closure, .closure_cap = common.cap_closure});
            if (common.format == "csv") {
                out << "support_independent,general_term_a,general_term_b,general,separated,separated_stable,empirical_0T,"
                       "empirical_1T,verdict,conforms,general_tight,separated_tight\n";
                out << rep.support_independent.str() << "," << rep.general_bound.term_a.str() << ","
                    << (rep.general_bound.term_b ? rep.general_bound.term_b->str() : "-") << ","
                    << rep.general_bound.bound.str() << "," << (rep.separated_bound ? rep.separated_bound->str() : "-") << ","
                    << (rep.separated_stable ? rep.separated_stable->str() : "-") << "," << rep.empirical_0T
                    << "," << rep.empirical_1T << "," << to_string(rep.verdict.status) << ","
                    << (rep.conforms ? 1 : 0) << "," << (rep.general_tight ? 1 : 0) << ","
                    << (rep.separated_tight ? 1 : 0) << "\n";
            } else {
                out << "support-independent bound ((1+|X|)^|X|): " << rep.support_independent.str() << "\n";
                out << "det-pomdp bound term_a: " << rep.general_bound.term_a.str() << "\n";
                if (rep.general_bound.term_b)
                    out << "det-pomdp bound term_b: " << rep.general_bound.term_b->str() << "\n";
                else
                    out << "det-pomdp bound term_b: not applicable (|U| = 1)\n";
                out << "det-pomdp bound (min): " << rep.general_bound.bound.str() << "\n";
                out << "separation verdict: " << to_string(rep.verdict.status) << "\n";
                if (rep.separated_bound) out << "separated bound: " << rep.separated_bound->str() << "\n";
                if (rep.separated_stable)
                    out << "separated bound with stable set (|A|=" << rep.stable.size()
                        << "): " << rep.separated_stable->str() << "\n";
                out << "empirical |B^R_[0,T]|: " << rep.empirical_0T << "\n";
                out << "empirical |B^R_[1,T]|: " << rep.empirical_1T << "\n";
                out << "conforms: " << (rep.conforms ? "yes" : "NO") << "\n";
                if (rep.general_tight) out << "det-pomdp bound attained with equality\n";
                if (rep.separated_tight) out << "separated bound attained with equality\n";
            }
            return rep.conforms ? 0 : 4;
        }

        if (sep_cmd->parsed()) {
            DetPomdpModel m = detail::load_model(common);
            SeparationVerdict v =
                check_separated_dpomdp(m, {.dynamics_cap = common.cap_closure,
                                           .closure_cap = common.cap_closure});
            if (common.format == "csv") {
                out << "status,has_witness\n";
                out << to_string(v.status) << "," << (v.witness ? 1 : 0) << "\n";
                return 0;
            }
            out << "status: " << to_string(v.status) << "\n";
            for (const auto& line : v.trace) out << "  " << line << "\n";
            if (v.witness) {
                auto chain_str = [&m](const std::vector<StepKey>& chain) {
                    std::string s;
                    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                        if (!s.empty()) s += " o ";
                        s += "F[t=" + std::to_string(it->t) +
                             ",u=" + m.controls[it->u] + ",o=" + m.observations[it->o] + "]";
                    }
                    return s;
                };
                out << "witness: g1 = " << chain_str(v.witness->chain1) << "\n";
                out << "         g2 = " << chain_str(v.witness->chain2) << "\n";
                out << "         agree at " << m.states[v.witness->agree_at] << ", differ at "
                    << m.states[v.witness->differ_at] << "\n";
                out << "witness replay: " << (replay_witness(m, *v.witness) ? "ok" : "FAILED")
                    << "\n";
            }
            return 0;
        }

        if (sim_cmd->parsed()) {
            DetPomdpModel m = detail::load_model(common);
            Belief b0 = detail::resolve_belief(m, common);
            auto pos = std::find(m.states.begin(), m.states.end(), sim_x0);
            if (pos == m.states.end()) throw ModelError("unknown state label '" + sim_x0 + "'");
            SolveResult res = solve(m, b0, {.cap = common.cap_beliefs, .admissible_only = true});
            SimulationResult sim =
                simulate(m, res, static_cast<StateIndex>(pos - m.states.begin()), b0);
            out << "t,state,observation,control,step_cost,supp_min,supp_max,supp_size\n";
            for (const auto& rec : sim.records) {
                out << rec.t << "," << m.states[rec.state] << "," << m.observations[rec.observation]
                    << "," << detail::label_or_dash(m.controls, rec.control) << ","
                    << rec.step_cost.str() << "," << m.states[rec.supp_min] << ","
                    << m.states[rec.supp_max] << "," << rec.supp_size << "\n";
            }
            if (common.format == "text") {
                out << "total realized cost: " << sim.total_cost.str() << "\n";
                out << "final belief: " << format_belief(m, sim.final_belief) << "\n";
                if (!sim.diagnostic.empty()) out << "diagnostic: " << sim.diagnostic << "\n";
            }
            return sim.aborted ? 4 : 0;
        }

        if (oracle_cmd->parsed()) {
            std::uint64_t failures = 0;
            for (std::uint64_t i = 0; i < oc_count; ++i) {
                std::uint64_t seed = oc_seed + i;
                RandomSizes sizes;
                RandomStream rng(seed * 7919 + 13);
                sizes.nx = static_cast<StateIndex>(2 + rng.below(3));
                sizes.nu = 2;
                sizes.no = 2;
                sizes.horizon = static_cast<std::int32_t>(1 + rng.below(3));
                RandomOptions ro;
                ro.allow_infinite_costs = (i % 3 == 0);
                ro.allow_empty_admissible = (i % 4 == 0);
                DetPomdpModel m = gen_random(seed, sizes, ro);
                std::vector<StateIndex> supp;
                std::size_t k = 1 + rng.below(static_cast<std::uint64_t>(sizes.nx));
                for (std::size_t s = 0; s < k; ++s) supp.push_back(static_cast<StateIndex>(s));
                Belief b0 = gen_random_belief(seed ^ 0xabcd, sizes.nx, supp, 97);
                ExtendedValue dp = solve(m, b0).optimal_value;
                ExtendedValue oracle = brute_force_value(m, b0);
                bool ok = dp == oracle;
                if (!ok) {
                    ++failures;
                    out << "instance seed=" << seed << ": solve=" << dp.str()
                        << " oracle=" << oracle.str() << "  MISMATCH\n";
                }
            }
            out << "oracle-check: " << (oc_count - failures) << "/" << oc_count << " matched\n";
            return failures == 0 ? 0 : 4;
        }
    } catch (const CapExceeded& e) {
        err << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const InternalError& e) {
        err << "internal invariant failure: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "usage error: no subcommand\n";
    return 1;
}

}  // namespace detpomdp::cli
