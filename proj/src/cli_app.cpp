#include "chase/cli_app.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chase/analysis.hpp"
#include "chase/experiment.hpp"
#include "chase/offline.hpp"
#include "chase/trace_io.hpp"

namespace chase {

using nlohmann::json;

namespace {

// Campus-scale defaults: ten 3 MW CHP units, time-of-use tariff band.
ParamSet default_params() {
    ParamSet p;
    p.slot_len_hours = 1.0;
    p.n_gens = 10;
    p.gen = {3000.0, 1400.0, 110.0, 0.051, 3, 3, 1000.0, 1000.0};
    p.ext = {0.0179, 1.8, 0.056, 0.232};
    return p;
}

ParamSet load_params(const std::string& path) {
    if (path.empty()) return default_params();
    return params_from_file(path);
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot open output file: " + out_path);
        out << j.dump(2) << "\n";
    }
}

BoundKind parse_bound_kind(const std::string& name) {
    if (name == "chase_s") return BoundKind::ChaseS;
    if (name == "chase_s_plus") return BoundKind::ChaseSPlus;
    if (name == "chase_lk") return BoundKind::ChaseLk;
    if (name == "chase_multi") return BoundKind::ChaseMulti;
    if (name == "chase_gen") return BoundKind::ChaseGen;
    throw ConfigError("unknown bound kind: " + name +
                      " (expected chase_s|chase_s_plus|chase_lk|chase_multi|chase_gen)");
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    ExperimentReport report = run_experiment(cfg);
    emit(report.to_json(), out_path);
    return 0;
}

int run_compare(const std::string& trace_path, const std::string& policies_arg, int lookahead,
                const std::string& params_path, int n_gens_override,
                const std::string& out_path) {
    ParamSet p = load_params(params_path);
    if (n_gens_override > 0) p.n_gens = n_gens_override;
    Trace trace = load_trace(trace_path, p.ext);

    std::vector<std::string> names;
    std::stringstream ss(policies_arg);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) names.push_back(item);
    if (names.empty()) throw ConfigError("compare: empty policy list");

    ExperimentConfig cfg;
    cfg.slot_len_hours = trace.slot_len_hours;
    cfg.n_gens = p.n_gens;
    cfg.gen = p.gen;
    cfg.ext = p.ext;
    cfg.trace_csv = trace_path;
    for (const std::string& n : names) cfg.policies.push_back({n, lookahead});
    ExperimentReport report = run_experiment(cfg);
    emit(report.to_json(), out_path);
    return 0;
}

int run_bound(const std::string& params_path, const std::string& kind, int lookahead,
              const std::string& out_path) {
    ParamSet p = load_params(params_path);
    CrBound b = cr_bound(parse_bound_kind(kind), p.gen, p.ext, lookahead, p.slot_len_hours);
    json j = cr_bound_to_json(b);
    j["kind"] = kind;
    j["lookahead_slots"] = lookahead;
    emit(j, out_path);
    return 0;
}

int run_adversarial(const std::string& policy_name, int horizon, const std::string& out_csv,
                    const std::string& params_path, const std::string& out_path) {
    ParamSet p = load_params(params_path);
    PolicySpec spec;
    if (policy_name == "chase")
        spec.kind = PolicyKind::Chase;
    else if (policy_name == "chase_plus")
        spec.kind = PolicyKind::ChasePlus;
    else if (policy_name == "rhc")
        spec.kind = PolicyKind::Rhc;
    else
        throw ConfigError("adversarial: policy must be chase|chase_plus|rhc (no look-ahead)");

    auto algorithm = make_step_algorithm(spec, p.gen, p.ext, p.slot_len_hours);
    Trace trace = adversarial_trace(algorithm, p.gen, p.ext, horizon, p.slot_len_hours);

    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        if (!out) throw ConfigError("cannot open output file: " + out_csv);
        write_trace_csv(out, trace_to_rows(trace));
    }

    // Replay the (deterministic) policy on its own worst case and compare
    // against the offline optimum. RHC carries no guarantee, so its summary
    // has no bound entry.
    auto forecast = TrueForecast(trace);
    auto run = run_policy(spec, trace, forecast, p.gen, p.ext, 1);
    double offline = total_cost(dp_offline(trace, p.gen, p.ext).schedule, trace, p.gen, p.ext).total;
    json bound_json(nullptr);
    if (spec.kind == PolicyKind::Chase)
        bound_json = cr_bound_to_json(cr_bound(BoundKind::ChaseS, p.gen, p.ext, 0, p.slot_len_hours));
    else if (spec.kind == PolicyKind::ChasePlus)
        bound_json =
            cr_bound_to_json(cr_bound(BoundKind::ChaseSPlus, p.gen, p.ext, 0, p.slot_len_hours));
    json j{{"policy", policy_name},
           {"horizon", horizon},
           {"policy_cost", run.second.total},
           {"offline_cost", offline},
           {"empirical_ratio", empirical_cr(run.second.total, offline)},
           {"theoretical_bound", bound_json},
           {"trace_csv", out_csv}};
    emit(j, out_path);
    return 0;
}

int run_synth(const std::string& spec_path, std::uint64_t seed, bool seed_given,
              const std::string& out_csv, const std::string& out_path) {
    SynthSpec spec;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw ConfigError("cannot open synth spec: " + spec_path);
        spec = synth_spec_from_json(json::parse(in, nullptr, true, true));
    }
    std::uint64_t final_seed =
        resolve_seed(seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
    auto rows = synth_rows(spec, final_seed);
    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        if (!out) throw ConfigError("cannot open output file: " + out_csv);
        write_trace_csv(out, rows);
    }
    double peak_elec = 0.0, peak_heat = 0.0;
    for (const auto& r : rows) {
        peak_elec = std::max(peak_elec, r.elec_demand_kw);
        peak_heat = std::max(peak_heat, r.heat_demand_kw);
    }
    json j{{"slots", rows.size()},
           {"seed", final_seed},
           {"peak_elec_demand_kw", peak_elec},
           {"peak_heat_demand_kw", peak_heat},
           {"trace_csv", out_csv}};
    emit(j, out_path);
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Trace-driven energy-generation scheduling: offline optimum, the CHASE "
                 "online family, RHC comparator, ratio bounds, and experiment harness"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    auto* simulate = app.add_subcommand("simulate", "Run an experiment config end to end");
    simulate->add_option("--config", config_path, "Experiment config JSON")->required();
    simulate->add_option("--out", out_path, "Write the report JSON here instead of stdout");

    std::string trace_path, policies_arg = "offline,chase,rhc", cmp_params;
    int lookahead = 0, n_gens_override = 0;
    auto* compare = app.add_subcommand("compare", "Run policies over a trace CSV");
    compare->add_option("--trace", trace_path, "Trace CSV")->required();
    compare->add_option("--policies", policies_arg, "Comma-separated policy names");
    compare->add_option("--lookahead", lookahead, "Look-ahead window, slots");
    compare->add_option("--params", cmp_params, "Parameter JSON (default: built-in campus scale)");
    compare->add_option("--n-gens", n_gens_override, "Override generator count");
    compare->add_option("--out", out_path, "Write JSON here instead of stdout");

    std::string bound_params, bound_kind = "chase_s";
    auto* bound = app.add_subcommand("bound", "Evaluate a competitive-ratio bound");
    bound->add_option("--params", bound_params, "Parameter JSON")->required();
    bound->add_option("--kind", bound_kind, "chase_s|chase_s_plus|chase_lk|chase_multi|chase_gen");
    bound->add_option("--lookahead", lookahead, "Look-ahead window, slots");
    bound->add_option("--out", out_path, "Write JSON here instead of stdout");

    std::string adv_policy = "chase", adv_out, adv_params;
    int horizon = 1000;
    auto* adversarial = app.add_subcommand("adversarial", "Closed-loop worst-case trace");
    adversarial->add_option("--policy", adv_policy, "chase|chase_plus|rhc");
    adversarial->add_option("--horizon", horizon, "Number of slots")->required();
    adversarial->add_option("--out", adv_out, "Trace CSV path");
    adversarial->add_option("--params", adv_params, "Parameter JSON");
    adversarial->add_option("--json-out", out_path, "Write the JSON summary here");

    std::string synth_spec_path, synth_out;
    std::uint64_t seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic seasonal trace");
    synth->add_option("--spec", synth_spec_path, "Synth spec JSON (defaults if omitted)");
    auto* seed_opt = synth->add_option("--seed", seed, "Seed (falls back to CHASE_SEED)");
    synth->add_option("--out", synth_out, "Trace CSV path");
    synth->add_option("--json-out", out_path, "Write the JSON summary here");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return run_simulate(config_path, out_path);
        if (compare->parsed())
            return run_compare(trace_path, policies_arg, lookahead, cmp_params, n_gens_override,
                               out_path);
        if (bound->parsed()) return run_bound(bound_params, bound_kind, lookahead, out_path);
        if (adversarial->parsed())
            return run_adversarial(adv_policy, horizon, adv_out, adv_params, out_path);
        if (synth->parsed())
            return run_synth(synth_spec_path, seed, seed_opt->count() > 0, synth_out, out_path);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}

} // namespace chase
