#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chase/analysis.hpp"
#include "chase/trace_io.hpp"
#include "chase/types.hpp"

namespace chase {

// A full experiment: parameter set, trace source, policy list, optional
// forecast error, optional parameter sweeps, output locations.
struct ExperimentConfig {
    double slot_len_hours = 1.0;
    int n_gens = 1;
    GeneratorSpec gen;
    ExternalSupplySpec ext;

    // Exactly one trace source.
    std::optional<std::string> trace_csv;
    std::optional<SynthSpec> synth;
    std::optional<std::uint64_t> seed; // required for synthetic / noisy runs

    struct PolicyEntry {
        std::string name; // offline | baseline | chase | chase_plus | chase_gen | rhc | rhc_constrained
        int lookahead_slots = 0;
    };
    std::vector<PolicyEntry> policies;

    struct ForecastError {
        double wind_std_frac = 0.0;
        double heat_std_frac = 0.0;
        double installed_wind_kw = 0.0;
        double peak_heat_kw = 0.0;
        std::uint64_t seed = 0;
    };
    std::optional<ForecastError> forecast_error;

    struct Sweeps {
        std::vector<int> lookahead_slots;
        std::vector<int> n_gens;
        std::vector<double> heat_recovery;
        std::vector<double> ramp_kw_per_slot;    // applied to both directions
        std::vector<int> min_on_off_slots;       // applied to both dwell times
        std::vector<double> error_std_frac;      // wind and heat, separately
        int error_runs = 5;
        int sweep_lookahead_slots = 3; // look-ahead used inside non-lookahead sweeps
    };
    Sweeps sweeps;

    std::optional<std::string> report_path;
    std::optional<std::string> series_dir;

    // Relative trace paths resolve against base_dir when given.
    static ExperimentConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
    static ExperimentConfig from_file(const std::string& path);
};

struct PolicyRow {
    std::string name;
    int lookahead_slots = 0;
    CostBreakdown cost;
    double cost_reduction = 0.0;  // (baseline - total) / baseline
    double empirical_ratio = 0.0; // total / offline total
    std::optional<CrBound> bound;
};

struct ExperimentReport {
    double baseline_cost = 0.0;
    double offline_cost = 0.0;
    std::vector<PolicyRow> rows;
    nlohmann::json sweeps;       // per-sweep tables, mirrored into CSV files
    nlohmann::json to_json() const;
};

// Run the configured experiment: offline reference, each policy, bounds,
// sweeps. Writes the JSON report and per-sweep/per-policy CSV series when
// output paths are configured. Deterministic for fixed seeds.
ExperimentReport run_experiment(const ExperimentConfig& config);

// JSON <-> parameter helpers shared by the CLI.
GeneratorSpec generator_from_json(const nlohmann::json& j);
ExternalSupplySpec supply_from_json(const nlohmann::json& j);
SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json cr_bound_to_json(const CrBound& b);

// Parameter file: {"slot_len_hours":..., "n_gens":..., "generator":{...}, "supply":{...}}
struct ParamSet {
    double slot_len_hours = 1.0;
    int n_gens = 1;
    GeneratorSpec gen;
    ExternalSupplySpec ext;
};
ParamSet params_from_file(const std::string& path);

// Default seed fallback: explicit value, else CHASE_SEED from the
// environment; ConfigError if neither is present.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& explicit_seed);

} // namespace chase
