#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chase/online.hpp"
#include "chase/types.hpp"

namespace chase {

// CSV schema (bit-exact):
//   timestamp,elec_demand_kw,heat_demand_kw,wind_kw,price_usd_per_kwh
// `timestamp` is either a number (hours from an arbitrary origin) or an ISO
// 8601 date-time (YYYY-MM-DDTHH:MM[:SS], space accepted instead of T). Rows
// must be in time order with uniform spacing; the spacing is the slot length.
struct TraceCsvRow {
    double hours = 0.0;
    double elec_demand_kw = 0.0;
    double heat_demand_kw = 0.0;
    double wind_kw = 0.0;
    double price = 0.0;
};

// Parse a trace file: net demand is derived per row (demand minus wind,
// clamped at zero), prices are validated against the supply band.
// DataError reports the first offending row by number.
Trace load_trace(const std::string& path, const ExternalSupplySpec& ext);
Trace load_trace_stream(std::istream& in, const ExternalSupplySpec& ext,
                        const std::string& origin = "<stream>");

void write_trace_csv(std::ostream& out, const std::vector<TraceCsvRow>& rows);
std::vector<TraceCsvRow> trace_to_rows(const Trace& trace); // wind column = 0

// ---------------------------------------------------------------------------
// Synthetic seasonal traces (stand-in for measured campus data).
// Diurnal sinusoidal electricity with weekday/weekend modulation, heat demand
// whose amplitude peaks in winter, mean-reverting wind noise, and a
// time-of-use tariff: summer (May-Oct) weekday on-peak 12-18 / mid-peak 8-12,
// winter weekday mid-peak 8-22, everything else off-peak.
struct SynthSpec {
    int days = 365;
    double slot_len_hours = 1.0;
    int start_month = 1;   // 1..12
    int start_weekday = 0; // 0 = Monday
    double elec_base_kw = 12000.0;
    double elec_amp_kw = 18000.0;
    double weekend_factor = 0.8;
    double elec_noise_frac = 0.03;
    double heat_base_kw = 4000.0;
    double heat_amp_winter_kw = 12000.0;
    double heat_amp_summer_kw = 3000.0;
    double heat_noise_frac = 0.05;
    double wind_capacity_kw = 12000.0;
    double wind_mean_frac = 0.30;
    double wind_vol_frac = 0.22;
    double price_summer_on = 0.232;
    double price_summer_mid = 0.103;
    double price_summer_off = 0.056;
    double price_winter_mid = 0.116;
    double price_winter_off = 0.072;
};

// Deterministic per (spec, seed); same inputs give byte-identical rows.
std::vector<TraceCsvRow> synth_rows(const SynthSpec& spec, std::uint64_t seed);
Trace synth_trace(const SynthSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Forecast-error injection: independent zero-mean Gaussian noise per
// look-ahead slot, std expressed as a fraction of installed wind capacity
// (applied against net demand) and of peak heat demand. The present slot
// (index 0) is never perturbed; results clamp at zero and are deterministic
// per seed. Fractions up to 1.2 (the stress-test ceiling) are accepted.
std::vector<SlotInput> inject_forecast_error(const std::vector<SlotInput>& true_window,
                                             double wind_std_frac, double heat_std_frac,
                                             double installed_wind_kw, double peak_heat_kw,
                                             std::uint64_t seed);

// Forecast provider with per-slot error injection, deterministic per seed.
class NoisyForecast : public ForecastProvider {
public:
    NoisyForecast(const Trace& trace, double wind_std_frac, double heat_std_frac,
                  double installed_wind_kw, double peak_heat_kw, std::uint64_t seed);
    std::vector<SlotInput> window(int t, int lookahead) const override;

private:
    const Trace& trace_;
    double wind_std_frac_, heat_std_frac_;
    double installed_wind_kw_, peak_heat_kw_;
    std::uint64_t seed_;
};

} // namespace chase
