#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "chase/errors.hpp"

namespace chase {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One local CHP generator. Canonical units: kW, hours, $/kWh, $/h.
// Dwell times are in slots, ramp rates in kW per slot; T_on = T_off = 0 and
// infinite ramps encode the fast-responding case.
struct GeneratorSpec {
    double capacity_kw = 0.0;        // L, maximum power output
    double startup_cost = 0.0;       // beta, $ per off->on transition
    double idle_cost_per_h = 0.0;    // c_m, $/h while committed
    double fuel_cost_per_kwh = 0.0;  // c_o, $ per incremental kWh generated
    int min_on_slots = 0;            // T_on
    int min_off_slots = 0;           // T_off
    double ramp_up_kw_per_slot = kInf;   // R_up
    double ramp_down_kw_per_slot = kInf; // R_dw

    bool fast_responding() const {
        return min_on_slots == 0 && min_off_slots == 0 &&
               ramp_up_kw_per_slot == kInf && ramp_down_kw_per_slot == kInf;
    }
};

// External supply: grid electricity price band, gas heating price, and the
// co-generation heat recovery ratio (eta = 0 disables co-generation).
struct ExternalSupplySpec {
    double gas_price_per_kwh = 0.0; // c_g, $ per kWh of heat from natural gas
    double heat_recovery = 0.0;     // eta, kWh heat per kWh electricity generated
    double price_min = 0.0;         // P_min
    double price_max = 0.0;         // P_max
};

// Exogenous per-slot input sigma(t) = (a, h, p). a is already net of wind.
struct SlotInput {
    double net_power_kw = 0.0; // a(t)
    double heat_kw = 0.0;      // h(t)
    double price = 0.0;        // p(t), $/kWh
};

struct Trace {
    double slot_len_hours = 1.0;
    std::vector<SlotInput> slots;

    int horizon() const { return static_cast<int>(slots.size()); }
};

// Commitment and dispatch for one slot, all generators.
struct SlotDecision {
    std::vector<std::uint8_t> on; // y_n
    std::vector<double> gen_kw;   // u_n
    double grid_kw = 0.0;         // v
    double gas_kw = 0.0;          // s
};

// Initial condition: every generator is off before the first slot.
struct Schedule {
    int n_gens = 1;
    std::vector<SlotDecision> slots;

    int horizon() const { return static_cast<int>(slots.size()); }

    static Schedule empty(int n_gens, int horizon) {
        Schedule s;
        s.n_gens = n_gens;
        s.slots.assign(static_cast<std::size_t>(horizon),
                       SlotDecision{std::vector<std::uint8_t>(n_gens, 0),
                                    std::vector<double>(n_gens, 0.0), 0.0, 0.0});
        return s;
    }
};

struct CostBreakdown {
    double grid_cost = 0.0;     // sum p*v*l
    double gas_cost = 0.0;      // sum c_g*s*l
    double gen_fuel_cost = 0.0; // sum c_o*u*l
    double gen_idle_cost = 0.0; // sum c_m*y*l
    double startup_cost = 0.0;  // sum beta*[y(t)-y(t-1)]^+
    double total = 0.0;
};

// Validate parameter invariants and the two model assumptions:
//   A1: c_o >= eta * c_g        (gas heating alone is never dearer than burning
//                                fuel purely for heat)
//   A2: c_o + c_m/L < P_max + eta*c_g
//                               (full-output co-generation undercuts the peak
//                                external price; otherwise local generation is
//                                pointless)
// Throws ConfigError on violation.
void validate_params(const GeneratorSpec& gen, const ExternalSupplySpec& ext);

// Per-slot input invariants against the active supply spec; DataError on violation.
void validate_slot(const ExternalSupplySpec& ext, const SlotInput& sigma);

// Whole-trace validation; DataError names the first offending slot.
void validate_trace(const ExternalSupplySpec& ext, const Trace& trace);

} // namespace chase
