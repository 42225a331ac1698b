#pragma once

#include <string>
#include <vector>

#include "chase/types.hpp"

namespace chase {

struct DispatchResult {
    double gen_kw = 0.0;  // u
    double grid_kw = 0.0; // v
    double gas_kw = 0.0;  // s
};

// Net demand after local wind: max(0, elec - wind). Surplus wind is curtailed.
double net_demand(double elec_demand_kw, double wind_kw);

// Cost-minimal continuous dispatch for one slot, given the commitment flag.
// The price thresholds decide how much the generator should produce:
//
//   p + eta*c_g <= c_o          -> u = 0                 (grid is cheap)
//   p < c_o < p + eta*c_g       -> u = min(h/eta, a, L*y) (only the co-generated
//                                                          heat makes it pay)
//   c_o <= p                    -> u = min(a, L*y)       (generation is cheap)
//
// and v = [a-u]^+, s = [h-eta*u]^+ are the minimal external supplies.
// Ties sit exactly on the <= / < boundaries above; at p + eta*c_g == c_o the
// u = 0 branch wins (the two dispatches cost the same).
// Throws ConfigError on violated model assumptions, DataError on bad sigma.
DispatchResult dispatch(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                        const SlotInput& sigma, bool on);

// Per-slot operating cost of a commitment choice with its optimal dispatch:
//   psi = (c_o*u + p*v + c_g*s + c_m*y) * slot_len   [$]
double slot_cost(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                 const SlotInput& sigma, bool on, double slot_len_hours);

// One-slot cost advantage of running the generator: psi(sigma,0) - psi(sigma,1).
// Positive means running is profitable this slot. Never below -c_m*slot_len.
double slot_delta(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                  const SlotInput& sigma, double slot_len_hours);

// Cost of serving the whole trace externally (no local generation).
double baseline_cost(const Trace& trace, const ExternalSupplySpec& ext);

// Full cost accounting over a schedule, with y_n(0) = 0.
// Validates the static per-slot constraints (output cap, both balances) first;
// throws ValidationError naming the first violation, ConfigError on length
// mismatch.
CostBreakdown total_cost(const Schedule& schedule, const Trace& trace,
                         const GeneratorSpec& gen, const ExternalSupplySpec& ext);

struct ConstraintFlags {
    bool ramp = false;       // enforce ramp limits
    bool min_on_off = false; // enforce dwell times
};

struct Violation {
    enum class Kind { OutputCap, ElecBalance, HeatBalance, RampUp, RampDown, MinOn, MinOff };
    Kind kind;
    int slot = 0; // 1-based
    int gen = 0;  // 0-based generator index
    double slack = 0.0; // amount by which the constraint is missed
    std::string describe() const;
};

// Checks every active constraint and returns all violations (empty = feasible).
// Static constraints (output cap, electricity balance, heat balance) are always
// checked; ramp and dwell checks are gated by the flags. The ramp-down limit is
// not applied across a shutdown: turning off drops output to zero by the output
// cap, which dominates.
std::vector<Violation> validate_schedule(const Schedule& schedule, const Trace& trace,
                                         const GeneratorSpec& gen,
                                         const ExternalSupplySpec& ext,
                                         const ConstraintFlags& flags);

} // namespace chase
