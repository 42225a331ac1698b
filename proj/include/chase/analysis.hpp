#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chase/dispatch.hpp"
#include "chase/offline.hpp"
#include "chase/online.hpp"
#include "chase/types.hpp"

namespace chase {

// Price-discrepancy constant alpha = (c_o + c_m/L) / (P_max + eta*c_g).
// In (0, 1] whenever the model assumptions hold; ConfigError otherwise.
double alpha(const GeneratorSpec& gen, const ExternalSupplySpec& ext);

// Look-ahead benefit g(alpha, w); w in hours. Increases from alpha (w = 0)
// toward 1 as the window grows. Degenerate when c_m = 0 and w > 0: returns
// alpha and sets *degenerate if provided.
double g_lookahead(double alpha_value, double omega_hours, const GeneratorSpec& gen,
                   bool* degenerate = nullptr);

enum class BoundKind { ChaseS, ChaseSPlus, ChaseLk, ChaseMulti, ChaseGen };

struct CrBound {
    double alpha = 0.0;
    double g_value = 0.0;
    double bound = 1.0;
    // Named terms, as applicable: tracking_ratio (3-2g), external_only_ratio
    // (1/alpha), ramp_penalty_factor, dwell_penalty_factor.
    std::map<std::string, double> components;
};

// Worst-case ratio guarantee for the named policy. Look-ahead is given in
// slots and scaled by slot_len into hours, as are the dwell times inside the
// slow-generator factors; ramp rates stay in kW per slot (the factor measures
// the one-slot reachability gap).
CrBound cr_bound(BoundKind kind, const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                 int lookahead_slots, double slot_len_hours = 1.0);

// Per-instance cost ratio. Convention: 0/0 -> 1, x/0 -> +inf for x > 0.
double empirical_cr(double policy_cost, double offline_cost);

// Closed-loop worst-case input generator: price pinned at P_max, full demand
// L while the algorithm idles, zero once it commits, heat at eta times the
// electric demand. `algorithm` consumes sigma(t) and returns y(t); it must be
// deterministic (the trace is replayed against the same algorithm later).
Trace adversarial_trace(const std::function<int(const SlotInput&)>& algorithm,
                        const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                        int horizon, double slot_len_hours = 1.0);

// Stateful, no-look-ahead adapter over a policy for the adversary loop.
std::function<int(const SlotInput&)> make_step_algorithm(const PolicySpec& policy,
                                                         const GeneratorSpec& gen,
                                                         const ExternalSupplySpec& ext,
                                                         double slot_len_hours = 1.0);

// ---------------------------------------------------------------------------
// Independent oracles (verification-grade, deliberately brute force).

// Grid search over u, minimizing the raw slot rate
//   c_o*u + p*[a-u]^+ + c_g*[h-eta*u]^+ + c_m*y.
// Does not share code with dispatch(); this is its check.
DispatchResult dispatch_oracle(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                               const SlotInput& sigma, bool on, int grid_points);

struct ExhaustiveResult {
    Schedule schedule;
    double objective = 0.0;
};

// Minimum over all 2^T commitment sequences; ties toward fewer on-slots, then
// lexicographically. Refuses T > 20. The objective accumulates per-slot terms
// exactly like dp_offline, so equal optima compare bitwise.
ExhaustiveResult exhaustive_offline(const Trace& trace, const GeneratorSpec& gen,
                                    const ExternalSupplySpec& ext);

// Optimal cost for N homogeneous fast-responding generators via a DP over the
// on-count per slot (aggregate dispatch at capacity k*L, startup charge on
// count increases). Oracle for the layered offline solution. Refuses
// n_gens > 8 or T > 100.
double count_dp_offline(const Trace& trace, const GeneratorSpec& gen,
                        const ExternalSupplySpec& ext, int n_gens);

// Desk-scale constrained offline: DP over (commitment, dwell, discretized
// output) honoring dwell times and ramp limits. Returns the minimal cost on
// the grid (an upper bound on the true optimum within grid resolution).
// Refuses T > 60 or u_grid_points > 101.
double constrained_offline(const Trace& trace, const GeneratorSpec& gen,
                           const ExternalSupplySpec& ext, int u_grid_points = 101);

} // namespace chase
