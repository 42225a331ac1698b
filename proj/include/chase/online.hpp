#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chase/dispatch.hpp"
#include "chase/layering.hpp"
#include "chase/types.hpp"

namespace chase {

// State carried across slots by a single-generator online policy.
// Dwell counters saturate; the off counter starts saturated ("off since
// t = 0"), so the generator may start in the very first slot.
struct OnlineState {
    int y_prev = 0;
    double delta_prev = 0.0; // running clamped Delta, in [-beta, 0]
    double u_prev = 0.0;
    int slots_since_on_switch = 0;  // slots since the last off->on switch
    int slots_since_off_switch = 0; // slots since the last on->off switch

    static OnlineState initial(const GeneratorSpec& gen);
};

struct StepResult {
    int y = 0;
    double gen_kw = 0.0;
    double grid_kw = 0.0;
    double gas_kw = 0.0;
    OnlineState next;
};

// Whether the always-use-external-supply strategy already beats the tracking
// bound: 1/alpha <= 3 - 2*alpha (equivalently alpha >= 1/2).
bool external_only_guard(double alpha);

// No-look-ahead tracker. Turns on when Delta first reaches 0, off when it
// falls back to -beta, holds otherwise.
StepResult chase_step(const OnlineState& state, const SlotInput& sigma,
                      const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                      double slot_len_hours);

// chase_step guarded by the external-only test; never generates when the
// naive strategy has the better worst-case ratio.
StepResult chase_plus_step(const OnlineState& state, const SlotInput& sigma,
                           const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                           double slot_len_hours);

// Look-ahead tracker. `window` holds sigma(t..t+w) (truncated near the trace
// tail, at least one slot). The decision follows the earliest boundary hit of
// Delta inside the window; output is dispatched for slot t only.
StepResult chase_lookahead_step(const OnlineState& state, std::span<const SlotInput> window,
                                const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                                double slot_len_hours);

// Constraint-respecting wrapper: follows the look-ahead tracker's commitment
// whenever the dwell-time counters permit, otherwise holds; moves output
// toward the reference dispatch within the ramp limits; forces u = 0 while
// off. Resulting schedules satisfy all operational constraints.
StepResult chase_gen_step(const OnlineState& state, std::span<const SlotInput> window,
                          const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                          double slot_len_hours);

// Receding horizon control: solve the window exactly (2-state lattice, startup
// charged on entry, free terminal state), implement only the first slot.
StepResult rhc_step(const OnlineState& state, std::span<const SlotInput> window,
                    const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                    double slot_len_hours);

// RHC over the constrained model: window DP over (commitment, dwell,
// discretized output). Desk scale only; grid resolution trades optimality for
// time.
StepResult rhc_constrained_step(const OnlineState& state, std::span<const SlotInput> window,
                                const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                                double slot_len_hours, int u_grid_points = 101);

// ---------------------------------------------------------------------------
// Trace-level drivers.

// Look-ahead source for a policy run. Window 0 is always the true present;
// implementations may perturb the future part only. Enforces causality: a
// policy sees nothing beyond slot t + lookahead.
class ForecastProvider {
public:
    virtual ~ForecastProvider() = default;
    // sigma(t .. min(T, t+lookahead)), t is 0-based; never empty.
    virtual std::vector<SlotInput> window(int t, int lookahead) const = 0;
};

class TrueForecast : public ForecastProvider {
public:
    explicit TrueForecast(const Trace& trace) : trace_(trace) {}
    std::vector<SlotInput> window(int t, int lookahead) const override;

private:
    const Trace& trace_;
};

enum class PolicyKind { Chase, ChasePlus, ChaseGen, Rhc, RhcConstrained };

struct PolicySpec {
    PolicyKind kind = PolicyKind::Chase;
    int lookahead_slots = 0;
    bool plus = false;        // apply the external-only guard per layer
    int u_grid_points = 101;  // constrained RHC only
    std::string label() const;
};

// Drive a policy over the trace with layered demand dispatching for
// n_gens >= 1. Returns the realized schedule and its full cost accounting.
std::pair<Schedule, CostBreakdown> run_policy(const PolicySpec& policy, const Trace& trace,
                                              const ForecastProvider& forecast,
                                              const GeneratorSpec& gen,
                                              const ExternalSupplySpec& ext, int n_gens = 1);

// Multi-generator tracker run with true look-ahead (the common case).
Schedule chase_multi_run(const Trace& trace, const GeneratorSpec& gen,
                         const ExternalSupplySpec& ext, int n_gens, int lookahead_slots,
                         bool plus);

} // namespace chase
