#include "chase/online.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chase/analysis.hpp"

namespace chase {

namespace {

constexpr int kSaturated = 1 << 29;

int bump(int counter) { return std::min(counter + 1, kSaturated); }

OnlineState advance(const OnlineState& state, int y, double delta_now, double u_now) {
    OnlineState next = state;
    next.delta_prev = delta_now;
    next.u_prev = u_now;
    if (y != state.y_prev) {
        if (y == 1) {
            next.slots_since_on_switch = 1;
            next.slots_since_off_switch = bump(state.slots_since_off_switch);
        } else {
            next.slots_since_off_switch = 1;
            next.slots_since_on_switch = bump(state.slots_since_on_switch);
        }
    } else {
        next.slots_since_on_switch = bump(state.slots_since_on_switch);
        next.slots_since_off_switch = bump(state.slots_since_off_switch);
    }
    next.y_prev = y;
    return next;
}

double clamp_delta(double value, double beta) {
    return std::min(0.0, std::max(-beta, value));
}

StepResult finish_step(const OnlineState& state, const SlotInput& sigma,
                       const GeneratorSpec& gen, const ExternalSupplySpec& ext, int y,
                       double delta_now) {
    DispatchResult d = dispatch(gen, ext, sigma, y != 0);
    StepResult r;
    r.y = y;
    r.gen_kw = d.gen_kw;
    r.grid_kw = d.grid_kw;
    r.gas_kw = d.gas_kw;
    r.next = advance(state, y, delta_now, d.gen_kw);
    return r;
}

// Earliest boundary hit of the Delta process inside the window.
// Returns +1 (hit 0), -1 (hit -beta) or 0 (interior throughout), along with
// Delta at the window's first slot.
struct WindowScan {
    int decision = 0;
    double delta_first = 0.0;
};

WindowScan scan_window(const OnlineState& state, std::span<const SlotInput> window,
                       const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                       double slot_len_hours) {
    if (window.empty()) throw std::invalid_argument("look-ahead window must not be empty");
    const double beta = gen.startup_cost;
    WindowScan scan;
    double cur = state.delta_prev;
    for (std::size_t j = 0; j < window.size(); ++j) {
        cur = clamp_delta(cur + slot_delta(gen, ext, window[j], slot_len_hours), beta);
        if (j == 0) scan.delta_first = cur;
        if (cur == -beta) {
            scan.decision = -1;
            break;
        }
        if (cur == 0.0) {
            scan.decision = +1;
            break;
        }
    }
    return scan;
}

} // namespace

OnlineState OnlineState::initial(const GeneratorSpec& gen) {
    OnlineState s;
    s.y_prev = 0;
    s.delta_prev = -gen.startup_cost;
    s.u_prev = 0.0;
    s.slots_since_on_switch = kSaturated;
    s.slots_since_off_switch = kSaturated;
    return s;
}

bool external_only_guard(double alpha) { return 1.0 / alpha <= 3.0 - 2.0 * alpha; }

StepResult chase_step(const OnlineState& state, const SlotInput& sigma,
                      const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                      double slot_len_hours) {
    const double beta = gen.startup_cost;
    double delta_now =
        clamp_delta(state.delta_prev + slot_delta(gen, ext, sigma, slot_len_hours), beta);
    int y;
    if (delta_now == -beta)
        y = 0;
    else if (delta_now == 0.0)
        y = 1;
    else
        y = state.y_prev;
    return finish_step(state, sigma, gen, ext, y, delta_now);
}

StepResult chase_plus_step(const OnlineState& state, const SlotInput& sigma,
                           const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                           double slot_len_hours) {
    if (external_only_guard(alpha(gen, ext))) {
        double delta_now =
            clamp_delta(state.delta_prev + slot_delta(gen, ext, sigma, slot_len_hours),
                        gen.startup_cost);
        StepResult r;
        r.y = 0;
        r.gen_kw = 0.0;
        r.grid_kw = sigma.net_power_kw;
        r.gas_kw = sigma.heat_kw;
        r.next = advance(state, 0, delta_now, 0.0);
        return r;
    }
    return chase_step(state, sigma, gen, ext, slot_len_hours);
}

StepResult chase_lookahead_step(const OnlineState& state, std::span<const SlotInput> window,
                                const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                                double slot_len_hours) {
    WindowScan scan = scan_window(state, window, gen, ext, slot_len_hours);
    int y = scan.decision > 0 ? 1 : scan.decision < 0 ? 0 : state.y_prev;
    return finish_step(state, window[0], gen, ext, y, scan.delta_first);
}

StepResult chase_gen_step(const OnlineState& state, std::span<const SlotInput> window,
                          const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                          double slot_len_hours) {
    WindowScan scan = scan_window(state, window, gen, ext, slot_len_hours);
    int y_ref = scan.decision > 0 ? 1 : scan.decision < 0 ? 0 : state.y_prev;
    double u_ref = dispatch(gen, ext, window[0], y_ref != 0).gen_kw;

    int y = y_ref;
    if (y_ref != state.y_prev) {
        bool allowed = (y_ref == 1) ? state.slots_since_off_switch >= gen.min_off_slots
                                    : state.slots_since_on_switch >= gen.min_on_slots;
        if (!allowed) y = state.y_prev;
    }

    double u = 0.0;
    if (y == 1) {
        if (u_ref >= state.u_prev) {
            double rise = u_ref - state.u_prev;
            u = rise <= gen.ramp_up_kw_per_slot ? u_ref
                                                : state.u_prev + gen.ramp_up_kw_per_slot;
        } else {
            double fall = state.u_prev - u_ref;
            u = fall <= gen.ramp_down_kw_per_slot ? u_ref
                                                  : state.u_prev - gen.ramp_down_kw_per_slot;
        }
    }

    StepResult r;
    r.y = y;
    r.gen_kw = u;
    r.grid_kw = std::max(0.0, window[0].net_power_kw - u);
    r.gas_kw = std::max(0.0, window[0].heat_kw - ext.heat_recovery * u);
    r.next = advance(state, y, scan.delta_first, u);
    return r;
}

StepResult rhc_step(const OnlineState& state, std::span<const SlotInput> window,
                    const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                    double slot_len_hours) {
    if (window.empty()) throw std::invalid_argument("look-ahead window must not be empty");
    const double beta = gen.startup_cost;
    const int W = static_cast<int>(window.size());

    // V[y] = optimal cost of the remaining window given commitment state y
    // entering the slot; free terminal state.
    double v0 = 0.0, v1 = 0.0;
    int first0 = 0, first1 = 0; // argmin first decision when solving from slot 0
    for (int j = W - 1; j >= 0; --j) {
        double psi0 = slot_cost(gen, ext, window[j], false, slot_len_hours);
        double psi1 = slot_cost(gen, ext, window[j], true, slot_len_hours);
        double off_then0 = psi0 + v0;
        double on_then0 = psi1 + beta + v1;
        double off_then1 = psi0 + v0; // shutting down is free
        double on_then1 = psi1 + v1;
        double n0, n1;
        int a0, a1;
        if (off_then0 <= on_then0) {
            n0 = off_then0;
            a0 = 0;
        } else {
            n0 = on_then0;
            a0 = 1;
        }
        if (off_then1 <= on_then1) {
            n1 = off_then1;
            a1 = 0;
        } else {
            n1 = on_then1;
            a1 = 1;
        }
        v0 = n0;
        v1 = n1;
        first0 = a0;
        first1 = a1;
    }
    int y = state.y_prev == 0 ? first0 : first1;

    double delta_now = clamp_delta(
        state.delta_prev + slot_delta(gen, ext, window[0], slot_len_hours), beta);
    return finish_step(state, window[0], gen, ext, y, delta_now);
}

StepResult rhc_constrained_step(const OnlineState& state, std::span<const SlotInput> window,
                                const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                                double slot_len_hours, int u_grid_points) {
    if (window.empty()) throw std::invalid_argument("look-ahead window must not be empty");
    if (u_grid_points < 2 || u_grid_points > 101)
        throw ConfigError("rhc_constrained_step: u grid must have 2..101 points");

    const int W = static_cast<int>(window.size());
    const int G = u_grid_points;
    const int D = std::max({gen.min_on_slots, gen.min_off_slots, 1});
    const double beta = gen.startup_cost;
    const double cell = gen.capacity_kw / (G - 1);
    auto grid_u = [&](int g) { return g == G - 1 ? gen.capacity_kw : g * cell; };

    // State: off with dwell d (output 0), or on with dwell d and grid index g.
    // Encoded as: off -> d-1  (D states), on -> D + (d-1)*G + g.
    const int n_states = D + D * G;
    auto off_id = [&](int d) { return d - 1; };
    auto on_id = [&](int d, int g) { return D + (d - 1) * G + g; };

    std::vector<double> value(n_states, 0.0), next_value(n_states);
    // Backward over the window; value[s] = cost of slots j..W-1 given slot j is
    // in state s (excluding the startup charge for entering slot j).
    std::vector<double> psi_on(G);
    for (int j = W - 1; j >= 0; --j) {
        const SlotInput& sig = window[j];
        double psi_off =
            (sig.price * sig.net_power_kw + ext.gas_price_per_kwh * sig.heat_kw) *
            slot_len_hours;
        for (int g = 0; g < G; ++g) {
            double u = grid_u(g);
            double v = std::max(0.0, sig.net_power_kw - u);
            double s = std::max(0.0, sig.heat_kw - ext.heat_recovery * u);
            psi_on[g] = (gen.fuel_cost_per_kwh * u + sig.price * v +
                         ext.gas_price_per_kwh * s + gen.idle_cost_per_h) *
                        slot_len_hours;
        }

        bool terminal = (j == W - 1);
        for (int d = 1; d <= D; ++d) {
            // Off at slot j with dwell d.
            double best = kInf;
            if (terminal) {
                best = 0.0;
            } else {
                best = value[off_id(std::min(D, d + 1))]; // stay off
                if (d >= gen.min_off_slots) {             // start up next slot
                    double u_lim = std::min(gen.capacity_kw, gen.ramp_up_kw_per_slot);
                    for (int g = 0; g < G; ++g) {
                        if (grid_u(g) > u_lim + 1e-12) break;
                        best = std::min(best, beta + value[on_id(1, g)]);
                    }
                }
            }
            next_value[off_id(d)] = psi_off + best;

            // On at slot j with dwell d, each output level.
            for (int g = 0; g < G; ++g) {
                double bestg = kInf;
                if (terminal) {
                    bestg = 0.0;
                } else {
                    double u = grid_u(g);
                    for (int g2 = 0; g2 < G; ++g2) { // stay on, ramp-limited
                        double du = grid_u(g2) - u;
                        if (du > gen.ramp_up_kw_per_slot + 1e-12) break;
                        if (-du > gen.ramp_down_kw_per_slot + 1e-12) continue;
                        bestg = std::min(bestg, value[on_id(std::min(D, d + 1), g2)]);
                    }
                    if (d >= gen.min_on_slots) // shut down (output drops to zero)
                        bestg = std::min(bestg, value[off_id(1)]);
                }
                next_value[on_id(d, g)] = psi_on[g] + bestg;
            }
        }
        std::swap(value, next_value);
    }

    // Choose the first step from the live state.
    int dwell_prev = state.y_prev == 1 ? state.slots_since_on_switch : state.slots_since_off_switch;
    dwell_prev = std::min(dwell_prev, D);
    int best_y = state.y_prev;
    double best_u = 0.0;
    double best_cost = kInf;
    if (state.y_prev == 0) {
        double stay = value[off_id(std::min(D, dwell_prev + 1))];
        best_cost = stay;
        best_y = 0;
        if (dwell_prev >= gen.min_off_slots) {
            double u_lim = std::min(gen.capacity_kw, gen.ramp_up_kw_per_slot);
            for (int g = 0; g < G; ++g) {
                if (grid_u(g) > u_lim + 1e-12) break;
                double c = beta + value[on_id(1, g)];
                if (c < best_cost) {
                    best_cost = c;
                    best_y = 1;
                    best_u = grid_u(g);
                }
            }
        }
    } else {
        for (int g = 0; g < G; ++g) {
            double du = grid_u(g) - state.u_prev;
            if (du > gen.ramp_up_kw_per_slot + 1e-12) break;
            if (-du > gen.ramp_down_kw_per_slot + 1e-12) continue;
            double c = value[on_id(std::min(D, dwell_prev + 1), g)];
            if (c < best_cost) {
                best_cost = c;
                best_y = 1;
                best_u = grid_u(g);
            }
        }
        if (dwell_prev >= gen.min_on_slots) {
            double c = value[off_id(1)];
            if (c < best_cost) {
                best_cost = c;
                best_y = 0;
                best_u = 0.0;
            }
        }
    }

    double delta_now = clamp_delta(
        state.delta_prev + slot_delta(gen, ext, window[0], slot_len_hours), beta);
    StepResult r;
    r.y = best_y;
    r.gen_kw = best_u;
    r.grid_kw = std::max(0.0, window[0].net_power_kw - best_u);
    r.gas_kw = std::max(0.0, window[0].heat_kw - ext.heat_recovery * best_u);
    r.next = advance(state, best_y, delta_now, best_u);
    return r;
}

std::vector<SlotInput> TrueForecast::window(int t, int lookahead) const {
    int last = std::min(trace_.horizon() - 1, t + lookahead);
    return {trace_.slots.begin() + t, trace_.slots.begin() + last + 1};
}

std::string PolicySpec::label() const {
    std::ostringstream os;
    switch (kind) {
        case PolicyKind::Chase: os << (plus ? "chase_plus" : "chase"); break;
        case PolicyKind::ChasePlus: os << "chase_plus"; break;
        case PolicyKind::ChaseGen: os << "chase_gen"; break;
        case PolicyKind::Rhc: os << "rhc"; break;
        case PolicyKind::RhcConstrained: os << "rhc_constrained"; break;
    }
    os << "(w=" << lookahead_slots << ")";
    return os.str();
}

std::pair<Schedule, CostBreakdown> run_policy(const PolicySpec& policy, const Trace& trace,
                                              const ForecastProvider& forecast,
                                              const GeneratorSpec& gen,
                                              const ExternalSupplySpec& ext, int n_gens) {
    if (n_gens < 1) throw ConfigError("run_policy: n_gens must be >= 1");
    if (policy.lookahead_slots < 0) throw ConfigError("run_policy: lookahead must be >= 0");
    validate_params(gen, ext);
    validate_trace(ext, trace);

    const int T = trace.horizon();
    const double l = trace.slot_len_hours;
    const double cap_a = gen.capacity_kw;
    const double cap_h = ext.heat_recovery * gen.capacity_kw;
    // With look-ahead, external-only supply is only the better worst case when
    // it beats the look-ahead tracking ratio, so the guard compares against
    // 3 - 2g(alpha, w). At w = 0 this is the plain parameter guard.
    bool plus_guard = false;
    if (policy.kind == PolicyKind::ChasePlus || policy.plus) {
        double a = alpha(gen, ext);
        double g = g_lookahead(a, policy.lookahead_slots * l, gen);
        plus_guard = 1.0 / a <= 3.0 - 2.0 * g;
    }

    std::vector<OnlineState> states(n_gens, OnlineState::initial(gen));
    Schedule sched = Schedule::empty(n_gens, T);

    std::vector<std::vector<SlotInput>> layer_windows(n_gens);
    for (int t = 0; t < T; ++t) {
        std::vector<SlotInput> win = forecast.window(t, policy.lookahead_slots);
        if (win.empty()) throw ConfigError("run_policy: forecast returned an empty window");

        // Slice each window slot bottom-up, mirroring the demand dispatcher.
        for (int n = 0; n < n_gens; ++n) layer_windows[n].assign(win.size(), SlotInput{});
        double top_a = 0.0, top_h = 0.0;
        for (std::size_t j = 0; j < win.size(); ++j) {
            double rest_a = win[j].net_power_kw;
            double rest_h = win[j].heat_kw;
            for (int n = 0; n < n_gens; ++n) {
                double la = std::min(cap_a, rest_a);
                double lh = std::min(cap_h, rest_h);
                rest_a -= la;
                rest_h -= lh;
                layer_windows[n][j] = {la, lh, win[j].price};
            }
            if (j == 0) {
                top_a = std::max(0.0, rest_a);
                top_h = std::max(0.0, rest_h);
            }
        }

        SlotDecision& dec = sched.slots[t];
        dec.grid_kw = top_a;
        dec.gas_kw = top_h;
        for (int n = 0; n < n_gens; ++n) {
            std::span<const SlotInput> w(layer_windows[n]);
            StepResult step;
            if (plus_guard) {
                const SlotInput& sig = layer_windows[n][0];
                double delta_now = clamp_delta(
                    states[n].delta_prev + slot_delta(gen, ext, sig, l), gen.startup_cost);
                step.y = 0;
                step.gen_kw = 0.0;
                step.grid_kw = sig.net_power_kw;
                step.gas_kw = sig.heat_kw;
                step.next = advance(states[n], 0, delta_now, 0.0);
            } else {
                switch (policy.kind) {
                    case PolicyKind::Chase:
                    case PolicyKind::ChasePlus:
                        step = chase_lookahead_step(states[n], w, gen, ext, l);
                        break;
                    case PolicyKind::ChaseGen:
                        step = chase_gen_step(states[n], w, gen, ext, l);
                        break;
                    case PolicyKind::Rhc:
                        step = rhc_step(states[n], w, gen, ext, l);
                        break;
                    case PolicyKind::RhcConstrained:
                        step = rhc_constrained_step(states[n], w, gen, ext, l,
                                                    policy.u_grid_points);
                        break;
                }
            }
            states[n] = step.next;
            dec.on[n] = static_cast<std::uint8_t>(step.y);
            dec.gen_kw[n] = step.gen_kw;
            dec.grid_kw += step.grid_kw;
            dec.gas_kw += step.gas_kw;
        }
    }

    CostBreakdown cost = total_cost(sched, trace, gen, ext);
    return {std::move(sched), cost};
}

Schedule chase_multi_run(const Trace& trace, const GeneratorSpec& gen,
                         const ExternalSupplySpec& ext, int n_gens, int lookahead_slots,
                         bool plus) {
    PolicySpec spec;
    spec.kind = PolicyKind::Chase;
    spec.lookahead_slots = lookahead_slots;
    spec.plus = plus;
    TrueForecast forecast(trace);
    return run_policy(spec, trace, forecast, gen, ext, n_gens).first;
}

} // namespace chase
