#include "chase/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace chase {

double alpha(const GeneratorSpec& gen, const ExternalSupplySpec& ext) {
    validate_params(gen, ext);
    return (gen.fuel_cost_per_kwh + gen.idle_cost_per_h / gen.capacity_kw) /
           (ext.price_max + ext.heat_recovery * ext.gas_price_per_kwh);
}

double g_lookahead(double alpha_value, double omega_hours, const GeneratorSpec& gen,
                   bool* degenerate) {
    if (degenerate) *degenerate = false;
    if (!(alpha_value > 0.0) || alpha_value > 1.0)
        throw ConfigError("g_lookahead: alpha must lie in (0, 1]");
    if (omega_hours < 0.0) throw ConfigError("g_lookahead: window must be nonnegative");
    if (alpha_value == 1.0) return 1.0;
    if (omega_hours == 0.0) return alpha_value;
    if (gen.idle_cost_per_h == 0.0) {
        // The closed form divides by c_m; no finite limit is defined here.
        if (degenerate) *degenerate = true;
        return alpha_value;
    }
    const double L = gen.capacity_kw;
    const double co = gen.fuel_cost_per_kwh;
    const double cm = gen.idle_cost_per_h;
    double numer = gen.startup_cost * (L * co + cm / (1.0 - alpha_value));
    double denom = omega_hours * (L * co + cm) * cm;
    return alpha_value + (1.0 - alpha_value) / (1.0 + numer / denom);
}

CrBound cr_bound(BoundKind kind, const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                 int lookahead_slots, double slot_len_hours) {
    if (lookahead_slots < 0) throw ConfigError("cr_bound: lookahead must be >= 0");
    if (!(slot_len_hours > 0.0)) throw ConfigError("cr_bound: slot length must be positive");

    CrBound b;
    b.alpha = alpha(gen, ext);
    double omega_hours =
        (kind == BoundKind::ChaseS || kind == BoundKind::ChaseSPlus)
            ? 0.0
            : lookahead_slots * slot_len_hours;
    b.g_value = g_lookahead(b.alpha, omega_hours, gen);
    double tracking = 3.0 - 2.0 * b.g_value;
    double external_only = 1.0 / b.alpha;
    b.components["tracking_ratio"] = tracking;
    b.components["external_only_ratio"] = external_only;

    switch (kind) {
        case BoundKind::ChaseS:
            b.bound = tracking;
            break;
        case BoundKind::ChaseSPlus:
        case BoundKind::ChaseLk:
        case BoundKind::ChaseMulti:
            b.bound = std::min(tracking, external_only);
            break;
        case BoundKind::ChaseGen: {
            const double L = gen.capacity_kw;
            const double co = gen.fuel_cost_per_kwh;
            const double cm = gen.idle_cost_per_h;
            if (cm == 0.0)
                throw ConfigError("cr_bound: slow-generator factor undefined for c_m = 0");
            const double unit_ext = ext.price_max + ext.gas_price_per_kwh * ext.heat_recovery;
            // The ramp penalty compares capacity against how far output can
            // move in one slot, so the per-slot rates enter unconverted; the
            // dwell penalty multiplies per-hour rates by a duration, so dwell
            // times convert to hours.
            double r_up = gen.ramp_up_kw_per_slot;
            double r_dw = gen.ramp_down_kw_per_slot;
            double t_on = gen.min_on_slots * slot_len_hours;
            double t_off = gen.min_off_slots * slot_len_hours;

            double ramp_up_term =
                (unit_ext - co) / (L * co + cm) * std::max(0.0, L - r_up);
            double ramp_down_term = co / cm * std::max(0.0, L - r_dw);
            double r1 = 1.0 + std::max(ramp_up_term, ramp_down_term);

            double r2;
            if (t_on == 0.0 && t_off == 0.0) {
                r2 = 1.0;
            } else if (gen.startup_cost == 0.0) {
                throw ConfigError("cr_bound: slow-generator factor undefined for beta = 0");
            } else {
                r2 = (gen.startup_cost + cm * t_on) / gen.startup_cost +
                     L * unit_ext * (t_on + t_off) / gen.startup_cost;
            }
            b.components["ramp_penalty_factor"] = r1;
            b.components["dwell_penalty_factor"] = r2;
            b.bound = tracking * std::max(r1, r2);
            break;
        }
    }
    return b;
}

double empirical_cr(double policy_cost, double offline_cost) {
    if (offline_cost > 0.0) return policy_cost / offline_cost;
    if (policy_cost > 0.0) return std::numeric_limits<double>::infinity();
    return 1.0;
}

Trace adversarial_trace(const std::function<int(const SlotInput&)>& algorithm,
                        const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                        int horizon, double slot_len_hours) {
    if (horizon < 1) throw ConfigError("adversarial_trace: horizon must be >= 1");
    validate_params(gen, ext);

    Trace trace;
    trace.slot_len_hours = slot_len_hours;
    trace.slots.reserve(horizon);
    int y_prev = 0;
    for (int t = 0; t < horizon; ++t) {
        double a = gen.capacity_kw * (1 - y_prev);
        SlotInput sigma{a, ext.heat_recovery * a, ext.price_max};
        trace.slots.push_back(sigma);
        y_prev = algorithm(sigma);
        if (y_prev != 0 && y_prev != 1)
            throw ConfigError("adversarial_trace: algorithm returned a non-binary commitment");
    }
    return trace;
}

std::function<int(const SlotInput&)> make_step_algorithm(const PolicySpec& policy,
                                                         const GeneratorSpec& gen,
                                                         const ExternalSupplySpec& ext,
                                                         double slot_len_hours) {
    auto state = std::make_shared<OnlineState>(OnlineState::initial(gen));
    PolicyKind kind = policy.kind;
    return [state, kind, gen, ext, slot_len_hours](const SlotInput& sigma) {
        StepResult r;
        std::span<const SlotInput> window(&sigma, 1);
        switch (kind) {
            case PolicyKind::Chase: r = chase_step(*state, sigma, gen, ext, slot_len_hours); break;
            case PolicyKind::ChasePlus:
                r = chase_plus_step(*state, sigma, gen, ext, slot_len_hours);
                break;
            case PolicyKind::ChaseGen:
                r = chase_gen_step(*state, window, gen, ext, slot_len_hours);
                break;
            case PolicyKind::Rhc: r = rhc_step(*state, window, gen, ext, slot_len_hours); break;
            case PolicyKind::RhcConstrained:
                r = rhc_constrained_step(*state, window, gen, ext, slot_len_hours);
                break;
        }
        *state = r.next;
        return r.y;
    };
}

DispatchResult dispatch_oracle(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                               const SlotInput& sigma, bool on, int grid_points) {
    if (grid_points < 2) throw ConfigError("dispatch_oracle: need at least 2 grid points");
    const double a = sigma.net_power_kw;
    const double h = sigma.heat_kw;
    if (!on) return {0.0, a, h};

    const double L = gen.capacity_kw;
    double best_u = 0.0;
    double best_rate = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        double u = (i == grid_points - 1) ? L : L * i / (grid_points - 1);
        double rate = gen.fuel_cost_per_kwh * u + sigma.price * std::max(0.0, a - u) +
                      ext.gas_price_per_kwh * std::max(0.0, h - ext.heat_recovery * u) +
                      gen.idle_cost_per_h;
        if (rate < best_rate) {
            best_rate = rate;
            best_u = u;
        }
    }
    return {best_u, std::max(0.0, a - best_u),
            std::max(0.0, h - ext.heat_recovery * best_u)};
}

ExhaustiveResult exhaustive_offline(const Trace& trace, const GeneratorSpec& gen,
                                    const ExternalSupplySpec& ext) {
    const int T = trace.horizon();
    if (T > 20) throw ConfigError("exhaustive_offline: refusing horizons beyond 20 slots");
    validate_params(gen, ext);
    validate_trace(ext, trace);

    std::vector<double> psi0(T), psi1(T);
    for (int t = 0; t < T; ++t) {
        psi0[t] = slot_cost(gen, ext, trace.slots[t], false, trace.slot_len_hours);
        psi1[t] = slot_cost(gen, ext, trace.slots[t], true, trace.slot_len_hours);
    }

    const double beta = gen.startup_cost;
    std::uint32_t best_mask = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    int best_on = 0;

    auto lex_less = [T](std::uint32_t a, std::uint32_t b) {
        for (int t = 0; t < T; ++t) {
            int ya = (a >> t) & 1u, yb = (b >> t) & 1u;
            if (ya != yb) return ya < yb;
        }
        return false;
    };

    for (std::uint32_t mask = 0; mask < (1u << T); ++mask) {
        double cost = 0.0;
        int y_prev = 0;
        for (int t = 0; t < T; ++t) {
            int y = (mask >> t) & 1u;
            cost += (y ? psi1[t] : psi0[t]) + (y > y_prev ? beta : 0.0);
            y_prev = y;
        }
        int on = std::popcount(mask);
        bool better = cost < best_cost ||
                      (cost == best_cost &&
                       (on < best_on || (on == best_on && lex_less(mask, best_mask))));
        if (better) {
            best_cost = cost;
            best_mask = mask;
            best_on = on;
        }
    }

    ExhaustiveResult result;
    result.objective = best_cost;
    result.schedule = Schedule::empty(1, T);
    for (int t = 0; t < T; ++t) {
        bool on = (best_mask >> t) & 1u;
        DispatchResult d = dispatch(gen, ext, trace.slots[t], on);
        SlotDecision& dec = result.schedule.slots[t];
        dec.on[0] = on ? 1 : 0;
        dec.gen_kw[0] = d.gen_kw;
        dec.grid_kw = d.grid_kw;
        dec.gas_kw = d.gas_kw;
    }
    return result;
}

double count_dp_offline(const Trace& trace, const GeneratorSpec& gen,
                        const ExternalSupplySpec& ext, int n_gens) {
    const int T = trace.horizon();
    if (n_gens < 1 || n_gens > 8)
        throw ConfigError("count_dp_offline: n_gens must be in [1, 8]");
    if (T > 100) throw ConfigError("count_dp_offline: refusing horizons beyond 100 slots");
    validate_params(gen, ext);
    validate_trace(ext, trace);

    const double l = trace.slot_len_hours;
    const double beta = gen.startup_cost;
    const int K = n_gens;

    // Slot cost with k committed units: aggregate dispatch at capacity k*L.
    auto slot_cost_k = [&](const SlotInput& sig, int k) {
        const double a = sig.net_power_kw, h = sig.heat_kw, p = sig.price;
        const double eta = ext.heat_recovery;
        const double co = gen.fuel_cost_per_kwh;
        double u = 0.0;
        if (k > 0) {
            double cap = k * gen.capacity_kw;
            if (p + eta * ext.gas_price_per_kwh <= co)
                u = 0.0;
            else if (p < co)
                u = std::min({h / eta, a, cap});
            else
                u = std::min(a, cap);
        }
        double rate = gen.fuel_cost_per_kwh * u + p * std::max(0.0, a - u) +
                      ext.gas_price_per_kwh * std::max(0.0, h - ext.heat_recovery * u) +
                      k * gen.idle_cost_per_h;
        return rate * l;
    };

    std::vector<double> cost(K + 1, std::numeric_limits<double>::infinity());
    cost[0] = 0.0;
    std::vector<double> next(K + 1);
    for (int t = 0; t < T; ++t) {
        for (int k = 0; k <= K; ++k) {
            double step = slot_cost_k(trace.slots[t], k);
            double best = std::numeric_limits<double>::infinity();
            for (int kp = 0; kp <= K; ++kp) {
                if (cost[kp] == std::numeric_limits<double>::infinity()) continue;
                double c = cost[kp] + (step + beta * std::max(0, k - kp));
                best = std::min(best, c);
            }
            next[k] = best;
        }
        cost = next;
    }
    return *std::min_element(cost.begin(), cost.end());
}

double constrained_offline(const Trace& trace, const GeneratorSpec& gen,
                           const ExternalSupplySpec& ext, int u_grid_points) {
    const int T = trace.horizon();
    if (T > 60) throw ConfigError("constrained_offline: refusing horizons beyond 60 slots");
    if (u_grid_points < 2 || u_grid_points > 101)
        throw ConfigError("constrained_offline: u grid must have 2..101 points");
    validate_params(gen, ext);
    validate_trace(ext, trace);

    const int G = u_grid_points;
    const int D = std::max({gen.min_on_slots, gen.min_off_slots, 1});
    const double l = trace.slot_len_hours;
    const double beta = gen.startup_cost;
    const double cell = gen.capacity_kw / (G - 1);
    auto grid_u = [&](int g) { return g == G - 1 ? gen.capacity_kw : g * cell; };

    const double inf = std::numeric_limits<double>::infinity();
    auto off_id = [&](int d) { return d - 1; };
    auto on_id = [&](int d, int g) { return D + (d - 1) * G + g; };
    const int S = D + D * G;

    // value[s] = cheapest cost of slots 1..t with slot t in state s.
    std::vector<double> value(S, inf), next(S, inf);

    auto psi_off_at = [&](const SlotInput& sig) {
        return (sig.price * sig.net_power_kw + ext.gas_price_per_kwh * sig.heat_kw) * l;
    };
    auto psi_on_at = [&](const SlotInput& sig, double u) {
        double v = std::max(0.0, sig.net_power_kw - u);
        double s = std::max(0.0, sig.heat_kw - ext.heat_recovery * u);
        return (gen.fuel_cost_per_kwh * u + sig.price * v + ext.gas_price_per_kwh * s +
                gen.idle_cost_per_h) *
               l;
    };

    for (int t = 0; t < T; ++t) {
        const SlotInput& sig = trace.slots[t];
        std::fill(next.begin(), next.end(), inf);
        double psi_off = psi_off_at(sig);
        std::vector<double> psi_on(G);
        for (int g = 0; g < G; ++g) psi_on[g] = psi_on_at(sig, grid_u(g));

        if (t == 0) {
            // Initially off with saturated dwell: may stay off or start up.
            next[off_id(D)] = psi_off;
            double u_lim = std::min(gen.capacity_kw, gen.ramp_up_kw_per_slot);
            for (int g = 0; g < G; ++g) {
                if (grid_u(g) > u_lim + 1e-12) break;
                next[on_id(1, g)] = beta + psi_on[g];
            }
        } else {
            for (int d = 1; d <= D; ++d) {
                double from_off = value[off_id(d)];
                if (from_off < inf) {
                    int d2 = std::min(D, d + 1);
                    next[off_id(d2)] = std::min(next[off_id(d2)], from_off + psi_off);
                    if (d >= gen.min_off_slots) {
                        double u_lim = std::min(gen.capacity_kw, gen.ramp_up_kw_per_slot);
                        for (int g = 0; g < G; ++g) {
                            if (grid_u(g) > u_lim + 1e-12) break;
                            double c = from_off + (beta + psi_on[g]);
                            next[on_id(1, g)] = std::min(next[on_id(1, g)], c);
                        }
                    }
                }
                for (int g = 0; g < G; ++g) {
                    double from_on = value[on_id(d, g)];
                    if (from_on == inf) continue;
                    double u = grid_u(g);
                    int d2 = std::min(D, d + 1);
                    for (int g2 = 0; g2 < G; ++g2) {
                        double du = grid_u(g2) - u;
                        if (du > gen.ramp_up_kw_per_slot + 1e-12) break;
                        if (-du > gen.ramp_down_kw_per_slot + 1e-12) continue;
                        double c = from_on + psi_on[g2];
                        next[on_id(d2, g2)] = std::min(next[on_id(d2, g2)], c);
                    }
                    if (d >= gen.min_on_slots) { // shut down, output drops to zero
                        double c = from_on + psi_off;
                        next[off_id(1)] = std::min(next[off_id(1)], c);
                    }
                }
            }
        }
        std::swap(value, next);
    }
    return *std::min_element(value.begin(), value.end());
}

} // namespace chase
