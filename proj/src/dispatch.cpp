#include "chase/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chase {

double net_demand(double elec_demand_kw, double wind_kw) {
    if (!(elec_demand_kw >= 0.0) || !(wind_kw >= 0.0))
        throw DataError("net_demand: demand and wind must be nonnegative");
    return std::max(0.0, elec_demand_kw - wind_kw);
}

DispatchResult dispatch(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                        const SlotInput& sigma, bool on) {
    validate_params(gen, ext);
    validate_slot(ext, sigma);

    const double a = sigma.net_power_kw;
    const double h = sigma.heat_kw;
    const double p = sigma.price;
    const double eta = ext.heat_recovery;
    const double co = gen.fuel_cost_per_kwh;

    double u = 0.0;
    if (on) {
        if (p + eta * ext.gas_price_per_kwh <= co) {
            u = 0.0;
        } else if (p < co) {
            // co < p + eta*c_g here, so eta > 0 and the heat-driven case is live.
            u = std::min({h / eta, a, gen.capacity_kw});
        } else { // co <= p
            u = std::min(a, gen.capacity_kw);
        }
    }
    DispatchResult r;
    r.gen_kw = u;
    r.grid_kw = std::max(0.0, a - u);
    r.gas_kw = std::max(0.0, h - eta * u);
    return r;
}

double slot_cost(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                 const SlotInput& sigma, bool on, double slot_len_hours) {
    DispatchResult d = dispatch(gen, ext, sigma, on);
    double rate = gen.fuel_cost_per_kwh * d.gen_kw + sigma.price * d.grid_kw +
                  ext.gas_price_per_kwh * d.gas_kw + (on ? gen.idle_cost_per_h : 0.0);
    return rate * slot_len_hours;
}

double slot_delta(const GeneratorSpec& gen, const ExternalSupplySpec& ext,
                  const SlotInput& sigma, double slot_len_hours) {
    return slot_cost(gen, ext, sigma, false, slot_len_hours) -
           slot_cost(gen, ext, sigma, true, slot_len_hours);
}

double baseline_cost(const Trace& trace, const ExternalSupplySpec& ext) {
    // Accumulated exactly like total_cost's component sums so that the
    // definitional identity baseline == total_cost(all-off schedule) is
    // bitwise, not just approximate.
    double grid = 0.0, gas = 0.0;
    for (const SlotInput& s : trace.slots) {
        grid += s.price * s.net_power_kw * trace.slot_len_hours;
        gas += ext.gas_price_per_kwh * s.heat_kw * trace.slot_len_hours;
    }
    return grid + gas + 0.0 + 0.0 + 0.0;
}

std::string Violation::describe() const {
    static const char* names[] = {"output cap",       "electricity balance", "heat balance",
                                  "ramp-up limit",    "ramp-down limit",     "minimum on-time",
                                  "minimum off-time"};
    std::ostringstream os;
    os << names[static_cast<int>(kind)] << " violated at slot " << slot << ", generator "
       << gen << " (slack " << slack << ")";
    return os.str();
}

namespace {

// Relative slack for float comparisons of power balances; the minimal-residual
// construction [a-u]^+ can miss exact equality by an ulp.
double tol(double scale) { return 1e-9 * std::max(1.0, std::fabs(scale)); }

} // namespace

std::vector<Violation> validate_schedule(const Schedule& schedule, const Trace& trace,
                                         const GeneratorSpec& gen,
                                         const ExternalSupplySpec& ext,
                                         const ConstraintFlags& flags) {
    if (schedule.horizon() != trace.horizon())
        throw ConfigError("validate_schedule: schedule and trace lengths differ");

    std::vector<Violation> out;
    const int T = trace.horizon();
    const int N = schedule.n_gens;
    const double L = gen.capacity_kw;

    for (int t = 0; t < T; ++t) {
        const SlotDecision& d = schedule.slots[t];
        if (static_cast<int>(d.on.size()) != N || static_cast<int>(d.gen_kw.size()) != N)
            throw ConfigError("validate_schedule: slot decision width differs from n_gens");
        const SlotInput& sig = trace.slots[t];

        double u_sum = 0.0;
        for (int n = 0; n < N; ++n) {
            double u = d.gen_kw[n];
            double cap = L * d.on[n];
            if (u < -tol(L) || u > cap + tol(L))
                out.push_back({Violation::Kind::OutputCap, t + 1, n, std::max(u - cap, -u)});
            u_sum += u;
        }
        if (u_sum + d.grid_kw < sig.net_power_kw - tol(sig.net_power_kw))
            out.push_back({Violation::Kind::ElecBalance, t + 1, -1,
                           sig.net_power_kw - (u_sum + d.grid_kw)});
        if (ext.heat_recovery * u_sum + d.gas_kw < sig.heat_kw - tol(sig.heat_kw))
            out.push_back({Violation::Kind::HeatBalance, t + 1, -1,
                           sig.heat_kw - (ext.heat_recovery * u_sum + d.gas_kw)});
        if (d.grid_kw < -tol(1.0))
            out.push_back({Violation::Kind::ElecBalance, t + 1, -1, -d.grid_kw});
        if (d.gas_kw < -tol(1.0))
            out.push_back({Violation::Kind::HeatBalance, t + 1, -1, -d.gas_kw});
    }

    if (flags.ramp) {
        for (int n = 0; n < N; ++n) {
            double u_prev = 0.0;
            int y_prev = 0;
            for (int t = 0; t < T; ++t) {
                double u = schedule.slots[t].gen_kw[n];
                int y = schedule.slots[t].on[n];
                double up = u - u_prev;
                double down = u_prev - u;
                if (up > gen.ramp_up_kw_per_slot + tol(L))
                    out.push_back({Violation::Kind::RampUp, t + 1, n,
                                   up - gen.ramp_up_kw_per_slot});
                bool shutdown = (y_prev == 1 && y == 0);
                if (!shutdown && down > gen.ramp_down_kw_per_slot + tol(L))
                    out.push_back({Violation::Kind::RampDown, t + 1, n,
                                   down - gen.ramp_down_kw_per_slot});
                u_prev = u;
                y_prev = y;
            }
        }
    }

    if (flags.min_on_off) {
        for (int n = 0; n < N; ++n) {
            int y_prev = 0;
            for (int t = 0; t < T; ++t) {
                int y = schedule.slots[t].on[n];
                if (y > y_prev) { // switched on at slot t+1; must stay on
                    for (int tau = t + 1; tau < std::min(T, t + gen.min_on_slots); ++tau)
                        if (!schedule.slots[tau].on[n]) {
                            out.push_back({Violation::Kind::MinOn, tau + 1, n,
                                           static_cast<double>(t + gen.min_on_slots - tau)});
                            break;
                        }
                }
                if (y < y_prev) { // switched off; must stay off
                    for (int tau = t + 1; tau < std::min(T, t + gen.min_off_slots); ++tau)
                        if (schedule.slots[tau].on[n]) {
                            out.push_back({Violation::Kind::MinOff, tau + 1, n,
                                           static_cast<double>(t + gen.min_off_slots - tau)});
                            break;
                        }
                }
                y_prev = y;
            }
        }
    }

    return out;
}

CostBreakdown total_cost(const Schedule& schedule, const Trace& trace,
                         const GeneratorSpec& gen, const ExternalSupplySpec& ext) {
    if (schedule.horizon() != trace.horizon())
        throw ConfigError("total_cost: schedule and trace lengths differ");
    auto violations = validate_schedule(schedule, trace, gen, ext, ConstraintFlags{});
    if (!violations.empty())
        throw ValidationError("total_cost: infeasible schedule: " + violations.front().describe());

    const double l = trace.slot_len_hours;
    CostBreakdown c;
    std::vector<std::uint8_t> y_prev(schedule.n_gens, 0);
    for (int t = 0; t < trace.horizon(); ++t) {
        const SlotDecision& d = schedule.slots[t];
        const SlotInput& sig = trace.slots[t];
        c.grid_cost += sig.price * d.grid_kw * l;
        c.gas_cost += ext.gas_price_per_kwh * d.gas_kw * l;
        for (int n = 0; n < schedule.n_gens; ++n) {
            c.gen_fuel_cost += gen.fuel_cost_per_kwh * d.gen_kw[n] * l;
            c.gen_idle_cost += gen.idle_cost_per_h * d.on[n] * l;
            if (d.on[n] > y_prev[n]) c.startup_cost += gen.startup_cost;
        }
        y_prev = d.on;
    }
    c.total = c.grid_cost + c.gas_cost + c.gen_fuel_cost + c.gen_idle_cost + c.startup_cost;
    return c;
}

} // namespace chase
