#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "chase/rng.hpp"
#include "chase/types.hpp"

namespace chase::testing {

// Desk-scale parameter set used across the examples. alpha = 1.1/2.5 = 0.44.
inline GeneratorSpec s0_gen() { return {1.0, 2.0, 0.1, 1.0, 0, 0, kInf, kInf}; }
inline ExternalSupplySpec s0_ext() { return {0.5, 1.0, 0.01, 2.0}; }

// Campus-scale set: 3 MW units, time-of-use tariff band, 3 h dwell, 1 MW/h ramps.
inline GeneratorSpec p1_gen() { return {3000.0, 1400.0, 110.0, 0.051, 3, 3, 1000.0, 1000.0}; }
inline ExternalSupplySpec p1_ext() { return {0.0179, 1.8, 0.056, 0.232}; }

struct ParamPair {
    GeneratorSpec gen;
    ExternalSupplySpec ext;
};

// Random S0-family parameters satisfying both model assumptions, with
// c_m > 0 so every bound expression is well defined.
inline ParamPair random_params(Rng& rng, bool allow_zero_eta = true) {
    ParamPair p;
    p.gen.capacity_kw = rng.uniform(0.5, 3.0);
    p.gen.startup_cost = rng.uniform(0.5, 5.0);
    p.gen.idle_cost_per_h = rng.uniform(0.02, 0.4);
    p.gen.fuel_cost_per_kwh = rng.uniform(0.3, 1.5);

    double eta = (allow_zero_eta && rng.uniform01() < 0.2) ? 0.0 : rng.uniform(0.2, 2.0);
    p.ext.heat_recovery = eta;
    // A1: c_o >= eta * c_g.
    p.ext.gas_price_per_kwh =
        eta > 0.0 ? rng.uniform(0.0, p.gen.fuel_cost_per_kwh / eta) : rng.uniform(0.0, 0.8);
    // A2: P_max above the full-output co-generation unit cost.
    double unit = p.gen.fuel_cost_per_kwh + p.gen.idle_cost_per_h / p.gen.capacity_kw -
                  eta * p.ext.gas_price_per_kwh;
    p.ext.price_max = unit * rng.uniform(1.1, 3.0);
    p.ext.price_min = rng.uniform(0.0, 0.5) * std::min(p.ext.price_max, unit);
    return p;
}

// Regime-switching random trace: price, demand and heat levels persist over
// geometric runs so the Delta process produces nontrivial segment structure.
inline Trace random_trace(Rng& rng, const ParamPair& p, int horizon,
                          double slot_len_hours = 1.0) {
    Trace trace;
    trace.slot_len_hours = slot_len_hours;
    trace.slots.reserve(horizon);
    double a_level = rng.uniform(0.0, 2.0 * p.gen.capacity_kw);
    double h_level = rng.uniform(0.0, 2.0 * p.ext.heat_recovery * p.gen.capacity_kw + 0.5);
    double price = rng.uniform(p.ext.price_min, p.ext.price_max);
    for (int t = 0; t < horizon; ++t) {
        if (rng.uniform01() < 0.25) {
            a_level = rng.uniform01() < 0.25 ? 0.0 : rng.uniform(0.0, 2.0 * p.gen.capacity_kw);
            h_level = rng.uniform(0.0, 2.0 * p.ext.heat_recovery * p.gen.capacity_kw + 0.5);
        }
        if (rng.uniform01() < 0.2) {
            double r = rng.uniform01();
            if (r < 0.25)
                price = p.ext.price_max;
            else if (r < 0.4)
                price = p.ext.price_min;
            else
                price = rng.uniform(p.ext.price_min, p.ext.price_max);
        }
        trace.slots.push_back({a_level, h_level, price});
    }
    return trace;
}

inline bool close_rel(double a, double b, double rel = 1e-9) {
    return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

} // namespace chase::testing
