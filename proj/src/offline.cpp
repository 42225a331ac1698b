#include "chase/offline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "chase/layering.hpp"

namespace chase {

DeltaSeries accumulate_delta(const std::vector<double>& deltas, double beta) {
    DeltaSeries d;
    d.beta = beta;
    d.values.reserve(deltas.size() + 1);
    d.values.push_back(-beta);
    double cur = -beta;
    for (double step : deltas) {
        cur = std::min(0.0, std::max(-beta, cur + step));
        d.values.push_back(cur);
    }
    return d;
}

DeltaSeries delta_process(const Trace& trace, const GeneratorSpec& gen,
                          const ExternalSupplySpec& ext) {
    std::vector<double> deltas;
    deltas.reserve(trace.slots.size());
    for (const SlotInput& s : trace.slots)
        deltas.push_back(slot_delta(gen, ext, s, trace.slot_len_hours));
    return accumulate_delta(deltas, gen.startup_cost);
}

std::vector<CriticalSegment> critical_segments(const DeltaSeries& d) {
    const int T = d.horizon();
    if (T < 0 || d.values.empty()) throw DataError("delta series: empty");
    if (d.values[0] != -d.beta) throw DataError("delta series: must start at -beta");
    for (double v : d.values)
        if (!(v >= -d.beta) || !(v <= 0.0))
            throw DataError("delta series: value outside [-beta, 0]");

    // Scan for boundary-to-boundary excursions. `anchor` is the last slot at
    // the current boundary; an excursion that reaches the far boundary yields
    // the pair (anchor, first hit).
    struct Pair {
        int start; // last slot at the old boundary
        int end;   // first slot at the new boundary
    };
    std::vector<Pair> pairs;
    double cur = -d.beta;
    int anchor = 0;
    bool degenerate = d.beta == 0.0; // both boundaries coincide; whole range is Start
    if (!degenerate) {
        for (int t = 1; t <= T; ++t) {
            double v = d.values[t];
            if (v == cur) {
                anchor = t;
            } else if (v == 0.0 || v == -d.beta) {
                pairs.push_back({anchor, t});
                cur = v;
                anchor = t;
            }
        }
    }

    std::vector<CriticalSegment> segments;
    if (pairs.empty()) {
        segments.push_back({CriticalSegment::Kind::Start, 1, T, std::nullopt});
        return segments;
    }

    if (pairs.front().start >= 1)
        segments.push_back({CriticalSegment::Kind::Start, 1, pairs.front().start, std::nullopt});

    // Each segment runs through the last touch of the boundary it reached:
    // interior segments end where the next excursion starts, and the final
    // one ends at the final anchor, so a trailing run pinned at the boundary
    // stays inside the segment. End covers only the strictly interior tail.
    const int m = static_cast<int>(pairs.size());
    for (int i = 0; i < m; ++i) {
        int first = pairs[i].start + 1;
        int last = (i + 1 < m) ? pairs[i + 1].start : anchor;
        auto kind = (d.values[pairs[i].start] == -d.beta) ? CriticalSegment::Kind::Type1
                                                          : CriticalSegment::Kind::Type2;
        segments.push_back({kind, first, last, pairs[i].end});
    }

    if (anchor < T)
        segments.push_back({CriticalSegment::Kind::End, anchor + 1, T, std::nullopt});

    return segments;
}

Schedule ofa(const Trace& trace, const GeneratorSpec& gen, const ExternalSupplySpec& ext) {
    if (!gen.fast_responding())
        throw ConfigError(
            "ofa: requires a fast-responding generator (no dwell times, unconstrained ramps)");
    validate_params(gen, ext);
    validate_trace(ext, trace);

    DeltaSeries d = delta_process(trace, gen, ext);
    auto segments = critical_segments(d);

    Schedule sched = Schedule::empty(1, trace.horizon());
    for (const CriticalSegment& seg : segments) {
        bool on = seg.kind == CriticalSegment::Kind::Type1;
        for (int t = seg.first; t <= seg.last; ++t) {
            DispatchResult r = dispatch(gen, ext, trace.slots[t - 1], on);
            SlotDecision& dec = sched.slots[t - 1];
            dec.on[0] = on ? 1 : 0;
            dec.gen_kw[0] = r.gen_kw;
            dec.grid_kw = r.grid_kw;
            dec.gas_kw = r.gas_kw;
        }
    }
    return sched;
}

DpResult dp_offline(const Trace& trace, const GeneratorSpec& gen,
                    const ExternalSupplySpec& ext) {
    validate_params(gen, ext);
    validate_trace(ext, trace);

    const int T = trace.horizon();
    const double beta = gen.startup_cost;
    const double inf = kInf;

    // cost[y] = best cost of a prefix ending in state y; parent[t][y] = chosen
    // predecessor. Per-slot terms are added as one rounded sum each so the
    // objective is bitwise comparable with the exhaustive oracle.
    std::vector<std::array<std::int8_t, 2>> parent(T);
    double cost0 = 0.0, cost1 = inf;
    for (int t = 0; t < T; ++t) {
        double psi0 = slot_cost(gen, ext, trace.slots[t], false, trace.slot_len_hours);
        double psi1 = slot_cost(gen, ext, trace.slots[t], true, trace.slot_len_hours);

        double stay0 = cost0 + psi0;
        double from1 = cost1 == inf ? inf : cost1 + psi0;
        double next0;
        if (stay0 <= from1) { // tie: prefer staying off
            next0 = stay0;
            parent[t][0] = 0;
        } else {
            next0 = from1;
            parent[t][0] = 1;
        }

        double start1 = cost0 + (psi1 + beta);
        double stay1 = cost1 == inf ? inf : cost1 + psi1;
        double next1;
        if (start1 < stay1) { // tie: prefer the path that was off
            next1 = start1;
            parent[t][1] = 0;
        } else {
            next1 = stay1;
            parent[t][1] = 1;
        }

        cost0 = next0;
        cost1 = next1;
    }

    DpResult result;
    result.schedule = Schedule::empty(1, T);
    int y = (cost0 <= cost1) ? 0 : 1; // tie: prefer off
    result.objective = (y == 0) ? cost0 : cost1;
    for (int t = T - 1; t >= 0; --t) {
        result.schedule.slots[t].on[0] = static_cast<std::uint8_t>(y);
        y = parent[t][y];
    }
    for (int t = 0; t < T; ++t) {
        SlotDecision& dec = result.schedule.slots[t];
        DispatchResult r = dispatch(gen, ext, trace.slots[t], dec.on[0] != 0);
        dec.gen_kw[0] = r.gen_kw;
        dec.grid_kw = r.grid_kw;
        dec.gas_kw = r.gas_kw;
    }
    return result;
}

Schedule ofa_multi(const Trace& trace, const GeneratorSpec& gen,
                   const ExternalSupplySpec& ext, int n_gens) {
    if (n_gens < 1) throw ConfigError("ofa_multi: n_gens must be >= 1");
    if (!gen.fast_responding())
        throw ConfigError("ofa_multi: requires a fast-responding generator");
    validate_params(gen, ext);
    validate_trace(ext, trace);

    LayeredTraces layered = slice_demands(trace, gen, ext, n_gens);
    const int T = trace.horizon();
    Schedule combined = Schedule::empty(n_gens, T);
    for (int t = 0; t < T; ++t) {
        combined.slots[t].grid_kw = layered.top_a[t];
        combined.slots[t].gas_kw = layered.top_h[t];
    }
    for (int n = 0; n < n_gens; ++n) {
        Schedule layer = ofa(layered.layers[n], gen, ext);
        for (int t = 0; t < T; ++t) {
            combined.slots[t].on[n] = layer.slots[t].on[0];
            combined.slots[t].gen_kw[n] = layer.slots[t].gen_kw[0];
            combined.slots[t].grid_kw += layer.slots[t].grid_kw;
            combined.slots[t].gas_kw += layer.slots[t].gas_kw;
        }
    }
    return combined;
}

} // namespace chase
