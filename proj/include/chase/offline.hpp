#pragma once

#include <optional>
#include <vector>

#include "chase/dispatch.hpp"
#include "chase/types.hpp"

namespace chase {

// The clamped cumulative cost-advantage process:
//   Delta(0) = -beta,  Delta(t) = min{0, max{-beta, Delta(t-1) + delta(t)}}.
// Clamping with exact min/max makes boundary hits bitwise equal to 0 / -beta,
// so the equality tests in the online algorithms need no epsilon.
struct DeltaSeries {
    std::vector<double> values; // Delta(0..T), values[0] == -beta
    double beta = 0.0;

    int horizon() const { return static_cast<int>(values.size()) - 1; }
};

// Clamp the recursion over an explicit per-slot advantage sequence.
DeltaSeries accumulate_delta(const std::vector<double>& deltas, double beta);

// Build the process from a trace (delta(t) = slot_delta(sigma(t))).
DeltaSeries delta_process(const Trace& trace, const GeneratorSpec& gen,
                          const ExternalSupplySpec& ext);

// A maximal interval between consecutive exact boundary hits of Delta.
// Type1 runs -beta -> 0 (the generator should be on), Type2 the reverse.
// Start precedes the first boundary transition, End follows the last one.
// `tilde` is the first slot inside the segment where the far boundary is
// reached (defined for Type1/Type2 only).
struct CriticalSegment {
    enum class Kind { Start, Type1, Type2, End };
    Kind kind;
    int first = 0; // 1-based, inclusive
    int last = 0;  // 1-based, inclusive
    std::optional<int> tilde;
};

// Unique typed partition of [1, T]. Empty Start/End segments are omitted.
// Throws DataError if the series violates its invariants.
std::vector<CriticalSegment> critical_segments(const DeltaSeries& d);

// Structural offline optimum for the single fast-responding generator:
// committed exactly on Type1 segments, dispatched per slot.
// Throws ConfigError unless gen.fast_responding().
Schedule ofa(const Trace& trace, const GeneratorSpec& gen, const ExternalSupplySpec& ext);

struct DpResult {
    Schedule schedule;
    // Objective of the commitment problem (per-slot cost plus startup charges),
    // accumulated slot by slot. Comparable bitwise against the enumeration
    // oracle, which uses the same accumulation.
    double objective = 0.0;
};

// Shortest path over the 2 x T on/off lattice with startup-charged edges,
// y(0) = 0, ties broken toward the off state. Solves the fast-responding
// relaxation: dwell and ramp fields of `gen` are ignored.
DpResult dp_offline(const Trace& trace, const GeneratorSpec& gen,
                    const ExternalSupplySpec& ext);

// Layered offline optimum for N homogeneous fast-responding generators:
// slice demands, solve each layer independently, serve the residuals
// externally.
Schedule ofa_multi(const Trace& trace, const GeneratorSpec& gen,
                   const ExternalSupplySpec& ext, int n_gens);

} // namespace chase
