#include "chase/layering.hpp"

#include <algorithm>

namespace chase {

LayeredTraces slice_demands(const Trace& trace, const GeneratorSpec& gen,
                            const ExternalSupplySpec& ext, int n_gens) {
    if (n_gens < 1) throw ConfigError("slice_demands: n_gens must be >= 1");

    const int T = trace.horizon();
    const double cap_a = gen.capacity_kw;
    const double cap_h = ext.heat_recovery * gen.capacity_kw;

    LayeredTraces out;
    out.layers.assign(n_gens, Trace{trace.slot_len_hours, std::vector<SlotInput>(T)});
    out.top_a.assign(T, 0.0);
    out.top_h.assign(T, 0.0);

    for (int t = 0; t < T; ++t) {
        double rest_a = trace.slots[t].net_power_kw;
        double rest_h = trace.slots[t].heat_kw;
        for (int n = 0; n < n_gens; ++n) {
            double la = std::min(cap_a, rest_a);
            double lh = std::min(cap_h, rest_h);
            rest_a -= la;
            rest_h -= lh;
            out.layers[n].slots[t] = {la, lh, trace.slots[t].price};
        }
        out.top_a[t] = std::max(0.0, rest_a);
        out.top_h[t] = std::max(0.0, rest_h);
    }
    return out;
}

} // namespace chase
