#pragma once

#include "chase/types.hpp"

namespace chase {

// Bottom-up slicing of (a, h) into per-generator layers of size at most
// (L, eta*L) plus the residual that only external supply can serve.
// Electricity and heat are sliced independently; layer n+1 is nonzero only
// where layer n is full. The tops carry the full remainders so that
// sum(layers) + top reassembles the original demand.
struct LayeredTraces {
    std::vector<Trace> layers;  // n_gens traces sharing price and slot length
    std::vector<double> top_a;  // per-slot electricity residual
    std::vector<double> top_h;  // per-slot heat residual
};

LayeredTraces slice_demands(const Trace& trace, const GeneratorSpec& gen,
                            const ExternalSupplySpec& ext, int n_gens);

} // namespace chase
