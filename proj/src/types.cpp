#include "chase/types.hpp"

#include <cmath>
#include <sstream>

namespace chase {

void validate_params(const GeneratorSpec& gen, const ExternalSupplySpec& ext) {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid parameters: " + msg); };

    if (!(gen.capacity_kw > 0.0)) fail("capacity must be positive");
    if (gen.startup_cost < 0.0) fail("startup cost must be nonnegative");
    if (gen.idle_cost_per_h < 0.0) fail("idle cost must be nonnegative");
    if (gen.fuel_cost_per_kwh < 0.0) fail("fuel cost must be nonnegative");
    if (gen.min_on_slots < 0 || gen.min_off_slots < 0) fail("dwell times must be nonnegative");
    if (!(gen.ramp_up_kw_per_slot > 0.0)) fail("ramp-up rate must be positive (inf = unconstrained)");
    if (!(gen.ramp_down_kw_per_slot > 0.0)) fail("ramp-down rate must be positive (inf = unconstrained)");

    if (ext.gas_price_per_kwh < 0.0) fail("gas price must be nonnegative");
    if (ext.heat_recovery < 0.0) fail("heat recovery ratio must be nonnegative");
    if (ext.price_min < 0.0 || ext.price_min > ext.price_max)
        fail("price band must satisfy 0 <= P_min <= P_max");

    const double cogen_saving = ext.heat_recovery * ext.gas_price_per_kwh;
    if (gen.fuel_cost_per_kwh < cogen_saving) {
        std::ostringstream os;
        os << "assumption A1 violated: c_o (" << gen.fuel_cost_per_kwh
           << ") < eta*c_g (" << cogen_saving << ")";
        fail(os.str());
    }
    const double min_unit_cost = gen.fuel_cost_per_kwh + gen.idle_cost_per_h / gen.capacity_kw;
    if (!(min_unit_cost < ext.price_max + cogen_saving)) {
        std::ostringstream os;
        os << "assumption A2 violated: c_o + c_m/L (" << min_unit_cost
           << ") must be below P_max + eta*c_g (" << ext.price_max + cogen_saving << ")";
        fail(os.str());
    }
}

void validate_slot(const ExternalSupplySpec& ext, const SlotInput& sigma) {
    if (!(sigma.net_power_kw >= 0.0) || !std::isfinite(sigma.net_power_kw))
        throw DataError("slot input: net power demand must be finite and nonnegative");
    if (!(sigma.heat_kw >= 0.0) || !std::isfinite(sigma.heat_kw))
        throw DataError("slot input: heat demand must be finite and nonnegative");
    if (!(sigma.price >= ext.price_min) || !(sigma.price <= ext.price_max)) {
        std::ostringstream os;
        os << "slot input: price " << sigma.price << " outside [" << ext.price_min << ", "
           << ext.price_max << "]";
        throw DataError(os.str());
    }
}

void validate_trace(const ExternalSupplySpec& ext, const Trace& trace) {
    if (trace.slots.empty()) throw DataError("trace: no slots");
    if (!(trace.slot_len_hours > 0.0)) throw DataError("trace: slot length must be positive");
    for (std::size_t t = 0; t < trace.slots.size(); ++t) {
        try {
            validate_slot(ext, trace.slots[t]);
        } catch (const DataError& e) {
            std::ostringstream os;
            os << "trace slot " << (t + 1) << ": " << e.what();
            throw DataError(os.str());
        }
    }
}

} // namespace chase
