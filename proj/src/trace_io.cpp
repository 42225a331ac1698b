#include "chase/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chase/dispatch.hpp"
#include "chase/rng.hpp"

namespace chase {

namespace {

const char* kHeader = "timestamp,elec_demand_kw,heat_demand_kw,wind_kw,price_usd_per_kwh";

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    long era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                   static_cast<unsigned>(d) - 1u;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

// Numeric hours, or ISO 8601 date-time converted to absolute hours.
double parse_timestamp(const std::string& s, bool& ok) {
    ok = true;
    {
        std::size_t pos = 0;
        try {
            double v = std::stod(s, &pos);
            if (pos == s.size()) return v;
        } catch (...) {
        }
    }
    int y, mo, d, h, mi;
    int sec = 0;
    char sepT;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sepT, &h, &mi, &sec) >= 6 &&
        (sepT == 'T' || sepT == ' ')) {
        return static_cast<double>(days_from_civil(y, mo, d)) * 24.0 + h + mi / 60.0 +
               sec / 3600.0;
    }
    ok = false;
    return 0.0;
}

[[noreturn]] void row_error(const std::string& origin, std::size_t row, const std::string& msg) {
    std::ostringstream os;
    os << origin << ": row " << row << ": " << msg;
    throw DataError(os.str());
}

} // namespace

Trace load_trace_stream(std::istream& in, const ExternalSupplySpec& ext,
                        const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(origin + ": empty file");
    if (trim(line) != kHeader)
        throw DataError(origin + ": bad header, expected '" + std::string(kHeader) + "'");

    Trace trace;
    std::vector<double> stamps;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 5)
            row_error(origin, row, "expected 5 fields, got " + std::to_string(fields.size()));
        bool ok = true;
        double hours = parse_timestamp(fields[0], ok);
        if (!ok) row_error(origin, row, "unparseable timestamp '" + fields[0] + "'");
        double vals[4];
        for (int i = 0; i < 4; ++i) {
            try {
                std::size_t pos = 0;
                vals[i] = std::stod(fields[i + 1], &pos);
                if (pos != fields[i + 1].size()) throw std::invalid_argument("");
            } catch (...) {
                row_error(origin, row, "unparseable number '" + fields[i + 1] + "'");
            }
        }
        double elec = vals[0], heat = vals[1], wind = vals[2], price = vals[3];
        if (elec < 0.0 || heat < 0.0 || wind < 0.0)
            row_error(origin, row, "demands and wind must be nonnegative");
        if (price < ext.price_min || price > ext.price_max) {
            std::ostringstream os;
            os << "price " << price << " outside [" << ext.price_min << ", " << ext.price_max
               << "]";
            row_error(origin, row, os.str());
        }
        stamps.push_back(hours);
        trace.slots.push_back({net_demand(elec, wind), heat, price});
    }

    if (trace.slots.empty()) throw DataError(origin + ": no slots");
    if (stamps.size() >= 2) {
        double step = stamps[1] - stamps[0];
        if (!(step > 0.0)) throw DataError(origin + ": timestamps must be strictly increasing");
        for (std::size_t i = 2; i < stamps.size(); ++i) {
            double d = stamps[i] - stamps[i - 1];
            if (std::fabs(d - step) > 1e-6 * std::max(1.0, std::fabs(step))) {
                std::ostringstream os;
                os << origin << ": nonuniform slot spacing at row " << (i + 2) << " (" << d
                   << " vs " << step << ")";
                throw DataError(os.str());
            }
        }
        trace.slot_len_hours = step;
    } else {
        trace.slot_len_hours = 1.0;
    }
    return trace;
}

Trace load_trace(const std::string& path, const ExternalSupplySpec& ext) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trace file: " + path);
    return load_trace_stream(in, ext, path);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceCsvRow>& rows) {
    out << kHeader << "\n";
    char buf[192];
    for (const TraceCsvRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", r.hours,
                      r.elec_demand_kw, r.heat_demand_kw, r.wind_kw, r.price);
        out << buf;
    }
}

std::vector<TraceCsvRow> trace_to_rows(const Trace& trace) {
    std::vector<TraceCsvRow> rows;
    rows.reserve(trace.slots.size());
    for (std::size_t t = 0; t < trace.slots.size(); ++t) {
        const SlotInput& s = trace.slots[t];
        rows.push_back({t * trace.slot_len_hours, s.net_power_kw, s.heat_kw, 0.0, s.price});
    }
    return rows;
}

namespace {

const int kMonthDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

bool is_summer_month(int month) { return month >= 5 && month <= 10; }

int month_of_doy(int start_month, int doy) {
    int m = start_month - 1; // 0-based
    int d = doy;
    while (d >= kMonthDays[m]) {
        d -= kMonthDays[m];
        m = (m + 1) % 12;
    }
    return m + 1;
}

} // namespace

std::vector<TraceCsvRow> synth_rows(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.days < 1) throw ConfigError("synth: days must be >= 1");
    if (!(spec.slot_len_hours > 0.0)) throw ConfigError("synth: slot length must be positive");
    if (spec.start_month < 1 || spec.start_month > 12)
        throw ConfigError("synth: start_month must be 1..12");

    Rng rng(seed);
    std::vector<TraceCsvRow> rows;
    const int slots_per_day = static_cast<int>(std::lround(24.0 / spec.slot_len_hours));
    const int total = spec.days * slots_per_day;
    rows.reserve(total);

    double wind_state = spec.wind_mean_frac;
    for (int i = 0; i < total; ++i) {
        double hours = i * spec.slot_len_hours;
        int day = i / slots_per_day;
        double hod = std::fmod(hours, 24.0);
        int weekday = (spec.start_weekday + day) % 7;
        bool workday = weekday < 5;
        int doy = day % 365;
        int month = month_of_doy(spec.start_month, doy);
        bool summer = is_summer_month(month);

        double price;
        if (summer) {
            if (workday && hod >= 12.0 && hod < 18.0)
                price = spec.price_summer_on;
            else if (workday && hod >= 8.0 && hod < 12.0)
                price = spec.price_summer_mid;
            else
                price = spec.price_summer_off;
        } else {
            if (workday && hod >= 8.0 && hod < 22.0)
                price = spec.price_winter_mid;
            else
                price = spec.price_winter_off;
        }

        double diurnal = 0.5 * (1.0 - std::cos(2.0 * M_PI * (hod - 3.0) / 24.0));
        double elec = (spec.elec_base_kw + spec.elec_amp_kw * diurnal) *
                      (workday ? 1.0 : spec.weekend_factor) *
                      (1.0 + spec.elec_noise_frac * rng.normal());
        elec = std::max(0.0, elec);

        double season = 0.5 * (1.0 + std::cos(2.0 * M_PI * (doy - 15.0) / 365.0));
        double heat_amp =
            spec.heat_amp_summer_kw + (spec.heat_amp_winter_kw - spec.heat_amp_summer_kw) * season;
        double heat_shape = 0.5 * (1.0 - std::cos(2.0 * M_PI * (hod - 18.0) / 24.0));
        double heat = (spec.heat_base_kw + heat_amp * heat_shape) *
                      (1.0 + spec.heat_noise_frac * rng.normal());
        heat = std::max(0.0, heat);

        wind_state = 0.9 * wind_state + 0.1 * spec.wind_mean_frac +
                     0.3 * spec.wind_vol_frac * rng.normal();
        wind_state = std::clamp(wind_state, 0.0, 1.0);
        double wind = spec.wind_capacity_kw * wind_state;

        rows.push_back({hours, elec, heat, wind, price});
    }
    return rows;
}

Trace synth_trace(const SynthSpec& spec, std::uint64_t seed) {
    auto rows = synth_rows(spec, seed);
    Trace trace;
    trace.slot_len_hours = spec.slot_len_hours;
    trace.slots.reserve(rows.size());
    for (const TraceCsvRow& r : rows)
        trace.slots.push_back({net_demand(r.elec_demand_kw, r.wind_kw), r.heat_demand_kw, r.price});
    return trace;
}

std::vector<SlotInput> inject_forecast_error(const std::vector<SlotInput>& true_window,
                                             double wind_std_frac, double heat_std_frac,
                                             double installed_wind_kw, double peak_heat_kw,
                                             std::uint64_t seed) {
    if (wind_std_frac < 0.0 || wind_std_frac > 1.2 || heat_std_frac < 0.0 || heat_std_frac > 1.2)
        throw ConfigError("forecast error: std fractions must lie in [0, 1.2]");
    if (installed_wind_kw < 0.0 || peak_heat_kw < 0.0)
        throw ConfigError("forecast error: scale references must be nonnegative");

    std::vector<SlotInput> noisy = true_window;
    for (std::size_t j = 1; j < noisy.size(); ++j) {
        Rng rng(mix_seed(seed, j));
        double wind_err = wind_std_frac * installed_wind_kw * rng.normal();
        double heat_err = heat_std_frac * peak_heat_kw * rng.normal();
        // Extra predicted wind reduces predicted net demand and vice versa;
        // both derived demands clamp at zero.
        noisy[j].net_power_kw = std::max(0.0, noisy[j].net_power_kw - wind_err);
        noisy[j].heat_kw = std::max(0.0, noisy[j].heat_kw + heat_err);
    }
    return noisy;
}

NoisyForecast::NoisyForecast(const Trace& trace, double wind_std_frac, double heat_std_frac,
                             double installed_wind_kw, double peak_heat_kw, std::uint64_t seed)
    : trace_(trace),
      wind_std_frac_(wind_std_frac),
      heat_std_frac_(heat_std_frac),
      installed_wind_kw_(installed_wind_kw),
      peak_heat_kw_(peak_heat_kw),
      seed_(seed) {}

std::vector<SlotInput> NoisyForecast::window(int t, int lookahead) const {
    int last = std::min(trace_.horizon() - 1, t + lookahead);
    std::vector<SlotInput> win(trace_.slots.begin() + t, trace_.slots.begin() + last + 1);
    return inject_forecast_error(win, wind_std_frac_, heat_std_frac_, installed_wind_kw_,
                                 peak_heat_kw_, mix_seed(seed_, static_cast<std::uint64_t>(t)));
}

} // namespace chase
