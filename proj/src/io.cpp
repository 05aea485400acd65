#include "gridsim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "gridsim/errors.hpp"
#include "json_io.hpp"

#ifndef GRIDSIM_DEFAULT_DATA_DIR
#define GRIDSIM_DEFAULT_DATA_DIR "data"
#endif

namespace gridsim {

namespace {

using detail::json;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& field, const std::string& source, std::size_t line) {
    T value{};
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || field.empty()) {
        throw ParseError(source, line, "not a number: '" + field + "'");
    }
    return value;
}

// Data rows (line number, fields) after the header; blank lines skipped.
std::vector<std::pair<std::size_t, std::vector<std::string>>> csv_rows(const std::string& text,
                                                                        const std::string& source,
                                                                        const std::vector<std::string>& header) {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    bool header_seen = false;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (!header_seen) {
            if (fields != header) {
                std::string expect;
                for (const auto& h : header) expect += (expect.empty() ? "" : ",") + h;
                throw ParseError(source, number, "expected header '" + expect + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw ParseError(source, number,
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        }
        rows.emplace_back(number, std::move(fields));
    }
    if (!header_seen) {
        throw ParseError(source, number, "empty file");
    }
    return rows;
}

double round12(double x) { return std::strtod(full_precision(x).c_str(), nullptr); }

const char* policy_name(ReactivePolicy::Kind k) {
    return k == ReactivePolicy::Kind::fixed_zero ? "fixed-zero" : "fixed-power-factor";
}

}  // namespace

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("GRIDSIM_DATA"); env != nullptr && *env != '\0') {
        return env;
    }
    return GRIDSIM_DEFAULT_DATA_DIR;
}

std::string full_precision(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", x == 0.0 ? 0.0 : x);
    return buf;
}

std::string short_precision(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", x == 0.0 ? 0.0 : x);
    return buf;
}

HourlyProfile parse_profile_csv(const std::string& text, ProfileUnit unit, const std::string& source) {
    HourlyProfile profile;
    profile.unit = unit;
    const auto rows = csv_rows(text, source, {"hour", "value"});
    int expected_hour = 1;
    for (const auto& [line, fields] : rows) {
        const int hour = parse_number<int>(fields[0], source, line);
        if (hour != expected_hour) {
            throw ParseError(source, line, "expected hour " + std::to_string(expected_hour));
        }
        if (hour > kHoursPerDay) {
            throw ParseError(source, line, "more than 24 hourly rows");
        }
        profile.values[hour - 1] = parse_number<double>(fields[1], source, line);
        ++expected_hour;
    }
    if (expected_hour != kHoursPerDay + 1) {
        throw ParseError(source, 0, "expected 24 hourly rows, got " + std::to_string(expected_hour - 1));
    }
    try {
        profile.validate();
    } catch (const DomainError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return profile;
}

HourlyProfile read_profile_csv(const std::filesystem::path& path, ProfileUnit unit) {
    return parse_profile_csv(detail::read_text_file(path), unit, path.string());
}

std::string format_profile_csv(const HourlyProfile& profile) {
    std::string out = "hour,value\n";
    for (int h = 1; h <= kHoursPerDay; ++h) out += std::to_string(h) + "," + full_precision(profile.at(h)) + "\n";
    return out;
}

DayProfiles load_day_profiles(const std::filesystem::path& dir) {
    DayProfiles p;
    p.household_load = read_profile_csv(dir / "load_profile.csv", ProfileUnit::kilowatt);
    p.irradiance = read_profile_csv(dir / "irradiance.csv", ProfileUnit::watt_per_m2);
    p.air_temperature = read_profile_csv(dir / "temperature.csv", ProfileUnit::celsius);
    return p;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
    const json doc = detail::parse_json(text, source);
    ScenarioConfig cfg;
    cfg.households_per_bus = detail::optional<int>(doc, "households_per_bus", 20, source);
    cfg.q_fraction = detail::optional<double>(doc, "q_fraction", 0.5, source);
    if (doc.contains("policy")) {
        const auto& pol = doc["policy"];
        const auto kind = detail::require<std::string>(pol, "kind", source + " policy");
        if (kind == "fixed-zero") {
            cfg.policy.kind = ReactivePolicy::Kind::fixed_zero;
        } else if (kind == "fixed-power-factor") {
            cfg.policy.kind = ReactivePolicy::Kind::fixed_power_factor;
            cfg.policy.power_factor = detail::require<double>(pol, "value", source + " policy");
        } else {
            throw ParseError(source, 0, "unknown reactive policy '" + kind + "'");
        }
    }
    if (doc.contains("pv_sites")) {
        for (const auto& site : doc["pv_sites"]) {
            const int bus = detail::require<int>(site, "bus", source + " pv_sites");
            const int n = detail::require<int>(site, "arrays", source + " pv_sites");
            if (!cfg.pv_sites.emplace(bus, n).second) {
                throw ValidationError(source + ": pv site " + std::to_string(bus) + " listed twice");
            }
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    return parse_scenario(detail::read_text_file(path), path.string());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
    json doc;
    doc["households_per_bus"] = cfg.households_per_bus;
    doc["q_fraction"] = cfg.q_fraction;
    doc["policy"] = {{"kind", policy_name(cfg.policy.kind)}};
    if (cfg.policy.kind == ReactivePolicy::Kind::fixed_power_factor) doc["policy"]["value"] = cfg.policy.power_factor;
    doc["pv_sites"] = json::array();
    for (const auto& [bus, n] : cfg.pv_sites) doc["pv_sites"].push_back({{"bus", bus}, {"arrays", n}});
    return doc.dump(2) + "\n";
}

std::vector<InjectionRow> parse_injections_csv(const std::string& text, const std::string& source) {
    std::vector<InjectionRow> out;
    for (const auto& [line, f] : csv_rows(text, source, {"bus", "p_kw", "q_kvar"})) {
        out.push_back({parse_number<int>(f[0], source, line), parse_number<double>(f[1], source, line),
                       parse_number<double>(f[2], source, line)});
    }
    return out;
}

std::vector<InjectionRow> read_injections_csv(const std::filesystem::path& path) {
    return parse_injections_csv(detail::read_text_file(path), path.string());
}

std::vector<BusInjection> to_per_unit(const std::vector<InjectionRow>& rows, const BaseSystem& base) {
    std::vector<BusInjection> out;
    out.reserve(rows.size());
    const double s_kva = base.s_base / 1e3;
    for (const auto& r : rows) out.push_back({r.bus_id, r.p_kw / s_kva, r.q_kvar / s_kva});
    return out;
}

std::string format_voltage_csv(const PowerFlowSolution& solution) {
    std::string out = "bus,vmag_pu,vang_deg\n";
    for (std::size_t i = 0; i < solution.bus_ids.size(); ++i) {
        const auto v = solution.voltages[i];
        out += std::to_string(solution.bus_ids[i]) + "," + full_precision(std::abs(v)) + "," +
               full_precision(std::arg(v) * 180.0 / std::numbers::pi) + "\n";
    }
    return out;
}

std::string format_powerflow_summary(const PowerFlowSolution& solution) {
    return "iterations=" + std::to_string(solution.iterations) +
           " mismatch=" + short_precision(solution.max_mismatch) +
           " loss_p_pu=" + short_precision(solution.total_loss.real()) +
           " loss_q_pu=" + short_precision(solution.total_loss.imag());
}

void write_daily_results(const DailyResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    std::string voltages = "hour,bus,vmag,vang\n";
    std::string flows = "hour,from,to,p_from_pu,q_from_pu,p_to_pu,q_to_pu\n";
    std::string pv = "hour,bus,arrays,p_w,q_var\n";
    json summary;
    summary["hours"] = json::array();
    double energy_load = 0.0, energy_pv = 0.0, energy_loss = 0.0;
    for (const auto& h : result.hours) {
        const auto& sol = h.solution;
        double vmin = INFINITY, vmax = 0.0;
        for (std::size_t i = 0; i < sol.bus_ids.size(); ++i) {
            const auto v = sol.voltages[i];
            vmin = std::min(vmin, std::abs(v));
            vmax = std::max(vmax, std::abs(v));
            voltages += std::to_string(h.hour) + "," + std::to_string(sol.bus_ids[i]) + "," +
                        full_precision(std::abs(v)) + "," + full_precision(std::arg(v) * 180.0 / std::numbers::pi) +
                        "\n";
        }
        for (const auto& f : sol.branch_flows) {
            flows += std::to_string(h.hour) + "," + std::to_string(f.from_bus) + "," + std::to_string(f.to_bus) + "," +
                     full_precision(f.s_from.real()) + "," + full_precision(f.s_from.imag()) + "," +
                     full_precision(f.s_to.real()) + "," + full_precision(f.s_to.imag()) + "\n";
        }
        for (const auto& s : h.pv) {
            pv += std::to_string(h.hour) + "," + std::to_string(s.bus_id) + "," + std::to_string(s.arrays) + "," +
                  full_precision(s.p_w) + "," + full_precision(s.q_var) + "\n";
        }
        energy_load += h.load_kw;
        energy_pv += h.generation_kw;
        energy_loss += h.losses_kva.real();
        summary["hours"].push_back({{"hour", h.hour},
                                    {"iterations", sol.iterations},
                                    {"max_mismatch_pu", round12(sol.max_mismatch)},
                                    {"load_kw", round12(h.load_kw)},
                                    {"load_kvar", round12(h.load_kvar)},
                                    {"pv_kw", round12(h.generation_kw)},
                                    {"pv_kvar", round12(h.generation_kvar)},
                                    {"loss_kw", round12(h.losses_kva.real())},
                                    {"loss_kvar", round12(h.losses_kva.imag())},
                                    {"slack_kw", round12(h.slack_kva.real())},
                                    {"slack_kvar", round12(h.slack_kva.imag())},
                                    {"vmin_pu", round12(vmin)},
                                    {"vmax_pu", round12(vmax)}});
    }
    summary["energy_kwh"] = {{"load", round12(energy_load)}, {"pv", round12(energy_pv)}, {"loss", round12(energy_loss)}};
    detail::write_text_file(dir / "voltages.csv", voltages);
    detail::write_text_file(dir / "flows.csv", flows);
    detail::write_text_file(dir / "pv.csv", pv);
    detail::write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

std::vector<VoltageRecord> read_voltages_csv(const std::filesystem::path& path) {
    const std::string source = path.string();
    std::vector<VoltageRecord> out;
    for (const auto& [line, f] : csv_rows(detail::read_text_file(path), source, {"hour", "bus", "vmag", "vang"})) {
        out.push_back({parse_number<int>(f[0], source, line), parse_number<int>(f[1], source, line),
                       parse_number<double>(f[2], source, line), parse_number<double>(f[3], source, line)});
    }
    return out;
}

}  // namespace gridsim
