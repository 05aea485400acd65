#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridsim/daily_sim.hpp"

namespace gridsim {

/// Bundled data directory: $GRIDSIM_DATA if set, otherwise the directory baked in at build time.
std::filesystem::path data_directory();

/// `hour,value` with a header row and exactly 24 data rows in hour order.
HourlyProfile read_profile_csv(const std::filesystem::path& path, ProfileUnit unit);
HourlyProfile parse_profile_csv(const std::string& text, ProfileUnit unit, const std::string& source = "<memory>");
std::string format_profile_csv(const HourlyProfile& profile);

/// household load, irradiance and air temperature from `load_profile.csv`, `irradiance.csv`,
/// `temperature.csv` under `dir`.
DayProfiles load_day_profiles(const std::filesystem::path& dir);

ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<memory>");
std::string serialize_scenario(const ScenarioConfig& cfg);

/// `bus,p_kw,q_kvar` rows of net injection (positive = generation).
struct InjectionRow {
    int bus_id = 0;
    double p_kw = 0.0;
    double q_kvar = 0.0;
};
std::vector<InjectionRow> read_injections_csv(const std::filesystem::path& path);
std::vector<InjectionRow> parse_injections_csv(const std::string& text, const std::string& source = "<memory>");
std::vector<BusInjection> to_per_unit(const std::vector<InjectionRow>& rows, const BaseSystem& base);

/// Fixed-format number rendering: 12 significant digits for files, 6 for console.
std::string full_precision(double x);
std::string short_precision(double x);

/// (bus, vmag_pu, vang_deg) table.
std::string format_voltage_csv(const PowerFlowSolution& solution);
std::string format_powerflow_summary(const PowerFlowSolution& solution);

/// Writes voltages.csv, flows.csv, pv.csv and summary.json under `dir` (created if needed).
void write_daily_results(const DailyResult& result, const std::filesystem::path& dir);

/// Re-read a voltages.csv written by write_daily_results.
struct VoltageRecord {
    int hour = 0;
    int bus_id = 0;
    double vmag = 0.0;
    double vang_deg = 0.0;
};
std::vector<VoltageRecord> read_voltages_csv(const std::filesystem::path& path);

}  // namespace gridsim
