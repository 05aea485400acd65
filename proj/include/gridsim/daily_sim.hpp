#pragma once

#include <array>
#include <map>
#include <vector>

#include "gridsim/inverter.hpp"
#include "gridsim/powerflow.hpp"
#include "gridsim/pv_array.hpp"

namespace gridsim {

inline constexpr int kHoursPerDay = 24;

enum class ProfileUnit { kilowatt, watt_per_m2, celsius };

/// One value per clock hour; hour h covers (h-1, h].
struct HourlyProfile {
    std::array<double, kHoursPerDay> values{};
    ProfileUnit unit = ProfileUnit::kilowatt;

    /// 1-based hour access. Throws DomainError outside 1..24.
    double at(int hour) const;

    /// Throws DomainError if an irradiance profile holds a negative entry.
    void validate() const;
};

/// Hour of the largest/smallest entry (first occurrence) and its value.
struct ProfileExtremum {
    int hour = 0;
    double value = 0.0;
};
ProfileExtremum profile_max(const HourlyProfile& profile);
ProfileExtremum profile_min(const HourlyProfile& profile);

/// Element-wise mean of whole days. Throws ShapeError on ragged or empty input.
HourlyProfile average_day(const std::vector<std::vector<double>>& days, ProfileUnit unit);

struct ReactivePolicy {
    enum class Kind { fixed_zero, fixed_power_factor };
    Kind kind = Kind::fixed_zero;
    double power_factor = 1.0;

    double q_for(double p) const;
};

struct ScenarioConfig {
    int households_per_bus = 20;
    double q_fraction = 0.5;
    std::map<int, int> pv_sites;  // bus id -> array count
    ReactivePolicy policy;

    /// Throws ValidationError.
    void validate() const;
};

struct BusLoad {
    double p_kw = 0.0;
    double q_kvar = 0.0;
};

BusLoad bus_load(const HourlyProfile& household_kw, int hour, const ScenarioConfig& cfg);

/// (P*, Q*) of a site with n_arrays arrays operated at their maximum power point.
PowerReference pv_site_output(const PVArrayParams& params, const WeatherSample& weather, int n_arrays,
                              const ReactivePolicy& policy);

struct DayProfiles {
    HourlyProfile household_load;  // kW
    HourlyProfile irradiance;      // W/m^2
    HourlyProfile air_temperature; // degC
};

struct SiteOutput {
    int bus_id = 0;
    int arrays = 0;
    double p_w = 0.0;
    double q_var = 0.0;
};

struct HourResult {
    int hour = 0;
    PowerFlowSolution solution;
    std::vector<SiteOutput> pv;
    double load_kw = 0.0;
    double load_kvar = 0.0;
    double generation_kw = 0.0;
    double generation_kvar = 0.0;
    Complex losses_kva;
    Complex slack_kva;
};

struct DailyResult {
    std::vector<HourResult> hours;  // 24 entries, hour 1 first
};

struct RunOptions {
    SolverOptions solver;
    bool parallel = true;
};

/// PV placement: network's own pv_arrays, overridden per bus by the scenario's pv_sites.
std::map<int, int> effective_pv_sites(const NetworkModel& net, const ScenarioConfig& cfg);

/// Per-unit nodal injections for one hour.
std::vector<BusInjection> hourly_injections(const NetworkModel& net, const DayProfiles& profiles,
                                            const ScenarioConfig& cfg, const std::vector<SiteOutput>& pv, int hour);

/// Solve every hour; errors are rethrown with the failing hour in the message.
DailyResult run_day(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq,
                    const PVArrayParams& params, const DayProfiles& profiles, const ScenarioConfig& cfg,
                    const RunOptions& options = {});

}  // namespace gridsim
