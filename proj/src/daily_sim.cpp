#include "gridsim/daily_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "gridsim/errors.hpp"

namespace gridsim {

namespace {

void check_hour(int hour) {
    if (hour < 1 || hour > kHoursPerDay) {
        throw DomainError("hour " + std::to_string(hour) + " outside 1..24");
    }
}

// Re-raise with the hour prepended, keeping the error category.
[[noreturn]] void rethrow_for_hour(int hour) {
    const std::string tag = "hour " + std::to_string(hour) + ": ";
    try {
        throw;
    } catch (const SolverError& e) {
        throw SolverError(tag + e.what(), e.mismatch_history());
    } catch (const NumericError& e) {
        throw NumericError(tag + e.what(), e.last_residual());
    } catch (const ValidationError& e) {
        throw ValidationError(tag + e.what());
    } catch (const Error& e) {
        throw DomainError(tag + e.what());
    }
}

HourResult solve_hour(const NetworkModel& net, const AdmittanceMatrix& y, const PVArrayParams& params,
                      const DayProfiles& profiles, const ScenarioConfig& cfg, const std::map<int, int>& sites,
                      int hour, const SolverOptions& solver) {
    HourResult out;
    out.hour = hour;
    const WeatherSample weather{profiles.irradiance.at(hour), profiles.air_temperature.at(hour)};
    for (const auto& [bus, n] : sites) {
        const auto ref = pv_site_output(params, weather, n, cfg.policy);
        out.pv.push_back({bus, n, ref.p_star, ref.q_star});
        out.generation_kw += ref.p_star / 1e3;
        out.generation_kvar += ref.q_star / 1e3;
    }
    for (const auto& b : net.buses) {
        if (b.kind != BusKind::load) continue;
        const auto load = bus_load(profiles.household_load, hour, cfg);
        out.load_kw += load.p_kw;
        out.load_kvar += load.q_kvar;
    }
    const auto injections = hourly_injections(net, profiles, cfg, out.pv, hour);
    out.solution = solve_newton(y, injections, Complex(1.0, 0.0), solver);
    const double s_base_kva = net.base.s_base / 1e3;
    out.losses_kva = out.solution.total_loss * s_base_kva;
    out.slack_kva = out.solution.slack_power * s_base_kva;
    return out;
}

}  // namespace

double HourlyProfile::at(int hour) const {
    check_hour(hour);
    return values[static_cast<std::size_t>(hour - 1)];
}

void HourlyProfile::validate() const {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DomainError("profile holds a non-finite value");
        }
        if (unit == ProfileUnit::watt_per_m2 && v < 0.0) {
            throw DomainError("irradiance must be nonnegative");
        }
    }
}

ProfileExtremum profile_max(const HourlyProfile& profile) {
    auto it = std::max_element(profile.values.begin(), profile.values.end());
    return {static_cast<int>(it - profile.values.begin()) + 1, *it};
}

ProfileExtremum profile_min(const HourlyProfile& profile) {
    auto it = std::min_element(profile.values.begin(), profile.values.end());
    return {static_cast<int>(it - profile.values.begin()) + 1, *it};
}

HourlyProfile average_day(const std::vector<std::vector<double>>& days, ProfileUnit unit) {
    if (days.empty()) {
        throw ShapeError("average_day needs at least one day");
    }
    HourlyProfile out;
    out.unit = unit;
    for (std::size_t d = 0; d < days.size(); ++d) {
        if (days[d].size() != kHoursPerDay) {
            throw ShapeError("day " + std::to_string(d + 1) + " has " + std::to_string(days[d].size()) +
                             " entries, expected 24");
        }
        for (int h = 0; h < kHoursPerDay; ++h) out.values[h] += days[d][h];
    }
    for (double& v : out.values) v /= static_cast<double>(days.size());
    return out;
}

double ReactivePolicy::q_for(double p) const {
    if (kind == Kind::fixed_zero) return 0.0;
    return p * std::tan(std::acos(power_factor));
}

void ScenarioConfig::validate() const {
    if (households_per_bus < 1) {
        throw ValidationError("households_per_bus must be at least 1");
    }
    if (!(q_fraction >= 0.0 && q_fraction <= 1.0)) {
        throw ValidationError("q_fraction must lie in [0, 1]");
    }
    if (policy.kind == ReactivePolicy::Kind::fixed_power_factor &&
        !(policy.power_factor > 0.0 && policy.power_factor <= 1.0)) {
        throw ValidationError("power factor must lie in (0, 1]");
    }
    for (const auto& [bus, n] : pv_sites) {
        if (n < 0) {
            throw ValidationError("pv site " + std::to_string(bus) + " has a negative array count");
        }
    }
}

BusLoad bus_load(const HourlyProfile& household_kw, int hour, const ScenarioConfig& cfg) {
    const double p = cfg.households_per_bus * household_kw.at(hour);
    return {p, cfg.q_fraction * p};
}

PowerReference pv_site_output(const PVArrayParams& params, const WeatherSample& weather, int n_arrays,
                              const ReactivePolicy& policy) {
    if (n_arrays < 0) {
        throw DomainError("array count must be nonnegative");
    }
    if (n_arrays == 0 || weather.g == 0.0) {
        return {};
    }
    const double t_cell = cell_temperature(weather.t_air, weather.g, params.noct);
    const double p = n_arrays * mpp(params, weather.g, t_cell).p;
    return {p, policy.q_for(p)};
}

std::map<int, int> effective_pv_sites(const NetworkModel& net, const ScenarioConfig& cfg) {
    std::map<int, int> sites;
    for (const auto& b : net.buses) {
        if (b.has_pv()) sites[b.id] = b.pv_arrays;
    }
    for (const auto& [bus, n] : cfg.pv_sites) {
        if (!net.contains(bus)) {
            throw ValidationError("pv site on unknown bus " + std::to_string(bus));
        }
        if (net.bus(bus).kind == BusKind::slack) {
            throw ValidationError("pv site on the slack bus " + std::to_string(bus));
        }
        sites[bus] = n;
    }
    std::erase_if(sites, [](const auto& kv) { return kv.second == 0; });
    return sites;
}

std::vector<BusInjection> hourly_injections(const NetworkModel& net, const DayProfiles& profiles,
                                            const ScenarioConfig& cfg, const std::vector<SiteOutput>& pv, int hour) {
    check_hour(hour);
    std::map<int, Complex> kva;
    for (const auto& b : net.buses) {
        if (b.kind != BusKind::load) continue;
        const auto load = bus_load(profiles.household_load, hour, cfg);
        kva[b.id] -= Complex(load.p_kw, load.q_kvar);
    }
    for (const auto& site : pv) {
        kva[site.bus_id] += Complex(site.p_w, site.q_var) / 1e3;
    }
    const double s_base_kva = net.base.s_base / 1e3;
    std::vector<BusInjection> out;
    out.reserve(kva.size());
    for (const auto& [bus, s] : kva) out.push_back({bus, s.real() / s_base_kva, s.imag() / s_base_kva});
    return out;
}

DailyResult run_day(const NetworkModel& net, const std::map<int, SequenceLineParams>& seq,
                    const PVArrayParams& params, const DayProfiles& profiles, const ScenarioConfig& cfg,
                    const RunOptions& options) {
    cfg.validate();
    profiles.irradiance.validate();
    profiles.household_load.validate();
    profiles.air_temperature.validate();
    const auto sites = effective_pv_sites(net, cfg);
    const AdmittanceMatrix y = assemble_ybus(net, seq);

    auto one = [&](int hour) {
        try {
            return solve_hour(net, y, params, profiles, cfg, sites, hour, options.solver);
        } catch (const Error&) {
            rethrow_for_hour(hour);
        }
    };

    DailyResult result;
    result.hours.reserve(kHoursPerDay);
    if (options.parallel) {
        std::vector<std::future<HourResult>> pending;
        pending.reserve(kHoursPerDay);
        for (int h = 1; h <= kHoursPerDay; ++h) pending.push_back(std::async(std::launch::async, one, h));
        for (auto& f : pending) result.hours.push_back(f.get());
    } else {
        for (int h = 1; h <= kHoursPerDay; ++h) result.hours.push_back(one(h));
    }
    return result;
}

}  // namespace gridsim
