#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gridsim/daily_sim.hpp"
#include "gridsim/errors.hpp"
#include "gridsim/io.hpp"

using namespace gridsim;

namespace {

const std::filesystem::path kData = GRIDSIM_TEST_DATA_DIR;

struct Setup {
    NetworkModel net;
    std::map<int, SequenceLineParams> seq;
    PVArrayParams params;
    DayProfiles profiles;
};

const Setup& setup() {
    static const Setup s = [] {
        Setup out;
        out.net = load_network(kData / "ieee37.json");
        out.seq = reduce_configs(out.net.configs);
        out.params = load_pv_params(kData / "kc200gt.json");
        out.profiles = load_day_profiles(kData);
        return out;
    }();
    return s;
}

bool zero_irradiance(int hour) { return setup().profiles.irradiance.at(hour) == 0.0; }

}  // namespace

TEST_CASE("bundled profiles reproduce the reference extrema") {
    const auto& p = setup().profiles;
    const auto lmax = profile_max(p.household_load);
    const auto lmin = profile_min(p.household_load);
    const auto gmax = profile_max(p.irradiance);
    const auto tmax = profile_max(p.air_temperature);
    CHECK(lmax.hour == 23);
    CHECK(lmax.value == 0.462021867722932);
    CHECK(short_precision(lmax.value) == "0.462022");
    CHECK(lmin.hour == 6);
    CHECK(lmin.value == 0.194544413700119);
    CHECK(short_precision(lmin.value) == "0.194544");
    CHECK(gmax.hour == 12);
    CHECK(gmax.value == 565.956790123457);
    CHECK(short_precision(gmax.value) == "565.957");
    CHECK(std::abs(gmax.value - 565.9568) < 5e-5);
    CHECK(tmax.hour == 14);
    CHECK(tmax.value == 19.2444444444444);
    CHECK(short_precision(tmax.value) == "19.2444");
    for (int h : {1, 2, 3, 21, 22, 23, 24}) CHECK(zero_irradiance(h));
}

TEST_CASE("household load scaling") {
    const auto& p = setup().profiles;
    ScenarioConfig cfg;
    const auto h12 = bus_load(p.household_load, 12, cfg);
    CHECK(h12.p_kw == doctest::Approx(8.27820).epsilon(1e-6));
    CHECK(h12.q_kvar == doctest::Approx(4.13910).epsilon(1e-6));
    CHECK(bus_load(p.household_load, 6, cfg).p_kw == doctest::Approx(3.89089).epsilon(1e-6));
    cfg.q_fraction = 0.0;
    for (int h = 1; h <= 24; ++h) CHECK(bus_load(p.household_load, h, cfg).q_kvar == 0.0);
    CHECK_THROWS_AS(bus_load(p.household_load, 0, cfg), DomainError);
    CHECK_THROWS_AS(bus_load(p.household_load, 25, cfg), DomainError);
}

TEST_CASE("PV site output") {
    const auto& s = setup();
    const ReactivePolicy zero;
    const WeatherSample night{s.profiles.irradiance.at(1), s.profiles.air_temperature.at(1)};
    CHECK(pv_site_output(s.params, night, 10, zero).p_star == 0.0);
    const WeatherSample noon{s.profiles.irradiance.at(12), s.profiles.air_temperature.at(12)};
    const auto none = pv_site_output(s.params, noon, 0, zero);
    CHECK(none.p_star == 0.0);
    CHECK(none.q_star == 0.0);
    const auto ten = pv_site_output(s.params, noon, 10, zero);
    CHECK(ten.p_star == doctest::Approx(1040.3486939511).epsilon(1e-9));
    CHECK(ten.q_star == 0.0);

    ReactivePolicy pf;
    pf.kind = ReactivePolicy::Kind::fixed_power_factor;
    pf.power_factor = 0.8;
    const auto lagging = pv_site_output(s.params, noon, 10, pf);
    CHECK(lagging.q_star == doctest::Approx(0.75 * lagging.p_star).epsilon(1e-12));
    CHECK_THROWS_AS(pv_site_output(s.params, noon, -1, zero), DomainError);
}

TEST_CASE("average day") {
    std::vector<double> a(24), b(24, 0.0), c(24);
    for (int h = 0; h < 24; ++h) {
        a[h] = h + 1.0;
        c[h] = 3.0 * h;
    }
    const auto same = average_day({a}, ProfileUnit::kilowatt);
    for (int h = 0; h < 24; ++h) CHECK(same.values[h] == a[h]);
    const auto half = average_day({a, b}, ProfileUnit::kilowatt);
    for (int h = 0; h < 24; ++h) CHECK(half.values[h] == a[h] / 2.0);
    const auto three = average_day({a, b, c}, ProfileUnit::kilowatt);
    for (int h = 0; h < 24; ++h) CHECK(three.values[h] == doctest::Approx((4.0 * h + 1.0) / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(average_day({a, std::vector<double>(23)}, ProfileUnit::kilowatt), ShapeError);
    CHECK_THROWS_AS(average_day({}, ProfileUnit::kilowatt), ShapeError);
}

TEST_CASE("scenario validation") {
    ScenarioConfig cfg;
    cfg.households_per_bus = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = ScenarioConfig{};
    cfg.q_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = ScenarioConfig{};
    cfg.pv_sites[799] = 5;
    CHECK_THROWS_AS(effective_pv_sites(setup().net, cfg), ValidationError);
    cfg.pv_sites = {{9999, 5}};
    CHECK_THROWS_AS(effective_pv_sites(setup().net, cfg), ValidationError);
}

TEST_CASE("baseline day without PV") {
    const auto& s = setup();
    const auto day = run_day(s.net, s.seq, s.params, s.profiles, ScenarioConfig{});
    REQUIRE(day.hours.size() == 24);
    for (const auto& h : day.hours) {
        CAPTURE(h.hour);
        CHECK(h.pv.empty());
        CHECK(h.generation_kw == 0.0);
        const Complex load(h.load_kw, h.load_kvar);
        CHECK(std::abs(h.slack_kva - (load + h.losses_kva)) < 1e-8 * s.net.base.s_base / 1e3);
        CHECK(h.losses_kva.real() >= 0.0);
        CHECK(h.load_kw == doctest::Approx(36 * 20 * s.profiles.household_load.at(h.hour)).epsilon(1e-12));
    }
}

TEST_CASE("PV scenario properties") {
    const auto& s = setup();
    const auto cfg = load_scenario(kData / "scenario_pv10.json");
    const auto day = run_day(s.net, s.seq, s.params, s.profiles, cfg);
    const auto base = run_day(s.net, s.seq, s.params, s.profiles, ScenarioConfig{});
    for (const auto& h : day.hours) {
        CAPTURE(h.hour);
        CHECK(h.pv.size() == 10);
        CHECK(h.solution.iterations <= 10);
        if (zero_irradiance(h.hour)) {
            for (const auto& site : h.pv) {
                CHECK(site.p_w == 0.0);
                CHECK(site.q_var == 0.0);
            }
        }
        const Complex net_load(h.load_kw - h.generation_kw, h.load_kvar - h.generation_kvar);
        CHECK(std::abs(h.slack_kva - (net_load + h.losses_kva)) < 1e-8 * s.net.base.s_base / 1e3);
    }
    for (int hr : {10, 11, 12, 13, 14}) {
        CHECK(day.hours[hr - 1].slack_kva.real() < base.hours[hr - 1].slack_kva.real());
    }
}

TEST_CASE("parallel and sequential runs are identical") {
    const auto& s = setup();
    const auto cfg = load_scenario(kData / "scenario_pv10.json");
    const auto par = run_day(s.net, s.seq, s.params, s.profiles, cfg, RunOptions{{}, true});
    const auto seq = run_day(s.net, s.seq, s.params, s.profiles, cfg, RunOptions{{}, false});
    for (int h = 0; h < 24; ++h) {
        CHECK(par.hours[h].hour == seq.hours[h].hour);
        CHECK(par.hours[h].solution.voltages == seq.hours[h].solution.voltages);
        CHECK(par.hours[h].slack_kva == seq.hours[h].slack_kva);
        CHECK(par.hours[h].solution.iterations == seq.hours[h].solution.iterations);
    }
}

TEST_CASE("more arrays never increase slack import") {
    const auto& s = setup();
    const int hour = 12;
    const WeatherSample w{s.profiles.irradiance.at(hour), s.profiles.air_temperature.at(hour)};
    const auto y = assemble_ybus(s.net, s.seq);
    for (int bus : {712, 741, 775}) {
        CAPTURE(bus);
        double prev = INFINITY;
        for (int n = 0; n <= 50; n += 5) {
            const auto ref = pv_site_output(s.params, w, n, ReactivePolicy{});
            const std::vector<SiteOutput> pv{{bus, n, ref.p_star, ref.q_star}};
            const auto inj = hourly_injections(s.net, s.profiles, ScenarioConfig{}, pv, hour);
            const auto sol = solve_newton(y, inj, 1.0);
            CHECK(sol.slack_power.real() <= prev);
            prev = sol.slack_power.real();
        }
    }
}

TEST_CASE("solver failures are tagged with the hour") {
    const auto& s = setup();
    RunOptions opt;
    opt.solver.max_iterations = 1;
    opt.solver.tolerance = 1e-14;
    try {
        run_day(s.net, s.seq, s.params, s.profiles, ScenarioConfig{}, opt);
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).rfind("hour ", 0) == 0);
    }
}
