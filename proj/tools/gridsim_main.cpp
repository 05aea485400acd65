// gridsim command-line entry point.
//
// Exit codes: 0 success, 1 usage/domain/validation/IO error, 2 numeric or solver failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridsim/gridsim.hpp"

namespace {

using namespace gridsim;
namespace fs = std::filesystem;

constexpr int kExitDomain = 1;
constexpr int kExitNumeric = 2;

void write_or_print(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw IoError("cannot write " + path);
    }
}

fs::path resolve_data(const std::string& flag) { return flag.empty() ? data_directory() : fs::path(flag); }

PVArrayParams params_from(const std::string& path, const fs::path& data_dir) {
    return load_pv_params(path.empty() ? data_dir / "kc200gt.json" : fs::path(path));
}

struct ReduceArgs {
    std::string network;
};

void run_reduce(const ReduceArgs& args) {
    const auto configs = args.network.empty() ? standard_line_configs() : load_network(args.network).configs;
    std::string out = "config,r1_ohm_per_mile,x1_ohm_per_mile,b1_us_per_mile,r0_ohm_per_mile,x0_ohm_per_mile\n";
    for (const auto& [id, p] : reduce_configs(configs)) {
        out += std::to_string(id) + "," + full_precision(p.z_positive.real()) + "," +
               full_precision(p.z_positive.imag()) + "," + full_precision(p.b_positive) + "," +
               full_precision(p.z_zero.real()) + "," + full_precision(p.z_zero.imag()) + "\n";
    }
    std::cout << out;
}

struct PvArgs {
    double g = 1000.0;
    double t_air = 25.0;
    std::optional<double> t_cell;
    int points = 100;
    std::string params;
    std::string data_dir;
    std::string csv;
    std::string svg;
};

double cell_temp_for(const PvArgs& a, const PVArrayParams& p) {
    return a.t_cell ? *a.t_cell : cell_temperature(a.t_air, a.g, p.noct);
}

void run_pv_curve(const PvArgs& a) {
    const auto params = params_from(a.params, resolve_data(a.data_dir));
    const double t_cell = cell_temp_for(a, params);
    const auto curve = iv_curve(params, a.g, t_cell, a.points);
    std::string csv = "v,i,p\n";
    PlotSeries series{"G = " + short_precision(a.g) + " W/m2, T = " + short_precision(t_cell) + " K", {}, {}};
    for (const auto& pt : curve) {
        csv += full_precision(pt.v) + "," + full_precision(pt.i) + "," + full_precision(pt.p) + "\n";
        series.x.push_back(pt.v);
        series.y.push_back(pt.i);
    }
    write_or_print(csv, a.csv);
    if (!a.svg.empty()) {
        emit_svg({"I-V curve", "Voltage [V]", "Current [A]", {series}, a.svg});
    }
}

void run_mpp(const PvArgs& a) {
    const auto params = params_from(a.params, resolve_data(a.data_dir));
    const double t_cell = cell_temp_for(a, params);
    const auto op = mpp(params, a.g, t_cell);
    std::cout << "T_cell = " << short_precision(t_cell) << " K\n"
              << "V = " << short_precision(op.v) << " V\n"
              << "I = " << short_precision(op.i) << " A\n"
              << "P = " << short_precision(op.p) << " W\n";
}

struct InverterArgs {
    double p_star = 0.0;
    double q_star = 0.0;
    double v_mv = 4800.0 / std::numbers::sqrt3;
    bool time_domain = false;
    int periods = 25;
    TrackingGains gains;
    std::string csv;
    std::string svg;
};

void run_inverter(const InverterArgs& a) {
    InverterParams inv;
    inv.turns_ratio_n = a.v_mv / inv.v_lv_rms;
    const auto ref = compute_reference({a.p_star, a.q_star}, a.v_mv, inv);
    const std::complex<double> v_g(inv.v_lv_rms, 0.0);
    const auto cmd = phasor_solve_inverse(ref, inv, v_g);
    std::cout << "quantity,value\n"
              << "turns_ratio," << short_precision(inv.turns_ratio_n) << "\n"
              << "phi_l_star_rad," << short_precision(ref.phi_l_star) << "\n"
              << "i_l_mv_star_a," << short_precision(ref.i_l_mv_star) << "\n"
              << "i_l_star_a," << short_precision(ref.i_l_star) << "\n"
              << "i_pv_magnitude_a," << short_precision(cmd.magnitude) << "\n"
              << "i_pv_phase_rad," << short_precision(cmd.phase) << "\n";
    if (!a.time_domain) return;

    TrackingOptions opts;
    opts.duration = a.periods * inv.period();
    const auto result = track_references(ref, inv, a.gains, opts);
    std::string csv = "period,i_l_rms,i_l_phase_rad,relative_error,i_pv_magnitude,i_pv_phase_rad\n";
    PlotSeries err{"relative error", {}, {}};
    for (const auto& s : result.periods) {
        csv += std::to_string(s.period) + "," + full_precision(s.i_l_rms) + "," + full_precision(s.i_l_phase) + "," +
               full_precision(s.relative_error) + "," + full_precision(s.command_magnitude) + "," +
               full_precision(s.command_phase) + "\n";
        err.x.push_back(s.period);
        err.y.push_back(s.relative_error);
    }
    if (!a.csv.empty()) {
        write_or_print(csv, a.csv);
    }
    if (!a.svg.empty()) {
        emit_svg({"Inductor current tracking", "Grid period", "|I_L - I_L*| / |I_L*|", {err}, a.svg});
    }
    std::cout << "settled_period," << result.settled_period << "\n"
              << "converged," << (result.converged ? "true" : "false") << "\n";
}

struct PowerflowArgs {
    std::string network;
    std::string injections;
    std::string out;
    std::string method = "newton";
    double tolerance = 1e-8;
    int max_iterations = 30;
};

void run_powerflow(const PowerflowArgs& a) {
    const auto net = load_network(a.network);
    const auto seq = reduce_configs(net.configs);
    const auto y = assemble_ybus(net, seq);
    std::vector<BusInjection> inj;
    if (!a.injections.empty()) {
        inj = to_per_unit(read_injections_csv(a.injections), net.base);
    }
    const SolverOptions opts{a.tolerance, a.max_iterations};
    const auto sol = a.method == "sweep" ? solve_sweep(y, inj, Complex(1.0, 0.0), opts)
                                         : solve_newton(y, inj, Complex(1.0, 0.0), opts);
    if (a.out.empty()) {
        std::cout << format_voltage_csv(sol);
    } else {
        write_or_print(format_voltage_csv(sol), a.out);
    }
    std::cout << format_powerflow_summary(sol) << "\n";
}

struct SimulateArgs {
    std::string network;
    std::string scenario;
    std::string params;
    std::string data_dir;
    std::string out = "results";
    bool sequential = false;
};

void run_simulate(const SimulateArgs& a) {
    const auto data = resolve_data(a.data_dir);
    const auto net = load_network(a.network.empty() ? data / "ieee37.json" : fs::path(a.network));
    const auto cfg = a.scenario.empty() ? ScenarioConfig{} : load_scenario(a.scenario);
    const auto params = params_from(a.params, data);
    const auto profiles = load_day_profiles(data);
    RunOptions opts;
    opts.parallel = !a.sequential;
    const auto result = run_day(net, reduce_configs(net.configs), params, profiles, cfg, opts);
    write_daily_results(result, a.out);
    int worst = 0;
    double pv_kwh = 0.0, loss_kwh = 0.0;
    for (const auto& h : result.hours) {
        worst = std::max(worst, h.solution.iterations);
        pv_kwh += h.generation_kw;
        loss_kwh += h.losses_kva.real();
    }
    std::cout << "hours=24 max_iterations=" << worst << " pv_kwh=" << short_precision(pv_kwh)
              << " loss_kwh=" << short_precision(loss_kwh) << " out=" << a.out << "\n";
}

struct PlotArgs {
    std::string kind;
    std::string out;
    std::string data_dir;
    std::string results;
    std::string params;
};

PlotSeries profile_series(const HourlyProfile& p, const std::string& label) {
    PlotSeries s{label, {}, {}};
    for (int h = 1; h <= kHoursPerDay; ++h) {
        s.x.push_back(h);
        s.y.push_back(p.at(h));
    }
    return s;
}

void run_plot(const PlotArgs& a) {
    const auto data = resolve_data(a.data_dir);
    PlotSpec spec;
    spec.output = a.out;
    spec.x_label = "Hour";
    if (a.kind == "load") {
        spec.title = "Household load, June";
        spec.y_label = "Power [kW]";
        spec.series.push_back(profile_series(read_profile_csv(data / "load_profile.csv", ProfileUnit::kilowatt), "load"));
    } else if (a.kind == "irradiance") {
        spec.title = "Solar irradiance, average June day";
        spec.y_label = "Irradiance [W/m2]";
        spec.series.push_back(
            profile_series(read_profile_csv(data / "irradiance.csv", ProfileUnit::watt_per_m2), "irradiance"));
    } else if (a.kind == "temperature") {
        spec.title = "Air temperature, average June day";
        spec.y_label = "Temperature [C]";
        spec.series.push_back(
            profile_series(read_profile_csv(data / "temperature.csv", ProfileUnit::celsius), "temperature"));
    } else if (a.kind == "iv") {
        const auto params = params_from(a.params, data);
        spec.title = "I-V curves at 25 C";
        spec.x_label = "Voltage [V]";
        spec.y_label = "Current [A]";
        for (double g : {1000.0, 800.0, 600.0, 400.0, 200.0}) {
            PlotSeries s{short_precision(g) + " W/m2", {}, {}};
            for (const auto& pt : iv_curve(params, g, params.t_n, 100)) {
                s.x.push_back(pt.v);
                s.y.push_back(pt.i);
            }
            spec.series.push_back(std::move(s));
        }
    } else if (a.kind == "voltages") {
        if (a.results.empty()) {
            throw DomainError("plot --kind voltages needs --results");
        }
        PlotSeries lo{"min |V|", {}, {}}, hi{"max |V|", {}, {}};
        for (int h = 1; h <= kHoursPerDay; ++h) {
            lo.x.push_back(h);
            hi.x.push_back(h);
            lo.y.push_back(INFINITY);
            hi.y.push_back(0.0);
        }
        for (const auto& r : read_voltages_csv(fs::path(a.results) / "voltages.csv")) {
            if (r.hour < 1 || r.hour > kHoursPerDay) continue;
            lo.y[r.hour - 1] = std::min(lo.y[r.hour - 1], r.vmag);
            hi.y[r.hour - 1] = std::max(hi.y[r.hour - 1], r.vmag);
        }
        spec.title = "Bus voltage envelope";
        spec.y_label = "|V| [p.u.]";
        spec.series = {lo, hi};
    } else {
        throw DomainError("unknown plot kind '" + a.kind + "'");
    }
    emit_svg(spec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridsim: single-phase distribution feeder with PV generation"};
    app.require_subcommand(1);

    ReduceArgs reduce;
    auto* reduce_cmd = app.add_subcommand("reduce", "Positive-sequence line parameters as CSV");
    reduce_cmd->add_option("--network", reduce.network, "Network file providing the configurations");

    PvArgs pv;
    auto add_pv_options = [&pv](CLI::App* cmd) {
        cmd->add_option("--g", pv.g, "Irradiance [W/m2]")->check(CLI::NonNegativeNumber);
        cmd->add_option("--t-air", pv.t_air, "Air temperature [C]");
        cmd->add_option("--t-cell", pv.t_cell, "Cell temperature [K], overrides --t-air");
        cmd->add_option("--params", pv.params, "PV parameter file");
        cmd->add_option("--data-dir", pv.data_dir, "Bundled data directory");
    };
    auto* curve_cmd = app.add_subcommand("pv-curve", "Sample the I-V curve");
    add_pv_options(curve_cmd);
    curve_cmd->add_option("--points", pv.points, "Number of samples")->check(CLI::Range(2, 1000000));
    curve_cmd->add_option("--csv", pv.csv, "CSV output (default stdout)");
    curve_cmd->add_option("--svg", pv.svg, "SVG plot output");
    auto* mpp_cmd = app.add_subcommand("mpp", "Maximum power point");
    add_pv_options(mpp_cmd);

    InverterArgs inv;
    auto* inv_cmd = app.add_subcommand("inverter", "Inverter current references and tracking");
    inv_cmd->add_option("--p-star", inv.p_star, "Active power reference [W]")->required();
    inv_cmd->add_option("--q-star", inv.q_star, "Reactive power reference [var]");
    inv_cmd->add_option("--v-mv", inv.v_mv, "MV rms line-to-neutral voltage [V]");
    inv_cmd->add_flag("--time-domain", inv.time_domain, "Simulate closed-loop tracking");
    inv_cmd->add_option("--periods", inv.periods, "Simulated grid periods")->check(CLI::Range(20, 100000));
    inv_cmd->add_option("--kp-mag", inv.gains.kp_magnitude, "Magnitude gain");
    inv_cmd->add_option("--kp-phase", inv.gains.kp_phase, "Phase proportional gain");
    inv_cmd->add_option("--ki-phase", inv.gains.ki_phase, "Phase integral gain [1/s]");
    inv_cmd->add_option("--csv", inv.csv, "Per-period CSV output");
    inv_cmd->add_option("--svg", inv.svg, "Convergence plot output");

    PowerflowArgs pf;
    auto* pf_cmd = app.add_subcommand("powerflow", "Solve one power flow");
    pf_cmd->add_option("--network", pf.network, "Network file")->required();
    pf_cmd->add_option("--injections", pf.injections, "CSV bus,p_kw,q_kvar (positive = generation)");
    pf_cmd->add_option("--out", pf.out, "Voltage CSV output (default stdout)");
    pf_cmd->add_option("--method", pf.method, "newton or sweep")->check(CLI::IsMember({"newton", "sweep"}));
    pf_cmd->add_option("--tol", pf.tolerance, "Mismatch tolerance [p.u.]");
    pf_cmd->add_option("--max-iter", pf.max_iterations, "Iteration limit");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the 24-hour scenario");
    sim_cmd->add_option("--network", sim.network, "Network file (default: bundled feeder)");
    sim_cmd->add_option("--scenario", sim.scenario, "Scenario file");
    sim_cmd->add_option("--params", sim.params, "PV parameter file");
    sim_cmd->add_option("--data-dir", sim.data_dir, "Bundled data directory");
    sim_cmd->add_option("--out", sim.out, "Output directory");
    sim_cmd->add_flag("--sequential", sim.sequential, "Solve hours one after another");

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Render a figure as SVG");
    plot_cmd->add_option("--kind", plot.kind, "load, irradiance, temperature, iv or voltages")
        ->required()
        ->check(CLI::IsMember({"load", "irradiance", "temperature", "iv", "voltages"}));
    plot_cmd->add_option("--out", plot.out, "SVG output")->required();
    plot_cmd->add_option("--data-dir", plot.data_dir, "Bundled data directory");
    plot_cmd->add_option("--results", plot.results, "simulate output directory (voltages)");
    plot_cmd->add_option("--params", plot.params, "PV parameter file (iv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitDomain;
    }

    try {
        if (*reduce_cmd) run_reduce(reduce);
        else if (*curve_cmd) run_pv_curve(pv);
        else if (*mpp_cmd) run_mpp(pv);
        else if (*inv_cmd) run_inverter(inv);
        else if (*pf_cmd) run_powerflow(pf);
        else if (*sim_cmd) run_simulate(sim);
        else if (*plot_cmd) run_plot(plot);
    } catch (const NumericError& e) {
        std::cerr << "gridsim: numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "gridsim: " << e.what() << "\n";
        return kExitDomain;
    }
    return 0;
}
