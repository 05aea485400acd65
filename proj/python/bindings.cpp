#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gridsim/gridsim.hpp"

namespace py = pybind11;
using namespace gridsim;

namespace {

std::vector<BusInjection> to_injections(const std::vector<std::tuple<int, double, double>>& rows) {
    std::vector<BusInjection> out;
    out.reserve(rows.size());
    for (const auto& [bus, p, q] : rows) out.push_back({bus, p, q});
    return out;
}

py::dict voltage_dict(const PowerFlowSolution& sol) {
    py::dict d;
    for (std::size_t k = 0; k < sol.bus_ids.size(); ++k) d[py::int_(sol.bus_ids[k])] = sol.voltages[k];
    return d;
}

}  // namespace

PYBIND11_MODULE(_gridsim, m) {
    m.doc() = "Single-phase feeder simulation with PV arrays";

    auto base_error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base_error.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base_error.ptr());
    auto domain_error = py::register_exception<DomainError>(m, "DomainError", base_error.ptr());
    py::register_exception<IoError>(m, "IoError", base_error.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", domain_error.ptr());
    py::register_exception<TopologyError>(m, "TopologyError", domain_error.ptr());
    auto numeric_error = py::register_exception<NumericError>(m, "NumericError", base_error.ptr());
    py::register_exception<SolverError>(m, "SolverError", numeric_error.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", numeric_error.ptr());

    // grid model
    py::class_<NetworkModel>(m, "NetworkModel")
        .def_readonly("name", &NetworkModel::name)
        .def_property_readonly("slack_id", &NetworkModel::slack_id)
        .def_property_readonly("bus_ids",
                               [](const NetworkModel& n) {
                                   std::vector<int> ids;
                                   for (const auto& b : n.buses) ids.push_back(b.id);
                                   return ids;
                               })
        .def_property_readonly("segments",
                               [](const NetworkModel& n) {
                                   std::vector<std::tuple<int, int, double, int>> out;
                                   for (const auto& s : n.segments)
                                       out.emplace_back(s.from_bus, s.to_bus, s.length_ft, s.config_id);
                                   return out;
                               })
        .def_property_readonly("s_base", [](const NetworkModel& n) { return n.base.s_base; })
        .def_property_readonly("v_base", [](const NetworkModel& n) { return n.base.v_base; })
        .def("to_json", [](const NetworkModel& n) { return serialize_network(n); })
        .def("__repr__", [](const NetworkModel& n) {
            return "<NetworkModel " + n.name + " buses=" + std::to_string(n.buses.size()) + ">";
        });
    m.def("load_network", &load_network, py::arg("path"));
    m.def("parse_network", &parse_network, py::arg("text"), py::arg("source") = "<memory>");

    // sequence reduction
    py::class_<SequenceLineParams>(m, "SequenceLineParams")
        .def_readonly("config_id", &SequenceLineParams::config_id)
        .def_readonly("z_positive", &SequenceLineParams::z_positive)
        .def_readonly("z_zero", &SequenceLineParams::z_zero)
        .def_readonly("b_positive", &SequenceLineParams::b_positive);
    m.def("reduce_configs", [](const NetworkModel& n) { return reduce_configs(n.configs); }, py::arg("network"));
    m.def("standard_sequence_params", [] { return reduce_configs(standard_line_configs()); });

    // PV array
    py::class_<PVArrayParams>(m, "PVArrayParams")
        .def(py::init<>())
        .def_readwrite("i_pv_n", &PVArrayParams::i_pv_n)
        .def_readwrite("i_sc_n", &PVArrayParams::i_sc_n)
        .def_readwrite("v_oc_n", &PVArrayParams::v_oc_n)
        .def_readwrite("k_i", &PVArrayParams::k_i)
        .def_readwrite("k_v", &PVArrayParams::k_v)
        .def_readwrite("a", &PVArrayParams::a)
        .def_readwrite("r_s", &PVArrayParams::r_s)
        .def_readwrite("r_p", &PVArrayParams::r_p)
        .def_readwrite("n_s", &PVArrayParams::n_s)
        .def_readwrite("n_p", &PVArrayParams::n_p)
        .def_readwrite("noct", &PVArrayParams::noct)
        .def_readwrite("t_n", &PVArrayParams::t_n)
        .def_readwrite("g_n", &PVArrayParams::g_n)
        .def("validate", &PVArrayParams::validate);
    py::class_<OperatingPoint>(m, "OperatingPoint")
        .def_readonly("v", &OperatingPoint::v)
        .def_readonly("i", &OperatingPoint::i)
        .def_readonly("p", &OperatingPoint::p)
        .def("__repr__", [](const OperatingPoint& o) {
            return "<OperatingPoint v=" + short_precision(o.v) + " i=" + short_precision(o.i) +
                   " p=" + short_precision(o.p) + ">";
        });
    m.def("kc200gt", &kc200gt);
    m.def("load_pv_params", &load_pv_params, py::arg("path"));
    m.def("cell_temperature", &cell_temperature, py::arg("t_air_c"), py::arg("g"), py::arg("noct_c") = 47.0);
    m.def("thermal_voltage", &thermal_voltage, py::arg("params"), py::arg("t_cell"));
    m.def("photo_current", &photo_current, py::arg("params"), py::arg("g"), py::arg("t_cell"));
    m.def("saturation_current", &saturation_current, py::arg("params"), py::arg("t_cell"));
    m.def("solve_current", py::overload_cast<const PVArrayParams&, double, double, double>(&solve_current),
          py::arg("params"), py::arg("v"), py::arg("g"), py::arg("t_cell"));
    m.def("open_circuit_voltage", &open_circuit_voltage, py::arg("params"), py::arg("g"), py::arg("t_cell"));
    m.def("iv_curve", &iv_curve, py::arg("params"), py::arg("g"), py::arg("t_cell"), py::arg("n_points") = 100);
    m.def("mpp", &mpp, py::arg("params"), py::arg("g"), py::arg("t_cell"));

    // inverter
    py::class_<InverterParams>(m, "InverterParams")
        .def(py::init<>())
        .def_readwrite("r", &InverterParams::r)
        .def_readwrite("l", &InverterParams::l)
        .def_readwrite("omega", &InverterParams::omega)
        .def_readwrite("v_lv_rms", &InverterParams::v_lv_rms)
        .def_readwrite("turns_ratio_n", &InverterParams::turns_ratio_n);
    py::class_<CurrentReference>(m, "CurrentReference")
        .def(py::init<>())
        .def_readwrite("phi_l_star", &CurrentReference::phi_l_star)
        .def_readwrite("i_l_mv_star", &CurrentReference::i_l_mv_star)
        .def_readwrite("i_l_star", &CurrentReference::i_l_star)
        .def("phasor", &CurrentReference::phasor);
    py::class_<TrackingGains>(m, "TrackingGains")
        .def(py::init<>())
        .def(py::init<double, double, double>(), py::arg("kp_magnitude"), py::arg("kp_phase"), py::arg("ki_phase"))
        .def_readwrite("kp_magnitude", &TrackingGains::kp_magnitude)
        .def_readwrite("kp_phase", &TrackingGains::kp_phase)
        .def_readwrite("ki_phase", &TrackingGains::ki_phase);
    py::class_<PeriodSample>(m, "PeriodSample")
        .def_readonly("period", &PeriodSample::period)
        .def_readonly("i_l_rms", &PeriodSample::i_l_rms)
        .def_readonly("i_l_phase", &PeriodSample::i_l_phase)
        .def_readonly("relative_error", &PeriodSample::relative_error)
        .def_readonly("command_magnitude", &PeriodSample::command_magnitude)
        .def_readonly("command_phase", &PeriodSample::command_phase);
    py::class_<TrackingResult>(m, "TrackingResult")
        .def_readonly("periods", &TrackingResult::periods)
        .def_readonly("converged", &TrackingResult::converged)
        .def_readonly("settled_period", &TrackingResult::settled_period);
    m.def(
        "compute_reference",
        [](double p_star, double q_star, double v_mv_rms, const InverterParams& inv) {
            return compute_reference({p_star, q_star}, v_mv_rms, inv);
        },
        py::arg("p_star"), py::arg("q_star"), py::arg("v_mv_rms"), py::arg("inv") = InverterParams{});
    m.def("phasor_solve_forward", &phasor_solve_forward, py::arg("i_pv"), py::arg("inv"), py::arg("v_g"));
    m.def(
        "phasor_solve_inverse",
        [](std::complex<double> i_l, const InverterParams& inv, std::complex<double> v_g) {
            const auto c = phasor_solve_inverse(i_l, inv, v_g);
            return std::make_pair(c.magnitude, c.phase);
        },
        py::arg("i_l_target"), py::arg("inv"), py::arg("v_g"));
    m.def(
        "track_references",
        [](const CurrentReference& target, const InverterParams& inv, const TrackingGains& gains, double duration,
           bool start_at_equilibrium) {
            TrackingOptions opt;
            opt.duration = duration;
            opt.start_at_equilibrium = start_at_equilibrium;
            return track_references(target, inv, gains, opt);
        },
        py::arg("target"), py::arg("inv") = InverterParams{}, py::arg("gains") = TrackingGains{},
        py::arg("duration") = 0.0, py::arg("start_at_equilibrium") = false);

    // power flow
    py::class_<PowerFlowSolution>(m, "PowerFlowSolution")
        .def_property_readonly("voltages", &voltage_dict)
        .def_readonly("total_loss", &PowerFlowSolution::total_loss)
        .def_readonly("slack_power", &PowerFlowSolution::slack_power)
        .def_readonly("iterations", &PowerFlowSolution::iterations)
        .def_readonly("max_mismatch", &PowerFlowSolution::max_mismatch)
        .def_readonly("mismatch_history", &PowerFlowSolution::mismatch_history)
        .def_property_readonly("branch_flows",
                               [](const PowerFlowSolution& s) {
                                   std::vector<std::tuple<int, int, Complex, Complex>> out;
                                   for (const auto& f : s.branch_flows)
                                       out.emplace_back(f.from_bus, f.to_bus, f.s_from, f.s_to);
                                   return out;
                               })
        .def("voltage", &PowerFlowSolution::voltage, py::arg("bus_id"));
    m.def(
        "solve_power_flow",
        [](const NetworkModel& net, const std::vector<std::tuple<int, double, double>>& injections,
           const std::string& method, Complex slack_v, double tolerance, int max_iterations) {
            const auto seq = reduce_configs(net.configs);
            const auto inj = to_injections(injections);
            const SolverOptions opt{tolerance, max_iterations};
            if (method == "sweep") return solve_sweep(net, seq, inj, slack_v, opt);
            if (method != "newton") throw DomainError("method must be 'newton' or 'sweep'");
            return solve_newton(assemble_ybus(net, seq), inj, slack_v, opt);
        },
        py::arg("network"), py::arg("injections") = std::vector<std::tuple<int, double, double>>{},
        py::arg("method") = "newton", py::arg("slack_v") = Complex(1.0, 0.0), py::arg("tolerance") = 1e-8,
        py::arg("max_iterations") = 30,
        "Injections are (bus, p, q) in per-unit, positive for generation.");

    // daily scenario
    py::class_<HourlyProfile>(m, "HourlyProfile")
        .def_property_readonly("values", [](const HourlyProfile& p) {
            return std::vector<double>(p.values.begin(), p.values.end());
        })
        .def("at", &HourlyProfile::at, py::arg("hour"));
    py::class_<DayProfiles>(m, "DayProfiles")
        .def_readonly("household_load", &DayProfiles::household_load)
        .def_readonly("irradiance", &DayProfiles::irradiance)
        .def_readonly("air_temperature", &DayProfiles::air_temperature);
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("households_per_bus", &ScenarioConfig::households_per_bus)
        .def_readwrite("q_fraction", &ScenarioConfig::q_fraction)
        .def_readwrite("pv_sites", &ScenarioConfig::pv_sites)
        .def("to_json", [](const ScenarioConfig& c) { return serialize_scenario(c); });
    py::class_<SiteOutput>(m, "SiteOutput")
        .def_readonly("bus_id", &SiteOutput::bus_id)
        .def_readonly("arrays", &SiteOutput::arrays)
        .def_readonly("p_w", &SiteOutput::p_w)
        .def_readonly("q_var", &SiteOutput::q_var);
    py::class_<HourResult>(m, "HourResult")
        .def_readonly("hour", &HourResult::hour)
        .def_readonly("solution", &HourResult::solution)
        .def_readonly("pv", &HourResult::pv)
        .def_readonly("load_kw", &HourResult::load_kw)
        .def_readonly("load_kvar", &HourResult::load_kvar)
        .def_readonly("generation_kw", &HourResult::generation_kw)
        .def_readonly("generation_kvar", &HourResult::generation_kvar)
        .def_readonly("losses_kva", &HourResult::losses_kva)
        .def_readonly("slack_kva", &HourResult::slack_kva);
    py::class_<DailyResult>(m, "DailyResult").def_readonly("hours", &DailyResult::hours);

    m.def("load_day_profiles", &load_day_profiles, py::arg("directory"));
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<memory>");
    m.def(
        "run_day",
        [](const NetworkModel& net, const PVArrayParams& params, const DayProfiles& profiles,
           const ScenarioConfig& cfg, bool parallel) {
            RunOptions opt;
            opt.parallel = parallel;
            py::gil_scoped_release release;
            return run_day(net, reduce_configs(net.configs), params, profiles, cfg, opt);
        },
        py::arg("network"), py::arg("params"), py::arg("profiles"), py::arg("scenario"), py::arg("parallel") = true);
    m.def("write_daily_results", &write_daily_results, py::arg("result"), py::arg("directory"));

    // plotting
    m.def(
        "render_svg",
        [](const std::vector<std::tuple<std::string, std::vector<double>, std::vector<double>>>& series,
           const std::string& title, const std::string& x_label, const std::string& y_label) {
            PlotSpec spec;
            spec.title = title;
            spec.x_label = x_label;
            spec.y_label = y_label;
            for (const auto& [label, x, y] : series) spec.series.push_back({label, x, y});
            return render_svg(spec);
        },
        py::arg("series"), py::arg("title") = "", py::arg("x_label") = "", py::arg("y_label") = "");
}
