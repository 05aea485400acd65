#include "gridsim/pv_array.hpp"

#include <algorithm>
#include <cmath>

#include "gridsim/errors.hpp"
#include "gridsim/grid_model.hpp"
#include "json_io.hpp"

namespace gridsim {

namespace {

constexpr double kMaxExponent = 500.0;
constexpr int kScanPoints = 200;
constexpr double kGoldenTolerance = 1e-4;

double guarded_exp(double x) {
    if (x > kMaxExponent) {
        throw NumericError("diode exponent " + std::to_string(x) + " exceeds overflow guard");
    }
    return std::exp(x);
}

}  // namespace

void PVArrayParams::validate() const {
    if (!(r_s > 0.0) || !(r_p > 0.0) || !(a > 0.0)) {
        throw ValidationError("pv params: r_s, r_p and a must be positive");
    }
    if (n_s < 1 || n_p < 1) {
        throw ValidationError("pv params: n_s and n_p must be at least 1");
    }
    if (g_n != 1000.0 || t_n != 298.0) {
        throw ValidationError("pv params: reference conditions must be 1000 W/m^2 and 298 K");
    }
    if (!(i_sc_n > 0.0) || !(v_oc_n > 0.0)) {
        throw ValidationError("pv params: i_sc_n and v_oc_n must be positive");
    }
    double i_oc = 0.0;
    try {
        i_oc = solve_current(*this, v_oc_n, g_n, t_n);
    } catch (const Error& e) {
        throw ValidationError(std::string("pv params: open-circuit check failed: ") + e.what());
    }
    if (std::abs(i_oc) >= 0.02 * i_sc_n) {
        throw ValidationError("pv params: current at v_oc_n is " + std::to_string(i_oc) +
                              " A, inconsistent with the open-circuit rating");
    }
}

PVArrayParams parse_pv_params(const std::string& text, const std::string& source) {
    using detail::require;
    auto doc = detail::parse_json(text, source);
    PVArrayParams p;
    p.i_pv_n = require<double>(doc, "i_pv_n", source);
    p.i_sc_n = require<double>(doc, "i_sc_n", source);
    p.v_oc_n = require<double>(doc, "v_oc_n", source);
    p.k_i = require<double>(doc, "k_i", source);
    p.k_v = require<double>(doc, "k_v", source);
    p.a = require<double>(doc, "a", source);
    p.r_s = require<double>(doc, "r_s", source);
    p.r_p = require<double>(doc, "r_p", source);
    p.n_s = require<int>(doc, "n_s", source);
    p.n_p = require<int>(doc, "n_p", source);
    p.noct = detail::optional<double>(doc, "noct", 47.0, source);
    p.t_n = detail::optional<double>(doc, "t_n", 298.0, source);
    p.g_n = detail::optional<double>(doc, "g_n", 1000.0, source);
    p.validate();
    return p;
}

PVArrayParams load_pv_params(const std::filesystem::path& path) {
    return parse_pv_params(detail::read_text_file(path), path.string());
}

std::string serialize_pv_params(const PVArrayParams& p) {
    detail::json doc = {{"i_pv_n", p.i_pv_n}, {"i_sc_n", p.i_sc_n}, {"v_oc_n", p.v_oc_n}, {"k_i", p.k_i},
                        {"k_v", p.k_v},       {"a", p.a},           {"r_s", p.r_s},       {"r_p", p.r_p},
                        {"n_s", p.n_s},       {"n_p", p.n_p},       {"noct", p.noct},     {"t_n", p.t_n},
                        {"g_n", p.g_n}};
    return doc.dump(2) + "\n";
}

double cell_temperature(double t_air_c, double g, double noct_c) {
    return (t_air_c + 273.15) + (noct_c - 20.0) / 800.0 * g;
}

double thermal_voltage(const PVArrayParams& params, double t_cell) {
    return params.n_s * PhysicalConstants::boltzmann_k * t_cell / PhysicalConstants::electron_charge_q;
}

double photo_current(const PVArrayParams& params, double g, double t_cell) {
    return (params.i_pv_n + params.k_i * (t_cell - params.t_n)) * g / params.g_n;
}

double saturation_current(const PVArrayParams& params, double t_cell) {
    const double dt = t_cell - params.t_n;
    const double arg = (params.v_oc_n + params.k_v * dt) / (params.a * thermal_voltage(params, t_cell));
    const double denom = std::expm1(arg);
    if (!(denom > 0.0)) {
        throw DomainError("saturation current denominator is not positive at T = " + std::to_string(t_cell) + " K");
    }
    return (params.i_sc_n + params.k_i * dt) / denom;
}

DiodeConditions DiodeConditions::at(const PVArrayParams& params, double g, double t_cell) {
    if (!(t_cell > 0.0)) {
        throw DomainError("cell temperature must be positive");
    }
    if (g < 0.0) {
        throw DomainError("irradiance must be nonnegative");
    }
    DiodeConditions c;
    c.g = g;
    c.t_cell = t_cell;
    c.photo = photo_current(params, g, t_cell);
    c.i_0 = saturation_current(params, t_cell);
    c.v_t = thermal_voltage(params, t_cell);
    return c;
}

double current_residual(const PVArrayParams& p, const DiodeConditions& c, double v, double i) {
    const double vd = v + p.r_s * i;
    const double e = guarded_exp(vd / (c.v_t * p.a));
    return c.photo * p.n_p - c.i_0 * p.n_p * (e - 1.0) - vd / p.r_p - i;
}

double current_residual_slope(const PVArrayParams& p, const DiodeConditions& c, double v, double i) {
    const double vd = v + p.r_s * i;
    const double e = guarded_exp(vd / (c.v_t * p.a));
    return -c.i_0 * p.n_p * (p.r_s / (c.v_t * p.a)) * e - p.r_s / p.r_p - 1.0;
}

double solve_current(const PVArrayParams& params, const DiodeConditions& c, double v) {
    if (v < 0.0) {
        throw DomainError("terminal voltage must be nonnegative");
    }
    double i = c.photo * params.n_p;
    double f = current_residual(params, c, v, i);
    for (int iter = 0; iter < kCurrentMaxIterations; ++iter) {
        if (std::abs(f) < kCurrentTolerance) {
            return i;
        }
        const double step = -f / current_residual_slope(params, c, v, i);
        double scale = 1.0;
        double i_next = i;
        double f_next = f;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
            i_next = i + scale * step;
            try {
                f_next = current_residual(params, c, v, i_next);
            } catch (const NumericError&) {
                continue;
            }
            if (std::abs(f_next) < std::abs(f)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw NumericError("diode current solve stalled at V = " + std::to_string(v), f);
        }
        i = i_next;
        f = f_next;
    }
    if (std::abs(f) < kCurrentTolerance) {
        return i;
    }
    throw NumericError("diode current solve did not converge at V = " + std::to_string(v), f);
}

double solve_current(const PVArrayParams& params, double v, double g, double t_cell) {
    return solve_current(params, DiodeConditions::at(params, g, t_cell), v);
}

double open_circuit_voltage(const PVArrayParams& params, double g, double t_cell) {
    const auto c = DiodeConditions::at(params, g, t_cell);
    if (g == 0.0) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = std::max(params.v_oc_n + params.k_v * (t_cell - params.t_n), 1.0);
    for (int grow = 0; solve_current(params, c, hi) > 0.0; ++grow) {
        if (grow > 60) {
            throw NumericError("could not bracket open-circuit voltage");
        }
        lo = hi;
        hi *= 1.25;
    }
    // bisect to machine resolution
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (solve_current(params, c, mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<OperatingPoint> iv_curve(const PVArrayParams& params, double g, double t_cell, int n_points) {
    if (n_points < 2) {
        throw DomainError("an I-V curve needs at least two points");
    }
    const auto c = DiodeConditions::at(params, g, t_cell);
    const double v_oc = open_circuit_voltage(params, g, t_cell);
    std::vector<OperatingPoint> out;
    out.reserve(n_points);
    for (int k = 0; k < n_points; ++k) {
        const double v = k + 1 == n_points ? v_oc : v_oc * k / (n_points - 1);
        out.push_back(OperatingPoint::at(v, solve_current(params, c, v)));
    }
    return out;
}

OperatingPoint mpp(const PVArrayParams& params, double g, double t_cell) {
    if (g < 0.0) {
        throw DomainError("irradiance must be nonnegative");
    }
    if (g == 0.0) {
        return {};
    }
    const auto c = DiodeConditions::at(params, g, t_cell);
    const double v_oc = open_circuit_voltage(params, g, t_cell);
    auto power = [&](double v) { return v * solve_current(params, c, v); };

    int best = 0;
    double best_p = -1.0;
    for (int k = 0; k < kScanPoints; ++k) {
        const double p = power(v_oc * k / (kScanPoints - 1));
        if (p > best_p) {
            best_p = p;
            best = k;
        }
    }
    const double step = v_oc / (kScanPoints - 1);
    double lo = std::max(0.0, (best - 1) * step);
    double hi = std::min(v_oc, (best + 1) * step);

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double p1 = power(x1);
    double p2 = power(x2);
    while (hi - lo > kGoldenTolerance) {
        if (p1 < p2) {
            lo = x1;
            x1 = x2;
            p1 = p2;
            x2 = lo + inv_phi * (hi - lo);
            p2 = power(x2);
        } else {
            hi = x2;
            x2 = x1;
            p2 = p1;
            x1 = hi - inv_phi * (hi - lo);
            p1 = power(x1);
        }
    }
    const double v = p1 > p2 ? x1 : x2;
    OperatingPoint refined = OperatingPoint::at(v, solve_current(params, c, v));
    if (refined.p < best_p) {
        const double vb = best * step;
        return OperatingPoint::at(vb, solve_current(params, c, vb));
    }
    return refined;
}

}  // namespace gridsim
