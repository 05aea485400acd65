#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gridsim {

/// Single-diode array constants. Currents in A, voltages in V, temperatures in K unless noted.
struct PVArrayParams {
    double i_pv_n = 8.214;   // photo-current at STC
    double i_sc_n = 8.21;
    double v_oc_n = 32.9;
    double k_i = 0.0032;     // A/K
    double k_v = -0.1230;    // V/K
    double a = 1.3;          // diode ideality
    double r_s = 0.221;
    double r_p = 415.405;
    int n_s = 54;
    int n_p = 1;
    double noct = 47.0;      // degC
    double t_n = 298.0;
    double g_n = 1000.0;     // W/m^2

    /// Range checks plus the open-circuit consistency check at STC.
    /// Throws ValidationError.
    void validate() const;
};

/// Kyocera KC200GT, 54 series cells, one string.
inline PVArrayParams kc200gt() { return PVArrayParams{}; }

PVArrayParams load_pv_params(const std::filesystem::path& path);
PVArrayParams parse_pv_params(const std::string& text, const std::string& source = "<memory>");
std::string serialize_pv_params(const PVArrayParams& params);

struct OperatingPoint {
    double v = 0.0;
    double i = 0.0;
    double p = 0.0;

    static OperatingPoint at(double v, double i) { return {v, i, v * i}; }
};

struct WeatherSample {
    double g = 0.0;      // W/m^2
    double t_air = 0.0;  // degC
};

/// Air temperature [degC] and irradiance [W/m^2] to cell temperature [K].
/// Rise is (noct - 20) / 800 * g, i.e. the NOCT rule with irradiance in mW/cm^2.
double cell_temperature(double t_air_c, double g, double noct_c);

double thermal_voltage(const PVArrayParams& params, double t_cell);
double photo_current(const PVArrayParams& params, double g, double t_cell);

/// Throws DomainError when the denominator is not positive.
double saturation_current(const PVArrayParams& params, double t_cell);

/// Temperature/irradiance-dependent terms of the implicit current equation.
struct DiodeConditions {
    double g = 0.0;
    double t_cell = 0.0;
    double photo = 0.0;       // per-cell photo-current
    double i_0 = 0.0;
    double v_t = 0.0;

    static DiodeConditions at(const PVArrayParams& params, double g, double t_cell);
};

/// f(I) at terminal voltage v; zero on the I-V curve.
/// Throws NumericError if the exponent argument exceeds 500.
double current_residual(const PVArrayParams& params, const DiodeConditions& c, double v, double i);
double current_residual_slope(const PVArrayParams& params, const DiodeConditions& c, double v, double i);

inline constexpr double kCurrentTolerance = 1e-9;
inline constexpr int kCurrentMaxIterations = 100;

/// Array output current at voltage v (v >= 0). Damped Newton; negative past open circuit.
double solve_current(const PVArrayParams& params, double v, double g, double t_cell);
double solve_current(const PVArrayParams& params, const DiodeConditions& c, double v);

/// Voltage where the output current crosses zero. Zero for g == 0.
double open_circuit_voltage(const PVArrayParams& params, double g, double t_cell);

/// n_points uniformly spaced samples on [0, V_oc].
std::vector<OperatingPoint> iv_curve(const PVArrayParams& params, double g, double t_cell, int n_points);

/// Maximum power point: 200-point scan then golden-section refinement to 1e-4 V.
OperatingPoint mpp(const PVArrayParams& params, double g, double t_cell);

}  // namespace gridsim
