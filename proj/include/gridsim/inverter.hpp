#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace gridsim {

/// Simplified single-phase inverter: controlled current source i_pv feeding the grid through a
/// shunt resistor R and series inductor L, behind an ideal MV/LV transformer of ratio N.
struct InverterParams {
    double r = 1.0;                                  // ohm
    double l = 1.0 / (100.0 * std::numbers::pi);     // H, omega*L = 1 ohm at 50 Hz
    double omega = 100.0 * std::numbers::pi;         // rad/s
    double v_lv_rms = 220.0;                         // V
    double turns_ratio_n = (4800.0 / std::numbers::sqrt3) / 220.0;

    /// Throws DomainError unless r, l, omega, turns_ratio_n are positive.
    void validate() const;
    double period() const noexcept { return 2.0 * std::numbers::pi / omega; }
    std::complex<double> impedance() const noexcept { return {r, omega * l}; }
};

struct PowerReference {
    double p_star = 0.0;  // W
    double q_star = 0.0;  // var
};

struct CurrentReference {
    double phi_l_star = 0.0;   // rad
    double i_l_mv_star = 0.0;  // A rms, MV side
    double i_l_star = 0.0;     // A rms, LV side

    /// LV inductor-current phasor, lagging by phi_l_star against V_g at angle 0.
    std::complex<double> phasor() const;
};

/// Inductor current set-point for a desired (P*, Q*) at MV rms voltage v_mv_rms.
/// Throws DomainError for p_star <= 0 or v_mv_rms <= 0.
CurrentReference compute_reference(const PowerReference& ref, double v_mv_rms, const InverterParams& inv);

/// Steady-state inductor current for a given source current (rms phasors).
std::complex<double> phasor_solve_forward(std::complex<double> i_pv, const InverterParams& inv,
                                          std::complex<double> v_g);

/// Source current command, as polar (rms magnitude, phase).
struct SourceCommand {
    double magnitude = 0.0;
    double phase = 0.0;

    std::complex<double> phasor() const { return std::polar(magnitude, phase); }
};

/// Source current that produces a target inductor current phasor.
SourceCommand phasor_solve_inverse(std::complex<double> i_l_target, const InverterParams& inv,
                                   std::complex<double> v_g);
SourceCommand phasor_solve_inverse(const CurrentReference& target, const InverterParams& inv,
                                   std::complex<double> v_g);

struct TrackingGains {
    double kp_magnitude = 0.5;  // per grid period
    double kp_phase = 2.0;
    double ki_phase = 50.0;     // 1/s
};

struct TrackingOptions {
    double duration = 0.0;           // s; 0 means 25 grid periods
    double dt = 1e-5;                // s
    bool start_at_equilibrium = false;
    double settle_tolerance = 0.01;  // relative phasor error
};

/// Per-period rms/phase of the simulated inductor current and the source command.
struct PeriodSample {
    int period = 0;              // 1-based
    double i_l_rms = 0.0;
    double i_l_phase = 0.0;      // rad
    double relative_error = 0.0; // |I_L - I_L*| / |I_L*|
    double command_magnitude = 0.0;
    double command_phase = 0.0;
};

struct TrackingResult {
    std::vector<PeriodSample> periods;
    bool converged = false;       // final period within settle_tolerance
    int settled_period = 0;       // first period from which every later one is within tolerance; 0 if none
};

/// Time-domain closed-loop simulation of L di_L/dt = R (i_pv - i_L) - v_g.
/// Throws DomainError if the duration is shorter than 20 periods and DivergenceError if the
/// per-period rms grows more than tenfold within 5 periods.
TrackingResult track_references(const CurrentReference& target, const InverterParams& inv,
                                 const TrackingGains& gains, const TrackingOptions& options = {});

}  // namespace gridsim
