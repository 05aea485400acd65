#include "gridsim/inverter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridsim/errors.hpp"

namespace gridsim {

namespace {

using cd = std::complex<double>;

constexpr int kDefaultPeriods = 25;
constexpr int kMinPeriods = 20;
constexpr int kGrowthWindow = 5;
constexpr double kGrowthLimit = 10.0;

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

void InverterParams::validate() const {
    if (!(r > 0.0) || !(l > 0.0) || !(omega > 0.0) || !(turns_ratio_n > 0.0)) {
        throw DomainError("inverter parameters r, l, omega and turns ratio must be positive");
    }
}

cd CurrentReference::phasor() const { return std::polar(i_l_star, -phi_l_star); }

CurrentReference compute_reference(const PowerReference& ref, double v_mv_rms, const InverterParams& inv) {
    inv.validate();
    if (!(ref.p_star > 0.0)) {
        throw DomainError("p_star must be positive (generating)");
    }
    if (!(v_mv_rms > 0.0)) {
        throw DomainError("MV voltage must be positive");
    }
    CurrentReference out;
    out.phi_l_star = std::atan(ref.q_star / ref.p_star);
    out.i_l_mv_star = ref.p_star / (v_mv_rms * std::cos(out.phi_l_star));
    out.i_l_star = inv.turns_ratio_n * out.i_l_mv_star;
    return out;
}

cd phasor_solve_forward(cd i_pv, const InverterParams& inv, cd v_g) {
    return (inv.r * i_pv - v_g) / inv.impedance();
}

SourceCommand phasor_solve_inverse(cd i_l_target, const InverterParams& inv, cd v_g) {
    const cd i_pv = (inv.impedance() * i_l_target + v_g) / inv.r;
    return {std::abs(i_pv), std::arg(i_pv)};
}

SourceCommand phasor_solve_inverse(const CurrentReference& target, const InverterParams& inv, cd v_g) {
    return phasor_solve_inverse(target.phasor(), inv, v_g);
}

// The loops act on an inductor-current command M∠Θ that is mapped to the source current through
// the steady-state circuit relation. Magnitude: dM/dt = kp_magnitude / T * e_mag.
// Phase: Θ = Θ_int + kp_phase * e_phase with dΘ_int/dt = ki_phase * e_phase.
// The feedback phasor is demodulated from i_L and di_L/dt at every step.
TrackingResult track_references(const CurrentReference& target, const InverterParams& inv,
                                const TrackingGains& gains, const TrackingOptions& options) {
    inv.validate();
    const double period = inv.period();
    const double duration = options.duration > 0.0 ? options.duration : kDefaultPeriods * period;
    const int n_periods = static_cast<int>(std::floor(duration / period + 1e-9));
    if (n_periods < kMinPeriods) {
        throw DomainError("tracking duration must cover at least 20 grid periods");
    }
    if (!(options.dt > 0.0) || options.dt > period / 20.0) {
        throw DomainError("time step must be positive and resolve the grid period");
    }
    const int steps = static_cast<int>(std::lround(period / options.dt));
    const double dt = period / steps;
    const double w = inv.omega;
    const double sqrt2 = std::numbers::sqrt2;
    const cd z = inv.impedance();
    const cd v_g(inv.v_lv_rms, 0.0);
    const cd i_target = target.phasor();
    const double target_mag = std::abs(i_target);
    const double target_phase = std::arg(i_target);

    double magnitude = 0.0;
    double phase_int = 0.0;
    double i_l = 0.0;
    if (options.start_at_equilibrium) {
        magnitude = target_mag;
        phase_int = target_phase;
        i_l = sqrt2 * target_mag * std::cos(target_phase);
    }

    auto source_for = [&](double mag, double ph) { return (z * std::polar(mag, ph) + v_g) / inv.r; };
    auto derivative = [&](double t, double current, cd source) {
        const double i_pv = sqrt2 * std::abs(source) * std::cos(w * t + std::arg(source));
        const double vg = sqrt2 * inv.v_lv_rms * std::cos(w * t);
        return (inv.r * (i_pv - current) - vg) / inv.l;
    };

    TrackingResult result;
    result.periods.reserve(n_periods);
    cd source = source_for(magnitude, phase_int);
    double t = 0.0;
    for (int k = 0; k < n_periods; ++k) {
        cd accum = 0.0;
        for (int s = 0; s < steps; ++s) {
            t = (static_cast<double>(k) * steps + s) * dt;
            const cd rotor = std::polar(1.0, -w * t);
            // Demodulate against the integrator-only command; feeding the proportional term back
            // through di/dt closes a high-gain algebraic loop.
            const double didt = derivative(t, i_l, source_for(magnitude, phase_int));
            const cd estimate = cd(i_l, -didt / w) * rotor / sqrt2;
            const double e_mag = target_mag - std::abs(estimate);
            const double e_phase = wrap_angle(target_phase - std::arg(estimate));

            source = source_for(magnitude, phase_int + gains.kp_phase * e_phase);

            accum += i_l * rotor;
            const double k1 = derivative(t, i_l, source);
            const double k2 = derivative(t + dt / 2, i_l + dt / 2 * k1, source);
            const double k3 = derivative(t + dt / 2, i_l + dt / 2 * k2, source);
            const double k4 = derivative(t + dt, i_l + dt * k3, source);
            i_l += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            magnitude += dt * gains.kp_magnitude / period * e_mag;
            phase_int += dt * gains.ki_phase * e_phase;
        }
        const cd measured = accum * sqrt2 / static_cast<double>(steps);
        PeriodSample sample;
        sample.period = k + 1;
        sample.i_l_rms = std::abs(measured);
        sample.i_l_phase = std::arg(measured);
        sample.relative_error = std::abs(measured - i_target) / (target_mag > 0.0 ? target_mag : 1.0);
        sample.command_magnitude = std::abs(source);
        sample.command_phase = std::arg(source);
        if (!std::isfinite(sample.i_l_rms)) {
            throw DivergenceError("inductor current became non-finite in period " + std::to_string(k + 1));
        }
        if (k >= kGrowthWindow) {
            const double earlier = result.periods[k - kGrowthWindow].i_l_rms;
            if (earlier > 0.0 && sample.i_l_rms > kGrowthLimit * earlier &&
                sample.i_l_rms > 2.0 * std::max(target_mag, 1.0)) {
                throw DivergenceError("inductor current rms grew more than tenfold within 5 periods",
                                      sample.relative_error);
            }
        }
        result.periods.push_back(sample);
    }

    for (int k = n_periods - 1; k >= 0 && result.periods[k].relative_error < options.settle_tolerance; --k) {
        result.settled_period = k + 1;
    }
    result.converged = result.settled_period > 0;
    return result;
}

}  // namespace gridsim
