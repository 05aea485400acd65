#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "gridsim/errors.hpp"
#include "gridsim/inverter.hpp"

using namespace gridsim;
using cd = std::complex<double>;

namespace {

const cd kVg{220.0, 0.0};

InverterParams unit_inverter() {
    InverterParams inv;
    inv.r = 1.0;
    inv.l = 1.0 / inv.omega;
    return inv;
}

}  // namespace

TEST_CASE("reference from power set-points") {
    const InverterParams inv;
    const auto r = compute_reference({4000.0, 0.0}, 2771.28, inv);
    CHECK(r.phi_l_star == 0.0);
    CHECK(r.i_l_mv_star == doctest::Approx(1.4434).epsilon(1e-4));

    auto inv2 = inv;
    inv2.turns_ratio_n = 2771.28 / 220.0;
    const auto r2 = compute_reference({4000.0, 0.0}, 2771.28, inv2);
    CHECK(r2.i_l_star == doctest::Approx(18.182).epsilon(1e-4));
    CHECK(r2.i_l_star == doctest::Approx(inv2.turns_ratio_n * r2.i_l_mv_star).epsilon(1e-15));

    CHECK(compute_reference({3000.0, 3000.0}, 2771.28, inv).phi_l_star ==
          doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));

    CHECK_THROWS_AS(compute_reference({0.0, 100.0}, 2771.28, inv), DomainError);
    CHECK_THROWS_AS(compute_reference({-5.0, 0.0}, 2771.28, inv), DomainError);
    CHECK_THROWS_AS(compute_reference({100.0, 0.0}, 0.0, inv), DomainError);
}

TEST_CASE("delivered MV power equals the set-point") {
    const InverterParams inv;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> p(1.0, 50000.0), q(-30000.0, 30000.0), v(1000.0, 5000.0);
    for (int k = 0; k < 50; ++k) {
        const PowerReference ref{p(rng), q(rng)};
        const double vmv = v(rng);
        const auto r = compute_reference(ref, vmv, inv);
        const cd i_mv = std::polar(r.i_l_mv_star, -r.phi_l_star);
        const cd s = vmv * std::conj(i_mv);
        CHECK(s.real() == doctest::Approx(ref.p_star).epsilon(1e-6));
        CHECK(std::abs(s.imag() - ref.q_star) <= 1e-6 * std::abs(cd(ref.p_star, ref.q_star)));
    }
}

TEST_CASE("phasor circuit solutions") {
    const auto inv = unit_inverter();
    CHECK(std::abs(phasor_solve_forward(cd(230.0, 10.0), inv, kVg) - cd(10.0, 0.0)) < 1e-12);
    CHECK(std::abs(phasor_solve_forward(kVg / inv.r, inv, kVg)) < 1e-12);
    const cd base = phasor_solve_forward(cd(300.0, -40.0), inv, kVg);
    CHECK(std::abs(phasor_solve_forward(cd(300.0, -40.0) * 3.5, inv, kVg * 3.5) - base * 3.5) < 1e-10);

    const auto cmd = phasor_solve_inverse(cd(10.0, 0.0), inv, kVg);
    CHECK(cmd.magnitude == doctest::Approx(230.217).epsilon(1e-4));
    CHECK(std::abs(cmd.magnitude - std::hypot(230.0, 10.0)) < 1e-12);
    CHECK(cmd.phase == doctest::Approx(0.043426).epsilon(1e-4));
    CHECK(std::abs(cmd.phase - std::atan2(10.0, 230.0)) < 1e-15);

    const auto zero = phasor_solve_inverse(cd(0.0, 0.0), inv, kVg);
    CHECK(std::abs(zero.phasor() - kVg / inv.r) < 1e-12);

    CurrentReference target;
    target.i_l_star = 10.0;
    const auto via_ref = phasor_solve_inverse(target, inv, kVg);
    CHECK(via_ref.magnitude == cmd.magnitude);
}

TEST_CASE("forward/inverse round trip") {
    const InverterParams inv;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> mag(0.1, 200.0), ang(-std::numbers::pi / 2, std::numbers::pi / 2);
    for (int k = 0; k < 50; ++k) {
        const cd target = std::polar(mag(rng), ang(rng));
        const auto cmd = phasor_solve_inverse(target, inv, kVg);
        const cd back = phasor_solve_forward(cmd.phasor(), inv, kVg);
        CHECK(std::abs(back - target) < 1e-9 * std::abs(target));
    }
}

TEST_CASE("parameter checks") {
    InverterParams inv;
    inv.l = 0.0;
    CHECK_THROWS_AS(inv.validate(), DomainError);
    inv = InverterParams{};
    CHECK(inv.impedance().imag() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(inv.period() == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("tracking from equilibrium stays put") {
    const InverterParams inv;
    const auto target = compute_reference({4000.0, 1000.0}, 4800.0 / std::numbers::sqrt3, inv);
    TrackingOptions opt;
    opt.start_at_equilibrium = true;
    const auto res = track_references(target, inv, TrackingGains{}, opt);
    REQUIRE(res.periods.size() == 25);
    for (const auto& s : res.periods) CHECK(s.relative_error < 1e-6);
    CHECK(res.converged);
    CHECK(res.settled_period == 1);
}

TEST_CASE("tracking from rest settles within 20 periods") {
    const InverterParams inv;
    for (double q : {0.0, 1500.0, -800.0}) {
        CAPTURE(q);
        const auto target = compute_reference({4000.0, q}, 4800.0 / std::numbers::sqrt3, inv);
        const auto res = track_references(target, inv, TrackingGains{});
        CHECK(res.converged);
        CHECK(res.settled_period >= 1);
        CHECK(res.settled_period <= 20);
        CHECK(res.periods.back().relative_error < 0.01);
        const auto cmd = phasor_solve_inverse(target, inv, cd(inv.v_lv_rms, 0.0));
        CHECK(res.periods.back().command_magnitude == doctest::Approx(cmd.magnitude).epsilon(0.01));
    }
}

TEST_CASE("open loop never converges") {
    const InverterParams inv;
    const auto target = compute_reference({4000.0, 0.0}, 4800.0 / std::numbers::sqrt3, inv);
    try {
        const auto res = track_references(target, inv, TrackingGains{0.0, 0.0, 0.0});
        CHECK_FALSE(res.converged);
        CHECK(res.settled_period == 0);
    } catch (const DivergenceError&) {
        CHECK(true);
    }
}

TEST_CASE("unstable gains are detected") {
    const InverterParams inv;
    const auto target = compute_reference({4000.0, 0.0}, 4800.0 / std::numbers::sqrt3, inv);
    TrackingOptions opt;
    opt.duration = 60 * inv.period();
    CHECK_THROWS_AS(track_references(target, inv, TrackingGains{50.0, 2.0, 50.0}, opt), DivergenceError);
}

TEST_CASE("tracking duration must cover 20 periods") {
    const InverterParams inv;
    const auto target = compute_reference({4000.0, 0.0}, 2771.28, inv);
    TrackingOptions opt;
    opt.duration = 10 * inv.period();
    CHECK_THROWS_AS(track_references(target, inv, TrackingGains{}, opt), DomainError);
}
