#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "omcool/cavity.hpp"
#include "omcool/units.hpp"
#include "oracles.hpp"

using namespace omcool;

namespace {

cavity::CavityConfig paper_cavity(double eta_c = 0.5) {
    cavity::CavityConfig c;
    c.kappa = units::angular(6e6);
    c.kappa_ex = eta_c * c.kappa;
    c.gamma_split = units::angular(30e6);
    c.G = units::angular(1.6e19);
    c.kappa_abs = c.kappa - c.kappa_ex;
    c.omega_c = units::optical_angular_frequency(780e-9);
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    auto c = paper_cavity();
    CHECK_NOTHROW(cavity::validate(c));
    CHECK(c.eta_c() == doctest::Approx(0.5));

    auto bad = c;
    bad.kappa_ex = 2.0 * bad.kappa;
    CHECK_THROWS_AS(cavity::validate(bad), std::invalid_argument);
    bad = c;
    bad.kappa_abs = bad.kappa;  // exceeds kappa - kappa_ex
    CHECK_THROWS_AS(cavity::validate(bad), std::invalid_argument);
    bad = c;
    bad.gamma_split = -1.0;
    CHECK_THROWS_AS(cavity::validate(bad), std::invalid_argument);
}

TEST_CASE("lorentzian response") {
    const auto c = paper_cavity();

    // resonance of the + mode at detuning = -gamma/2, purely real, 2/kappa
    const auto lp = cavity::lorentzian_response(-0.5 * c.gamma_split, cavity::Branch::plus, c);
    CHECK(lp.real() == doctest::Approx(2.0 / c.kappa).epsilon(1e-14));
    CHECK(lp.imag() == doctest::Approx(0.0));

    // off-resonant decay
    CHECK(std::abs(cavity::lorentzian_response(1e12, cavity::Branch::plus, c)) < 1e-11);
    CHECK(std::abs(cavity::lorentzian_response(-1e12, cavity::Branch::minus, c)) < 1e-11);

    // mirror symmetry of the doublet
    for (double d = -3e8; d <= 3e8; d += 3.7e7) {
        CHECK(std::abs(cavity::lorentzian_response(d, cavity::Branch::plus, c)) ==
              doctest::Approx(std::abs(cavity::lorentzian_response(-d, cavity::Branch::minus, c)))
                  .epsilon(1e-13));
    }
}

TEST_CASE("mean fields") {
    auto c = paper_cavity();
    const double lambda = 780e-9;

    cavity::Drive dark{0.0, -1e8, lambda};
    const auto f0 = cavity::mean_fields(dark, c);
    CHECK(std::abs(f0.a_plus) == 0.0);
    CHECK(std::abs(f0.a_minus) == 0.0);

    // degenerate modes are driven identically
    auto degen = c;
    degen.gamma_split = 0.0;
    cavity::Drive drive{2e-3, -0.5 * c.gamma_split, lambda};
    const auto fd = cavity::mean_fields(drive, degen);
    CHECK(std::abs(fd.a_plus - fd.a_minus) < 1e-12 * std::abs(fd.a_plus));

    // photon number on the + resonance, frozen from direct evaluation
    const auto f = cavity::mean_fields(drive, c);
    CHECK(std::norm(f.a_plus) == doctest::Approx(2.083132e8).epsilon(1e-6));
    const double expected =
        0.5 * c.kappa_ex * (2.0 / c.kappa) * (2.0 / c.kappa) * drive.P_in /
        (units::hbar * drive.omega_l());
    CHECK(std::norm(f.a_plus) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("fields agree with time-domain steady state") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> kap(1e6, 5e7);
    std::uniform_real_distribution<double> gam(0.0, 3e8);
    std::uniform_real_distribution<double> det(-8e8, 8e8);
    std::uniform_real_distribution<double> eta(0.05, 0.95);
    std::uniform_real_distribution<double> pw(1e-6, 5e-3);

    for (int i = 0; i < 50; ++i) {
        cavity::CavityConfig c;
        c.kappa = units::angular(kap(rng));
        c.kappa_ex = eta(rng) * c.kappa;
        c.gamma_split = gam(rng);
        c.kappa_abs = c.kappa - c.kappa_ex;
        cavity::Drive drive{pw(rng), det(rng), 780e-9};

        const auto f = cavity::mean_fields(drive, c);
        const double amp = std::sqrt(0.5 * c.kappa_ex) * drive.s_in();
        const auto ode_p =
            oracles::ode_steady_field(drive.detuning, 0.5 * c.gamma_split, c.kappa, amp);
        const auto ode_m =
            oracles::ode_steady_field(drive.detuning, -0.5 * c.gamma_split, c.kappa, amp);
        CHECK(std::abs(f.a_plus - ode_p) <= 1e-6 * std::abs(f.a_plus));
        CHECK(std::abs(f.a_minus - ode_m) <= 1e-6 * std::abs(f.a_minus));
        CHECK(cavity::total_photons(f) ==
              doctest::Approx(std::norm(ode_p) + std::norm(ode_m)).epsilon(1e-6));
    }
}

TEST_CASE("total photons") {
    cavity::FieldPair f;
    CHECK(cavity::total_photons(f) == 0.0);
    f.a_plus = {1.0, 0.0};
    f.a_minus = {0.0, 1.0};
    CHECK(cavity::total_photons(f) == doctest::Approx(2.0));
}

TEST_CASE("photon doublet is symmetric around zero detuning") {
    const auto c = paper_cavity();
    for (double d = 0.0; d < 4e8; d += 2.3e7) {
        cavity::Drive at{1e-3, d, 780e-9};
        cavity::Drive mirrored{1e-3, -d, 780e-9};
        CHECK(cavity::total_photons(cavity::mean_fields(at, c)) ==
              doctest::Approx(cavity::total_photons(cavity::mean_fields(mirrored, c)))
                  .epsilon(1e-12));
    }
}

TEST_CASE("degenerate limit reduces to the single-mode formula") {
    auto c = paper_cavity();
    c.gamma_split = 0.0;
    for (double d = -3e8; d <= 3e8; d += 4.1e7) {
        cavity::Drive drive{1.7e-3, d, 780e-9};
        const double photons = cavity::total_photons(cavity::mean_fields(drive, c));
        const double l2 = 1.0 / (d * d + 0.25 * c.kappa * c.kappa);
        const double single =
            c.eta_c() * c.kappa * drive.P_in / (units::hbar * drive.omega_l()) * l2;
        CHECK(photons == doctest::Approx(single).epsilon(1e-12));
    }
}

TEST_CASE("absorbed power") {
    auto c = paper_cavity();
    const double omega_m = units::angular(70e6);
    const double d_opt = -omega_m - 0.5 * c.gamma_split;

    auto zero_abs = c;
    zero_abs.kappa_abs = 0.0;
    CHECK(cavity::absorbed_power({2e-3, d_opt, 780e-9}, zero_abs) == 0.0);

    // sideband-detuned absorption, frozen from direct evaluation; the order
    // of the quoted P_in/1300 bound
    const double ratio = cavity::absorbed_power({2e-3, d_opt, 780e-9}, c) / 2e-3;
    CHECK(ratio == doctest::Approx(1.366279e-3).epsilon(1e-6));
    CHECK(ratio * 1300.0 > 0.5);
    CHECK(ratio * 1300.0 < 2.5);

    // never exceeds the input power across a wide sweep
    for (int i = 0; i <= 1000; ++i) {
        const double d = -6e8 + 1.2e9 * i / 1000.0;
        CHECK(cavity::absorbed_power({2e-3, d, 780e-9}, c) <= 2e-3);
    }
}

TEST_CASE("static displacement") {
    cavity::FieldPair none;
    CHECK(cavity::static_displacement(none, 2e-11, units::angular(70e6), units::angular(1.6e19)) ==
          0.0);

    cavity::FieldPair f;
    f.a_plus = {1e3, 0.0};  // 1e6 photons
    const double x = cavity::static_displacement(f, 2e-11, units::angular(70e6),
                                                 units::angular(1.6e19));
    CHECK(x == doctest::Approx(-2.74025e-15).epsilon(1e-5));

    cavity::FieldPair f2;
    f2.a_plus = {1e3, 0.0};
    f2.a_minus = {1e3, 0.0};
    CHECK(cavity::static_displacement(f2, 2e-11, units::angular(70e6), units::angular(1.6e19)) ==
          doctest::Approx(2.0 * x).epsilon(1e-13));

    CHECK_THROWS_AS(cavity::static_displacement(f, 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("observables are phase independent") {
    const auto c = paper_cavity();
    cavity::Drive drive{1e-3, -4e8, 780e-9};
    const auto f = cavity::mean_fields(drive, c);
    const std::complex<double> phase = std::polar(1.0, 1.234);
    cavity::FieldPair rotated{f.a_plus * phase, f.a_minus * phase};
    CHECK(cavity::total_photons(rotated) == doctest::Approx(cavity::total_photons(f)).epsilon(1e-14));
    CHECK(cavity::static_displacement(rotated, 2e-11, 4e8, 1e20) ==
          doctest::Approx(cavity::static_displacement(f, 2e-11, 4e8, 1e20)).epsilon(1e-14));
}
