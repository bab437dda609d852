#include <doctest.h>

#include "omcool/units.hpp"

using namespace omcool;

TEST_CASE("constants are the CODATA values") {
    CHECK(units::hbar == 1.054571817e-34);
    CHECK(units::k_B == 1.380649e-23);
    CHECK(units::c_light == 2.99792458e8);
}

TEST_CASE("angular conversion") {
    CHECK(units::angular(0.0) == 0.0);
    CHECK(units::angular(70e6) == doctest::Approx(4.3982297150e8).epsilon(1e-10));
    CHECK(units::angular(1.0 / units::two_pi) == doctest::Approx(1.0).epsilon(1e-15));

    // linearity over a few decades
    for (const double a : {1.0, 3.5e3, -2e6, 7.77e8}) {
        for (const double b : {0.1, -4.2e5, 9e9}) {
            CHECK(units::angular(a + b) ==
                  doctest::Approx(units::angular(a) + units::angular(b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("optical angular frequency") {
    CHECK(units::optical_angular_frequency(780e-9) ==
          doctest::Approx(2.4149379068e15).epsilon(1e-9));
    CHECK(units::optical_angular_frequency(1550e-9) ==
          doctest::Approx(1.2152590757e15).epsilon(1e-9));

    // roundtrip lambda -> omega -> lambda
    const double lambda = 780e-9;
    const double omega = units::optical_angular_frequency(lambda);
    CHECK(units::two_pi * units::c_light / omega == doctest::Approx(lambda).epsilon(1e-14));

    // strictly decreasing in lambda
    double prev = units::optical_angular_frequency(200e-9);
    for (double l = 300e-9; l < 2000e-9; l += 100e-9) {
        const double cur = units::optical_angular_frequency(l);
        CHECK(cur < prev);
        prev = cur;
    }

    CHECK_THROWS_AS(units::optical_angular_frequency(0.0), std::invalid_argument);
    CHECK_THROWS_AS(units::optical_angular_frequency(-1e-9), std::invalid_argument);
}
