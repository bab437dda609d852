#include <doctest.h>

#include <cmath>
#include <numbers>

#include "omcool/quadrature.hpp"

using namespace omcool;

TEST_CASE("known integrals") {
    const auto r1 = quad::integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r1.converged);
    CHECK(r1.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const auto r2 = quad::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    CHECK(r2.converged);
    CHECK(r2.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));

    const auto r3 = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r3.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("empty interval and error bound") {
    const auto r = quad::integrate([](double x) { return x; }, 2.0, 2.0);
    CHECK(r.converged);
    CHECK(r.value == 0.0);

    // error bound is honest for a sharply peaked integrand
    const double w = 1e-4;
    const auto pk = quad::integrate(
        [w](double x) { return w / (x * x + w * w); }, -1.0, 1.0);
    CHECK(pk.converged);
    const double exact = 2.0 * std::atan(1.0 / w);
    CHECK(std::abs(pk.value - exact) <= std::max(pk.error, 1e-9 * exact));
}

TEST_CASE("interval cap reports non-convergence") {
    quad::Options opt;
    opt.rel_tol = 1e-15;
    opt.max_intervals = 4;
    const auto r = quad::integrate(
        [](double x) { return 1.0 / (std::abs(x - 0.3) + 1e-7); }, 0.0, 1.0, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.value > 0.0);  // best effort is still returned
}

TEST_CASE("tightening the tolerance stays within the reported error") {
    auto f = [](double x) { return std::exp(-x) / (1.0 + x * x); };
    quad::Options loose, tight;
    loose.rel_tol = 1e-6;
    tight.rel_tol = 1e-12;
    const auto a = quad::integrate(f, 0.0, 20.0, loose);
    const auto b = quad::integrate(f, 0.0, 20.0, tight);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(std::abs(a.value - b.value) <= a.error + b.error);
}
