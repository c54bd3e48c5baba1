#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ginibre/quadrature.hpp"
#include "ginibre/specfun.hpp"

using namespace ginibre;

TEST_CASE("policy validation") {
    NumericsPolicy p;
    CHECK_NOTHROW(p.validate());
    p.rel_tol = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.abs_tol = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.max_series_index = 10;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("compensated summation") {
    CompensatedSum s;
    s += 1.0;
    for (int k = 0; k < 1000; ++k) s += 1e-16;
    s += -1.0;
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
}

TEST_CASE("finite interval") {
    NumericsPolicy p;
    p.rel_tol = 1e-10;
    p.abs_tol = 1e-14;
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, p).value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    p.rel_tol = 1e-8;
    const auto r = integrate([](double x) { return std::log(x); }, 0.0, 1.0, p);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(r.error >= 0.0);
}

TEST_CASE("half line") {
    NumericsPolicy p;
    p.rel_tol = 1e-10;
    p.abs_tol = 1e-13;
    CHECK(integrate_to_infinity([](double u) { return std::exp(-u); }, 0.0, p).value ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate_to_infinity([](double u) { return std::exp(-u) * u * u * u; }, 0.0, p).value ==
          doctest::Approx(6.0).epsilon(1e-10));
    const auto r = integrate_to_infinity([](double u) { return std::exp(-u) / (1.0 + u * u); }, 0.0, p);
    CHECK(r.value == doctest::Approx(0.621449624235813).epsilon(1e-10));
    // narrow peak next to the origin
    const auto peak = integrate_to_infinity([](double u) { return 1e3 * std::exp(-1e3 * u); }, 0.0, p, 1e-3);
    CHECK(peak.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gamma weighted integral") {
    NumericsPolicy p;
    p.rel_tol = 1e-10;
    p.abs_tol = 1e-13;
    auto one = [](double) { return 1.0; };
    for (int i : {0, 3, 17}) CHECK(gamma_weighted_integral(i, one, 0.0, p) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(gamma_weighted_integral(3, one, 2.0, p) == doctest::Approx(0.857123460498547).epsilon(1e-9));
    CHECK(gamma_weighted_integral(5, [](double) { return 0.0; }, 1.0, p) == 0.0);
    // monotone bound for 0 <= g <= 1
    for (int i : {0, 2, 9, 40})
        for (double u : {0.0, 0.5, 3.0, 30.0}) {
            auto g = [u](double y) { return 1.0 / (1.0 + std::pow(u / y, 2.0)); };
            const double v = gamma_weighted_integral(i, g, u, p);
            CHECK(v <= regularized_upper_gamma(i + 1.0, u) * (1 + 1e-12) + 1e-300);
            CHECK(v >= 0.0);
        }
}

TEST_CASE("tolerance halving stays within the previous error estimate") {
    for (int i : {0, 4, 25}) {
        const double u = 1.5;
        auto g = [u](double y) {
            const double w = std::pow(u / y, 1.25);
            return w / std::pow(1.0 + 3.0 * w, 3.0);
        };
        auto f = [&](double y) { return std::exp(-y + i * std::log(y) - std::lgamma(i + 1.0)) * g(y); };
        NumericsPolicy p;
        p.rel_tol = 1e-5;
        p.abs_tol = 1e-12;
        const auto coarse = integrate_to_infinity(f, u, p);
        p.rel_tol = 0.5e-5;
        const auto fine = integrate_to_infinity(f, u, p);
        CHECK(std::abs(fine.value - coarse.value) <= coarse.error + 1e-15);
    }
}

TEST_CASE("adaptive tail sums") {
    NumericsPolicy p;
    p.rel_tol = 1e-12;
    p.abs_tol = 1e-14;
    const double u = 3.0;
    CHECK(adaptive_tail_sum([u](int i) { return std::exp(log_poisson_weight(i, u)); }, p, TailMode::sum) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(adaptive_tail_sum([](int) { return 0.0; }, p, TailMode::log_product) == 1.0);
    CHECK(adaptive_tail_sum([](int i) { return std::log1p(-std::ldexp(1.0, -(i + 2))); }, p, TailMode::log_product) ==
          doctest::Approx(0.577576190173205).epsilon(1e-12));

    // slowly decaying terms need the analytic remainder: sum 1/(i+1)^2 = pi^2/6
    TailControl tail;
    tail.remainder = [](int n) { return 1.0 / (n + 0.5); };
    tail.bound = [](int n) { return 1.0 / (12.0 * std::pow(n + 0.5, 3)); };
    p.rel_tol = 1e-8;
    p.abs_tol = 1e-9;
    const double zeta2 =
        adaptive_tail_sum([](int i) { return 1.0 / ((i + 1.0) * (i + 1.0)); }, p, TailMode::sum, tail);
    CHECK(zeta2 == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-8));
}

TEST_CASE("vector panels") {
    auto f = [](double x, std::array<double, 3>& out) {
        out[0] = std::sin(x);
        out[1] = std::cos(x);
        out[2] = x;
    };
    const std::vector<double> breaks{0.0, 1.0, M_PI};
    const auto r = integrate_panels<3>(f, breaks, 3, 1e-12, 1e-12, 30);
    CHECK(r.value[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.value[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.value[2] == doctest::Approx(M_PI * M_PI / 2).epsilon(1e-12));
    const std::vector<double> one{0.0};
    CHECK_THROWS_AS(integrate_panels<3>(f, one, 3, 1e-12, 1e-14, 30), std::invalid_argument);
}

TEST_CASE("exhausted depth raises a numerical error") {
    NumericsPolicy p;
    p.rel_tol = 1e-14;
    p.abs_tol = 1e-300;
    p.max_quad_depth = 2;
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / (x + 1e-4)); }, 0.0, 1.0, p), NumericalError);
}

TEST_CASE("half-line integration is linear") {
    NumericsPolicy p;
    p.rel_tol = 1e-9;
    p.abs_tol = 1e-12;
    auto f = [](double u) { return std::exp(-u) * std::sin(u) * std::sin(u); };
    auto g = [](double u) { return std::exp(-2.0 * u) * u; };
    const double alpha = -2.5;
    const auto rf = integrate_to_infinity(f, 0.0, p);
    const auto rg = integrate_to_infinity(g, 0.0, p);
    const auto rh = integrate_to_infinity([&](double u) { return alpha * f(u) + g(u); }, 0.0, p);
    CHECK(std::abs(rh.value - (alpha * rf.value + rg.value)) <= rh.error + std::abs(alpha) * rf.error + rg.error + 1e-15);
}
