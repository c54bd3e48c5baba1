#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>
#include <stdexcept>

#include "ginibre/specfun.hpp"

using namespace ginibre;

TEST_CASE("erlang spec") {
    CHECK(ErlangSpec::fading(4).mean() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ErlangSpec::radius(7).mean() == 7.0);
}

TEST_CASE("regularized upper gamma") {
    CHECK(regularized_upper_gamma(1.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(regularized_upper_gamma(5.0, 0.0) == 1.0);
    CHECK(regularized_upper_gamma(2.0, 1.0) == doctest::Approx(0.735758882342885).epsilon(1e-13));
    CHECK(regularized_upper_gamma(4.0, 2.0) == doctest::Approx(0.857123460498547).epsilon(1e-13));
    // non-integer shape: Q(1/2, x) = erfc(sqrt x)
    for (double x : {0.01, 0.3, 2.0, 9.0})
        CHECK(regularized_upper_gamma(0.5, x) == doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-12));
    CHECK_THROWS_AS(regularized_upper_gamma(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(regularized_upper_gamma(2.0, -1.0), std::domain_error);
}

TEST_CASE("log upper gamma survives underflow") {
    CHECK(log_regularized_upper_gamma(1, 2000.0) == doctest::Approx(-2000.0).epsilon(1e-14));
    // Q(2, x) = e^{-x} (1 + x)
    CHECK(log_regularized_upper_gamma(2, 1500.0) == doctest::Approx(-1500.0 + std::log(1501.0)).epsilon(1e-14));
    CHECK(log_regularized_upper_gamma(3, 0.5) ==
          doctest::Approx(std::log(regularized_upper_gamma(3.0, 0.5))).epsilon(1e-13));
}

TEST_CASE("erlang ccdf") {
    CHECK(erlang_ccdf(1, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(erlang_ccdf(3, 0.0) == 1.0);
    CHECK(erlang_ccdf(2, 1.0) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-14));
    for (double x = 0.0; x <= 50.0; x += 0.25)
        CHECK(erlang_ccdf(1, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    for (int m : {1, 2, 5, 12}) {
        double prev = 1.0;
        for (double x = 0.0; x <= 20.0; x += 0.05) {
            const double v = erlang_ccdf(m, x);
            CHECK(v <= prev);
            CHECK(v >= 0.0);
            prev = v;
        }
        CHECK(erlang_ccdf(m, 400.0) < 1e-100);
    }
}

TEST_CASE("poisson weights and log-add") {
    CHECK(log_poisson_weight(0, 3.0) == doctest::Approx(-3.0));
    CHECK(std::exp(log_poisson_weight(4, 2.5)) ==
          doctest::Approx(std::exp(-2.5) * std::pow(2.5, 4) / 24.0).epsilon(1e-13));
    CHECK(std::isinf(log_poisson_weight(3, 0.0)));
    CHECK(log_poisson_weight(0, 0.0) == 0.0);
    CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
    CHECK(log_add_exp(-INFINITY, 1.0) == 1.0);
    CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)));
    CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)));
}

TEST_CASE("gamma ratio tail matches direct summation") {
    for (double s : {1.5, 2.0, 2.5, 4.0}) {
        for (int n : {3, 10, 40}) {
            if (n + 1 <= s) continue;
            double direct = 0.0;
            for (int j = n; j < 2000000; ++j) direct += std::exp(std::lgamma(j + 1.0 - s) - std::lgamma(j + 1.0));
            // remainder beyond the cut ~ J^{1-s}/(s-1)
            direct += std::pow(2000000.0, 1.0 - s) / (s - 1.0);
            CHECK(gamma_ratio_tail(s, n) == doctest::Approx(direct).epsilon(1e-6));
        }
    }
}

TEST_CASE("random stream determinism") {
    RandomStream a(42, 7), b(42, 7), c(42, 8);
    bool differs = false;
    for (int k = 0; k < 100; ++k) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x > 0.0);
        CHECK(x < 1.0);
        if (x != c.uniform()) differs = true;
    }
    CHECK(differs);
    RandomStream g1(3), g2(3);
    CHECK(gamma_sample(2.5, 1.0, g1) == gamma_sample(2.5, 1.0, g2));
}

TEST_CASE("gamma sampler moments") {
    constexpr int n = 1000000;
    SUBCASE("Gam(7,1)") {
        RandomStream rng(2024);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += gamma_sample(7.0, 1.0, rng);
        CHECK(std::abs(s / n - 7.0) <= 4.0 * std::sqrt(7.0 / n));
    }
    SUBCASE("Nakagami m = 3") {
        RandomStream rng(2025);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += gamma_sample(3.0, 1.0 / 3.0, rng);
        CHECK(std::abs(s / n - 1.0) <= 4.0 * std::sqrt(1.0 / (3.0 * n)));
    }
    SUBCASE("shape below one") {
        RandomStream rng(2026);
        double s = 0.0, s2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double x = gamma_sample(0.4, 2.0, rng);
            s += x;
            s2 += x * x;
        }
        const double mean = s / n;
        CHECK(std::abs(mean - 0.8) <= 4.0 * std::sqrt(1.6 / n));
        CHECK(s2 / n - mean * mean == doctest::Approx(1.6).epsilon(0.03));
    }
    SUBCASE("standard normal") {
        RandomStream rng(2027);
        double s = 0.0, s2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double x = rng.normal();
            s += x;
            s2 += x * x;
        }
        CHECK(std::abs(s / n) <= 4.0 / std::sqrt(double(n)));
        CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("upper gamma equals the finite Erlang series for integer shape") {
    for (int i = 0; i <= 50; ++i)
        for (double x : {0.1, 1.0, 7.5, 30.0, 80.0}) {
            double term = std::exp(-x), sum = 0.0;
            for (int n = 0; n <= i; ++n) {
                sum += term;
                term *= x / (n + 1);
            }
            CHECK(regularized_upper_gamma(i + 1.0, x) == doctest::Approx(sum).epsilon(1e-12).scale(0.0));
        }
}

TEST_CASE("Kolmogorov-Smirnov test of Gamma(i, 1) draws") {
    constexpr int n = 100000;
    const double critical = 1.9495 / std::sqrt(double(n));  // significance 1e-3
    for (int i : {1, 5, 20}) {
        RandomStream rng(9000 + std::uint64_t(i));
        std::vector<double> x(n);
        for (auto& v : x) v = gamma_sample(i, 1.0, rng);
        std::sort(x.begin(), x.end());
        double d = 0.0;
        for (int k = 0; k < n; ++k) {
            const double cdf = 1.0 - regularized_upper_gamma(i, x[std::size_t(k)]);
            d = std::max({d, cdf - double(k) / n, double(k + 1) / n - cdf});
        }
        CAPTURE(i);
        CHECK(d < critical);
    }
}
