#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "ginibre/analytic.hpp"
#include "ginibre/specfun.hpp"

using namespace ginibre;

namespace {

NumericsPolicy tight() {
    NumericsPolicy p;
    p.rel_tol = 1e-10;
    p.abs_tol = 1e-13;
    return p;
}

}  // namespace

static_assert(std::is_base_of_v<NumericalError, ConsistencyError>);

TEST_CASE("J integrals") {
    const auto pol = tight();
    SUBCASE("theta = 0 reduces to the upper incomplete gamma") {
        for (int i : {0, 1, 5, 30})
            for (double u : {0.3, 2.0, 12.0})
                CHECK(j_integral(i, 0, u, ModelParams{2, 2.0, 0.0}, pol) ==
                      doctest::Approx(regularized_upper_gamma(i + 1.0, u)).epsilon(1e-9));
    }
    SUBCASE("u = 0 is full mass") {
        for (int i : {0, 3, 11}) CHECK(j_integral(i, 0, 0.0, ModelParams{3, 1.5, 4.0}, pol) == 1.0);
    }
    SUBCASE("reference quadrature values") {
        CHECK(j_integral(0, 0, 1.0, ModelParams{1, 2.0, 1.0}, pol) ==
              doctest::Approx(0.271226960195899).epsilon(1e-9));
        CHECK(j_integral(3, 1, 0.7, ModelParams{2, 1.5, 2.0}, pol) ==
              doctest::Approx(0.0505495972716507).epsilon(1e-9));
        CHECK(j_integral(10, 2, 2.0, ModelParams{3, 1.25, 10.0}, pol) ==
              doctest::Approx(0.000259161839784922).epsilon(1e-8));
    }
    SUBCASE("bounded by the Gamma tail") {
        for (int q : {0, 1, 2})
            for (int i : {0, 4, 40}) {
                const double u = 1.7;
                const double v = j_integral(i, q, u, ModelParams{3, 2.0, 0.5}, pol);
                CHECK(v >= 0.0);
                CHECK(v <= regularized_upper_gamma(i + 1.0, u) * (1 + 1e-12));
            }
    }
}

TEST_CASE("V factors") {
    const auto pol = tight();
    const ModelParams p{3, 2.0, 1.5};
    const double u = 0.8;
    CHECK(v_factor(0, 0, 4, u, p, pol) == 1.0);
    for (int i : {0, 2, 7}) {
        CHECK(v_factor(1, 1, i, u, p, pol) == doctest::Approx(3.0 * j_integral(i, 1, u, p, pol)).epsilon(1e-12));
        CHECK(v_factor(2, 1, i, u, p, pol) == doctest::Approx(6.0 * j_integral(i, 2, u, p, pol)).epsilon(1e-12));
        const double j1 = 3.0 * j_integral(i, 1, u, p, pol);
        CHECK(v_factor(2, 2, i, u, p, pol) == doctest::Approx(0.5 * j1 * j1).epsilon(1e-12));
    }
}

TEST_CASE("profile at u = 0") {
    const auto pr = mst_profile(0.0, ModelParams{3, 2.0, 1.0}, tight());
    CHECK(pr.m_value == 1.0);
    CHECK(pr.s[0][0] == doctest::Approx(1.0));
    for (int k = 1; k < 3; ++k)
        for (int h = 1; h <= k; ++h) {
            CHECK(pr.t[k][h] == 0.0);
            CHECK(pr.s[k][h] == 0.0);
        }
}

TEST_CASE("profile for m = 1 carries only M and S00") {
    const auto pr = mst_profile(0.9, ModelParams{1, 2.0, 1.0}, tight());
    CHECK(pr.s.size() == 1);
    CHECK(pr.s[0].size() == 1);
    CHECK(pr.m_value > 0.0);
    CHECK(pr.m_value <= 1.0);
    CHECK(assemble_generic(pr, 1.0) == doctest::Approx(pr.m_value * pr.s[0][0]));
}

TEST_CASE("profile against direct summation") {
    // m = 2, beta = 2, theta = 1, u = 1; reference sums in 25-digit arithmetic
    const auto pr = mst_profile(1.0, ModelParams{2, 2.0, 1.0}, tight());
    CHECK(pr.s[0][0] == doctest::Approx(2.92056007714099208).epsilon(1e-10));
    CHECK(pr.s[1][1] == doctest::Approx(1.10546796313747376).epsilon(1e-10));
    CHECK(pr.t[1][1] == doctest::Approx(1.74390464674292).epsilon(1e-8));
    CHECK(pr.m_value == doctest::Approx(0.02919449094663158).epsilon(1e-8));
}

TEST_CASE("profile invariants") {
    const auto pol = tight();
    for (int m : {1, 2, 3, 5})
        for (double beta : {1.25, 2.0, 4.0})
            for (double u : {0.01, 0.5, 2.0, 8.0, 30.0}) {
                const auto pr = mst_profile(u, ModelParams{m, beta, 3.0}, pol);
                if (pr.negligible) continue;
                // M may underflow in double; its log may not
                CHECK(std::isfinite(pr.log_m));
                CHECK(pr.log_m <= 0.0);
                CHECK(pr.m_value >= 0.0);
                CHECK(pr.m_value <= 1.0);
                CHECK(pr.s[0][0] >= 0.0);
                for (int k = 1; k < m; ++k)
                    for (int h = 1; h <= k; ++h) {
                        CHECK(pr.s[k][h] >= 0.0);
                        CHECK(pr.t[k][h] >= 0.0);
                    }
            }
}

TEST_CASE("generic assembly matches the small-m expansions") {
    const auto pol = tight();
    for (int m : {1, 2, 3})
        for (double beta : {1.25, 2.0, 3.5})
            for (double u : {0.05, 0.7, 3.0, 11.0})
                for (double theta : {0.1, 1.0, 10.0, 100.0}) {
                    const ModelParams p{m, beta, theta};
                    const auto generic = mst_profile(u, p, pol);
                    const auto literal = example_profile(u, p, pol);
                    const double a = assemble_generic(generic, theta);
                    const double b = assemble_example(generic, theta);
                    CHECK(a == doctest::Approx(b).epsilon(1e-12));
                    CHECK(assemble_generic(literal, theta) == doctest::Approx(a).epsilon(1e-9));
                }
}

TEST_CASE("coverage reference value for Rayleigh fading") {
    const auto c = coverage_analytic(ModelParams{1, 2.0, 1.0}, NumericsPolicy{});
    CHECK(c.value == doctest::Approx(0.64365992766).epsilon(1e-8));
    CHECK(c.error_estimate > 0.0);
    CHECK(c.error_estimate < 1e-5);
    CHECK(c.method == Method::analytic);
    CHECK(c.std_error == 0.0);
}

TEST_CASE("verification mode compares both assemblies") {
    for (int m : {2, 3}) {
        AnalyticOptions opt;
        opt.verify = true;
        const auto rep = coverage_analytic_report(ModelParams{m, 2.0, 1.0}, NumericsPolicy{}, opt);
        CHECK(rep.has_example);
        CHECK(rep.example_value == doctest::Approx(rep.estimate.value).epsilon(1e-9));
        CHECK(rep.estimate.error_estimate == doctest::Approx(rep.truncation_error + rep.quadrature_error));
    }
}

TEST_CASE("vanishing threshold gives full coverage") {
    for (int m : {1, 2, 3})
        for (double beta : {1.25, 2.0})
            CHECK(coverage_analytic(ModelParams{m, beta, 1e-6}, NumericsPolicy{}).value >= 0.999);
}

TEST_CASE("coverage is nonincreasing in theta and stays in range") {
    std::vector<double> thetas;
    for (double db = -10.0; db <= 20.0; db += 5.0) thetas.push_back(db_to_linear(db));
    for (int m : {1, 2, 3})
        for (double beta : {1.25, 2.0}) {
            const auto sweep = coverage_analytic_sweep(ModelParams{m, beta, 1.0}, thetas, NumericsPolicy{});
            REQUIRE(sweep.size() == thetas.size());
            for (std::size_t j = 0; j < sweep.size(); ++j) {
                const double eps = sweep[j].error_estimate;
                CHECK(sweep[j].value >= -10 * eps);
                CHECK(sweep[j].value <= 1 + 10 * eps);
                if (j > 0) CHECK(sweep[j].value <= sweep[j - 1].value + sweep[j].error_estimate + sweep[j - 1].error_estimate);
            }
        }
}

TEST_CASE("coverage grows with m at 0 dB") {
    double prev = 0.0, prev_err = 0.0;
    for (int m : {1, 2, 3, 4}) {
        const auto c = coverage_analytic(ModelParams{m, 2.0, 1.0}, NumericsPolicy{});
        CHECK(c.value >= prev - 2 * (c.error_estimate + prev_err));
        prev = c.value;
        prev_err = c.error_estimate;
    }
}

TEST_CASE("input validation") {
    const NumericsPolicy pol;
    CHECK_THROWS_AS(coverage_analytic(ModelParams{0, 2.0, 1.0}, pol), std::invalid_argument);
    CHECK_THROWS_AS(coverage_analytic(ModelParams{1, 1.0, 1.0}, pol), std::invalid_argument);
    CHECK_THROWS_AS(coverage_analytic(ModelParams{1, 2.0, -1.0}, pol), std::invalid_argument);
    CHECK_THROWS_AS(coverage_analytic(ModelParams{9, 2.0, 1.0}, pol), std::invalid_argument);
    AnalyticOptions opt;
    opt.max_m = kHardMaxM + 1;
    CHECK_THROWS_AS(coverage_analytic(ModelParams{2, 2.0, 1.0}, pol, opt), std::invalid_argument);
    CHECK_THROWS_AS(example_profile(1.0, ModelParams{4, 2.0, 1.0}, pol), std::invalid_argument);
    NumericsPolicy bad;
    bad.rel_tol = -1.0;
    CHECK_THROWS_AS(coverage_analytic(ModelParams{1, 2.0, 1.0}, bad), std::invalid_argument);
}

TEST_CASE("large-threshold constant c1") {
    const NumericsPolicy pol;
    for (double beta : {1.25, 2.0, 4.0}) {
        const double c1 = asymptotic_c1(beta, pol);
        CHECK(std::isfinite(c1));
        CHECK(c1 > 0.0);
    }
    // theta^{1/beta} P(SIR > theta) approaches c1 for m = 1
    const double theta = 1e4;
    for (double beta : {1.25, 2.0}) {
        const double tail = std::pow(theta, 1.0 / beta) * coverage_analytic(ModelParams{1, beta, theta}, pol).value;
        CHECK(tail == doctest::Approx(asymptotic_c1(beta, pol)).epsilon(0.01));
    }
}

TEST_CASE("Monte Carlo constant cinf") {
    const auto a = asymptotic_cinf(2.0, 100, 11);
    const auto b = asymptotic_cinf(2.0, 100, 11);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.std_error > 0.0);
    CHECK(a.n == 100);
    const auto big = asymptotic_cinf(2.0, 1000, 20150601);
    const double c1 = asymptotic_c1(2.0, NumericsPolicy{});
    CHECK(big.value <= c1 / std::tgamma(1.5) + 3 * big.std_error);
}

TEST_CASE("gamma-factor bound") {
    const double beta_min = 1.0 / 0.4616321449;
    const auto r = gamma_bound_check(beta_min, NumericsPolicy{}, 100, 5);
    CHECK(std::abs(r.gamma_factor - 0.8856031944) <= 1e-9);
    CHECK(std::tgamma(2.0) == 1.0);
    for (double beta : {1.25, 2.0}) {
        const auto rep = gamma_bound_check(beta, NumericsPolicy{}, 1000, 20150601);
        CHECK(rep.holds);
        CHECK(rep.gamma_factor == doctest::Approx(std::tgamma(1 + 1 / beta)));
    }
}

TEST_CASE("J integrals fall with theta and u, and with q") {
    const auto pol = tight();
    for (int i : {0, 3, 20}) {
        double prev = 2.0;
        for (double theta : {0.0, 0.5, 2.0, 8.0}) {
            const double v = j_integral(i, 0, 1.2, ModelParams{2, 1.5, theta}, pol);
            CHECK(v <= prev);
            prev = v;
        }
        prev = 2.0;
        for (double u : {0.0, 0.4, 1.5, 6.0}) {
            const double v = j_integral(i, 0, u, ModelParams{2, 1.5, 1.0}, pol);
            CHECK(v <= prev);
            prev = v;
        }
        for (int q : {1, 2, 3})
            CHECK(j_integral(i, q, 1.2, ModelParams{3, 2.0, 1.0}, pol) <=
                  j_integral(i, 0, 1.2, ModelParams{3, 2.0, 1.0}, pol));
    }
}
