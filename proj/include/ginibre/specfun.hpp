#pragma once

// Special functions and random variates used throughout the coverage
// engines: incomplete gamma, Erlang tails, Poisson weights in log space,
// and a reproducible Gamma sampler.

#include <cstdint>
#include <random>

namespace ginibre {

/// Fading / radius distribution Gam(shape, scale) with integer shape.
struct ErlangSpec {
    int m = 1;
    double scale = 1.0;

    /// Unit-mean Nakagami-m power fading, Gam(m, 1/m).
    static ErlangSpec fading(int m);
    /// Squared radius of the i-th Ginibre point, Gam(i, 1).
    static ErlangSpec radius(int i);

    [[nodiscard]] double mean() const noexcept { return m * scale; }
};

double log_gamma(double x);
double log_factorial(int n);

/// Q(a, x) = Gamma(a, x) / Gamma(a). Integer a up to 1e4 uses the finite
/// Poisson series; other arguments use the series / continued fraction split.
/// Throws std::domain_error for a <= 0 or x < 0.
double regularized_upper_gamma(double a, double x);

/// log Q(n, x) for integer n >= 1, accurate when Q underflows.
double log_regularized_upper_gamma(int n, double x);

/// P(H > x) for H ~ Gam(m, 1/m): exp(-m x) sum_{n<m} (m x)^n / n!.
double erlang_ccdf(int m, double x);

/// log(u^i e^{-u} / i!), -inf where the weight is exactly zero.
double log_poisson_weight(int i, double u);

/// log-sum of exp(a) and exp(b).
double log_add_exp(double a, double b);

/// Sum over index j >= n (j counted from 0) of Gamma(j+1-s)/Gamma(j+1),
/// i.e. the tail of E[Y_{j+1}^{-s}] over Y_{j+1} ~ Gam(j+1, 1). Requires
/// s > 1 and n + 1 > s. Closed form Gamma(n+1-s) / ((s-1) Gamma(n)).
double gamma_ratio_tail(double s, int n);

/// A random stream owned by one task. The engine is std::mt19937_64 seeded
/// through splitmix64 from (seed, stream id), so independent substreams can
/// be derived from one root seed.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal via the Marsaglia polar method.
    double normal();
    /// Exp(1) by inversion.
    double exponential();

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// One Gam(shape, scale) variate. shape == 1 uses inversion; shape > 1 uses
/// Marsaglia-Tsang squeeze/rejection; shape < 1 boosts through
/// Gam(shape + 1) * U^(1/shape). Deterministic given the stream state.
double gamma_sample(double shape, double scale, RandomStream& rng);

}  // namespace ginibre
