#include "ginibre/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ginibre {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_integer(double a) { return std::floor(a) == a; }

// Series for the lower regularized gamma P(a, x), valid for x < a + 1.
double lower_gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double upper_gamma_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n < 100000; ++n) {
        const double an = -n * (n - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

ErlangSpec ErlangSpec::fading(int m) {
    if (m < 1) throw std::domain_error("Nakagami shape m must be >= 1");
    return {m, 1.0 / m};
}

ErlangSpec ErlangSpec::radius(int i) {
    if (i < 1) throw std::domain_error("Ginibre point index must be >= 1");
    return {i, 1.0};
}

double log_gamma(double x) { return std::lgamma(x); }

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_poisson_weight(int i, double u) {
    if (u == 0.0) return i == 0 ? 0.0 : kNegInf;
    return -u + i * std::log(u) - log_factorial(i);
}

double log_regularized_upper_gamma(int n, double x) {
    if (n < 1) throw std::domain_error("log_regularized_upper_gamma: n must be >= 1");
    if (x < 0.0 || std::isnan(x)) throw std::domain_error("log_regularized_upper_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    // Terms of e^{-x} x^k / k! are unimodal in k with mode near x.
    const int mode = std::clamp(static_cast<int>(std::floor(x)), 0, n - 1);
    const double peak = log_poisson_weight(mode, x);
    double sum = 0.0;
    for (int k = mode; k >= 0; --k) {
        const double t = std::exp(log_poisson_weight(k, x) - peak);
        sum += t;
        if (t < 1e-18 * sum) break;
    }
    for (int k = mode + 1; k < n; ++k) {
        const double t = std::exp(log_poisson_weight(k, x) - peak);
        sum += t;
        if (t < 1e-18 * sum) break;
    }
    return std::min(0.0, peak + std::log(sum));
}

double regularized_upper_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("regularized_upper_gamma: a must be > 0, got " + std::to_string(a));
    if (!(x >= 0.0)) throw std::domain_error("regularized_upper_gamma: x must be >= 0, got " + std::to_string(x));
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (is_integer(a) && a <= 1e4) return std::exp(log_regularized_upper_gamma(static_cast<int>(a), x));
    if (x < a + 1.0) return std::clamp(1.0 - lower_gamma_series(a, x), 0.0, 1.0);
    return std::clamp(upper_gamma_fraction(a, x), 0.0, 1.0);
}

double erlang_ccdf(int m, double x) {
    if (m < 1) throw std::domain_error("erlang_ccdf: m must be >= 1");
    if (!(x >= 0.0)) throw std::domain_error("erlang_ccdf: x must be >= 0");
    if (x == 0.0) return 1.0;
    const double z = m * x;
    if (m == 1) return std::exp(-z);
    return std::exp(log_regularized_upper_gamma(m, z));
}

double gamma_ratio_tail(double s, int n) {
    if (!(s > 1.0)) throw std::domain_error("gamma_ratio_tail: s must be > 1");
    if (n < 1 || n + 1.0 - s <= 0.0) throw std::domain_error("gamma_ratio_tail: need n >= 1 and n + 1 > s");
    return std::exp(log_gamma(n + 1.0 - s) - log_gamma(static_cast<double>(n))) / (s - 1.0);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL))) {}

double RandomStream::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double x, y, s;
    do {
        x = 2.0 * uniform() - 1.0;
        y = 2.0 * uniform() - 1.0;
        s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = y * f;
    has_spare_ = true;
    return x * f;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double gamma_sample(double shape, double scale, RandomStream& rng) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw std::domain_error("gamma_sample: shape and scale must be > 0");
    if (shape == 1.0) return scale * rng.exponential();
    if (shape < 1.0) {
        const double boosted = gamma_sample(shape + 1.0, 1.0, rng);
        return scale * boosted * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = rng.normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

}  // namespace ginibre
