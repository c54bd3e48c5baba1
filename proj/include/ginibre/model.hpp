#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace ginibre {

/// Network parameters. Intensity, transmit power and path-loss coefficient
/// are fixed to 1/pi, 1 and 1; the coverage probability does not depend on
/// them in the interference-limited regime. Path loss is l(r) = r^{-2 beta}.
struct ModelParams {
    int m = 1;            // Nakagami shape, fading H ~ Gam(m, 1/m)
    double beta = 2.0;    // path-loss exponent parameter, > 1
    double theta = 1.0;   // SIR threshold, linear scale

    /// Throws std::invalid_argument for m < 1, beta <= 1 or theta < 0.
    void validate() const;
};

double db_to_linear(double db);

enum class Method { analytic, mc_raw, mc_serving_marg, mc_full_marg };

std::string_view to_string(Method method);
/// Throws std::invalid_argument on an unknown name.
Method parse_method(std::string_view name);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// A coverage value with its provenance. For Monte Carlo methods std_error is
/// sample-std / sqrt(n); for the analytic method it is zero and
/// error_estimate carries the numerical error bound.
struct CoverageEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    Method method = Method::analytic;
    double error_estimate = 0.0;
};

}  // namespace ginibre
