#include "ginibre/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ginibre {

void NumericsPolicy::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be > 0");
    if (max_series_index < 64) throw std::invalid_argument("max_series_index must be >= 64");
    if (max_quad_depth < 1) throw std::invalid_argument("max_quad_depth must be >= 1");
}

QuadResult integrate(const Integrand& f, double a, double b, const NumericsPolicy& policy) {
    if (a == b) return {};
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const std::array<double, 2> breaks{lo, hi};
    auto vf = [&f](double x, std::array<double, 1>& out) { out[0] = f(x); };
    const auto r = integrate_panels<1>(vf, breaks, 1, policy.rel_tol, policy.abs_tol, policy.max_quad_depth);
    const double sign = a < b ? 1.0 : -1.0;
    return {sign * r.value[0], r.error[0], r.evaluations};
}

QuadResult integrate_to_infinity(const Integrand& f, double a, const NumericsPolicy& policy, double scale) {
    auto vf = [&f](double x, std::array<double, 1>& out) { out[0] = f(x); };
    const auto r = integrate_to_infinity_panels<1>(vf, 1, a, policy.rel_tol, policy.abs_tol, policy.max_quad_depth,
                                                   scale);
    return {r.value[0], r.error[0], r.evaluations};
}

namespace detail {

std::vector<double> gamma_support_breaks(double i, double u, double& peak_log) {
    auto log_kernel = [i](double y) { return i == 0.0 ? -y : -y + i * std::log(y); };
    constexpr double kDrop = 50.0;
    const double mode = i;
    const double y0 = std::max(u, mode);
    peak_log = (i == 0.0 || y0 > 0.0) ? log_kernel(y0) : 0.0;
    const double sd = std::sqrt(i + 1.0);

    double t = 1.0;
    while (log_kernel(y0 + t * sd) > peak_log - kDrop) t *= 2.0;
    const double hi = y0 + t * sd;

    double lo = u;
    if (u < mode) {
        t = 1.0;
        while (mode - t * sd > u && log_kernel(mode - t * sd) > peak_log - kDrop) t *= 2.0;
        lo = std::max(u, mode - t * sd);
    }

    std::vector<double> breaks{lo, hi};
    if (y0 > lo && y0 < hi) breaks.push_back(y0);
    for (double k = 1.0; k * sd < hi - lo; k *= 2.0) {
        if (y0 + k * sd < hi) breaks.push_back(y0 + k * sd);
        if (y0 - k * sd > lo) breaks.push_back(y0 - k * sd);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

}  // namespace detail

double gamma_weighted_integral(int i, const Integrand& g, double u, const NumericsPolicy& policy) {
    if (i < 0) throw std::invalid_argument("gamma_weighted_integral: i must be >= 0");
    if (!(u >= 0.0)) throw std::invalid_argument("gamma_weighted_integral: u must be >= 0");
    auto vg = [&g](double y, std::array<double, 1>& out) { out[0] = g(y); };
    const double rel = std::min(policy.rel_tol, 1e-10);
    const auto r = gamma_kernel_integrate<1>(static_cast<double>(i), u, vg, 1, rel, policy.max_quad_depth);
    return std::exp(r.log_scale) * r.scaled[0];
}

double adaptive_tail_sum(const std::function<double(int)>& term, const NumericsPolicy& policy, TailMode mode,
                         const TailControl& control) {
    CompensatedSum acc;
    int next = 0;
    double previous = 0.0;
    bool have_previous = false;
    for (int horizon = 16; horizon <= policy.max_series_index; horizon *= 2) {
        for (; next < horizon; ++next) acc += term(next);
        double corrected = acc.value();
        if (control.remainder) corrected += control.remainder(horizon);
        const double value = mode == TailMode::log_product ? std::exp(corrected) : corrected;
        const bool bounded = !control.bound || control.bound(horizon) < policy.abs_tol;
        if (have_previous && bounded &&
            std::abs(value - previous) <= policy.rel_tol / 10.0 * std::abs(value) + policy.abs_tol / 10.0)
            return value;
        previous = value;
        have_previous = true;
    }
    throw NumericalError("adaptive_tail_sum: no stable value by index " + std::to_string(policy.max_series_index),
                         previous);
}

}  // namespace ginibre
