#pragma once

// Adaptive integration on finite and semi-infinite ranges, Gamma-kernel
// integrals evaluated over their effective support, and a truncation
// controller for slowly converging series and products.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ginibre {

struct NumericsPolicy {
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    int max_series_index = 4096;
    int max_quad_depth = 30;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Raised when an integral or series fails to meet its tolerance within the
/// policy limits. Carries the best value reached so far.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double partial)
        : std::runtime_error(what), partial_(partial) {}
    [[nodiscard]] double partial_value() const noexcept { return partial_; }

private:
    double partial_;
};

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

using Integrand = std::function<double(double)>;

QuadResult integrate(const Integrand& f, double a, double b, const NumericsPolicy& policy);

/// Integral over [a, inf). The range is cut at U, doubled until the tail
/// estimate 2 max|f| over {U, 1.25U, 1.5U} (valid for integrands decaying
/// at least like e^{-u/2} beyond U) drops below abs_tol / 10. The initial
/// partition is graded geometrically from a with step `scale`, so peaks of
/// width ~scale near a are resolved.
QuadResult integrate_to_infinity(const Integrand& f, double a, const NumericsPolicy& policy, double scale = 1.0);

/// (1/i!) int_u^inf e^{-y} y^i g(y) dy for 0 <= g <= 1.
double gamma_weighted_integral(int i, const Integrand& g, double u, const NumericsPolicy& policy);

enum class TailMode { sum, log_product };

/// Optional analytic handling of the part of a series beyond the horizon N:
/// `remainder(N)` estimates sum_{i >= N} term(i) and is added to the
/// partial sum; `bound(N)` bounds the error left after that correction.
struct TailControl {
    std::function<double(int)> remainder;
    std::function<double(int)> bound;
};

/// Accumulates term(0), term(1), ... and checks at horizons 16, 32, 64, ...
/// Stops once the (corrected) value moves by less than
/// rel_tol/10 * |value| + abs_tol/10 across a doubling of the horizon and
/// the tail bound, when supplied, is below abs_tol. In log_product mode the
/// terms are logs of factors and exp(sum) is returned.
double adaptive_tail_sum(const std::function<double(int)>& term, const NumericsPolicy& policy, TailMode mode,
                         const TailControl& control = {});

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t D>
struct Panel {
    double a = 0.0;
    double b = 0.0;
    int depth = 0;
    std::array<double, D> value{};
    std::array<double, D> error{};
};

template <std::size_t D, class F>
Panel<D> kronrod_panel(F& f, double a, double b, std::size_t dim, int depth) {
    Panel<D> p;
    p.a = a;
    p.b = b;
    p.depth = depth;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<std::array<double, D>, 15> fv{};
    f(center, fv[7]);
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f(center - dx, fv[j]);
        f(center + dx, fv[14 - j]);
    }
    for (std::size_t c = 0; c < dim; ++c) {
        double gauss = fv[7][c] * kGaussWeights[3];
        double kron = fv[7][c] * kKronrodWeights[7];
        double abs_kron = std::abs(kron);
        for (std::size_t j = 0; j < 7; ++j) {
            const double pair = fv[j][c] + fv[14 - j][c];
            kron += kKronrodWeights[j] * pair;
            abs_kron += kKronrodWeights[j] * (std::abs(fv[j][c]) + std::abs(fv[14 - j][c]));
            if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
        }
        const double mean = 0.5 * kron;
        double asc = kKronrodWeights[7] * std::abs(fv[7][c] - mean);
        for (std::size_t j = 0; j < 7; ++j)
            asc += kKronrodWeights[j] * (std::abs(fv[j][c] - mean) + std::abs(fv[14 - j][c] - mean));
        double err = std::abs((kron - gauss) * half);
        const double resasc = asc * std::abs(half);
        if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        const double resabs = abs_kron * std::abs(half);
        constexpr double eps = std::numeric_limits<double>::epsilon();
        if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
        p.value[c] = kron * half;
        p.error[c] = err;
    }
    return p;
}

}  // namespace detail

/// Vector-valued adaptive integration result.
template <std::size_t D>
struct VecQuadResult {
    std::array<double, D> value{};
    std::array<double, D> error{};
    int evaluations = 0;
};

/// Adaptive Gauss-Kronrod integration of a vector-valued integrand
/// f(x, out) over the partition given by `breaks` (ascending, >= 2 points).
/// Each component c must satisfy error_c <= max(rel_tol |value_c|, abs_tol).
/// The panel with the largest normalised error is bisected until done;
/// bisecting below depth `max_depth` throws NumericalError.
template <std::size_t D, class F>
VecQuadResult<D> integrate_panels(F&& f, std::span<const double> breaks, std::size_t dim, double rel_tol,
                                  double abs_tol, int max_depth) {
    if (dim == 0 || dim > D) throw std::invalid_argument("integrate_panels: bad dimension");
    if (breaks.size() < 2) throw std::invalid_argument("integrate_panels: need at least two break points");
    std::vector<detail::Panel<D>> panels;
    panels.reserve(64);
    int evals = 0;
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        if (!(breaks[j + 1] > breaks[j])) continue;
        panels.push_back(detail::kronrod_panel<D>(f, breaks[j], breaks[j + 1], dim, 0));
        evals += 15;
    }
    VecQuadResult<D> out;
    constexpr std::size_t kMaxPanels = 20000;
    for (;;) {
        std::array<double, D> total{};
        std::array<double, D> total_err{};
        for (const auto& p : panels)
            for (std::size_t c = 0; c < dim; ++c) {
                total[c] += p.value[c];
                total_err[c] += p.error[c];
            }
        std::array<double, D> budget{};
        bool done = true;
        for (std::size_t c = 0; c < dim; ++c) {
            budget[c] = std::max(rel_tol * std::abs(total[c]), abs_tol);
            if (total_err[c] > budget[c]) done = false;
        }
        if (done || panels.empty()) {
            out.value = total;
            out.error = total_err;
            out.evaluations = evals;
            return out;
        }
        std::size_t worst = 0;
        double worst_score = -1.0;
        for (std::size_t j = 0; j < panels.size(); ++j) {
            double score = 0.0;
            for (std::size_t c = 0; c < dim; ++c) score = std::max(score, panels[j].error[c] / budget[c]);
            if (score > worst_score) {
                worst_score = score;
                worst = j;
            }
        }
        const auto victim = panels[worst];
        if (victim.depth >= max_depth || panels.size() >= kMaxPanels) {
            throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(breaks.front()) + ", " +
                                     std::to_string(breaks.back()) + "] (error " + std::to_string(total_err[0]) + ")",
                                 total[0]);
        }
        const double mid = 0.5 * (victim.a + victim.b);
        panels[worst] = detail::kronrod_panel<D>(f, victim.a, mid, dim, victim.depth + 1);
        panels.push_back(detail::kronrod_panel<D>(f, mid, victim.b, dim, victim.depth + 1));
        evals += 30;
    }
}

/// Vector-valued form of integrate_to_infinity; the tail test uses the
/// largest component.
template <std::size_t D, class F>
VecQuadResult<D> integrate_to_infinity_panels(F&& f, std::size_t dim, double a, double rel_tol, double abs_tol,
                                              int max_depth, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("integrate_to_infinity: scale must be > 0");
    double span = 16.0 * std::max(scale, 0.5);
    int extra = 0;
    auto tail_estimate = [&](double width) {
        double worst = 0.0;
        for (double frac : {1.0, 1.25, 1.5}) {
            std::array<double, D> v{};
            f(a + frac * width, v);
            ++extra;
            for (std::size_t c = 0; c < dim; ++c) worst = std::max(worst, std::abs(v[c]));
            if (!std::isfinite(worst)) return worst;
        }
        return 2.0 * worst;
    };
    int doublings = 0;
    double tail = tail_estimate(span);
    while (!(tail < 0.1 * abs_tol)) {
        if (++doublings > 40 || !std::isfinite(tail))
            throw NumericalError("integrate_to_infinity: integrand does not decay", 0.0);
        span *= 2.0;
        tail = tail_estimate(span);
    }
    std::vector<double> breaks{a};
    for (double step = scale; step < span; step *= 2.0) breaks.push_back(a + step);
    breaks.push_back(a + span);
    auto r = integrate_panels<D>(f, breaks, dim, rel_tol, abs_tol, max_depth);
    for (std::size_t c = 0; c < dim; ++c) r.error[c] += tail;
    r.evaluations += extra;
    return r;
}

/// Result of integrating against the Gam(i+1, 1) kernel restricted to
/// [u, inf): the integral of component c is exp(log_scale) * scaled[c].
/// Ratios between components are best taken from `scaled` directly.
template <std::size_t D>
struct GammaKernelResult {
    double log_scale = 0.0;
    std::array<double, D> scaled{};
};

namespace detail {

/// Effective support [lo, hi] of y^i e^{-y} on [u, inf) outside of which
/// the kernel is below e^{-50} of its peak, plus interior break points.
std::vector<double> gamma_support_breaks(double i, double u, double& peak_log);

}  // namespace detail

/// (1/Gamma(i+1)) int_u^inf e^{-y} y^i g_c(y) dy for D components at once,
/// g(y, out) filling the first `dim` entries. The kernel is scaled by its
/// peak on the range, so tiny masses keep full relative precision.
template <std::size_t D, class G>
GammaKernelResult<D> gamma_kernel_integrate(double i, double u, G&& g, std::size_t dim, double rel_tol,
                                            int max_depth) {
    double peak_log = 0.0;
    const auto breaks = detail::gamma_support_breaks(i, u, peak_log);
    auto integrand = [&](double y, std::array<double, D>& out) {
        const double log_kernel = (i == 0.0 ? -y : -y + i * std::log(y)) - peak_log;
        const double k = std::exp(log_kernel);
        g(y, out);
        for (std::size_t c = 0; c < dim; ++c) out[c] *= k;
    };
    const auto r = integrate_panels<D>(integrand, breaks, dim, rel_tol, 1e-300, max_depth);
    GammaKernelResult<D> out;
    out.log_scale = peak_log - std::lgamma(i + 1.0);
    out.scaled = r.value;
    return out;
}

}  // namespace ginibre
