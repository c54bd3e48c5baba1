#include "ginibre/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ginibre/combinatorics.hpp"
#include "ginibre/parallel.hpp"

namespace ginibre {

namespace {

constexpr std::size_t kBlockSize = 1000;

struct RunningStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningStats& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.n) / total;
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }

    [[nodiscard]] double std_error() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

void check_points(int n_points) {
    if (n_points < 16) throw std::invalid_argument("n_points must be >= 16");
}

void check_beta(double beta) {
    if (!(beta > 1.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be > 1");
}

// Coverage given radii with all fading integrated out: the alternating sum
// of derivatives of the Laplace transform L(x) at x = 1. log_sum is
// sum_j log(1 + a_j), powers[r] is sum_j (a_j / (1 + a_j))^r.
double marginal_coverage(int m, double log_sum, const double* powers, double alpha, double c) {
    const double log_f0 = -m * log_sum - (alpha > 0.0 ? alpha * std::log1p(c) : 0.0);
    const double f0 = std::exp(log_f0);
    if (m == 1) return f0;
    std::vector<double> logd(static_cast<std::size_t>(m - 1));
    const double zc = alpha > 0.0 ? c / (1.0 + c) : 0.0;
    for (int r = 1; r < m; ++r) {
        const double sign = r % 2 == 0 ? 1.0 : -1.0;
        logd[static_cast<std::size_t>(r - 1)] =
            sign * factorial(r - 1) * (m * powers[r] + alpha * std::pow(zc, r));
    }
    const auto d = derivs_of_product_from_log(m - 1, f0, logd);
    double total = 0.0;
    for (int n = 0; n < m; ++n) total += (n % 2 == 0 ? 1.0 : -1.0) / factorial(n) * d[static_cast<std::size_t>(n)];
    return std::clamp(total, 0.0, 1.0);
}

double h_second_moment(int m) { return 1.0 + 1.0 / m; }

// Draws one configuration into y with the nearest point moved to y[0].
void draw_configuration(PointModel model, int n_points, RandomStream& rng, std::vector<double>& y) {
    y.resize(static_cast<std::size_t>(n_points));
    if (model == PointModel::gpp) {
        std::size_t best = 0;
        for (int i = 1; i <= n_points; ++i) {
            const auto j = static_cast<std::size_t>(i - 1);
            y[j] = gamma_sample(static_cast<double>(i), 1.0, rng);
            if (y[j] < y[best]) best = j;
        }
        std::swap(y[0], y[best]);
    } else {
        double acc = 0.0;
        for (auto& v : y) {
            acc += rng.exponential();
            v = acc;
        }
    }
}

FarField far_field_for(PointModel model, int n_points, double beta, int m, double last) {
    return model == PointModel::gpp ? far_field_gpp(n_points, beta, h_second_moment(m))
                                    : far_field_ppp(last, beta, h_second_moment(m));
}

void run_block(const McSpec& spec, std::size_t block, std::size_t count, std::vector<RunningStats>& cells) {
    RandomStream radii_rng(spec.seed, 4 * block);
    RandomStream fading_rng(spec.seed, 4 * block + 1);
    const std::size_t nt = spec.thetas.size();
    const int max_m = *std::max_element(spec.ms.begin(), spec.ms.end());
    const auto np = static_cast<std::size_t>(spec.n_points);
    std::vector<double> y;
    std::vector<double> ratio(np);
    std::vector<double> h(np);
    std::vector<double> powers(static_cast<std::size_t>(max_m), 0.0);
    std::vector<FarField> gpp_far(spec.ms.size());
    for (std::size_t mi = 0; mi < spec.ms.size(); ++mi)
        if (spec.far_field && spec.model == PointModel::gpp)
            gpp_far[mi] = far_field_gpp(spec.n_points, spec.beta, h_second_moment(spec.ms[mi]));

    for (std::size_t s = 0; s < count; ++s) {
        draw_configuration(spec.model, spec.n_points, radii_rng, y);
        const double y1 = y[0];
        double last = 0.0;
        for (std::size_t j = 1; j < np; ++j) {
            ratio[j] = std::pow(y1 / y[j], spec.beta);
            last = std::max(last, y[j]);
        }
        const double y1b = std::pow(y1, spec.beta);
        auto far_for = [&](std::size_t mi) {
            if (!spec.far_field) return FarField{};
            return spec.model == PointModel::gpp ? gpp_far[mi]
                                                 : far_field_for(spec.model, spec.n_points, spec.beta, spec.ms[mi], last);
        };

        if (spec.estimator == Method::mc_full_marg) {
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const double theta = spec.thetas[ti];
                double log_sum = 0.0;
                std::fill(powers.begin(), powers.end(), 0.0);
                for (std::size_t j = 1; j < np; ++j) {
                    const double a = theta * ratio[j];
                    log_sum += std::log1p(a);
                    const double z = a / (1.0 + a);
                    double zp = 1.0;
                    for (int r = 1; r < max_m; ++r) {
                        zp *= z;
                        powers[static_cast<std::size_t>(r)] += zp;
                    }
                }
                for (std::size_t mi = 0; mi < spec.ms.size(); ++mi) {
                    const int m = spec.ms[mi];
                    const FarField far = far_for(mi);
                    const double c = m * theta * y1b * far.scale;
                    cells[mi * nt + ti].add(marginal_coverage(m, log_sum, powers.data(), far.shape, c));
                }
            }
            continue;
        }

        for (std::size_t mi = 0; mi < spec.ms.size(); ++mi) {
            const int m = spec.ms[mi];
            for (auto& v : h) v = gamma_sample(m, 1.0 / m, fading_rng);
            const FarField far = far_for(mi);
            const double z = far.shape > 0.0 ? gamma_sample(far.shape, far.scale, fading_rng) : 0.0;
            double interference = y1b * z;
            for (std::size_t j = 1; j < np; ++j) interference += h[j] * ratio[j];
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const double x = spec.thetas[ti] * interference;
                const double v = spec.estimator == Method::mc_raw ? (h[0] > x ? 1.0 : 0.0) : erlang_ccdf(m, x);
                cells[mi * nt + ti].add(v);
            }
        }
    }
}

double counter_uniform(std::uint64_t seed, std::uint64_t draw, std::uint64_t point, std::uint64_t comp) {
    std::uint64_t x = splitmix64(seed ^ splitmix64(draw));
    x = splitmix64(x ^ (point * 64 + comp));
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

FarField far_field_gpp(int n_points, double beta, double h_second_moment) {
    check_beta(beta);
    if (n_points < 1) throw std::invalid_argument("far_field_gpp: n_points must be >= 1");
    const double mean = gamma_ratio_tail(beta, n_points);
    const double var = (h_second_moment - 1.0) * gamma_ratio_tail(2.0 * beta, n_points) +
                       beta * beta * gamma_ratio_tail(2.0 * beta + 1.0, n_points);
    return {mean * mean / var, var / mean};
}

FarField far_field_ppp(double last, double beta, double h_second_moment) {
    check_beta(beta);
    if (!(last > 0.0)) throw std::invalid_argument("far_field_ppp: last squared radius must be > 0");
    const double mean = std::pow(last, 1.0 - beta) / (beta - 1.0);
    const double var = h_second_moment * std::pow(last, 1.0 - 2.0 * beta) / (2.0 * beta - 1.0);
    return {mean * mean / var, var / mean};
}

double gpp_truncation_mean(int n_points, double beta) {
    check_beta(beta);
    return gamma_ratio_tail(beta, n_points);
}

std::vector<double> kostlan_draws(int n_points, RandomStream& rng) {
    check_points(n_points);
    std::vector<double> y(static_cast<std::size_t>(n_points));
    for (int i = 1; i <= n_points; ++i) y[static_cast<std::size_t>(i - 1)] = gamma_sample(i, 1.0, rng);
    return y;
}

RadialSample sample_gpp_radii(int n_points, RandomStream& rng) {
    RadialSample s{kostlan_draws(n_points, rng), PointModel::gpp};
    std::sort(s.sq_radii.begin(), s.sq_radii.end());
    return s;
}

RadialSample sample_ppp_radii(int n_points, RandomStream& rng) {
    check_points(n_points);
    RadialSample s;
    s.model = PointModel::ppp;
    draw_configuration(PointModel::ppp, n_points, rng, s.sq_radii);
    return s;
}

double sir_sample(const RadialSample& radii, const std::vector<double>& fading, const ModelParams& p,
                  double far_interference) {
    p.validate();
    const auto& y = radii.sq_radii;
    if (y.size() < 2) throw std::invalid_argument("sir_sample: need at least two points (empty interference set)");
    if (fading.size() != y.size()) throw std::invalid_argument("sir_sample: fading and radii lengths differ");
    double interference = far_interference;
    for (std::size_t j = 1; j < y.size(); ++j) interference += fading[j] * std::pow(y[j], -p.beta);
    return fading[0] * std::pow(y[0], -p.beta) / interference;
}

double conditional_coverage_given_radii(const RadialSample& radii, const ModelParams& p, const FarField& far) {
    p.validate();
    const auto& y = radii.sq_radii;
    if (y.size() < 2) throw std::invalid_argument("conditional_coverage_given_radii: need at least two points");
    std::vector<double> powers(static_cast<std::size_t>(p.m), 0.0);
    double log_sum = 0.0;
    for (std::size_t j = 1; j < y.size(); ++j) {
        const double a = p.theta * std::pow(y[0] / y[j], p.beta);
        log_sum += std::log1p(a);
        const double z = a / (1.0 + a);
        double zp = 1.0;
        for (int r = 1; r < p.m; ++r) {
            zp *= z;
            powers[static_cast<std::size_t>(r)] += zp;
        }
    }
    const double c = p.m * p.theta * std::pow(y[0], p.beta) * far.scale;
    return marginal_coverage(p.m, log_sum, powers.data(), far.shape, c);
}

std::vector<CoverageEstimate> coverage_mc_grid(const McSpec& spec) {
    check_beta(spec.beta);
    check_points(spec.n_points);
    if (spec.n < 100) throw std::invalid_argument("coverage_mc: need at least 100 replications");
    if (spec.estimator == Method::analytic) throw std::invalid_argument("coverage_mc: estimator must be a Monte Carlo method");
    if (spec.ms.empty() || spec.thetas.empty()) throw std::invalid_argument("coverage_mc: empty m or theta list");
    for (int m : spec.ms)
        if (m < 1 || m > 64) throw std::invalid_argument("coverage_mc: m must lie in [1, 64]");
    for (double t : spec.thetas)
        if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("coverage_mc: theta must be finite and >= 0");

    const std::size_t cells = spec.ms.size() * spec.thetas.size();
    const std::size_t blocks = (spec.n + kBlockSize - 1) / kBlockSize;
    std::vector<std::vector<RunningStats>> partial(blocks, std::vector<RunningStats>(cells));
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t count = std::min(kBlockSize, spec.n - b * kBlockSize);
        run_block(spec, b, count, partial[b]);
    });
    std::vector<RunningStats> total(cells);
    for (const auto& block : partial)
        for (std::size_t c = 0; c < cells; ++c) total[c].merge(block[c]);

    std::vector<CoverageEstimate> out(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        out[c].value = total[c].mean;
        out[c].std_error = total[c].std_error();
        out[c].n = total[c].n;
        out[c].method = spec.estimator;
    }
    return out;
}

CoverageEstimate coverage_mc(PointModel model, const ModelParams& p, Method estimator, std::size_t n, int n_points,
                             std::uint64_t seed) {
    p.validate();
    McSpec spec;
    spec.model = model;
    spec.beta = p.beta;
    spec.ms = {p.m};
    spec.thetas = {p.theta};
    spec.estimator = estimator;
    spec.n = n;
    spec.n_points = n_points;
    spec.seed = seed;
    return coverage_mc_grid(spec).front();
}

std::vector<StopLossPoint> stop_loss_curve(const RadialSample& radii, int m, double beta,
                                           const std::vector<double>& a_grid, std::size_t n_fading,
                                           std::uint64_t seed) {
    check_beta(beta);
    if (m < 1) throw std::invalid_argument("stop_loss_curve: m must be >= 1");
    if (n_fading < 2) throw std::invalid_argument("stop_loss_curve: need at least two fading draws");
    const auto& y = radii.sq_radii;
    if (y.size() < 2) throw std::invalid_argument("stop_loss_curve: need at least two points");
    for (std::size_t k = 0; k < a_grid.size(); ++k) {
        if (!(a_grid[k] >= 0.0)) throw std::invalid_argument("stop_loss_curve: grid values must be >= 0");
        if (k > 0 && a_grid[k] < a_grid[k - 1]) throw std::invalid_argument("stop_loss_curve: grid must be ascending");
    }
    std::vector<double> ratio(y.size());
    for (std::size_t j = 1; j < y.size(); ++j) ratio[j] = std::pow(y[0] / y[j], beta);
    auto fading = [&](std::size_t draw, std::size_t point) {
        double acc = 0.0;
        for (int l = 0; l < m; ++l) acc -= std::log(counter_uniform(seed, draw, point, static_cast<std::uint64_t>(l)));
        return acc / m;
    };
    std::vector<RunningStats> stats(a_grid.size());
    for (std::size_t d = 0; d < n_fading; ++d) {
        double interference = 0.0;
        for (std::size_t j = 1; j < y.size(); ++j) interference += fading(d, j) * ratio[j];
        const double sir = fading(d, 0) / interference;
        for (std::size_t k = 0; k < a_grid.size(); ++k) stats[k].add(std::max(sir - a_grid[k], 0.0));
    }
    std::vector<StopLossPoint> out(a_grid.size());
    for (std::size_t k = 0; k < a_grid.size(); ++k) out[k] = {a_grid[k], stats[k].mean, stats[k].std_error()};
    return out;
}

}  // namespace ginibre
