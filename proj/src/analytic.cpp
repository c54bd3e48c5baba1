#include "ginibre/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ginibre/combinatorics.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre {

namespace {

constexpr std::size_t kQ = kHardMaxM;
constexpr int kSeriesTerms = 24;
constexpr int kMinHorizon = 256;
constexpr double kLogUnderflow = -745.0;

struct Row {
    double log_pi = 0.0;
    double log_j0 = 0.0;
    std::array<double, kQ> rho{};  // J^{(q)} / J^{(0)}, rho[0] = 1
};

struct TableSpec {
    int m = 1;
    double beta = 2.0;
    double theta = 1.0;
    double u = 0.0;
    bool restrict_lower = true;  // integrate over y >= u, as in J
    int first = 0;
};

// Index sets and constant weights of the generic T/S sums for one m.
struct Shape {
    int m = 1;
    std::array<double, kQ> weight{};  // C(m+q-1, m-1)
    struct Entry {
        int k = 0;
        int h = 0;
        const std::vector<PartitionTuple>* tuples = nullptr;
        double tail_constant = 0.0;  // sum over tuples of prod weight^r / r!
    };
    std::vector<Entry> entries;  // (k, h) with 1 <= h <= k <= m-1

    explicit Shape(int m_) : m(m_) {
        for (int q = 0; q < m; ++q) weight[static_cast<std::size_t>(q)] = binomial(m + q - 1, m - 1);
        for (int k = 1; k < m; ++k)
            for (int h = 1; h <= k; ++h) {
                Entry e{k, h, &partitions_q(k, h), 0.0};
                for (const auto& tup : *e.tuples) {
                    double c = 1.0;
                    for (std::size_t q = 0; q < tup.size(); ++q)
                        c *= std::pow(weight[q + 1], tup[q]) / factorial(tup[q]);
                    e.tail_constant += c;
                }
                entries.push_back(e);
            }
    }

    // R_{k,h} = V_{k,h} / J0^h for every entry, in entry order.
    void ratios(const Row& row, std::vector<double>& out) const {
        std::array<double, kQ> x{};
        for (int q = 1; q < m; ++q)
            x[static_cast<std::size_t>(q)] = weight[static_cast<std::size_t>(q)] * row.rho[static_cast<std::size_t>(q)];
        out.resize(entries.size());
        for (std::size_t e = 0; e < entries.size(); ++e) {
            double total = 0.0;
            for (const auto& tup : *entries[e].tuples) {
                double term = 1.0;
                for (std::size_t q = 0; q < tup.size(); ++q) {
                    const int r = tup[q];
                    for (int j = 0; j < r; ++j) term *= x[q + 1];
                    if (r > 1) term /= factorial(r);
                }
                total += term;
            }
            out[e] = total;
        }
    }
};

const Shape& shape_for(int m) {
    static const auto shapes = [] {
        std::vector<Shape> v;
        for (int j = 1; j <= kHardMaxM; ++j) v.emplace_back(j);
        return v;
    }();
    return shapes[static_cast<std::size_t>(m - 1)];
}

struct Table {
    TableSpec spec;
    std::vector<Row> rows;  // rows[i - first]
    int horizon = 0;        // rows cover first <= i < horizon
    int series_start = 0;
    int pois_end = 0;       // Poisson-weighted sums use i < pois_end
    double log_m = 0.0;
    double log_m_error = 0.0;
    std::array<double, kQ> tau{};  // analytic tail of sum_i E[rho-like monomials of order k]
    std::vector<double> t;         // generic T_{k,h}, Shape entry order, tails included
    std::vector<double> t_error;
    bool negligible = false;
    bool origin = false;
};

// Sum over p of c_p x^p G_{(k+p) beta}(n), the tail of E[w^k (1 + theta w)^{-k}]
// with w = u^beta Y^{-beta}, evaluated in log space.
double tail_tau(int k, double ub, double theta, double beta, int n) {
    if (ub == 0.0) return 0.0;
    double total = 0.0;
    double coef = 1.0;
    for (int p = 0; p <= kSeriesTerms; ++p) {
        const double s = (k + p) * beta;
        if (n + 1.0 - s <= 0.0) break;
        if (p > 0 && theta == 0.0) break;
        const double log_mag = (k + p) * std::log(ub) + (p > 0 ? p * std::log(theta) : 0.0) +
                               log_gamma(n + 1.0 - s) - log_gamma(static_cast<double>(n)) - std::log(s - 1.0);
        const double term = coef * std::exp(log_mag);
        total += term;
        if (std::abs(term) < 1e-17 * std::abs(total)) break;
        coef *= -static_cast<double>(k + p) / (p + 1);
    }
    return total;
}

// Tail of sum_i log J0_i for i >= n: -m log(1 + theta w) averaged through
// exact negative moments, plus the leading Jensen correction.
double tail_log_m(int m, double ub, double theta, double beta, int n) {
    const double x = theta * ub;
    if (x == 0.0) return 0.0;
    double total = 0.0;
    for (int p = 1; p <= kSeriesTerms; ++p) {
        const double s = p * beta;
        if (n + 1.0 - s <= 0.0) break;
        const double mag = std::exp(p * std::log(x) + log_gamma(n + 1.0 - s) - log_gamma(static_cast<double>(n)) -
                                    std::log(s - 1.0));
        const double term = -m * (p % 2 == 1 ? 1.0 : -1.0) * mag / p;
        total += term;
        if (std::abs(term) < 1e-17 * std::abs(total)) break;
    }
    const double s2 = 2.0 * beta + 1.0;
    if (n + 1.0 - s2 > 0.0) total += 0.5 * m * m * x * x * beta * beta * gamma_ratio_tail(s2, n);
    return total;
}

class TableBuilder {
public:
    TableBuilder(const TableSpec& spec, const NumericsPolicy& policy) : spec_(spec), policy_(policy) {
        ub_ = std::pow(spec.u, spec.beta);
        x_ = spec.theta * ub_;
        const double lower = spec.restrict_lower ? spec.u : 0.0;
        ystar_ = std::max(lower, spec.u * std::pow(2.0 * spec.theta, 1.0 / spec.beta));
    }

    Table build();

private:
    bool series_ok(int i) const;
    void init_moments(int i);
    void advance_moments(int i);
    Row quad_row(int i) const;
    Row series_row(int i) const;
    void corrected(int h, double& log_m, std::vector<double>& t) const;

    TableSpec spec_;
    const NumericsPolicy& policy_;
    double ub_ = 0.0;
    double x_ = 0.0;
    double ystar_ = 0.0;
    std::vector<double> gam_;  // gam_[j] = Gamma(i+1-j beta)/Gamma(i+1)
    Table table_;
};

bool TableBuilder::series_ok(int i) const {
    const double reach = (kSeriesTerms + spec_.m) * spec_.beta;
    if (!(i > reach + 2.0)) return false;
    if (x_ * std::pow(i - reach, -spec_.beta) > 0.1) return false;
    if (ystar_ > 0.0) {
        const double n = i + 2.0;
        if (!(ystar_ < 0.5 * n)) return false;
        const double log_mass = (i + 1.0) * std::log(ystar_) - ystar_ - log_gamma(n) - std::log1p(-ystar_ / n);
        if (log_mass > -40.0) return false;
    }
    return true;
}

void TableBuilder::init_moments(int i) {
    gam_.assign(static_cast<std::size_t>(kSeriesTerms + spec_.m + 1), 0.0);
    for (std::size_t j = 0; j < gam_.size(); ++j)
        gam_[j] = std::exp(log_gamma(i + 1.0 - static_cast<double>(j) * spec_.beta) - log_gamma(i + 1.0));
}

void TableBuilder::advance_moments(int i) {
    for (std::size_t j = 0; j < gam_.size(); ++j) gam_[j] *= (i + 1.0 - static_cast<double>(j) * spec_.beta) / (i + 1.0);
}

Row TableBuilder::quad_row(int i) const {
    const int m = spec_.m;
    const double u = spec_.u;
    const double beta = spec_.beta;
    const double theta = spec_.theta;
    auto g = [&](double y, std::array<double, kQ>& out) {
        const double w = std::pow(u / y, beta);
        const double base = 1.0 / (1.0 + theta * w);
        const double wb = std::isfinite(w) ? w * base : 1.0 / theta;
        double v = std::pow(base, m);
        out[0] = v;
        for (int q = 1; q < m; ++q) {
            v *= wb;
            out[static_cast<std::size_t>(q)] = v;
        }
    };
    const double lower = spec_.restrict_lower ? u : 0.0;
    const double rel = std::min(policy_.rel_tol, 1e-10);
    const auto r = gamma_kernel_integrate<kQ>(static_cast<double>(i), lower, g, static_cast<std::size_t>(m), rel,
                                              policy_.max_quad_depth);
    Row row;
    row.log_j0 = r.scaled[0] > 0.0 ? r.log_scale + std::log(r.scaled[0]) : -std::numeric_limits<double>::infinity();
    row.rho[0] = 1.0;
    for (int q = 1; q < m; ++q)
        row.rho[static_cast<std::size_t>(q)] = r.scaled[0] > 0.0 ? r.scaled[static_cast<std::size_t>(q)] / r.scaled[0] : 0.0;
    return row;
}

Row TableBuilder::series_row(int) const {
    const int m = spec_.m;
    std::array<double, kQ> j{};
    for (int q = 0; q < m; ++q) {
        const int n = m + q;
        double total = 0.0;
        double coef = 1.0;
        double xp = 1.0;
        for (int p = 0; p <= kSeriesTerms; ++p) {
            const double term = coef * xp * gam_[static_cast<std::size_t>(p + q)];
            total += term;
            if (x_ == 0.0 || std::abs(term) < 1e-17 * std::abs(total)) break;
            coef *= -static_cast<double>(n + p) / (p + 1);
            xp *= x_;
        }
        j[static_cast<std::size_t>(q)] = std::pow(ub_, q) * total;
    }
    Row row;
    row.log_j0 = std::log(j[0]);
    row.rho[0] = 1.0;
    for (int q = 1; q < m; ++q) row.rho[static_cast<std::size_t>(q)] = j[static_cast<std::size_t>(q)] / j[0];
    return row;
}

// log M and generic T values using the explicit rows below index h and the
// analytic tail from h on.
void TableBuilder::corrected(int h, double& log_m, std::vector<double>& t) const {
    const Shape& shape = shape_for(spec_.m);
    CompensatedSum lm;
    std::vector<CompensatedSum> ts(shape.entries.size());
    std::vector<double> r;
    const auto count = static_cast<std::size_t>(h - spec_.first);
    for (std::size_t j = 0; j < count; ++j) {
        const Row& row = table_.rows[j];
        lm += row.log_j0;
        if (!shape.entries.empty()) {
            shape.ratios(row, r);
            for (std::size_t e = 0; e < r.size(); ++e) ts[e] += r[e];
        }
    }
    log_m = lm.value() + tail_log_m(spec_.m, ub_, spec_.theta, spec_.beta, h);
    t.resize(shape.entries.size());
    for (std::size_t e = 0; e < t.size(); ++e) {
        const auto& entry = shape.entries[e];
        t[e] = ts[e].value() + entry.tail_constant * tail_tau(entry.k, ub_, spec_.theta, spec_.beta, h);
    }
}

Table TableBuilder::build() {
    Table& tb = table_;
    tb.spec = spec_;
    if (spec_.u == 0.0) {
        tb.origin = true;
        tb.horizon = spec_.first;
        tb.pois_end = spec_.first + 1;
        tb.t.assign(shape_for(spec_.m).entries.size(), 0.0);
        tb.t_error = tb.t;
        return tb;
    }
    const int m = spec_.m;
    const int cap = spec_.first + policy_.max_series_index;
    const double log_s_bound = m * std::log1p(spec_.theta) + std::log(2.0) - 60.0;
    bool fast = false;
    bool pois_known = !spec_.restrict_lower;
    if (pois_known) tb.pois_end = spec_.first;
    CompensatedSum partial;
    double min_log_j0 = 0.0;
    int horizon = 0;
    const double margin = 40.0 * m;

    for (int i = spec_.first;; ++i) {
        if (i >= cap) {
            throw NumericalError("coverage series: no certified horizon within " +
                                     std::to_string(policy_.max_series_index) + " indices at u = " +
                                     std::to_string(spec_.u),
                                 partial.value());
        }
        if (!fast && series_ok(i)) {
            fast = true;
            tb.series_start = i;
            init_moments(i);
        }
        Row row = fast ? series_row(i) : quad_row(i);
        if (fast) advance_moments(i);
        row.log_pi = spec_.restrict_lower ? log_poisson_weight(i, spec_.u) : 0.0;
        tb.rows.push_back(row);
        partial += row.log_j0;
        if (spec_.restrict_lower) min_log_j0 = std::min(min_log_j0, row.log_j0);

        if (!pois_known && i > spec_.u && row.log_pi < log_s_bound) {
            pois_known = true;
            tb.pois_end = i + 1;
        }
        if (partial.value() - min_log_j0 < kLogUnderflow - margin || !std::isfinite(row.log_j0)) {
            tb.negligible = true;
            tb.horizon = i + 1;
            return tb;
        }
        if (fast && pois_known && horizon == 0) {
            horizon = std::max({2 * tb.series_start, kMinHorizon + spec_.first, tb.pois_end});
            horizon = std::min(horizon, cap);
        }
        if (horizon == 0 || i + 1 < horizon) continue;

        const int check = std::max(tb.series_start, horizon / 2);
        if (check >= horizon) throw NumericalError("coverage series: horizon below series start", partial.value());
        double lm_a = 0.0;
        double lm_b = 0.0;
        std::vector<double> t_a;
        std::vector<double> t_b;
        corrected(check, lm_a, t_a);
        corrected(horizon, lm_b, t_b);
        const double tol = 0.1 * policy_.rel_tol;
        bool stable = std::abs(lm_b - lm_a) <= tol;
        const Shape& shape = shape_for(m);
        for (std::size_t e = 0; e < t_b.size(); ++e) {
            const double scale = spec_.theta > 0.0 ? std::pow(spec_.theta, shape.entries[e].k) : 1.0;
            if (scale * std::abs(t_b[e] - t_a[e]) > tol * std::max(1.0, scale * std::abs(t_b[e]))) stable = false;
        }
        if (!stable && 2 * horizon - spec_.first <= cap) {
            horizon *= 2;
            continue;
        }
        tb.horizon = horizon;
        tb.log_m = lm_b;
        tb.log_m_error = 2.0 * std::abs(lm_b - lm_a);
        tb.t = t_b;
        tb.t_error.resize(t_b.size());
        for (std::size_t e = 0; e < t_b.size(); ++e) tb.t_error[e] = 2.0 * std::abs(t_b[e] - t_a[e]);
        for (int k = 1; k < m; ++k)
            tb.tau[static_cast<std::size_t>(k)] = tail_tau(k, ub_, spec_.theta, spec_.beta, horizon);
        return tb;
    }
}

Table build_table(const TableSpec& spec, const NumericsPolicy& policy) { return TableBuilder(spec, policy).build(); }

TableSpec coverage_spec(double u, const ModelParams& p) { return TableSpec{p.m, p.beta, p.theta, u, true, 0}; }

MstProfile empty_profile(const Table& tb) {
    MstProfile prof;
    const int m = tb.spec.m;
    prof.u = tb.spec.u;
    prof.m = m;
    prof.s.assign(static_cast<std::size_t>(m), {});
    prof.t.assign(static_cast<std::size_t>(m), {});
    prof.t_error.assign(static_cast<std::size_t>(m), {});
    for (int k = 0; k < m; ++k) {
        prof.s[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(k + 1), 0.0);
        prof.t[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(k + 1), 0.0);
        prof.t_error[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(k + 1), 0.0);
    }
    prof.horizon = tb.horizon;
    prof.series_start = tb.series_start;
    if (tb.origin) {
        prof.s[0][0] = 1.0;
    } else if (tb.negligible) {
        prof.negligible = true;
        prof.log_m = -std::numeric_limits<double>::infinity();
        prof.m_value = 0.0;
    } else {
        prof.log_m = tb.log_m;
        prof.m_value = std::exp(tb.log_m);
        prof.log_m_error = tb.log_m_error;
    }
    return prof;
}

MstProfile generic_profile(const Table& tb) {
    MstProfile prof = empty_profile(tb);
    if (tb.origin || tb.negligible) return prof;
    const Shape& shape = shape_for(tb.spec.m);
    CompensatedSum s00;
    std::vector<CompensatedSum> s(shape.entries.size());
    std::vector<double> r;
    const auto count = static_cast<std::size_t>(tb.pois_end - tb.spec.first);
    for (std::size_t j = 0; j < count; ++j) {
        const Row& row = tb.rows[j];
        const double weight = std::exp(row.log_pi - row.log_j0);
        s00 += weight;
        if (shape.entries.empty()) continue;
        shape.ratios(row, r);
        for (std::size_t e = 0; e < r.size(); ++e) s[e] += weight * r[e];
    }
    prof.s[0][0] = s00.value();
    for (std::size_t e = 0; e < shape.entries.size(); ++e) {
        const auto k = static_cast<std::size_t>(shape.entries[e].k);
        const auto h = static_cast<std::size_t>(shape.entries[e].h);
        prof.s[k][h] = s[e].value();
        prof.t[k][h] = tb.t[e];
        prof.t_error[k][h] = tb.t_error[e];
    }
    return prof;
}

MstProfile literal_profile(const Table& tb) {
    const int m = tb.spec.m;
    if (m > 3) throw std::invalid_argument("example expansions exist for m <= 3 only");
    MstProfile prof = empty_profile(tb);
    if (tb.origin || tb.negligible) return prof;
    CompensatedSum s00, s11, s21, s22;
    for (int i = 0; i < tb.pois_end; ++i) {
        const Row& row = tb.rows[static_cast<std::size_t>(i)];
        const double w = std::exp(row.log_pi - row.log_j0);
        s00 += w;
        if (m == 2) s11 += 2.0 * w * row.rho[1];
        if (m == 3) {
            s11 += 3.0 * w * row.rho[1];
            s21 += 6.0 * w * row.rho[2];
            s22 += 4.5 * w * row.rho[1] * row.rho[1];
        }
    }
    CompensatedSum t11, t21, t22;
    for (int i = 0; i < tb.horizon; ++i) {
        const Row& row = tb.rows[static_cast<std::size_t>(i)];
        if (m == 2) t11 += 2.0 * row.rho[1];
        if (m == 3) {
            t11 += 3.0 * row.rho[1];
            t21 += 6.0 * row.rho[2];
            t22 += 4.5 * row.rho[1] * row.rho[1];
        }
    }
    prof.s[0][0] = s00.value();
    if (m >= 2) {
        prof.s[1][1] = s11.value();
        prof.t[1][1] = t11.value() + m * tb.tau[1];
    }
    if (m == 3) {
        prof.s[2][1] = s21.value();
        prof.s[2][2] = s22.value();
        prof.t[2][1] = t21.value() + 6.0 * tb.tau[2];
        prof.t[2][2] = t22.value() + 4.5 * tb.tau[2];
    }
    const MstProfile generic = generic_profile(tb);
    prof.t_error = generic.t_error;
    return prof;
}

void check_params(const ModelParams& p, int max_m) {
    p.validate();
    if (max_m < 1 || max_m > kHardMaxM)
        throw std::invalid_argument("max_m must lie in [1, " + std::to_string(kHardMaxM) + "]");
    if (p.m > max_m) throw std::invalid_argument("m = " + std::to_string(p.m) + " exceeds the configured maximum " +
                                                 std::to_string(max_m));
}

}  // namespace

double j_integral(int i, int q, double u, const ModelParams& p, const NumericsPolicy& policy) {
    p.validate();
    if (i < 0 || q < 0) throw std::invalid_argument("j_integral: indices must be >= 0");
    if (!(u >= 0.0)) throw std::invalid_argument("j_integral: u must be >= 0");
    if (u == 0.0) return q == 0 ? 1.0 : 0.0;
    const double n = p.m + q;
    auto g = [&](double y) {
        const double w = std::pow(u / y, p.beta);
        return std::pow(w, q) * std::pow(1.0 + p.theta * w, -n);
    };
    return gamma_weighted_integral(i, g, u, policy);
}

double v_factor(int k, int h, int i, double u, const ModelParams& p, const NumericsPolicy& policy) {
    if (k == 0 && h == 0) return 1.0;
    if (h < 1 || h > k) throw std::invalid_argument("v_factor: need (k, h) = (0, 0) or 1 <= h <= k");
    std::vector<double> x(static_cast<std::size_t>(k - h + 2), 0.0);
    for (int q = 1; q <= k - h + 1; ++q)
        x[static_cast<std::size_t>(q)] = binomial(p.m + q - 1, p.m - 1) * j_integral(i, q, u, p, policy);
    double total = 0.0;
    for (const auto& tup : partitions_q(k, h)) {
        double term = 1.0;
        for (std::size_t q = 0; q < tup.size(); ++q)
            term *= std::pow(x[q + 1], tup[q]) / factorial(tup[q]);
        total += term;
    }
    return total;
}

MstProfile mst_profile(double u, const ModelParams& p, const NumericsPolicy& policy) {
    check_params(p, kHardMaxM);
    policy.validate();
    if (!(u >= 0.0)) throw std::invalid_argument("mst_profile: u must be >= 0");
    return generic_profile(build_table(coverage_spec(u, p), policy));
}

MstProfile example_profile(double u, const ModelParams& p, const NumericsPolicy& policy) {
    check_params(p, 3);
    policy.validate();
    if (!(u >= 0.0)) throw std::invalid_argument("example_profile: u must be >= 0");
    return literal_profile(build_table(coverage_spec(u, p), policy));
}

double assemble_generic(const MstProfile& prof, double theta) {
    if (prof.negligible) return 0.0;
    const int m = prof.m;
    std::vector<double> a(static_cast<std::size_t>(m), 0.0);
    a[0] = prof.s[0][0];
    for (int k = 1; k < m; ++k) {
        CompensatedSum acc;
        for (int h = 1; h <= k; ++h)
            acc += (h % 2 == 0 ? 1.0 : -1.0) * factorial(h) * prof.s[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)];
        a[static_cast<std::size_t>(k)] = acc.value();
    }
    std::vector<double> c(static_cast<std::size_t>(m), 0.0);
    for (int r = 1; r < m; ++r) {
        CompensatedSum acc;
        for (int q = 0; q < r; ++q)
            acc += (q % 2 == 0 ? 1.0 : -1.0) * factorial(q) *
                   prof.t[static_cast<std::size_t>(r)][static_cast<std::size_t>(q + 1)];
        c[static_cast<std::size_t>(r)] = acc.value();
    }
    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    b[0] = 1.0;
    for (int r = 1; r < m; ++r) {
        CompensatedSum acc;
        for (const auto& tup : partitions_p(r)) {
            double term = 1.0;
            for (std::size_t j = 0; j < tup.size(); ++j)
                if (tup[j] > 0) term *= std::pow(c[j + 1], tup[j]) / factorial(tup[j]);
            acc += term;
        }
        b[static_cast<std::size_t>(r)] = acc.value();
    }
    CompensatedSum total;
    double theta_n = 1.0;
    for (int n = 0; n < m; ++n) {
        for (int k = 0; k <= n; ++k)
            total += theta_n * a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(n - k)];
        theta_n *= theta;
    }
    return prof.m_value * total.value();
}

double assemble_example(const MstProfile& prof, double theta) {
    if (prof.m > 3) throw std::invalid_argument("example expansions exist for m <= 3 only");
    if (prof.negligible) return 0.0;
    const auto& s = prof.s;
    const auto& t = prof.t;
    double f = s[0][0];
    if (prof.m == 2) f = s[0][0] + theta * (s[0][0] * t[1][1] - s[1][1]);
    if (prof.m == 3) {
        f = s[0][0] + theta * (s[0][0] * t[1][1] - s[1][1]) +
            theta * theta *
                (s[0][0] * (t[1][1] * t[1][1] / 2.0 + t[2][1] - t[2][2]) - s[1][1] * t[1][1] - s[2][1] + 2.0 * s[2][2]);
    }
    return prof.m_value * f;
}

double profile_error(const MstProfile& prof, double theta) {
    if (prof.negligible) return 0.0;
    const double base = assemble_generic(prof, theta);
    double err = std::abs(base) * prof.log_m_error;
    // Shift each T entry by its own error and add up the integrand changes.
    MstProfile shifted = prof;
    for (int k = 1; k < prof.m; ++k)
        for (int h = 1; h <= k; ++h) {
            const auto kk = static_cast<std::size_t>(k);
            const auto hh = static_cast<std::size_t>(h);
            const double d = prof.t_error[kk][hh];
            if (d == 0.0) continue;
            shifted.t[kk][hh] = prof.t[kk][hh] + d;
            err += std::abs(assemble_generic(shifted, theta) - base);
            shifted.t[kk][hh] = prof.t[kk][hh];
        }
    return err;
}

AnalyticReport coverage_analytic_report(const ModelParams& p, const NumericsPolicy& policy,
                                        const AnalyticOptions& options) {
    check_params(p, options.max_m);
    policy.validate();
    const bool with_example = options.verify && p.m <= 3;
    const std::size_t dim = with_example ? 3 : 2;
    auto f = [&](double u, std::array<double, 3>& out) {
        const Table tb = build_table(coverage_spec(u, p), policy);
        const MstProfile prof = generic_profile(tb);
        out[0] = assemble_generic(prof, p.theta);
        out[1] = profile_error(prof, p.theta);
        if (with_example) out[2] = assemble_example(literal_profile(tb), p.theta);
    };
    const double scale = p.theta > 0.0 ? std::min(1.0, std::pow(p.theta, -1.0 / p.beta)) : 1.0;
    const auto r = integrate_to_infinity_panels<3>(f, dim, 0.0, policy.rel_tol, policy.abs_tol, policy.max_quad_depth,
                                                   scale);
    AnalyticReport rep;
    rep.estimate.value = r.value[0];
    rep.estimate.method = Method::analytic;
    rep.quadrature_error = r.error[0];
    rep.truncation_error = std::abs(r.value[1]) + r.error[1];
    rep.estimate.error_estimate = rep.quadrature_error + rep.truncation_error;
    if (with_example) {
        rep.has_example = true;
        rep.example_value = r.value[2];
    }
    return rep;
}

CoverageEstimate coverage_analytic(const ModelParams& p, const NumericsPolicy& policy, const AnalyticOptions& options) {
    const AnalyticReport rep = coverage_analytic_report(p, policy, options);
    const double v = rep.estimate.value;
    const double eps = std::max(rep.estimate.error_estimate, 1e-15);
    if (v < -10.0 * eps || v > 1.0 + 10.0 * eps)
        throw ConsistencyError("coverage " + std::to_string(v) + " outside [0, 1] beyond error estimate " +
                                   std::to_string(rep.estimate.error_estimate),
                               v);
    if (rep.has_example && std::abs(rep.example_value - v) > 1e-9 * std::max(std::abs(v), 1e-300))
        throw ConsistencyError("generic and literal expansions disagree: " + std::to_string(v) + " vs " +
                                   std::to_string(rep.example_value),
                               v);
    return rep.estimate;
}

std::vector<CoverageEstimate> coverage_analytic_sweep(const ModelParams& base, const std::vector<double>& thetas,
                                                      const NumericsPolicy& policy, const AnalyticOptions& options) {
    std::vector<CoverageEstimate> out(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t j) {
        ModelParams p = base;
        p.theta = thetas[j];
        out[j] = coverage_analytic(p, policy, options);
    });
    return out;
}

double asymptotic_c1(double beta, const NumericsPolicy& policy) {
    if (!(beta > 1.0) || !std::isfinite(beta)) throw std::invalid_argument("asymptotic_c1: beta must be > 1");
    policy.validate();
    auto f = [&](double v) {
        if (v == 0.0) return 1.0;
        const Table tb = build_table(TableSpec{1, beta, 1.0, v, false, 1}, policy);
        return tb.negligible ? 0.0 : std::exp(tb.log_m);
    };
    return integrate_to_infinity(f, 0.0, policy, 1.0).value;
}

}  // namespace ginibre
