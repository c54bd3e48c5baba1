#include "ginibre/combinatorics.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "ginibre/specfun.hpp"

namespace ginibre {

int PartitionTuple::weighted_sum() const {
    int s = 0;
    for (std::size_t j = 0; j < parts.size(); ++j) s += static_cast<int>(j + 1) * parts[j];
    return s;
}

int PartitionTuple::count() const { return std::accumulate(parts.begin(), parts.end(), 0); }

namespace {

void fill_p(std::size_t pos, int remaining, std::vector<int>& cur, std::vector<PartitionTuple>& out) {
    const int part = static_cast<int>(pos) + 1;
    if (pos + 1 == cur.size()) {
        if (remaining % part != 0) return;
        cur[pos] = remaining / part;
        out.push_back({cur});
        return;
    }
    for (int mult = remaining / part; mult >= 0; --mult) {
        const int rest = remaining - mult * part;
        // What is left must be expressible with parts >= part + 1.
        if (rest != 0 && rest < part + 1) continue;
        cur[pos] = mult;
        fill_p(pos + 1, rest, cur, out);
    }
    cur[pos] = 0;
}

void fill_q(std::size_t pos, int sum_left, int count_left, std::vector<int>& cur, std::vector<PartitionTuple>& out) {
    const int part = static_cast<int>(pos) + 1;
    const int longest = static_cast<int>(cur.size());
    if (pos == cur.size()) {
        if (sum_left == 0 && count_left == 0) out.push_back({cur});
        return;
    }
    for (int mult = std::min(count_left, sum_left / part); mult >= 0; --mult) {
        const int s = sum_left - mult * part;
        const int c = count_left - mult;
        // Remaining c parts all lie in [part + 1, longest].
        if (s < c * (part + 1) || s > c * longest) {
            if (!(s == 0 && c == 0)) continue;
        }
        cur[pos] = mult;
        fill_q(pos + 1, s, c, cur, out);
    }
    cur[pos] = 0;
}

constexpr std::array<std::uint64_t, 21> kFactorials = [] {
    std::array<std::uint64_t, 21> f{};
    f[0] = 1;
    for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * i;
    return f;
}();

}  // namespace

std::vector<PartitionTuple> enumerate_p(int k) {
    if (k < 0) throw std::invalid_argument("enumerate_p: k must be >= 0");
    if (k == 0) return {PartitionTuple{}};
    std::vector<PartitionTuple> out;
    std::vector<int> cur(static_cast<std::size_t>(k), 0);
    fill_p(0, k, cur, out);
    return out;
}

std::vector<PartitionTuple> enumerate_q(int k, int h) {
    if (h < 1 || h > k) throw std::invalid_argument("enumerate_q: need 1 <= h <= k");
    std::vector<PartitionTuple> out;
    std::vector<int> cur(static_cast<std::size_t>(k - h + 1), 0);
    fill_q(0, k, h, cur, out);
    return out;
}

constexpr int kTableLimit = 16;

const std::vector<PartitionTuple>& partitions_p(int k) {
    // Small k is served from a table built once; larger k from a locked map.
    static const auto table = [] {
        std::vector<std::vector<PartitionTuple>> t;
        for (int j = 0; j <= kTableLimit; ++j) t.push_back(enumerate_p(j));
        return t;
    }();
    if (k >= 0 && k <= kTableLimit) return table[static_cast<std::size_t>(k)];
    static std::mutex mu;
    static std::map<int, std::vector<PartitionTuple>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, enumerate_p(k)).first;
    return it->second;
}

const std::vector<PartitionTuple>& partitions_q(int k, int h) {
    static const auto table = [] {
        std::vector<std::vector<std::vector<PartitionTuple>>> t(kTableLimit + 1);
        for (int kk = 1; kk <= kTableLimit; ++kk) {
            t[static_cast<std::size_t>(kk)].resize(static_cast<std::size_t>(kk + 1));
            for (int hh = 1; hh <= kk; ++hh)
                t[static_cast<std::size_t>(kk)][static_cast<std::size_t>(hh)] = enumerate_q(kk, hh);
        }
        return t;
    }();
    if (h >= 1 && h <= k && k <= kTableLimit) return table[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)];
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<PartitionTuple>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find({k, h});
    if (it == cache.end()) it = cache.emplace(std::pair{k, h}, enumerate_q(k, h)).first;
    return it->second;
}

double factorial(int n) {
    if (n < 0) throw std::domain_error("factorial of a negative number");
    if (n < static_cast<int>(kFactorials.size())) return static_cast<double>(kFactorials[static_cast<std::size_t>(n)]);
    return std::exp(log_factorial(n));
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (n < static_cast<int>(kFactorials.size()))
        return static_cast<double>(kFactorials[static_cast<std::size_t>(n)] /
                                   (kFactorials[static_cast<std::size_t>(k)] *
                                    kFactorials[static_cast<std::size_t>(n - k)]));
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

double bell_polynomial(int k, int h, std::span<const double> args) {
    if (h < 1 || h > k) throw std::invalid_argument("bell_polynomial: need 1 <= h <= k");
    if (args.size() != static_cast<std::size_t>(k - h + 1))
        throw std::invalid_argument("bell_polynomial: expected " + std::to_string(k - h + 1) + " arguments, got " +
                                    std::to_string(args.size()));
    double total = 0.0;
    for (const auto& tuple : partitions_q(k, h)) {
        double term = 1.0;
        for (std::size_t q = 0; q < tuple.size(); ++q) {
            const int r = tuple[q];
            if (r == 0) continue;
            term *= std::pow(args[q] / factorial(static_cast<int>(q) + 1), r) / factorial(r);
        }
        total += term;
    }
    return factorial(k) * total;
}

std::vector<double> derivs_of_reciprocal(int n, std::span<const double> c) {
    if (n < 0) throw std::invalid_argument("derivs_of_reciprocal: n must be >= 0");
    if (c.size() != static_cast<std::size_t>(n + 1))
        throw std::invalid_argument("derivs_of_reciprocal: expected n + 1 derivative values");
    if (c[0] == 0.0) throw std::domain_error("derivs_of_reciprocal: function vanishes at the evaluation point");
    std::vector<double> d(static_cast<std::size_t>(n + 1));
    d[0] = 1.0 / c[0];
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int h = 1; h <= k; ++h) {
            const double sign = (h % 2 == 0) ? 1.0 : -1.0;
            const auto args = c.subspan(1, static_cast<std::size_t>(k - h + 1));
            acc += sign * factorial(h) * std::pow(c[0], -h - 1) * bell_polynomial(k, h, args);
        }
        d[static_cast<std::size_t>(k)] = acc;
    }
    return d;
}

std::vector<double> derivs_of_product_from_log(int n, double f0, std::span<const double> log_derivs) {
    if (n < 0) throw std::invalid_argument("derivs_of_product_from_log: n must be >= 0");
    if (log_derivs.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("derivs_of_product_from_log: expected n log-derivatives");
    std::vector<double> d(static_cast<std::size_t>(n + 1));
    d[0] = f0;
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (const auto& tuple : partitions_p(k)) {
            double term = 1.0;
            for (std::size_t r = 0; r < tuple.size(); ++r) {
                const int h = tuple[r];
                if (h == 0) continue;
                term *= std::pow(log_derivs[r] / factorial(static_cast<int>(r) + 1), h) / factorial(h);
            }
            acc += term;
        }
        d[static_cast<std::size_t>(k)] = factorial(k) * f0 * acc;
    }
    return d;
}

}  // namespace ginibre
