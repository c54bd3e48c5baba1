#pragma once

// Partition index sets and the Faa di Bruno machinery behind the
// higher-derivative expansions of the coverage formula.
//
//   P_k     = { (h_1..h_k) >= 0 : sum_r r h_r = k }           (P_0 = {()})
//   Q_{k,h} = { (r_1..r_{k-h+1}) >= 0 : sum_q q r_q = k, sum_q r_q = h }

#include <cstdint>
#include <span>
#include <vector>

namespace ginibre {

/// Multiplicity vector: parts[j] is the multiplicity of the part j + 1.
struct PartitionTuple {
    std::vector<int> parts;

    [[nodiscard]] std::size_t size() const noexcept { return parts.size(); }
    int operator[](std::size_t j) const { return parts[j]; }
    /// sum_j (j+1) * parts[j]
    [[nodiscard]] int weighted_sum() const;
    /// sum_j parts[j]
    [[nodiscard]] int count() const;

    friend bool operator==(const PartitionTuple&, const PartitionTuple&) = default;
};

/// Multiplicity vectors of the integer partitions of k, in descending
/// lexicographic order. enumerate_p(0) holds the single empty tuple.
std::vector<PartitionTuple> enumerate_p(int k);

/// Tuples of length k - h + 1 in Q_{k,h}, descending lexicographic order.
/// Requires 1 <= h <= k.
std::vector<PartitionTuple> enumerate_q(int k, int h);

/// Cached views of the above. The cache is filled once per key under a
/// mutex; returned references stay valid for the process lifetime.
const std::vector<PartitionTuple>& partitions_p(int k);
const std::vector<PartitionTuple>& partitions_q(int k, int h);

/// n! as a double; exact through 20!, log-gamma beyond.
double factorial(int n);
/// Binomial coefficient C(n, k) as a double.
double binomial(int n, int k);

/// Partial Bell polynomial B_{k,h}(x_1, ..., x_{k-h+1}).
/// Throws std::invalid_argument on a length mismatch.
double bell_polynomial(int k, int h, std::span<const double> args);

/// Given c_j = C^{(j)}(x0) for j = 0..n, returns the derivatives 0..n of
/// 1/C at x0. Throws std::domain_error when c_0 == 0.
std::vector<double> derivs_of_reciprocal(int n, std::span<const double> c);

/// Given the value f0 of a product F at x0 and the derivatives
/// L_r = (log F)^{(r)}(x0), r = 1..n, returns F^{(0..n)}(x0).
std::vector<double> derivs_of_product_from_log(int n, double f0, std::span<const double> log_derivs);

}  // namespace ginibre
