#pragma once

// Semi-analytical coverage probability for Ginibre-deployed base stations
// under Nakagami-m fading, plus the large-threshold asymptotic constants.
//
// Index convention: sums and products over i start at 0; index i carries
// the Poisson weight e^{-u} u^i / i! and the Gam(i+1, 1) kernel
// e^{-y} y^i / i!.

#include <cstdint>
#include <vector>

#include "ginibre/model.hpp"
#include "ginibre/quadrature.hpp"

namespace ginibre {

/// Largest Nakagami shape the engine can represent at all.
inline constexpr int kHardMaxM = 16;

struct AnalyticOptions {
    int max_m = 8;
    /// For m <= 3 also evaluate the literal small-m expansions on the same
    /// quadrature nodes and fail if the two disagree.
    bool verify = false;
};

/// The computed value left the admissible range [0, 1] by more than its
/// error estimate allows, or two independent assemblies disagreed.
class ConsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// J_i^{(q)}(u) = (1/i!) int_u^inf e^{-y} y^i w^q (1 + theta w)^{-(m+q)} dy
/// with w = (u/y)^beta. Plain adaptive quadrature, no series shortcuts.
double j_integral(int i, int q, double u, const ModelParams& p, const NumericsPolicy& policy);

/// V_{k,h,i}(u): sum over Q_{k,h} of prod_q (1/r_q!) (C(m+q-1, m-1) J_i^{(q)})^{r_q}.
/// V_{0,0,i} = 1.
double v_factor(int k, int h, int i, double u, const ModelParams& p, const NumericsPolicy& policy);

/// M, S and T at one value of u. `s[k][h]` holds e^{-u} S_{k,h}(u) (the
/// Poisson factor is folded in); `t[k][h]` holds T_{k,h}(u). Both are
/// indexed 0 <= h <= k <= m-1; s[k][0] is only meaningful for k = 0 and
/// t[k][0] is unused.
struct MstProfile {
    double u = 0.0;
    int m = 1;
    double log_m = 0.0;  // log M(u)
    double m_value = 1.0;
    std::vector<std::vector<double>> s;
    std::vector<std::vector<double>> t;
    int horizon = 0;         // number of indices summed explicitly
    int series_start = 0;    // first index evaluated by the moment series
    double log_m_error = 0.0;
    std::vector<std::vector<double>> t_error;
    bool negligible = false;  // M(u) S(u) T(u) products are below 1e-300
};

MstProfile mst_profile(double u, const ModelParams& p, const NumericsPolicy& policy);

/// Same quantities built from the literal small-m expansions (m <= 3).
MstProfile example_profile(double u, const ModelParams& p, const NumericsPolicy& policy);

/// e^{-u} M(u) times the theta-polynomial of the coverage integrand,
/// assembled from the partition sums for any m.
double assemble_generic(const MstProfile& profile, double theta);

/// The same integrand written out term by term for m = 1, 2, 3.
double assemble_example(const MstProfile& profile, double theta);

/// First-order bound on the integrand error caused by series truncation.
double profile_error(const MstProfile& profile, double theta);

struct AnalyticReport {
    CoverageEstimate estimate;
    double example_value = 0.0;  // hand-coded expansion, when computed
    bool has_example = false;
    double truncation_error = 0.0;
    double quadrature_error = 0.0;
};

/// Full result including the verification value; does not apply the range
/// check.
AnalyticReport coverage_analytic_report(const ModelParams& p, const NumericsPolicy& policy,
                                        const AnalyticOptions& options = {});

/// Coverage probability P(SIR > theta). Throws ConsistencyError when the
/// result falls outside [-10 eps, 1 + 10 eps] with eps the error estimate,
/// or when verification is on and the two assemblies differ by more than
/// 1e-9 relative.
CoverageEstimate coverage_analytic(const ModelParams& p, const NumericsPolicy& policy,
                                   const AnalyticOptions& options = {});

/// Coverage over a list of thresholds (other parameters fixed), evaluated
/// in parallel; results are in input order.
std::vector<CoverageEstimate> coverage_analytic_sweep(const ModelParams& base, const std::vector<double>& thetas,
                                                      const NumericsPolicy& policy,
                                                      const AnalyticOptions& options = {});

/// c1(beta) = int_0^inf prod_{j>=2} E[(1 + (v/Y_j)^beta)^{-1}] dv, Y_j ~ Gam(j, 1).
double asymptotic_c1(double beta, const NumericsPolicy& policy);

/// Monte Carlo estimate of E[(sum_{j>=2} Y_j^{-beta})^{-1/beta}]. Each
/// sample uses the first n_points variates exactly and a moment-matched
/// Gamma variate for the interference beyond them.
Estimate asymptotic_cinf(double beta, std::size_t n_samples, std::uint64_t seed, int n_points = 512);

struct GammaBoundReport {
    double beta = 0.0;
    double c1 = 0.0;
    Estimate cinf;
    double gamma_factor = 0.0;  // Gamma(1 + 1/beta)
    bool holds = false;         // c1 >= gamma_factor * (cinf - 3 stderr)
};

GammaBoundReport gamma_bound_check(double beta, const NumericsPolicy& policy, std::size_t n_samples,
                                   std::uint64_t seed);

}  // namespace ginibre
