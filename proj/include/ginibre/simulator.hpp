#pragma once

// Monte Carlo coverage over the radial (Kostlan) representation of the
// Ginibre process and over a Poisson baseline of the same intensity.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ginibre/model.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre {

inline constexpr std::uint64_t kDefaultSeed = 20150601;

enum class PointModel { gpp, ppp };

/// Squared distances of the base stations from the origin, ascending.
/// The serving station is index 0.
struct RadialSample {
    std::vector<double> sq_radii;
    PointModel model = PointModel::gpp;
};

/// Aggregate interference from the stations beyond the sampled ones,
/// modelled as a Gamma variate with matched mean and variance
/// (shape 0 means no far field).
struct FarField {
    double shape = 0.0;
    double scale = 0.0;
    [[nodiscard]] double mean() const noexcept { return shape * scale; }
};

/// Sum over Kostlan indices j > n_points of E[H Y_j^{-beta}] and the
/// matching variance, with E[H^2] = h_second_moment (1 + 1/m for Nakagami-m).
FarField far_field_gpp(int n_points, double beta, double h_second_moment);
/// Poisson points beyond squared radius `last`, unit rate in squared radius.
FarField far_field_ppp(double last, double beta, double h_second_moment);

/// Mean interference left out by truncating the Kostlan set at n_points:
/// sum_{j > n} Gamma(j - beta) / Gamma(j).
double gpp_truncation_mean(int n_points, double beta);

/// Independent Y_i ~ Gam(i, 1), i = 1..n_points, in index order (unsorted).
std::vector<double> kostlan_draws(int n_points, RandomStream& rng);
RadialSample sample_gpp_radii(int n_points, RandomStream& rng);
RadialSample sample_ppp_radii(int n_points, RandomStream& rng);

/// H_0 y_0^{-beta} / (sum_{j>=1} H_j y_j^{-beta} + far_interference).
double sir_sample(const RadialSample& radii, const std::vector<double>& fading, const ModelParams& p,
                  double far_interference = 0.0);

/// P(SIR > theta | radii) with every fading variable (and the far field,
/// when given) integrated out exactly.
double conditional_coverage_given_radii(const RadialSample& radii, const ModelParams& p, const FarField& far = {});

struct McSpec {
    PointModel model = PointModel::gpp;
    double beta = 2.0;
    std::vector<int> ms{1};
    std::vector<double> thetas{1.0};
    Method estimator = Method::mc_full_marg;
    std::size_t n = 100000;
    int n_points = 512;
    std::uint64_t seed = kDefaultSeed;
    bool far_field = true;
};

/// Coverage estimates for every (m, theta) cell, m-major. All cells share
/// the same radial samples, and all thresholds for one m share the same
/// fading draws. Results do not depend on the number of worker threads.
std::vector<CoverageEstimate> coverage_mc_grid(const McSpec& spec);

CoverageEstimate coverage_mc(PointModel model, const ModelParams& p, Method estimator, std::size_t n,
                             int n_points = 512, std::uint64_t seed = kDefaultSeed);

struct StopLossPoint {
    double a = 0.0;
    double value = 0.0;
    double std_error = 0.0;
};

/// E[(SIR - a)_+ | radii] for each a, over n_fading fading draws with
/// Nakagami shape m. Fading variates are built from counter-based
/// exponentials indexed by (seed, draw, point, component), so curves for
/// different m on the same seed use common random numbers.
std::vector<StopLossPoint> stop_loss_curve(const RadialSample& radii, int m, double beta,
                                           const std::vector<double>& a_grid, std::size_t n_fading,
                                           std::uint64_t seed);

}  // namespace ginibre
