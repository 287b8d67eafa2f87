#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entikit/common.hpp"

namespace entikit::branching {

/// Smallest solution in [0, 1] of rho = exp(lambda (rho - 1)).
struct ExtinctionResult {
  double lambda = 0.0;
  double rho = 1.0;
  double residual = 0.0;  // |rho - exp(lambda (rho - 1))|
};

/// Bisection on [0, 1); guarantees the smallest root with residual <= 1e-12.
/// rho == 1 exactly for lambda <= 1.
ExtinctionResult extinction_probability(double lambda);

/// Closed-form sandwich for the link density of the augmentation process.
/// lower(t) = (p + C_lambda (1 - C_LB^t)) (1 - eps),
/// upper(t) = (p + C_lambda (1 - C_UB^t)) (1 + eps), with
/// C_LB = 1 - 1/(V(V-1)) and C_UB = 1 - (1+eps) log V / (V(V-1) log lambda).
struct TheoremBounds {
  std::uint32_t vertex_count = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double p = 0.0;
  double c_lambda = 0.0;
  double c_lb = 0.0;
  double c_ub = 0.0;

  double lower(double t) const;
  double upper(double t) const;
};

/// Requires V >= 2, lambda > 1 (supercritical regime), epsilon > 0.
TheoremBounds theorem1_bounds(std::uint32_t vertex_count, double lambda,
                              double epsilon);

/// Truncated PMF of the total progeny Y_level of a Poisson(lambda) branching
/// process over its first `level` generations (root included, so Y_0 = 1).
struct ProgenyPmf {
  double lambda = 0.0;
  std::uint32_t level = 0;
  std::uint32_t k_max = 0;
  std::vector<double> mass;  // mass[k] for k = 1..k_max at index k-1
  double tail_mass = 0.0;    // 1 - sum(mass)

  double at(std::uint32_t k) const { return mass[k - 1]; }
};

/// Computed via the generating-function recursion G_0(s) = s,
/// G_l(s) = s exp(lambda (G_{l-1}(s) - 1)) as truncated power series.
ProgenyPmf progeny_pmf(double lambda, std::uint32_t level, std::uint32_t k_max);

/// All levels 0..max_level in one pass of the recursion.
std::vector<ProgenyPmf> progeny_pmf_levels(double lambda, std::uint32_t max_level,
                                           std::uint32_t k_max);

inline constexpr std::uint32_t kDefaultLevelMax = 20;
inline constexpr std::uint32_t kDefaultSeriesKMax = 500;

/// Mixture-of-exponential accuracy curve
///   p + C_lambda (1 - sum_l w_l sum_k p_l(k) (1 - k/N)^t),
/// truncated at l_max levels and k_max progeny, with the residual level
/// weight and PMF tails folded into the slowest decay rate 1/N so that the
/// t = 0 and t -> infinity limits are exact.
class AnalyticalCurve {
 public:
  AnalyticalCurve(std::uint32_t vertex_count, double lambda,
                  std::uint32_t l_max = kDefaultLevelMax,
                  std::uint32_t k_max = kDefaultSeriesKMax);

  double eval(double t) const;
  double p() const { return p_; }
  double c_lambda() const { return c_lambda_; }
  double plateau() const { return p_ + c_lambda_; }

 private:
  double pair_count_ = 0.0;  // N = V(V-1)
  double p_ = 0.0;
  double c_lambda_ = 0.0;
  std::vector<double> weight_by_k_;  // combined level-weighted PMF, index k-1
  double folded_slow_mass_ = 0.0;    // decays at rate 1/N
};

double analytical_acc(std::uint32_t vertex_count, double lambda, double t,
                      std::uint32_t l_max = kDefaultLevelMax,
                      std::uint32_t k_max = kDefaultSeriesKMax);

/// Generic mixture-of-exponential trend p + C (1 - sum_k mu_k (1 - a_k)^t).
struct GenericMixture {
  struct Component {
    double mu = 0.0;  // weight, >= 0, weights sum to <= 1
    double a = 0.0;   // per-step rate in (0, 1]
  };
  double p = 0.0;
  double c = 0.0;
  std::vector<Component> components;

  void validate() const;
};

double mixture_acc(const GenericMixture& mixture, double t);

/// CSV with one JSON parameter line, then "t,analytical,lower,upper" rows.
std::string theory_curve_csv(std::uint32_t vertex_count, double lambda,
                             double epsilon, std::uint32_t l_max,
                             std::uint32_t k_max,
                             std::span<const std::uint64_t> steps);

}  // namespace entikit::branching
