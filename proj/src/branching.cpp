#include "entikit/branching.hpp"

#include <algorithm>

#include <cmath>
#include <cstdio>
#include <span>

namespace entikit::branching {

namespace {

double fixed_point_gap(double lambda, double rho) {
  return std::exp(lambda * (rho - 1.0)) - rho;
}

/// Coefficients of exp(c(s)) up to degree n, where c has zero constant term.
/// b_m = (1/m) sum_{j=1..m} j c_j b_{m-j}; every term is nonnegative here, so
/// the recurrence is cancellation-free.
std::vector<double> series_exp(std::span<const double> c, std::size_t n) {
  std::vector<double> b(n + 1, 0.0);
  b[0] = 1.0;
  for (std::size_t m = 1; m <= n; ++m) {
    double acc = 0.0;
    std::size_t j_hi = std::min(m, c.size() - 1);
    for (std::size_t j = 1; j <= j_hi; ++j) acc += static_cast<double>(j) * c[j] * b[m - j];
    b[m] = acc / static_cast<double>(m);
    if (b[m] < 0.0) {
      if (b[m] < -1e-12) throw Error("series_exp: negative coefficient");
      b[m] = 0.0;
    }
  }
  return b;
}

}  // namespace

ExtinctionResult extinction_probability(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw ValidationError("extinction_probability: lambda must be finite and > 0");
  ExtinctionResult result;
  result.lambda = lambda;
  if (lambda <= 1.0) {
    result.rho = 1.0;
    result.residual = 0.0;
    return result;
  }
  // The gap is convex with gap(0) > 0 and gap negative between the smallest
  // root and 1, so bracketing [0, hi] with gap(hi) < 0 isolates that root.
  double hi = 0.0;
  for (double delta = 0.5; delta > 1e-17; delta /= 2) {
    if (fixed_point_gap(lambda, 1.0 - delta) < 0.0) {
      hi = 1.0 - delta;
      break;
    }
  }
  if (hi == 0.0) {
    result.rho = 1.0;
    result.residual = std::abs(fixed_point_gap(lambda, 1.0));
    return result;
  }
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fixed_point_gap(lambda, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.rho = 0.5 * (lo + hi);
  result.residual = std::abs(fixed_point_gap(lambda, result.rho));
  return result;
}

TheoremBounds theorem1_bounds(std::uint32_t vertex_count, double lambda,
                              double epsilon) {
  if (vertex_count < 2) throw ValidationError("theorem1_bounds: V must be >= 2");
  if (!std::isfinite(lambda) || lambda <= 1.0)
    throw ValidationError("theorem1_bounds: requires supercritical lambda > 1");
  if (!(epsilon > 0.0)) throw ValidationError("theorem1_bounds: epsilon must be > 0");
  TheoremBounds bounds;
  bounds.vertex_count = vertex_count;
  bounds.lambda = lambda;
  bounds.epsilon = epsilon;
  bounds.p = lambda / vertex_count;
  if (bounds.p >= 1.0) throw ValidationError("theorem1_bounds: p = lambda/V must be < 1");
  double rho = extinction_probability(lambda).rho;
  bounds.c_lambda = (1.0 - rho) * (1.0 - rho);
  double n = static_cast<double>(vertex_count) * (vertex_count - 1);
  bounds.c_lb = 1.0 - 1.0 / n;
  double ub_rate = (1.0 + epsilon) * std::log(static_cast<double>(vertex_count)) /
                   (n * std::log(lambda));
  if (ub_rate >= 1.0)
    throw ValidationError("theorem1_bounds: upper-bound rate leaves (0,1); V too small for this lambda/epsilon");
  bounds.c_ub = 1.0 - ub_rate;
  return bounds;
}

double TheoremBounds::lower(double t) const {
  return (p + c_lambda * (1.0 - std::pow(c_lb, t))) * (1.0 - epsilon);
}

double TheoremBounds::upper(double t) const {
  return (p + c_lambda * (1.0 - std::pow(c_ub, t))) * (1.0 + epsilon);
}

std::vector<ProgenyPmf> progeny_pmf_levels(double lambda, std::uint32_t max_level,
                                           std::uint32_t k_max) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw ValidationError("progeny_pmf: lambda must be finite and >= 0");
  if (k_max < 1) throw ValidationError("progeny_pmf: k_max must be >= 1");

  std::vector<ProgenyPmf> levels;
  levels.reserve(max_level + 1);
  // Power-series coefficients of G_level; index k holds P[Y_level = k].
  std::vector<double> g(static_cast<std::size_t>(k_max) + 1, 0.0);
  g[1] = 1.0;

  auto record = [&](std::uint32_t level) {
    ProgenyPmf pmf;
    pmf.lambda = lambda;
    pmf.level = level;
    pmf.k_max = k_max;
    pmf.mass.assign(g.begin() + 1, g.end());
    double total = 0.0;
    for (double m : pmf.mass) total += m;
    pmf.tail_mass = std::max(0.0, 1.0 - total);
    levels.push_back(std::move(pmf));
  };

  record(0);
  const double scale = std::exp(-lambda);
  std::vector<double> c(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (std::uint32_t level = 1; level <= max_level; ++level) {
    for (std::uint32_t k = 1; k <= k_max; ++k) c[k] = lambda * g[k];
    std::vector<double> b = series_exp(c, k_max - 1);
    // G_level(s) = s e^{-lambda} exp(lambda G_{level-1}(s))
    for (std::uint32_t k = k_max; k >= 1; --k) g[k] = scale * b[k - 1];
    record(level);
  }
  return levels;
}

ProgenyPmf progeny_pmf(double lambda, std::uint32_t level, std::uint32_t k_max) {
  auto levels = progeny_pmf_levels(lambda, level, k_max);
  return std::move(levels[level]);
}

AnalyticalCurve::AnalyticalCurve(std::uint32_t vertex_count, double lambda,
                                 std::uint32_t l_max, std::uint32_t k_max) {
  if (vertex_count < 2) throw ValidationError("analytical curve: V must be >= 2");
  if (!std::isfinite(lambda) || lambda <= 1.0)
    throw ValidationError("analytical curve: requires lambda > 1");
  pair_count_ = static_cast<double>(vertex_count) * (vertex_count - 1);
  p_ = lambda / vertex_count;
  if (p_ >= 1.0) throw ValidationError("analytical curve: p = lambda/V must be < 1");
  double rho = extinction_probability(lambda).rho;
  c_lambda_ = (1.0 - rho) * (1.0 - rho);

  auto pmfs = progeny_pmf_levels(lambda, l_max, k_max);
  weight_by_k_.assign(k_max, 0.0);
  double level_weight_sum = 0.0;
  double folded = 0.0;
  for (std::uint32_t level = 0; level <= l_max; ++level) {
    double w = (lambda - 1.0) / std::pow(lambda, level + 1.0);
    level_weight_sum += w;
    const auto& pmf = pmfs[level];
    for (std::uint32_t k = 1; k <= k_max; ++k)
      weight_by_k_[k - 1] += w * pmf.at(k);
    folded += w * pmf.tail_mass;
  }
  // Residual level weight beyond l_max plus all PMF tails decay at the
  // slowest rate 1/N, keeping both the t=0 and t->infinity limits exact.
  folded += std::max(0.0, 1.0 - level_weight_sum);
  folded_slow_mass_ = folded;
}

double AnalyticalCurve::eval(double t) const {
  double survival = 0.0;
  for (std::size_t i = 0; i < weight_by_k_.size(); ++i) {
    double w = weight_by_k_[i];
    if (w == 0.0) continue;
    double base = 1.0 - static_cast<double>(i + 1) / pair_count_;
    survival += w * std::pow(std::max(base, 0.0), t);
  }
  survival += folded_slow_mass_ * std::pow(1.0 - 1.0 / pair_count_, t);
  return p_ + c_lambda_ * (1.0 - survival);
}

double analytical_acc(std::uint32_t vertex_count, double lambda, double t,
                      std::uint32_t l_max, std::uint32_t k_max) {
  return AnalyticalCurve(vertex_count, lambda, l_max, k_max).eval(t);
}

void GenericMixture::validate() const {
  double total = 0.0;
  for (const auto& comp : components) {
    if (!(comp.mu >= 0.0)) throw ValidationError("mixture: weights must be >= 0");
    if (!(comp.a > 0.0 && comp.a <= 1.0))
      throw ValidationError("mixture: rates must lie in (0, 1]");
    total += comp.mu;
  }
  if (total > 1.0 + 1e-9) throw ValidationError("mixture: weights must sum to <= 1");
}

double mixture_acc(const GenericMixture& mixture, double t) {
  mixture.validate();
  double survival = 0.0;
  for (const auto& comp : mixture.components)
    survival += comp.mu * std::pow(1.0 - comp.a, t);
  return mixture.p + mixture.c * (1.0 - survival);
}

std::string theory_curve_csv(std::uint32_t vertex_count, double lambda,
                             double epsilon, std::uint32_t l_max,
                             std::uint32_t k_max,
                             std::span<const std::uint64_t> steps) {
  AnalyticalCurve curve(vertex_count, lambda, l_max, k_max);
  TheoremBounds bounds = theorem1_bounds(vertex_count, lambda, epsilon);
  std::string out = "# {\"V\":" + std::to_string(vertex_count) +
                    ",\"lambda\":" + format_double(lambda) +
                    ",\"epsilon\":" + format_double(epsilon) +
                    ",\"l_max\":" + std::to_string(l_max) +
                    ",\"k_max\":" + std::to_string(k_max) +
                    ",\"p\":" + format_double(curve.p()) +
                    ",\"c_lambda\":" + format_double(curve.c_lambda()) + "}\n";
  out += "t,analytical,lower,upper\n";
  for (std::uint64_t t : steps) {
    auto td = static_cast<double>(t);
    out += std::to_string(t);
    out += ',';
    out += format_double(curve.eval(td));
    out += ',';
    out += format_double(bounds.lower(td));
    out += ',';
    out += format_double(bounds.upper(td));
    out += '\n';
  }
  return out;
}

}  // namespace entikit::branching
