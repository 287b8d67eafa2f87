#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "entikit/common.hpp"

namespace entikit::fitting {

/// Observations (x, y): x in millions of synthetic tokens, y in percent.
struct PointSet {
  std::vector<std::array<double, 2>> points;  // sorted by x, x >= 0

  void validate() const;
  /// Parses "x,y" lines; a leading "x,y" header row is skipped.
  static PointSet from_csv(std::istream& in);
  std::string to_csv() const;
};

struct MixtureTerm {
  double b = 0.0;  // >= 0
  double r = 0.0;  // in (0, 1)
};

/// Fitted curve y(x) = a - sum_i b_i r_i^x. With b_i >= 0 and r_i in (0, 1)
/// the curve is nondecreasing and concave on x >= 0.
struct MixtureFit {
  double a = 0.0;
  std::vector<MixtureTerm> terms;
  double rmse = 0.0;
  bool converged = false;

  double eval(double x) const;
  double rmse_against(const PointSet& points) const;
  std::string to_json() const;
};

/// Published reference coefficients for the accuracy-vs-tokens trend.
MixtureFit reference_fit();

/// Damped Gauss-Newton least squares with r_i kept in (0, 1) via a logistic
/// reparameterization and b_i >= 0 via squaring. Multi-start: `restarts`
/// random initializations plus a warm start from the (n-1)-term fit; the
/// lowest-RMSE solution wins, ties broken by start index.
MixtureFit fit_mixture(const PointSet& points, int n_terms, int restarts,
                       std::uint64_t seed);

/// Piecewise growth-shape report: monotonicity, concavity (via second
/// divided differences), and estimated breakpoints t1 < t2 of the
/// linear / logarithmic / plateau template.
struct RegimeReport {
  bool monotone = false;
  bool concave = false;
  bool three_phase = false;
  double t1 = 0.0;
  double t2 = 0.0;
  std::vector<int> phase_labels;  // 0, 1, 2 per input point
  double template_r2 = 0.0;       // quality of the best piecewise template fit
  std::vector<std::string> violations;

  std::string to_json() const;
};

/// `tolerance`, when non-empty, gives a per-point allowance (same length as
/// points) inside which monotonicity/concavity violations are forgiven.
/// Requires at least 8 points with strictly increasing positive x.
RegimeReport verify_shape(std::span<const std::array<double, 2>> points,
                          std::span<const double> tolerance = {});

}  // namespace entikit::fitting
