#include "entikit/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace entikit::fitting {

namespace {

double logistic(double g) { return 1.0 / (1.0 + std::exp(-g)); }
double logit(double r) { return std::log(r / (1.0 - r)); }

constexpr double kGammaClamp = 18.0;  // keeps r away from exactly 0 and 1
constexpr double kBetaClamp = 1e4;

struct Start {
  Eigen::VectorXd theta;  // [a, beta_1, gamma_1, ...]
};

double model_at(const Eigen::VectorXd& theta, double x) {
  double y = theta[0];
  for (int i = 1; i + 1 < theta.size(); i += 2) {
    double b = theta[i] * theta[i];
    double r = logistic(theta[i + 1]);
    y -= b * std::pow(r, x);
  }
  return y;
}

double sse_at(const Eigen::VectorXd& theta, const PointSet& pts) {
  double sse = 0.0;
  for (const auto& p : pts.points) {
    double e = p[1] - model_at(theta, p[0]);
    sse += e * e;
  }
  return sse;
}

void clamp_theta(Eigen::VectorXd& theta) {
  for (int i = 1; i + 1 < theta.size(); i += 2) {
    theta[i] = std::clamp(theta[i], -kBetaClamp, kBetaClamp);
    theta[i + 1] = std::clamp(theta[i + 1], -kGammaClamp, kGammaClamp);
  }
}

struct LocalFit {
  Eigen::VectorXd theta;
  double sse = std::numeric_limits<double>::infinity();
  bool converged = false;
};

/// Levenberg-damped Gauss-Newton on the clamped parameterization. Only
/// improving steps are accepted, so the final SSE never exceeds the
/// starting SSE.
LocalFit levenberg_fit(const PointSet& pts, Eigen::VectorXd theta) {
  const int m = static_cast<int>(pts.points.size());
  const int p = static_cast<int>(theta.size());
  clamp_theta(theta);

  LocalFit out;
  double sse = sse_at(theta, pts);
  double mu = 1e-3;
  Eigen::MatrixXd jac(m, p);
  Eigen::VectorXd resid(m);

  for (int iter = 0; iter < 400; ++iter) {
    for (int j = 0; j < m; ++j) {
      double x = pts.points[j][0];
      jac(j, 0) = 1.0;
      double f = theta[0];
      for (int i = 1; i + 1 < p; i += 2) {
        double beta = theta[i];
        double r = logistic(theta[i + 1]);
        double rx = std::pow(r, x);
        f -= beta * beta * rx;
        jac(j, i) = -2.0 * beta * rx;
        jac(j, i + 1) = -beta * beta * x * rx * (1.0 - r);
      }
      resid[j] = pts.points[j][1] - f;
    }
    Eigen::VectorXd grad = jac.transpose() * resid;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-12) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd normal = jac.transpose() * jac;

    bool accepted = false;
    Eigen::VectorXd theta_try;
    double sse_try = sse;
    for (int damp = 0; damp < 40; ++damp) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += mu * normal.diagonal();
      damped.diagonal().array() += 1e-12;
      Eigen::VectorXd delta = damped.ldlt().solve(grad);
      theta_try = theta + delta;
      clamp_theta(theta_try);
      sse_try = sse_at(theta_try, pts);
      if (std::isfinite(sse_try) && sse_try <= sse) {
        accepted = true;
        mu = std::max(mu * 0.3, 1e-12);
        break;
      }
      mu *= 3.0;
      if (mu > 1e14) break;
    }
    if (!accepted) {
      out.converged = true;  // damping exhausted at a local optimum
      break;
    }
    double improvement = sse - sse_try;
    theta = theta_try;
    sse = sse_try;
    if (improvement <= 1e-14 * (sse + 1e-14)) {
      out.converged = true;
      break;
    }
  }
  out.theta = theta;
  out.sse = sse;
  return out;
}

MixtureFit to_fit(const LocalFit& local, const PointSet& pts) {
  MixtureFit fit;
  fit.a = local.theta[0];
  for (int i = 1; i + 1 < local.theta.size(); i += 2) {
    MixtureTerm term;
    term.b = local.theta[i] * local.theta[i];
    term.r = logistic(local.theta[i + 1]);
    fit.terms.push_back(term);
  }
  std::sort(fit.terms.begin(), fit.terms.end(),
            [](const MixtureTerm& a, const MixtureTerm& b) { return a.r > b.r; });
  // Recompute from the extracted terms so reported RMSE and eval() agree
  // bit for bit.
  fit.rmse = fit.rmse_against(pts);
  fit.converged = local.converged;
  return fit;
}

Eigen::VectorXd theta_from_fit(const MixtureFit& fit, int n_terms) {
  Eigen::VectorXd theta(1 + 2 * n_terms);
  theta.setZero();
  theta[0] = fit.a;
  for (std::size_t i = 0; i < fit.terms.size() && static_cast<int>(i) < n_terms; ++i) {
    theta[1 + 2 * i] = std::sqrt(std::max(fit.terms[i].b, 0.0));
    double r = std::clamp(fit.terms[i].r, logistic(-kGammaClamp), logistic(kGammaClamp));
    theta[2 + 2 * i] = logit(r);
  }
  return theta;
}

}  // namespace

void PointSet::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i][0] >= 0.0) || !std::isfinite(points[i][0]) ||
        !std::isfinite(points[i][1]))
      throw ValidationError("point set: x must be finite and >= 0, y finite");
    if (i > 0 && points[i][0] < points[i - 1][0])
      throw ValidationError("point set: points must be sorted by x");
  }
}

PointSet PointSet::from_csv(std::istream& in) {
  PointSet set;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    if (first && stripped == "x,y") {
      first = false;
      continue;
    }
    first = false;
    auto comma = stripped.find(',');
    if (comma == std::string_view::npos)
      throw ValidationError("points csv: expected x,y per line");
    try {
      double x = std::stod(std::string(stripped.substr(0, comma)));
      double y = std::stod(std::string(stripped.substr(comma + 1)));
      set.points.push_back({x, y});
    } catch (const std::exception&) {
      throw ValidationError("points csv: could not parse numbers");
    }
  }
  std::sort(set.points.begin(), set.points.end());
  set.validate();
  return set;
}

std::string PointSet::to_csv() const {
  std::string out = "x,y\n";
  for (const auto& p : points)
    out += format_double(p[0]) + "," + format_double(p[1]) + "\n";
  return out;
}

double MixtureFit::eval(double x) const {
  if (!(x >= 0.0)) throw ValidationError("eval_fit: x must be >= 0");
  double y = a;
  for (const auto& t : terms) y -= t.b * std::pow(t.r, x);
  return y;
}

double MixtureFit::rmse_against(const PointSet& pts) const {
  double sse = 0.0;
  for (const auto& p : pts.points) {
    double e = p[1] - eval(p[0]);
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(pts.points.size()));
}

std::string MixtureFit::to_json() const {
  std::string out = "{\"a\":" + format_double(a) + ",\"terms\":[";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ',';
    out += "{\"b\":" + format_double(terms[i].b) +
           ",\"r\":" + format_double(terms[i].r) + "}";
  }
  out += "],\"rmse\":" + format_double(rmse) +
         ",\"converged\":" + (converged ? std::string("true") : std::string("false")) +
         "}";
  return out;
}

MixtureFit reference_fit() {
  MixtureFit fit;
  fit.a = 64.5456;
  fit.terms = {{13.8352, 0.9989}, {8.4705, 0.8961}, {3.932, 0.0546}};
  fit.rmse = 0.0;
  fit.converged = true;
  return fit;
}

MixtureFit fit_mixture(const PointSet& points, int n_terms, int restarts,
                       std::uint64_t seed) {
  points.validate();
  if (n_terms < 1) throw ValidationError("fit_mixture: n_terms must be >= 1");
  if (restarts < 0) throw ValidationError("fit_mixture: restarts must be >= 0");
  const std::size_t n_params = 1 + 2 * static_cast<std::size_t>(n_terms);
  if (points.points.size() < n_params + 1)
    throw ValidationError("fit_mixture: insufficient points (need at least " +
                          std::to_string(n_params + 1) + ")");

  double y_min = points.points.front()[1], y_max = y_min;
  for (const auto& p : points.points) {
    y_min = std::min(y_min, p[1]);
    y_max = std::max(y_max, p[1]);
  }
  double range = std::max(y_max - y_min, 1e-6);

  std::vector<Start> starts;
  for (int s = 0; s < restarts; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    Eigen::VectorXd theta(n_params);
    theta[0] = y_max + 0.05 * range * rng.unit();
    double total_b = std::max(theta[0] - y_min, 0.1 * range);
    std::vector<double> weights(n_terms);
    double weight_sum = 0.0;
    for (int i = 0; i < n_terms; ++i) {
      weights[i] = 0.5 + rng.unit();
      weight_sum += weights[i];
    }
    const double lo = std::log(0.01), hi = std::log(0.999);
    for (int i = 0; i < n_terms; ++i) {
      theta[1 + 2 * i] = std::sqrt(total_b * weights[i] / weight_sum);
      double frac = (static_cast<double>(i) + 0.8 * rng.unit()) /
                    std::max(1, n_terms);
      double r = std::exp(hi + (lo - hi) * frac);  // geometric spread in (0.01, 0.999)
      theta[2 + 2 * i] = logit(std::clamp(r, 0.01, 0.999));
    }
    starts.push_back({std::move(theta)});
  }
  if (n_terms > 1) {
    MixtureFit warm = fit_mixture(points, n_terms - 1, restarts, seed);
    // Anchor start: extra term exactly dead, so this start can never end
    // worse than the (n-1)-term fit.
    Eigen::VectorXd anchor = theta_from_fit(warm, n_terms);
    anchor[1 + 2 * (n_terms - 1)] = 0.0;
    anchor[2 + 2 * (n_terms - 1)] = 0.0;
    starts.push_back({anchor});
    // Active variant: give the new term a small foothold.
    Eigen::VectorXd active = anchor;
    active[1 + 2 * (n_terms - 1)] = 1e-3;
    active[2 + 2 * (n_terms - 1)] = logit(0.5);
    starts.push_back({std::move(active)});
  } else if (restarts == 0) {
    Eigen::VectorXd theta(n_params);
    theta[0] = y_max;
    theta[1] = std::sqrt(range);
    theta[2] = logit(0.5);
    starts.push_back({std::move(theta)});
  }

  std::vector<LocalFit> results(starts.size());
  parallel_for(starts.size(), 0, [&](std::size_t i) {
    results[i] = levenberg_fit(points, starts[i].theta);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].sse < results[best].sse) best = i;
  return to_fit(results[best], points);
}

namespace {

double segment_sse_linear(std::span<const std::array<double, 2>> pts, bool log_x) {
  // Least-squares line y = alpha + beta u with u = x or ln x.
  double su = 0, sy = 0, suu = 0, suy = 0;
  const auto n = static_cast<double>(pts.size());
  for (const auto& p : pts) {
    double u = log_x ? std::log(p[0]) : p[0];
    su += u;
    sy += p[1];
    suu += u * u;
    suy += u * p[1];
  }
  double denom = n * suu - su * su;
  double beta = std::abs(denom) < 1e-30 ? 0.0 : (n * suy - su * sy) / denom;
  double alpha = (sy - beta * su) / n;
  double sse = 0;
  for (const auto& p : pts) {
    double u = log_x ? std::log(p[0]) : p[0];
    double e = p[1] - (alpha + beta * u);
    sse += e * e;
  }
  return sse;
}

double segment_sse_const(std::span<const std::array<double, 2>> pts) {
  double mean = 0;
  for (const auto& p : pts) mean += p[1];
  mean /= static_cast<double>(pts.size());
  double sse = 0;
  for (const auto& p : pts) sse += (p[1] - mean) * (p[1] - mean);
  return sse;
}

}  // namespace

std::string RegimeReport::to_json() const {
  std::string out = "{\"monotone\":";
  out += monotone ? "true" : "false";
  out += ",\"concave\":";
  out += concave ? "true" : "false";
  out += ",\"three_phase\":";
  out += three_phase ? "true" : "false";
  out += ",\"t1\":" + format_double(t1) + ",\"t2\":" + format_double(t2) +
         ",\"template_r2\":" + format_double(template_r2) + ",\"violations\":[";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out += ',';
    out += "\"" + violations[i] + "\"";
  }
  out += "],\"phase_labels\":[";
  for (std::size_t i = 0; i < phase_labels.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(phase_labels[i]);
  }
  out += "]}";
  return out;
}

RegimeReport verify_shape(std::span<const std::array<double, 2>> points,
                          std::span<const double> tolerance) {
  const std::size_t n = points.size();
  if (n < 8) throw ValidationError("verify_shape: at least 8 points required");
  if (!tolerance.empty() && tolerance.size() != n)
    throw ValidationError("verify_shape: tolerance length must match points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(points[i][0] > points[i - 1][0]))
      throw ValidationError("verify_shape: x must be strictly increasing");

  auto tol = [&](std::size_t i) { return tolerance.empty() ? 0.0 : tolerance[i]; };

  RegimeReport report;
  report.monotone = true;
  report.concave = true;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (points[i + 1][1] < points[i][1] - (tol(i) + tol(i + 1)) - 1e-12) {
      report.monotone = false;
      report.violations.push_back("monotone@" + format_double(points[i + 1][0]));
    }
  }
  // Concavity via secant slopes: each consecutive slope may exceed the
  // previous one only by what per-point perturbations within tolerance allow.
  for (std::size_t i = 0; i + 2 < n; ++i) {
    double d0 = points[i + 1][0] - points[i][0];
    double d1 = points[i + 2][0] - points[i + 1][0];
    double s0 = (points[i + 1][1] - points[i][1]) / d0;
    double s1 = (points[i + 2][1] - points[i + 1][1]) / d1;
    double allow = (tol(i) + tol(i + 1)) / d0 + (tol(i + 1) + tol(i + 2)) / d1;
    if (s1 - s0 > allow + 1e-12) {
      report.concave = false;
      report.violations.push_back("concave@" + format_double(points[i + 1][0]));
    }
  }

  // Three-phase template: linear in t, then linear in log t, then constant.
  double best_sse = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0, best_j = 0;
  for (std::size_t i = 1; i + 2 < n; ++i) {
    if (points[i][0] <= 0.0) continue;  // log segment needs positive t
    for (std::size_t j = i + 1; j + 1 < n; ++j) {
      double sse = segment_sse_linear(points.subspan(0, i + 1), false) +
                   segment_sse_linear(points.subspan(i, j - i + 1), true) +
                   segment_sse_const(points.subspan(j));
      if (sse < best_sse) {
        best_sse = sse;
        best_i = i;
        best_j = j;
      }
    }
  }
  if (std::isfinite(best_sse) && best_j > best_i) {
    report.three_phase = true;
    report.t1 = points[best_i][0];
    report.t2 = points[best_j][0];
    double tss = segment_sse_const(points);
    report.template_r2 = tss > 0 ? 1.0 - best_sse / tss : 1.0;
    report.phase_labels.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      report.phase_labels[k] = k <= best_i ? 0 : (k <= best_j ? 1 : 2);
  }
  return report;
}

}  // namespace entikit::fitting
