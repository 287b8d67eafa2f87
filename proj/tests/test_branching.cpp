#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "entikit/branching.hpp"
#include "support/oracles.hpp"

using namespace entikit;
using namespace entikit::branching;

TEST_CASE("extinction probability basics") {
  SUBCASE("subcritical and critical processes die out") {
    CHECK(extinction_probability(0.5).rho == 1.0);
    CHECK(extinction_probability(1.0).rho == 1.0);
  }
  SUBCASE("lambda = 2 matches the independent bisection oracle") {
    auto result = extinction_probability(2.0);
    double oracle = oracles::extinction_bisection_oracle(2.0);
    CHECK(std::abs(result.rho - oracle) <= 1e-10);
    CHECK(result.rho == doctest::Approx(0.2032).epsilon(5e-4));
    CHECK(result.residual <= 1e-12);
  }
  SUBCASE("rho is nonincreasing in lambda and residuals stay tiny") {
    double prev = 1.0;
    for (double lambda = 1.1; lambda <= 10.0 + 1e-9; lambda += 0.1) {
      auto r = extinction_probability(lambda);
      CHECK(r.residual <= 1e-12);
      CHECK(r.rho <= prev + 1e-12);
      CHECK(r.rho < 1.0);
      CHECK(r.rho > 0.0);
      prev = r.rho;
    }
  }
  SUBCASE("invalid lambda rejected") {
    CHECK_THROWS_AS(extinction_probability(0.0), ValidationError);
    CHECK_THROWS_AS(extinction_probability(std::nan("")), ValidationError);
    CHECK_THROWS_AS(extinction_probability(INFINITY), ValidationError);
  }
}

TEST_CASE("theorem bounds") {
  SUBCASE("subcritical lambda unsupported") {
    CHECK_THROWS_AS(theorem1_bounds(100, 0.9, 0.1), ValidationError);
    CHECK_THROWS_AS(theorem1_bounds(100, 3.0, 0.0), ValidationError);
  }
  auto bounds = theorem1_bounds(1000, 3.0, 0.2);
  SUBCASE("t = 0 collapses to p scaled by the epsilon factors") {
    CHECK(bounds.lower(0) == doctest::Approx(bounds.p * 0.8).epsilon(1e-12));
    CHECK(bounds.upper(0) == doctest::Approx(bounds.p * 1.2).epsilon(1e-12));
  }
  SUBCASE("t -> infinity approaches p + C_lambda scaled") {
    double lo = bounds.lower(1e18), hi = bounds.upper(1e18);
    CHECK(lo == doctest::Approx((bounds.p + bounds.c_lambda) * 0.8).epsilon(1e-9));
    CHECK(hi == doctest::Approx((bounds.p + bounds.c_lambda) * 1.2).epsilon(1e-9));
  }
  SUBCASE("c_lambda composes with the extinction oracle") {
    double rho = oracles::extinction_bisection_oracle(3.0);
    CHECK(bounds.c_lambda == doctest::Approx((1 - rho) * (1 - rho)).epsilon(1e-9));
  }
  SUBCASE("curves are ordered and nondecreasing") {
    double prev_lo = -1, prev_hi = -1;
    for (double t : {0.0, 1.0, 10.0, 1e3, 1e5, 1e7, 1e9}) {
      double lo = bounds.lower(t), hi = bounds.upper(t);
      CHECK(lo <= hi);
      CHECK(lo >= prev_lo);
      CHECK(hi >= prev_hi);
      prev_lo = lo;
      prev_hi = hi;
    }
  }
}

TEST_CASE("progeny pmf") {
  SUBCASE("level zero is the root alone") {
    auto pmf = progeny_pmf(3.0, 0, 16);
    CHECK(pmf.at(1) == 1.0);
    CHECK(pmf.tail_mass == 0.0);
    for (std::uint32_t k = 2; k <= 16; ++k) CHECK(pmf.at(k) == 0.0);
  }
  SUBCASE("lambda 1 level 1 is 1 + Poisson(1)") {
    auto pmf = progeny_pmf(1.0, 1, 32);
    const double e1 = std::exp(-1.0);
    CHECK(pmf.at(1) == doctest::Approx(e1).epsilon(1e-12));
    CHECK(pmf.at(2) == doctest::Approx(e1).epsilon(1e-12));
    CHECK(pmf.at(3) == doctest::Approx(e1 / 2).epsilon(1e-12));
    CHECK(pmf.at(4) == doctest::Approx(e1 / 6).epsilon(1e-12));
  }
  SUBCASE("masses form a sub-probability vector and sum with tail to one") {
    for (double lambda : {0.7, 1.5, 3.0}) {
      for (std::uint32_t level : {1u, 2u, 4u}) {
        auto pmf = progeny_pmf(lambda, level, 200);
        double total = pmf.tail_mass;
        for (double m : pmf.mass) {
          CHECK(m >= 0.0);
          total += m;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
  SUBCASE("increasing k_max never decreases covered mass") {
    auto small = progeny_pmf(3.0, 3, 100);
    auto big = progeny_pmf(3.0, 3, 400);
    CHECK(big.tail_mass <= small.tail_mass + 1e-12);
    for (std::uint32_t k = 1; k <= 100; ++k)
      CHECK(big.at(k) == doctest::Approx(small.at(k)).epsilon(1e-12));
  }
  SUBCASE("matches Monte Carlo within small total variation") {
    const std::uint32_t k_max = 400;
    auto pmf = progeny_pmf(3.0, 3, k_max);
    auto mc = oracles::mc_progeny_pmf(3.0, 3, k_max, 300000, 42);
    CHECK(oracles::tv_distance(pmf.mass, pmf.tail_mass, mc.mass, mc.tail) <= 0.015);
  }
  SUBCASE("k_max validation") {
    CHECK_THROWS_AS(progeny_pmf(3.0, 1, 0), ValidationError);
  }
}

TEST_CASE("analytical accuracy curve") {
  const std::uint32_t v = 1000;
  const double lambda = 3.0;
  AnalyticalCurve curve(v, lambda, 20, 300);

  SUBCASE("t = 0 gives exactly p") {
    CHECK(curve.eval(0.0) == doctest::Approx(lambda / v).epsilon(1e-12));
  }
  SUBCASE("t -> infinity gives p + c_lambda") {
    CHECK(curve.eval(1e16) == doctest::Approx(curve.plateau()).epsilon(1e-9));
  }
  SUBCASE("nondecreasing, bounded, concave over a log grid") {
    auto steps = log_spaced_steps(100000000ULL, 48);
    double prev = -1.0;
    double prev_slope = HUGE_VAL;
    double prev_t = 0.0;
    double prev_val = curve.eval(0.0);
    for (std::uint64_t t : steps) {
      double val = curve.eval(static_cast<double>(t));
      CHECK(val >= prev - 1e-12);
      CHECK(val >= curve.p() - 1e-12);
      CHECK(val <= curve.plateau() + 1e-12);
      double slope = (val - prev_val) / (static_cast<double>(t) - prev_t);
      CHECK(slope <= prev_slope + 1e-12);
      prev_slope = slope;
      prev_t = static_cast<double>(t);
      prev_val = val;
      prev = val;
    }
  }
  SUBCASE("subcritical lambda rejected") {
    CHECK_THROWS_AS(AnalyticalCurve(1000, 1.0), ValidationError);
  }
}

TEST_CASE("generic mixture evaluation") {
  GenericMixture mix;
  mix.p = 0.1;
  mix.c = 0.5;
  mix.components = {{0.6, 0.2}, {0.4, 0.01}};

  SUBCASE("t = 0 with full weight gives p") {
    CHECK(mixture_acc(mix, 0.0) == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("single component with a = 1 saturates immediately") {
    GenericMixture instant{0.1, 0.5, {{1.0, 1.0}}};
    CHECK(mixture_acc(instant, 1.0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(mixture_acc(instant, 7.0) == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("two components at t = 2 match hand arithmetic") {
    // 0.1 + 0.5 (1 - 0.6*0.8^2 - 0.4*0.99^2) = 0.1 + 0.5 (1 - 0.384 - 0.39204)
    CHECK(mixture_acc(mix, 2.0) == doctest::Approx(0.1 + 0.5 * (1 - 0.384 - 0.39204)));
  }
  SUBCASE("invalid mixtures rejected") {
    GenericMixture bad{0.1, 0.5, {{-0.1, 0.5}}};
    CHECK_THROWS_AS(mixture_acc(bad, 1.0), ValidationError);
    GenericMixture bad_rate{0.1, 0.5, {{0.5, 1.5}}};
    CHECK_THROWS_AS(mixture_acc(bad_rate, 1.0), ValidationError);
    GenericMixture heavy{0.1, 0.5, {{0.7, 0.5}, {0.6, 0.5}}};
    CHECK_THROWS_AS(mixture_acc(heavy, 1.0), ValidationError);
  }
}

TEST_CASE("theory curve csv shape") {
  std::vector<std::uint64_t> steps{1, 10, 100};
  auto csv = theory_curve_csv(100, 3.0, 0.5, 10, 100, steps);
  CHECK(csv.rfind("# {\"V\":100", 0) == 0);
  CHECK(csv.find("t,analytical,lower,upper\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
