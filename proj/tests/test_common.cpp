#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <set>

#include "entikit/common.hpp"

using namespace entikit;

TEST_CASE("rng is deterministic per (seed, stream)") {
  Rng a(42, 3), b(42, 3), c(42, 4);
  bool diverged = false;
  for (int i = 0; i < 64; ++i) {
    auto x = a.next();
    CHECK(x == b.next());
    if (x != c.next()) diverged = true;
  }
  CHECK(diverged);
}

TEST_CASE("rng below is in range and roughly uniform") {
  Rng rng(7);
  std::array<int, 6> buckets{};
  for (int i = 0; i < 60000; ++i) {
    auto v = rng.below(6);
    REQUIRE(v < 6);
    ++buckets[v];
  }
  for (int count : buckets) CHECK(std::abs(count - 10000) < 500);
  CHECK_THROWS_AS(rng.below(0), ValidationError);
}

TEST_CASE("rng poisson matches mean and variance") {
  Rng rng(11);
  double sum = 0, sumsq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    auto k = static_cast<double>(rng.poisson(3.0));
    sum += k;
    sumsq += k * k;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(var == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("format_double round trips") {
  for (double v : {0.0, 1.0, 0.1, -2.5e-7, 3.141592653589793, 1e300}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_fixed(1.0 / 3.0, 4) == "0.3333");
}

TEST_CASE("fnv1a64 and hex64 are stable") {
  CHECK(fnv1a64("") == 1469598103934665603ULL);
  CHECK(fnv1a64("a") != fnv1a64("b"));
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<std::atomic<int>> hits(999);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(
      parallel_for(16, 4,
                   [](std::size_t i) {
                     if (i == 7) throw ValidationError("boom");
                   }),
      ValidationError);
}

TEST_CASE("tokenize lowercases and splits on non-alnum") {
  auto toks = tokenize("Hello, World!  42nd-street");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0] == "hello");
  CHECK(toks[1] == "world");
  CHECK(toks[2] == "42nd");
  CHECK(toks[3] == "street");
}

TEST_CASE("log_spaced_steps endpoints and monotonicity") {
  auto steps = log_spaced_steps(2000000, 64);
  REQUIRE(!steps.empty());
  CHECK(steps.front() == 1);
  CHECK(steps.back() == 2000000);
  for (std::size_t i = 1; i < steps.size(); ++i) CHECK(steps[i] > steps[i - 1]);
  CHECK(log_spaced_steps(5, 64).size() == 5);  // dedupes
}
