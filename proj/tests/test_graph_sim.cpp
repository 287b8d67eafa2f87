#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "entikit/graph_sim.hpp"

using namespace entikit;
using namespace entikit::sim;

namespace {

// Chain 0 -> 1 -> 2 on three vertices.
MemorizationMatrix three_chain() {
  MemorizationMatrix m(3);
  m.set(0, 1);
  m.set(1, 2);
  return m;
}

MemorizationMatrix complete_matrix(std::uint32_t v) {
  MemorizationMatrix m(v);
  for (std::uint32_t i = 0; i < v; ++i)
    for (std::uint32_t j = 0; j < v; ++j)
      if (i != j) m.set(i, j);
  return m;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(sample_source_matrix({1, 0.5, 0}), ValidationError);
  CHECK_THROWS_AS(sample_source_matrix({100, 100.0, 0}), ValidationError);  // p >= 1
  CHECK_THROWS_AS(sample_source_matrix({100, -1.0, 0}), ValidationError);
}

TEST_CASE("sampling with lambda zero gives the empty matrix") {
  auto m = sample_source_matrix({100, 0.0, 7});
  CHECK(m.count() == 0);
}

TEST_CASE("sampling is deterministic given seed") {
  ToyModelConfig cfg{50, 2.0, 1234};
  auto a = sample_source_matrix(cfg);
  auto b = sample_source_matrix(cfg);
  CHECK(a == b);
  cfg.seed = 1235;
  CHECK(!(a == sample_source_matrix(cfg)));
}

TEST_CASE("edge count concentrates around N p") {
  // Oracle: binomial mean N p with std sqrt(N p (1-p)), N = V(V-1).
  ToyModelConfig cfg{100, 3.0, 20240817};
  const double n = 9900.0, p = 0.03;
  auto m = sample_source_matrix(cfg);
  double mean = n * p;
  double bound = 4.0 * std::sqrt(n * p * (1 - p));
  CHECK(std::abs(static_cast<double>(m.count()) - mean) <= bound);
}

TEST_CASE("matrix bit text round trip") {
  auto m = three_chain();
  CHECK(m.to_bit_text() == "010\n001\n000\n");
  auto back = MemorizationMatrix::from_bit_text(m.to_bit_text());
  CHECK(back == m);
  CHECK_THROWS_AS(MemorizationMatrix::from_bit_text("10\n01\n"), ValidationError);
}

TEST_CASE("bfs shortest path basics") {
  auto chain = three_chain();
  SUBCASE("direct edge") {
    auto path = bfs_shortest_path(chain, 0, 1);
    REQUIRE(path.has_value());
    CHECK(*path == std::vector<std::uint32_t>{0, 1});
  }
  SUBCASE("two hop path") {
    auto path = bfs_shortest_path(chain, 0, 2);
    REQUIRE(path.has_value());
    CHECK(*path == std::vector<std::uint32_t>{0, 1, 2});
  }
  SUBCASE("unreachable in empty matrix") {
    MemorizationMatrix empty(4);
    CHECK(!bfs_shortest_path(empty, 0, 3).has_value());
  }
  SUBCASE("x == y rejected") {
    CHECK_THROWS_AS(bfs_shortest_path(chain, 1, 1), ValidationError);
  }
}

TEST_CASE("bfs tie-break picks the lowest-index route") {
  // 0 -> {1, 2}, 1 -> 3, 2 -> 3: two shortest paths to 3; parent must be 1.
  MemorizationMatrix m(4);
  m.set(0, 1);
  m.set(0, 2);
  m.set(1, 3);
  m.set(2, 3);
  auto path = bfs_shortest_path(m, 0, 3);
  REQUIRE(path.has_value());
  CHECK(*path == std::vector<std::uint32_t>{0, 1, 3});
}

TEST_CASE("augment_step on the three chain") {
  auto chain = three_chain();
  BfsForest forest(chain);

  SUBCASE("unreachable pair leaves D unchanged") {
    // Exhaust draws until a pair unreachable in M0 comes up; D must not move.
    EdgeSet d = EdgeSet::from_matrix(chain);
    Rng rng(5);
    bool saw_noop = false;
    for (int i = 0; i < 64 && !saw_noop; ++i) {
      std::uint64_t before = d.count;
      augment_step(forest, d, rng);
      if (d.count == before) saw_noop = true;
    }
    CHECK(saw_noop);
    // Only (0,2) can ever be added.
    CHECK(d.count <= 3);
    CHECK(d.edges.test(0, 1));
    CHECK(d.edges.test(1, 2));
  }

  SUBCASE("the (0,2) draw adds exactly the transitive edge") {
    EdgeSet d = EdgeSet::from_matrix(chain);
    // Find a seed whose first draw selects the ordered pair (0, 2).
    for (std::uint64_t s = 0; s < 512; ++s) {
      Rng probe(s);
      if (probe.below(6) == 1) {  // index 1 decodes to x=0, y=2
        Rng rng(s);
        CHECK(augment_step(forest, d, rng) == 1);
        CHECK(d.edges.test(0, 2));
        CHECK(d.count == 3);
        return;
      }
    }
    FAIL("no seed found for the (0,2) draw");
  }

  SUBCASE("complete matrix never changes") {
    auto full = complete_matrix(5);
    BfsForest f(full);
    EdgeSet d = EdgeSet::from_matrix(full);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) CHECK(augment_step(f, d, rng) == 0);
    CHECK(d.count == 20);
  }
}

TEST_CASE("trajectory endpoints for degenerate sources") {
  SUBCASE("empty source stays at zero") {
    MemorizationMatrix empty(6);
    auto traj = run_trajectory(empty, 100, {}, 4, 9);
    for (const auto& pt : traj.points) {
      CHECK(pt.acc_mean == 0.0);
      CHECK(pt.acc_std == 0.0);
    }
  }
  SUBCASE("complete source stays at one") {
    auto full = complete_matrix(5);
    auto traj = run_trajectory(full, 100, {}, 4, 9);
    for (const auto& pt : traj.points) CHECK(pt.acc_mean == 1.0);
  }
}

TEST_CASE("three-chain accuracy matches the closed form") {
  // Exactly one of the 6 ordered pairs adds (0,2), so
  // E[acc(t)] = (2 + 1 - (5/6)^t) / 6.
  auto chain = three_chain();
  const std::uint32_t trials = 4000;
  std::vector<std::uint64_t> cps{1, 3, 6, 12};
  auto traj = run_trajectory(chain, 12, cps, trials, 77);
  for (const auto& pt : traj.points) {
    double expected = (2.0 + 1.0 - std::pow(5.0 / 6.0, static_cast<double>(pt.t))) / 6.0;
    double tol = 3.0 * pt.acc_std / std::sqrt(static_cast<double>(trials));
    CHECK(std::abs(pt.acc_mean - expected) <= tol);
  }
  CHECK(traj.points[2].t == 6);
  CHECK(traj.points[2].acc_mean == doctest::Approx(0.4442).epsilon(0.02));
}

TEST_CASE("trajectory is deterministic and emits stable csv") {
  auto m0 = sample_source_matrix({40, 2.0, 5});
  std::vector<std::uint64_t> cps{1, 10, 100, 1000};
  auto a = run_trajectory(m0, 1000, cps, 8, 123);
  auto b = run_trajectory(m0, 1000, cps, 8, 123);
  CHECK(a.to_csv() == b.to_csv());
  auto c = run_trajectory(m0, 1000, cps, 8, 124);
  CHECK(a.to_csv() != c.to_csv());
  CHECK(a.to_csv().rfind("t,T_norm,acc_mean,acc_std,trials\n", 0) == 0);
}

TEST_CASE("trajectory checkpoint validation") {
  auto chain = three_chain();
  std::vector<std::uint64_t> bad{5, 5};
  CHECK_THROWS_AS(run_trajectory(chain, 10, bad, 1, 0), ValidationError);
  std::vector<std::uint64_t> beyond{20};
  CHECK_THROWS_AS(run_trajectory(chain, 10, beyond, 1, 0), ValidationError);
  CHECK_THROWS_AS(run_trajectory(chain, 10, {}, 0, 0), ValidationError);
}

TEST_CASE("transitive closure") {
  SUBCASE("empty matrix has no reachable pairs") {
    MemorizationMatrix empty(5);
    CHECK(transitive_closure(empty).reachable_pair_count == 0);
  }
  SUBCASE("three chain has three reachable pairs") {
    auto closure = transitive_closure(three_chain());
    CHECK(closure.reachable_pair_count == 3);
    CHECK(closure.closed.test(0, 1));
    CHECK(closure.closed.test(1, 2));
    CHECK(closure.closed.test(0, 2));
  }
  SUBCASE("closure is idempotent") {
    auto m0 = sample_source_matrix({30, 1.5, 11});
    auto once = transitive_closure(m0);
    auto twice = transitive_closure(once.closed);
    CHECK(once.closed == twice.closed);
    CHECK(once.reachable_pair_count == twice.reachable_pair_count);
  }
}

TEST_CASE("pair inclusion probability by exact enumeration") {
  auto chain = three_chain();
  CHECK(pair_inclusion_probability(chain, 0, 2) == doctest::Approx(1.0 / 6.0));
  CHECK(pair_inclusion_probability(chain, 2, 0) == 0.0);
  // Reachable pairs are hit at least by their own draw.
  auto m0 = sample_source_matrix({10, 2.0, 3});
  auto closure = transitive_closure(m0);
  const double floor = 1.0 / 90.0;
  for (std::uint32_t i = 0; i < 10; ++i)
    for (std::uint32_t j = 0; j < 10; ++j) {
      if (i == j) continue;
      double q = pair_inclusion_probability(m0, i, j);
      if (closure.closed.test(i, j)) {
        CHECK(q >= floor - 1e-15);
      } else {
        CHECK(q == 0.0);
      }
    }
  MemorizationMatrix big(13);
  CHECK_THROWS_AS(pair_inclusion_probability(big, 0, 1), ValidationError);
}

TEST_CASE("process invariants: monotone growth inside the closure") {
  auto m0 = sample_source_matrix({12, 1.8, 21});
  auto closure = transitive_closure(m0);
  BfsForest forest(m0);
  EdgeSet d = EdgeSet::from_matrix(m0);
  Rng rng(99);
  for (int t = 0; t < 2000; ++t) {
    std::uint64_t before = d.count;
    augment_step(forest, d, rng);
    CHECK(d.count >= before);
  }
  // Every edge of D lies in D_0 union R (closure bound).
  for (std::uint32_t i = 0; i < 12; ++i)
    for (std::uint32_t j = 0; j < 12; ++j) {
      if (i == j) continue;
      if (d.edges.test(i, j)) {
        CHECK((m0.test(i, j) || closure.closed.test(i, j)));
      }
    }
}

TEST_CASE("added edges in one step share the source and follow one path") {
  auto m0 = sample_source_matrix({10, 2.0, 31});
  BfsForest forest(m0);
  EdgeSet d = EdgeSet::from_matrix(m0);
  Rng rng(17);
  for (int t = 0; t < 500; ++t) {
    auto before = d.edges;
    augment_step(forest, d, rng);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> added;
    for (std::uint32_t i = 0; i < 10; ++i)
      for (std::uint32_t j = 0; j < 10; ++j)
        if (i != j && d.edges.test(i, j) && !before.test(i, j))
          added.emplace_back(i, j);
    if (added.empty()) continue;
    std::uint32_t x = added.front().first;
    std::set<std::uint32_t> targets;
    for (auto [a, b] : added) {
      CHECK(a == x);  // common source
      targets.insert(b);
    }
    // All targets lie on the BFS path from x to the farthest added target.
    const auto& tree = forest.tree(x);
    std::uint32_t far = *std::max_element(
        targets.begin(), targets.end(),
        [&](std::uint32_t a, std::uint32_t b) { return tree.dist[a] < tree.dist[b]; });
    std::set<std::uint32_t> on_path;
    for (std::uint32_t z = far; z != x; z = tree.parent[z]) on_path.insert(z);
    for (std::uint32_t target : targets) CHECK(on_path.count(target) == 1);
  }
}

TEST_CASE("limit law: D_t converges to D_0 union R") {
  auto m0 = sample_source_matrix({8, 1.5, 13});
  auto closure = transitive_closure(m0);
  BfsForest forest(m0);
  EdgeSet d = EdgeSet::from_matrix(m0);
  Rng rng(55);
  const std::uint64_t n = 8 * 7;
  for (std::uint64_t t = 0; t < 50 * n; ++t) augment_step(forest, d, rng);
  CHECK(d.count == closure.reachable_pair_count);
}
