#include "entikit/graph_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace entikit::sim {

void ToyModelConfig::validate() const {
  if (vertex_count < 2) throw ValidationError("toy model: V must be >= 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ValidationError("toy model: lambda must be finite and >= 0");
  if (lambda / vertex_count >= 1.0)
    throw ValidationError("toy model: p = lambda/V must be < 1");
}

MemorizationMatrix::MemorizationMatrix(std::uint32_t vertex_count)
    : v_(vertex_count),
      words_per_row_((vertex_count + 63) / 64),
      words_(static_cast<std::size_t>(vertex_count) * words_per_row_, 0) {}

bool MemorizationMatrix::set(std::uint32_t i, std::uint32_t j) {
  if (i == j) throw ValidationError("matrix: diagonal entries must stay zero");
  std::uint64_t& word = words_[row_offset(i) + j / 64];
  std::uint64_t mask = 1ULL << (j % 64);
  if (word & mask) return false;
  word |= mask;
  return true;
}

std::uint64_t MemorizationMatrix::count() const {
  std::uint64_t total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

std::string MemorizationMatrix::to_bit_text() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(v_) * (v_ + 1));
  for (std::uint32_t i = 0; i < v_; ++i) {
    for (std::uint32_t j = 0; j < v_; ++j) out.push_back(test(i, j) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

MemorizationMatrix MemorizationMatrix::from_bit_text(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) rows.push_back(std::string(trim(line)));
  }
  if (rows.empty()) throw ValidationError("bit text: no rows");
  auto v = static_cast<std::uint32_t>(rows.size());
  MemorizationMatrix m(v);
  for (std::uint32_t i = 0; i < v; ++i) {
    if (rows[i].size() != v)
      throw ValidationError("bit text: row length does not match row count");
    for (std::uint32_t j = 0; j < v; ++j) {
      char c = rows[i][j];
      if (c != '0' && c != '1') throw ValidationError("bit text: expected 0 or 1");
      if (c == '1') {
        if (i == j) throw ValidationError("bit text: nonzero diagonal entry");
        m.set(i, j);
      }
    }
  }
  return m;
}

MemorizationMatrix sample_source_matrix(const ToyModelConfig& config) {
  config.validate();
  const std::uint32_t v = config.vertex_count;
  const double p = config.edge_probability();
  MemorizationMatrix m(v);
  Rng rng(config.seed);
  for (std::uint32_t i = 0; i < v; ++i) {
    for (std::uint32_t j = 0; j < v; ++j) {
      if (i == j) continue;
      if (rng.unit() < p) m.set(i, j);
    }
  }
  return m;
}

BfsTree bfs_tree(const MemorizationMatrix& m, std::uint32_t source) {
  const std::uint32_t v = m.size();
  BfsTree tree;
  tree.source = source;
  tree.parent.assign(v, BfsTree::kUnreached);
  tree.dist.assign(v, BfsTree::kUnreached);
  tree.dist[source] = 0;
  std::vector<std::uint32_t> frontier{source};
  std::vector<std::uint32_t> next;
  std::uint32_t depth = 0;
  while (!frontier.empty()) {
    ++depth;
    next.clear();
    for (std::uint32_t u : frontier) {
      m.for_each_in_row(u, [&](std::uint32_t j) {
        if (tree.dist[j] == BfsTree::kUnreached) {
          tree.dist[j] = depth;
          tree.parent[j] = u;
          next.push_back(j);
        }
      });
    }
    frontier.swap(next);
  }
  return tree;
}

std::optional<std::vector<std::uint32_t>> bfs_shortest_path(
    const MemorizationMatrix& m, std::uint32_t x, std::uint32_t y) {
  if (x == y) throw ValidationError("bfs_shortest_path: x and y must differ");
  BfsTree tree = bfs_tree(m, x);
  if (!tree.reached(y)) return std::nullopt;
  std::vector<std::uint32_t> path;
  for (std::uint32_t v = y; v != x; v = tree.parent[v]) path.push_back(v);
  path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

BfsForest::BfsForest(const MemorizationMatrix& m0)
    : m0_(m0), flags_(m0.size()), trees_(m0.size()) {}

const BfsTree& BfsForest::tree(std::uint32_t source) const {
  std::call_once(flags_[source], [&] { trees_[source] = bfs_tree(m0_, source); });
  return *trees_[source];
}

EdgeSet EdgeSet::from_matrix(const MemorizationMatrix& m0) {
  EdgeSet d;
  d.edges = m0;
  d.count = m0.count();
  return d;
}

bool EdgeSet::insert(std::uint32_t i, std::uint32_t j) {
  if (!edges.set(i, j)) return false;
  ++count;
  return true;
}

std::uint32_t augment_step(const BfsForest& forest, EdgeSet& d, Rng& rng) {
  const std::uint32_t v = forest.source_matrix().size();
  const std::uint64_t n = static_cast<std::uint64_t>(v) * (v - 1);
  std::uint64_t idx = rng.below(n);
  auto x = static_cast<std::uint32_t>(idx / (v - 1));
  auto r = static_cast<std::uint32_t>(idx % (v - 1));
  std::uint32_t y = r < x ? r : r + 1;

  const BfsTree& tree = forest.tree(x);
  if (!tree.reached(y)) return 0;
  std::uint32_t added = 0;
  // Walk y back to x; every vertex strictly between x and y (plus y itself)
  // becomes a direct target of x.
  for (std::uint32_t z = y; z != x; z = tree.parent[z]) {
    if (d.insert(x, z)) ++added;
  }
  return added;
}

Trajectory run_trajectory(const MemorizationMatrix& m0, std::uint64_t t_max,
                          std::span<const std::uint64_t> checkpoints,
                          std::uint32_t trials, std::uint64_t seed,
                          unsigned max_threads) {
  if (trials < 1) throw ValidationError("run_trajectory: trials must be >= 1");
  std::vector<std::uint64_t> steps(checkpoints.begin(), checkpoints.end());
  if (steps.empty()) steps = log_spaced_steps(t_max, kDefaultCheckpoints);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] == 0 || steps[i] > t_max)
      throw ValidationError("run_trajectory: checkpoints must lie in [1, t_max]");
    if (i > 0 && steps[i] <= steps[i - 1])
      throw ValidationError("run_trajectory: checkpoints must be strictly increasing");
  }

  const std::uint32_t v = m0.size();
  const double n = static_cast<double>(v) * (v - 1);
  BfsForest forest(m0);

  std::vector<std::vector<std::uint64_t>> counts(
      trials, std::vector<std::uint64_t>(steps.size(), 0));
  if (max_threads == 0) max_threads = std::thread::hardware_concurrency();
  parallel_for(trials, max_threads, [&](std::size_t trial) {
    Rng rng(seed, trial);
    EdgeSet d = EdgeSet::from_matrix(m0);
    std::size_t next_cp = 0;
    for (std::uint64_t t = 1; t <= steps.back(); ++t) {
      augment_step(forest, d, rng);
      if (t == steps[next_cp]) {
        counts[trial][next_cp] = d.count;
        ++next_cp;
      }
    }
  });

  Trajectory traj;
  traj.points.reserve(steps.size());
  for (std::size_t c = 0; c < steps.size(); ++c) {
    double mean = 0.0;
    for (std::uint32_t trial = 0; trial < trials; ++trial)
      mean += static_cast<double>(counts[trial][c]) / n;
    mean /= trials;
    double var = 0.0;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
      double dev = static_cast<double>(counts[trial][c]) / n - mean;
      var += dev * dev;
    }
    double std_dev = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
    traj.points.push_back({steps[c], static_cast<double>(steps[c]) / n, mean,
                           std_dev, trials});
  }
  return traj;
}

std::string Trajectory::to_csv() const {
  std::string out = "t,T_norm,acc_mean,acc_std,trials\n";
  for (const auto& p : points) {
    out += std::to_string(p.t);
    out += ',';
    out += format_double(p.t_norm);
    out += ',';
    out += format_double(p.acc_mean);
    out += ',';
    out += format_double(p.acc_std);
    out += ',';
    out += std::to_string(p.trials);
    out += '\n';
  }
  return out;
}

ReachabilityClosure transitive_closure(const MemorizationMatrix& m0) {
  const std::uint32_t v = m0.size();
  ReachabilityClosure closure;
  closure.closed = MemorizationMatrix(v);
  for (std::uint32_t i = 0; i < v; ++i) {
    BfsTree tree = bfs_tree(m0, i);
    for (std::uint32_t j = 0; j < v; ++j) {
      if (j != i && tree.reached(j)) {
        closure.closed.set(i, j);
        ++closure.reachable_pair_count;
      }
    }
  }
  return closure;
}

double pair_inclusion_probability(const MemorizationMatrix& m0, std::uint32_t x,
                                  std::uint32_t y) {
  const std::uint32_t v = m0.size();
  if (v > kMaxExactEnumerationV)
    throw ValidationError("pair_inclusion_probability: V too large for exact enumeration");
  if (x == y) throw ValidationError("pair_inclusion_probability: x and y must differ");
  BfsForest forest(m0);
  std::uint64_t hits = 0;
  for (std::uint32_t a = 0; a < v; ++a) {
    if (a != x) continue;  // added edges always share source a == x
    const BfsTree& tree = forest.tree(a);
    for (std::uint32_t b = 0; b < v; ++b) {
      if (b == a || !tree.reached(b)) continue;
      for (std::uint32_t z = b; z != a; z = tree.parent[z]) {
        if (z == y) {
          ++hits;
          break;
        }
      }
    }
  }
  return static_cast<double>(hits) /
         (static_cast<double>(v) * (v - 1));
}

}  // namespace entikit::sim
