#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entikit/common.hpp"

namespace entikit::sim {

/// Parameters of the directed Erdos-Renyi source model: V entities,
/// per-pair edge probability p = lambda / V.
struct ToyModelConfig {
  std::uint32_t vertex_count = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;

  double edge_probability() const { return lambda / vertex_count; }
  /// Throws ValidationError unless V >= 2, lambda >= 0 and lambda/V < 1.
  void validate() const;
};

/// V x V binary relation matrix with packed bitset rows. The diagonal is
/// always zero and entries are only ever set, never cleared.
class MemorizationMatrix {
 public:
  MemorizationMatrix() = default;
  explicit MemorizationMatrix(std::uint32_t vertex_count);

  std::uint32_t size() const { return v_; }
  bool test(std::uint32_t i, std::uint32_t j) const {
    return (words_[row_offset(i) + j / 64] >> (j % 64)) & 1u;
  }
  /// Sets (i, j); returns true if the entry was previously zero.
  /// Diagonal writes are rejected.
  bool set(std::uint32_t i, std::uint32_t j);

  /// Number of ones (popcount over all rows).
  std::uint64_t count() const;

  std::span<const std::uint64_t> row_words(std::uint32_t i) const {
    return {words_.data() + row_offset(i), words_per_row_};
  }

  /// Calls fn(j) for every set bit of row i in ascending order of j.
  template <typename Fn>
  void for_each_in_row(std::uint32_t i, Fn&& fn) const {
    const std::uint64_t* row = words_.data() + row_offset(i);
    for (std::size_t w = 0; w < words_per_row_; ++w) {
      std::uint64_t bits = row[w];
      while (bits) {
        int b = std::countr_zero(bits);
        fn(static_cast<std::uint32_t>(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

  bool operator==(const MemorizationMatrix&) const = default;

  /// One line of '0'/'1' per row (debug dump).
  std::string to_bit_text() const;
  static MemorizationMatrix from_bit_text(const std::string& text);

 private:
  std::size_t row_offset(std::uint32_t i) const { return i * words_per_row_; }

  std::uint32_t v_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Independent Bernoulli(lambda/V) draw per off-diagonal entry,
/// deterministic given config.seed.
MemorizationMatrix sample_source_matrix(const ToyModelConfig& config);

/// BFS tree from one source over a fixed matrix. Neighbors are expanded in
/// ascending index order, so parents and distances are deterministic.
struct BfsTree {
  static constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t source = 0;
  std::vector<std::uint32_t> parent;  // kUnreached where not reached
  std::vector<std::uint32_t> dist;    // kUnreached where not reached

  bool reached(std::uint32_t v) const { return dist[v] != kUnreached; }
};

BfsTree bfs_tree(const MemorizationMatrix& m, std::uint32_t source);

/// Shortest directed path x -> ... -> y, or nullopt if unreachable.
/// Tie-break: lowest-index-first BFS expansion. Throws on x == y.
std::optional<std::vector<std::uint32_t>> bfs_shortest_path(
    const MemorizationMatrix& m, std::uint32_t x, std::uint32_t y);

/// Per-source BFS trees over a fixed source matrix, built lazily and cached.
/// Safe for concurrent readers; the underlying matrix must outlive it.
class BfsForest {
 public:
  explicit BfsForest(const MemorizationMatrix& m0);

  const MemorizationMatrix& source_matrix() const { return m0_; }
  const BfsTree& tree(std::uint32_t source) const;

 private:
  const MemorizationMatrix& m0_;
  mutable std::deque<std::once_flag> flags_;
  mutable std::vector<std::optional<BfsTree>> trees_;
};

/// Growing edge set D_t (always a superset of the source edges).
struct EdgeSet {
  MemorizationMatrix edges;
  std::uint64_t count = 0;

  static EdgeSet from_matrix(const MemorizationMatrix& m0);
  bool insert(std::uint32_t i, std::uint32_t j);
};

/// One augmentation step: samples an ordered pair (x, y) uniformly; if y is
/// reachable from x in the source matrix, adds (x, z) for every vertex z on
/// the shortest path after x (including y). Returns the number of edges that
/// were new.
std::uint32_t augment_step(const BfsForest& forest, EdgeSet& d, Rng& rng);

struct TrajectoryPoint {
  std::uint64_t t = 0;
  double t_norm = 0.0;  // t / (V (V-1))
  double acc_mean = 0.0;
  double acc_std = 0.0;  // sample std across trials
  std::uint32_t trials = 0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;

  /// CSV with header "t,T_norm,acc_mean,acc_std,trials".
  std::string to_csv() const;
};

inline constexpr std::size_t kDefaultCheckpoints = 64;
inline constexpr std::uint32_t kDefaultTrials = 16;

/// Runs `trials` independent augmentation processes from m0 and records the
/// mean/std of the link density |D_t| / (V(V-1)) at each checkpoint step.
/// Trial i draws from Rng(seed, i); trials may run in parallel.
Trajectory run_trajectory(const MemorizationMatrix& m0, std::uint64_t t_max,
                          std::span<const std::uint64_t> checkpoints,
                          std::uint32_t trials, std::uint64_t seed,
                          unsigned max_threads = 0);

struct ReachabilityClosure {
  MemorizationMatrix closed;             // (i, j) set iff j reachable from i
  std::uint64_t reachable_pair_count = 0;
};

ReachabilityClosure transitive_closure(const MemorizationMatrix& m0);

inline constexpr std::uint32_t kMaxExactEnumerationV = 12;

/// Exact per-step probability that edge (x, y) is added, by enumerating all
/// V(V-1) ordered pairs and their BFS paths. Only for V <= 12.
double pair_inclusion_probability(const MemorizationMatrix& m0, std::uint32_t x,
                                  std::uint32_t y);

}  // namespace entikit::sim
