#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace entikit {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, arguments, or input files. CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Provider or runtime failure (network, I/O). CLI exit code 2.
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// A response or file could not be parsed into the expected shape.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Counter-based seeded RNG (xoshiro256**, seeded via splitmix64).
/// Self-contained so that draws are identical across platforms and
/// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next();

  /// Unbiased uniform draw in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Uniform double in [0, 1).
  double unit();

  /// Standard normal (Box-Muller, two uniforms per call).
  double normal();

  /// Poisson(lambda) via inversion by sequential search; lambda <= ~30.
  std::uint64_t poisson(double lambda);

 private:
  std::array<std::uint64_t, 4> state_;
};

/// FNV-1a over bytes; used for deterministic content-derived ids.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 1469598103934665603ULL);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal form (std::to_chars), locale-independent.
std::string format_double(double v);

/// Fixed-precision decimal form, locale-independent.
std::string format_fixed(double v, int precision);

/// Runs body(0..n-1) on up to max_threads workers. Work assignment is
/// dynamic; callers must make results deterministic by writing to
/// index-addressed slots. The first exception thrown by any worker is
/// rethrown on the calling thread after all workers finish.
void parallel_for(std::size_t n, unsigned max_threads,
                  const std::function<void(std::size_t)>& body);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso_utc_now();

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Lowercased alphanumeric tokens of s (non-alnum bytes are separators).
std::vector<std::string> tokenize(std::string_view s);

/// n log-spaced integer steps from 1 to t_max inclusive, deduplicated
/// and strictly increasing.
std::vector<std::uint64_t> log_spaced_steps(std::uint64_t t_max, std::size_t n);

}  // namespace entikit
