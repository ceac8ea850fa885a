#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace combmat {

/// One component of a substream path: either a string tag or an integer index.
class PathLabel {
 public:
  PathLabel(std::string_view tag) : value_(std::string(tag)) {}
  PathLabel(const char* tag) : value_(std::string(tag)) {}
  PathLabel(const std::string& tag) : value_(tag) {}
  template <class Int>
    requires std::is_integral_v<Int>
  PathLabel(Int index) : value_(static_cast<std::int64_t>(index)) {}

  std::uint64_t hash() const noexcept;
  std::string to_string() const;

  friend bool operator==(const PathLabel&, const PathLabel&) = default;

 private:
  std::variant<std::string, std::int64_t> value_;
};

/// Counter-based splittable generator.
///
/// The stream key is a SplitMix64-style hash chain over the seed and every
/// path label; the k-th output is the SplitMix64 finalizer applied to
/// key + (k+1) * golden_gamma.  Children are derived by hashing one more
/// label into the key, so sibling streams never share state and the output
/// of any stream depends only on (seed, path), not on how many values other
/// streams consumed.  Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::vector<PathLabel> path = {});

  RngStream child(const PathLabel& label) const;
  RngStream child(std::initializer_list<PathLabel> labels) const;

  result_type operator()() noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;
  /// Uniform integer on [0, bound); unbiased (Lemire's multiply-and-reject).
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;
  /// +1 or -1 with probability 1/2 each.
  int rademacher() noexcept;
  /// Standard normal via the polar Marsaglia method.
  double normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<PathLabel>& path() const noexcept { return path_; }
  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::vector<PathLabel> path_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Build the stream for (seed, path).
RngStream derive_stream(std::uint64_t seed, std::vector<PathLabel> path);

/// Finalizer of SplitMix64; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace combmat
