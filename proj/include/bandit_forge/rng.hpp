#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace bforge {

/// Counter-based random stream.
///
/// Every draw is a pure function of (seed, stream_id, counter), so a stream
/// reproduces bit-identically across runs, platforms, and thread schedules.
/// The distribution samplers below are implemented here instead of using
/// <random>'s distributions, whose output is implementation-defined.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Independent child stream; children with distinct ids never share draws.
  RngStream derive(std::uint64_t child_id) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Uniform integer on [0, n). Requires n >= 1.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p);

  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma with (shape, rate) parameterization: mean shape/rate.
  double gamma(double shape, double rate);
  double beta(double a, double b);
  std::uint64_t poisson(double mean);

  // UniformRandomBitGenerator surface, for std::shuffle and friends.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t key2_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines values into one 64-bit stream identifier.
std::uint64_t hash_ids(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t hash_ids(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;

/// FNV-1a of a string, used to key per-policy streams by label.
std::uint64_t hash_name(std::string_view name) noexcept;

}  // namespace bforge
