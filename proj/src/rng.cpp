#include "bandit_forge/rng.hpp"

#include <cmath>

#include "bandit_forge/errors.hpp"

namespace bforge {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_ids(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a + kGolden) ^ (b * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

std::uint64_t hash_ids(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return hash_ids(hash_ids(a, b), c);
}

std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_(hash_ids(seed, stream_id)),
      key2_(mix64(key_ ^ 0x5851F42D4C957F2DULL)) {}

RngStream RngStream::derive(std::uint64_t child_id) const {
  return RngStream(seed_, hash_ids(stream_id_, child_id, 0xA5A5A5A5ULL));
}

std::uint64_t RngStream::next_u64() {
  std::uint64_t z = key_ + (counter_++) * kGolden;
  z = mix64(z) ^ key2_;
  return mix64(z);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: n must be >= 1");
  // Lemire's nearly-divisionless bounded draw.
  const std::uint64_t range = n;
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::normal() {
  // Box-Muller, one variate per pair of uniforms.
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidArgument("gamma: shape and rate must be > 0");
  if (shape < 1.0) {
    // Boost to shape + 1, then scale by U^(1/shape).
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform_pos(), 1.0 / shape) / rate;
  }
  // Marsaglia & Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double RngStream::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  const double s = x + y;
  // Both gammas are > 0 almost surely; guard the underflow corner anyway.
  if (!(s > 0.0)) return a / (a + b);
  return x / s;
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw InvalidArgument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Inversion by sequential search.
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p < 1e-300 && cdf >= 1.0 - 1e-15) break;
    }
    return k;
  }
  // Hormann's PTRS transformed rejection.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform_pos();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace bforge
