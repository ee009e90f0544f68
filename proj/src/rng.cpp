#include "tomo/rng.hpp"

#include <cmath>

namespace tomo {

namespace {

// SplitMix64 finalizer (Steele/Lea/Flood). Used both for seeding and as the
// per-stream generator; the increment constant is the 64-bit golden ratio.
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
  state_ = mix64(master_seed + kGamma) ^ mix64(stream_id * 0xDA942042E4DD58B5ull + kGamma);
}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::next_unit() {
  // 53 random bits; +1 keeps the value in (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(phi);
  has_cached_gaussian_ = true;
  return r * std::cos(phi);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  // Rejection sampling over the top multiple of bound keeps the draw exact.
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % bound;
}

std::uint64_t RngStream::derive_stream_id(std::string_view tag,
                                          std::initializer_list<std::uint64_t> parts) {
  // FNV-1a over the tag bytes, then mix in each coordinate.
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  for (std::uint64_t p : parts) {
    h = mix64(h ^ mix64(p + kGamma));
  }
  return h;
}

}  // namespace tomo
