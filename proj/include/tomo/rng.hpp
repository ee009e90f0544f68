#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace tomo {

// Counter-based, splittable random stream. A stream is fully determined by
// (master_seed, stream_id): the same pair always replays the same sequence,
// and distinct stream_ids give statistically independent sequences, so sweep
// cells can be keyed by their coordinates and computed in any order.
//
// Gaussians come from a hand-rolled Box-Muller transform on top of the
// 64-bit stream so the draw sequence is identical across standard libraries
// and platforms.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform in (0, 1]; never exactly 0 so log() is safe.
  double next_unit();

  // Standard normal draw.
  double next_gaussian();

  // Uniform integer in [0, bound) via rejection; bound > 0.
  std::uint64_t next_below(std::uint64_t bound);

  // Hash a tag plus integer coordinates into a stream id. Used to key sweep
  // cells by value (d, t, run, ...) rather than enumeration order.
  static std::uint64_t derive_stream_id(std::string_view tag,
                                        std::initializer_list<std::uint64_t> parts);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace tomo
