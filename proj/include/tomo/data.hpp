#pragma once

#include <cstddef>
#include <string>

#include "tomo/neural.hpp"
#include "tomo/rng.hpp"

namespace tomo {

// Gaussian class clusters (unit covariance) with centers scaled so every
// pair of centers is at distance >= separation. separation 0 collapses all
// centers to the origin, giving a chance-level task.
Dataset make_blobs(std::size_t num_classes, std::size_t samples_per_class,
                   std::size_t input_dim, double separation, RngStream& rng);

// Load the first `limit` examples of an IDX image/label pair (big-endian,
// magics 0x00000803 / 0x00000801). Pixels scaled to [0,1], labels kept as
// class indices. Throws Error with kind bad_magic / shape_mismatch /
// truncated / io on malformed files; limit must be positive.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::size_t limit);

}  // namespace tomo
