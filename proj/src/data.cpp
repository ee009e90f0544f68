#include "tomo/data.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"

namespace tomo {

Dataset make_blobs(std::size_t num_classes, std::size_t samples_per_class,
                   std::size_t input_dim, double separation, RngStream& rng) {
  if (num_classes < 2 || samples_per_class == 0 || input_dim == 0) {
    throw Error(Error::Kind::invalid_argument, "make_blobs: bad sizes");
  }
  if (separation < 0.0) {
    throw Error(Error::Kind::invalid_argument, "make_blobs: negative separation");
  }

  // Unit center directions resampled until pairwise distances are >= 1, then
  // scaled by `separation`. Random directions in moderate dimension are
  // near-orthogonal, so rejections are rare.
  Matrix centers(num_classes, input_dim);
  for (std::size_t c = 0; c < num_classes; ++c) {
    while (true) {
      double n2 = 0.0;
      double* row = centers.row(c);
      for (std::size_t j = 0; j < input_dim; ++j) {
        row[j] = rng.next_gaussian();
        n2 += row[j] * row[j];
      }
      if (n2 == 0.0) continue;
      kernels::scale(row, 1.0 / std::sqrt(n2), input_dim);
      bool ok = true;
      for (std::size_t p = 0; p < c && ok; ++p) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < input_dim; ++j) {
          const double diff = row[j] - centers(p, j);
          d2 += diff * diff;
        }
        ok = d2 >= 1.0;
      }
      if (ok) break;
    }
  }

  Dataset ds;
  ds.num_classes = num_classes;
  ds.inputs = Matrix(num_classes * samples_per_class, input_dim);
  ds.labels.resize(num_classes * samples_per_class);
  std::size_t row = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t s = 0; s < samples_per_class; ++s, ++row) {
      double* x = ds.inputs.row(row);
      for (std::size_t j = 0; j < input_dim; ++j) {
        x[j] = separation * centers(c, j) + rng.next_gaussian();
      }
      ds.labels[row] = static_cast<int>(c);
    }
  }
  ds.validate();
  return ds;
}

namespace {

std::uint32_t read_be32(std::ifstream& f, const std::string& path) {
  unsigned char b[4];
  if (!f.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(Error::Kind::truncated, path + ": truncated header");
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::size_t limit) {
  if (limit == 0) {
    throw Error(Error::Kind::invalid_argument, "load_idx: limit must be positive");
  }

  std::ifstream fi(images_path, std::ios::binary);
  if (!fi) throw Error(Error::Kind::io, "load_idx: cannot open " + images_path);
  std::ifstream fl(labels_path, std::ios::binary);
  if (!fl) throw Error(Error::Kind::io, "load_idx: cannot open " + labels_path);

  if (read_be32(fi, images_path) != 0x00000803u) {
    throw Error(Error::Kind::bad_magic, images_path + ": not an IDX image file");
  }
  if (read_be32(fl, labels_path) != 0x00000801u) {
    throw Error(Error::Kind::bad_magic, labels_path + ": not an IDX label file");
  }

  const std::uint32_t num_images = read_be32(fi, images_path);
  const std::uint32_t rows = read_be32(fi, images_path);
  const std::uint32_t cols = read_be32(fi, images_path);
  const std::uint32_t num_labels = read_be32(fl, labels_path);
  if (num_images != num_labels) {
    throw Error(Error::Kind::shape_mismatch,
                "load_idx: " + std::to_string(num_images) + " images vs " +
                    std::to_string(num_labels) + " labels");
  }
  if (rows == 0 || cols == 0 || num_images == 0) {
    throw Error(Error::Kind::shape_mismatch, "load_idx: empty image geometry");
  }

  const std::size_t take = std::min<std::size_t>(limit, num_images);
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;

  Dataset ds;
  ds.inputs = Matrix(take, pixels);
  ds.labels.resize(take);

  std::vector<unsigned char> buf(pixels);
  for (std::size_t n = 0; n < take; ++n) {
    if (!fi.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels))) {
      throw Error(Error::Kind::truncated, images_path + ": truncated pixel data");
    }
    double* dst = ds.inputs.row(n);
    for (std::size_t j = 0; j < pixels; ++j) {
      dst[j] = static_cast<double>(buf[j]) / 255.0;
    }
    unsigned char label = 0;
    if (!fl.read(reinterpret_cast<char*>(&label), 1)) {
      throw Error(Error::Kind::truncated, labels_path + ": truncated label data");
    }
    ds.labels[n] = static_cast<int>(label);
  }

  int max_label = 0;
  for (int y : ds.labels) max_label = std::max(max_label, y);
  ds.num_classes = static_cast<std::size_t>(std::max(max_label + 1, 2));
  ds.validate();
  return ds;
}

}  // namespace tomo
