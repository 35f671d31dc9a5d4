// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "voxprior/errors.hpp"

namespace voxprior {

/// Dense row-major image: one row per pixel (y*width + x), one column per
/// channel. Channel count is dynamic so the same type carries RGB images,
/// depth maps and multi-channel feature images.
template <typename S>
struct ImageT {
  using Scalar = S;
  // Row-major: one pixel's channels are contiguous, which the bilinear
  // gathers in the conditioning renderer depend on.
  using Data = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  int width = 0;
  int height = 0;
  Data data;

  ImageT() = default;
  ImageT(int w, int h, int channels) : width(w), height(h) {
    if (w <= 0 || h <= 0 || channels <= 0)
      throw ArgumentError("image dimensions must be positive");
    data = Data::Zero(static_cast<Eigen::Index>(w) * h, channels);
  }

  int channels() const { return static_cast<int>(data.cols()); }
  Eigen::Index pixel_count() const { return static_cast<Eigen::Index>(width) * height; }
  Eigen::Index pixel_index(int x, int y) const {
    return static_cast<Eigen::Index>(y) * width + x;
  }

  S& at(int x, int y, int c) { return data(pixel_index(x, y), c); }
  S at(int x, int y, int c) const { return data(pixel_index(x, y), c); }

  auto pixel(int x, int y) { return data.row(pixel_index(x, y)); }
  auto pixel(int x, int y) const { return data.row(pixel_index(x, y)); }

  bool same_shape(const ImageT& other) const {
    return width == other.width && height == other.height &&
           channels() == other.channels();
  }
};

using Image = ImageT<double>;

/// Multi-channel conditioning render; layout is RGB first, then feature
/// channels, then a validity flag in the last channel.
using FeatureImage = Image;

template <typename S>
void require_same_shape(const ImageT<S>& a, const ImageT<S>& b, const char* what) {
  if (!a.same_shape(b)) throw ArgumentError(std::string(what) + ": image shape mismatch");
}

template <typename S>
S mse(const ImageT<S>& a, const ImageT<S>& b) {
  require_same_shape(a, b, "mse");
  return (a.data - b.data).array().square().mean();
}

}  // namespace voxprior
