// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/image_ops.hpp"

#include <cmath>
#include <vector>

namespace voxprior {

namespace {

struct Overlap {
  int index;
  double weight;
};

// Overlap weights of destination bin `d` (of n_dst bins covering [0, n_src])
// with the source bins; weights sum to 1.
std::vector<Overlap> bin_overlaps(int d, int n_dst, int n_src) {
  const double scale = static_cast<double>(n_src) / n_dst;
  const double lo = d * scale;
  const double hi = (d + 1) * scale;
  std::vector<Overlap> out;
  for (int s = static_cast<int>(std::floor(lo)); s < n_src; ++s) {
    const double overlap = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
    if (overlap <= 0.0) {
      if (s >= hi) break;
      continue;
    }
    out.push_back({s, overlap / scale});
  }
  return out;
}

int clamp_index(int i, int n) { return std::min(std::max(i, 0), n - 1); }

}  // namespace

Image area_resample(const Image& src, int width, int height) {
  if (width <= 0 || height <= 0) throw ArgumentError("area_resample: bad size");
  if (width == src.width && height == src.height) return src;

  const int channels = src.channels();
  // Two separable passes: rows, then columns.
  Image hor(width, src.height, channels);
  for (int x = 0; x < width; ++x) {
    const auto cover = bin_overlaps(x, width, src.width);
    for (int y = 0; y < src.height; ++y) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(channels);
      for (const Overlap& o : cover) acc += o.weight * src.data.row(src.pixel_index(o.index, y));
      hor.data.row(hor.pixel_index(x, y)) = acc;
    }
  }
  Image out(width, height, channels);
  for (int y = 0; y < height; ++y) {
    const auto cover = bin_overlaps(y, height, src.height);
    for (int x = 0; x < width; ++x) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(channels);
      for (const Overlap& o : cover) acc += o.weight * hor.data.row(hor.pixel_index(x, o.index));
      out.data.row(out.pixel_index(x, y)) = acc;
    }
  }
  return out;
}

Image area_resample_adjoint(const Image& d_dst, int src_width, int src_height) {
  const int channels = d_dst.channels();
  Image hor(d_dst.width, src_height, channels);
  hor.data.setZero();
  for (int y = 0; y < d_dst.height; ++y) {
    const auto cover = bin_overlaps(y, d_dst.height, src_height);
    for (int x = 0; x < d_dst.width; ++x)
      for (const Overlap& o : cover)
        hor.data.row(hor.pixel_index(x, o.index)) +=
            o.weight * d_dst.data.row(d_dst.pixel_index(x, y));
  }
  Image out(src_width, src_height, channels);
  out.data.setZero();
  for (int x = 0; x < d_dst.width; ++x) {
    const auto cover = bin_overlaps(x, d_dst.width, src_width);
    for (int y = 0; y < src_height; ++y)
      for (const Overlap& o : cover)
        out.data.row(out.pixel_index(o.index, y)) +=
            o.weight * hor.data.row(hor.pixel_index(x, y));
  }
  return out;
}

Image gaussian_blur(const Image& src, double sigma) {
  if (sigma <= 0.0) return src;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  Eigen::VectorXd kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    kernel(i + radius) = std::exp(-0.5 * (i * i) / (sigma * sigma));
  kernel /= kernel.sum();

  const int channels = src.channels();
  Image hor(src.width, src.height, channels);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(channels);
      for (int i = -radius; i <= radius; ++i)
        acc += kernel(i + radius) *
               src.data.row(src.pixel_index(clamp_index(x + i, src.width), y));
      hor.data.row(hor.pixel_index(x, y)) = acc;
    }
  Image out(src.width, src.height, channels);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(channels);
      for (int i = -radius; i <= radius; ++i)
        acc += kernel(i + radius) *
               hor.data.row(hor.pixel_index(x, clamp_index(y + i, src.height)));
      out.data.row(out.pixel_index(x, y)) = acc;
    }
  return out;
}

namespace {

// Central differences with replicate borders.
inline double diff_x(const Image& img, int x, int y, int c) {
  const int xl = clamp_index(x - 1, img.width);
  const int xr = clamp_index(x + 1, img.width);
  return 0.5 * (img.at(xr, y, c) - img.at(xl, y, c));
}

inline double diff_y(const Image& img, int x, int y, int c) {
  const int yl = clamp_index(y - 1, img.height);
  const int yr = clamp_index(y + 1, img.height);
  return 0.5 * (img.at(x, yr, c) - img.at(x, yl, c));
}

}  // namespace

Image gradient_magnitude(const Image& src, double eps) {
  Image out(src.width, src.height, src.channels());
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      for (int c = 0; c < src.channels(); ++c) {
        const double gx = diff_x(src, x, y, c);
        const double gy = diff_y(src, x, y, c);
        out.at(x, y, c) = std::sqrt(gx * gx + gy * gy + eps);
      }
  return out;
}

Image gradient_magnitude_backward(const Image& src, const Image& upstream,
                                  double eps) {
  require_same_shape(src, upstream, "gradient_magnitude_backward");
  Image out(src.width, src.height, src.channels());
  out.data.setZero();
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      for (int c = 0; c < src.channels(); ++c) {
        const double gx = diff_x(src, x, y, c);
        const double gy = diff_y(src, x, y, c);
        const double gm = std::sqrt(gx * gx + gy * gy + eps);
        const double u = upstream.at(x, y, c) / gm;
        // Scatter through the central-difference stencil.
        const int xl = clamp_index(x - 1, src.width);
        const int xr = clamp_index(x + 1, src.width);
        const int yl = clamp_index(y - 1, src.height);
        const int yr = clamp_index(y + 1, src.height);
        out.at(xr, y, c) += 0.5 * u * gx;
        out.at(xl, y, c) -= 0.5 * u * gx;
        out.at(x, yr, c) += 0.5 * u * gy;
        out.at(x, yl, c) -= 0.5 * u * gy;
      }
  return out;
}

Image luminance(const Image& rgb) {
  if (rgb.channels() < 3) throw ArgumentError("luminance: need 3 channels");
  Image out(rgb.width, rgb.height, 1);
  out.data.col(0) = 0.299 * rgb.data.col(0) + 0.587 * rgb.data.col(1) +
                    0.114 * rgb.data.col(2);
  return out;
}

Image clamp01(const Image& src) {
  Image out = src;
  out.data = out.data.array().max(0.0).min(1.0);
  return out;
}

Image constant_image(int width, int height, const Eigen::Vector3d& value) {
  Image out(width, height, 3);
  out.data.rowwise() = value.transpose();
  return out;
}

}  // namespace voxprior
