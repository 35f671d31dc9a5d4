// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "voxprior/errors.hpp"

namespace voxprior {

struct FieldSample {
  double density = 0.0;                             // >= 0 after activation
  Eigen::Vector3d rgb = Eigen::Vector3d::Constant(0.5);  // (0,1) after activation
};

inline double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double softplus_grad(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Inverse of softplus; y must be positive.
inline double softplus_inverse(double y) {
  if (y > 30.0) return y;
  return std::log(std::expm1(y));
}

/// Dense voxel grid of raw density and color parameters on the nodes of an
/// axis-aligned box, with matching gradient accumulation buffers. Raw
/// parameters are interpolated trilinearly and then activated (softplus for
/// density, sigmoid per color channel), so effective density is nonnegative
/// and colors stay in (0,1) by construction.
class VoxelField {
 public:
  VoxelField(const Eigen::Vector3i& resolution, const Eigen::Vector3d& bbox_min,
             const Eigen::Vector3d& bbox_max);

  /// 64^3 nodes over [-1,1]^3, density raw -2 (near transparent), color raw 0
  /// (mid gray).
  static VoxelField make_default(int resolution = 64);

  const Eigen::Vector3i& resolution() const { return res_; }
  const Eigen::Vector3d& bbox_min() const { return lo_; }
  const Eigen::Vector3d& bbox_max() const { return hi_; }
  Eigen::Index node_count() const {
    return static_cast<Eigen::Index>(res_.x()) * res_.y() * res_.z();
  }

  // x-fastest node ordering.
  Eigen::Index node_index(int ix, int iy, int iz) const {
    return static_cast<Eigen::Index>(ix) +
           static_cast<Eigen::Index>(res_.x()) *
               (static_cast<Eigen::Index>(iy) +
                static_cast<Eigen::Index>(res_.y()) * iz);
  }
  Eigen::Vector3d node_position(int ix, int iy, int iz) const;

  /// Trilinear interpolation of raw parameters at the point, then activation.
  /// Points outside the box give density 0 and mid-gray color.
  FieldSample query(const Eigen::Vector3d& point) const;

  /// Chain rule of query: scatters upstream gradients into the 8 corner
  /// entries of the grad buffers. No-op outside the box. Single writer per
  /// buffer; shard rays across fields and sum if parallelizing.
  void query_backward(const Eigen::Vector3d& point, double d_density,
                      const Eigen::Vector3d& d_rgb);

  void zero_grads();

  /// Incremented whenever parameters change; render records check it.
  std::uint64_t version() const { return version_; }
  void mark_params_changed() { ++version_; }

  /// "VOXF1" checkpoint: magic, resolution (3x u32 LE), bbox (6x f64 LE),
  /// density then interleaved rgb parameters as f32 LE in x-fastest order.
  void save(const std::string& path) const;
  static VoxelField load(const std::string& path);

  using ColorBlock = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

  Eigen::VectorXd density_param;
  ColorBlock color_param;
  Eigen::VectorXd density_grad;
  ColorBlock color_grad;

 private:
  struct Corner {
    Eigen::Index index;
    double weight;
  };
  // Returns false when the point is outside the box.
  bool corners(const Eigen::Vector3d& point, Corner out[8]) const;

  Eigen::Vector3i res_;
  Eigen::Vector3d lo_, hi_;
  std::uint64_t version_ = 0;
};

}  // namespace voxprior
