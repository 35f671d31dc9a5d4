// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "voxprior/camera.hpp"

namespace voxprior {

/// Point with minimum summed squared distance to the cameras' optical axes,
/// solved from the 3x3 normal equations sum(I - d d^T) p = sum(I - d d^T) o.
/// Rank-deficient but consistent systems (axes crossing along a common line)
/// resolve to the least-norm solution; inconsistent ones throw.
Eigen::Vector3d focus_point(std::span<const CameraPose> poses);

struct RescaleResult {
  std::vector<CameraPose> poses;
  double scale = 1.0;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  /// Maps a point of the original scene into the rescaled frame.
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return (p + translation) * scale;
  }
  /// Inverse map, back into the original frame.
  Eigen::Vector3d invert(const Eigen::Vector3d& p) const {
    return p / scale - translation;
  }
};

/// Re-centers the rig on its focus point and scales camera positions so the
/// largest coordinate magnitude is exactly 1. Rotations are unchanged.
RescaleResult rescale_scene(std::span<const CameraPose> poses);

/// Applies an existing similarity to poses (positions only).
std::vector<CameraPose> apply_rescale(const RescaleResult& rescale,
                                      std::span<const CameraPose> poses);

}  // namespace voxprior
