// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "voxprior/camera.hpp"
#include "voxprior/rng.hpp"

namespace voxprior {

enum class PathKind { Ellipse, Bspline };

/// A camera path fitted to training views; the base distribution novel poses
/// are drawn from. Ellipse paths are closed (parameter wraps), B-spline paths
/// are open and follow the capture order.
struct PosePath {
  PathKind kind = PathKind::Ellipse;

  // Ellipse fields.
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_v = Eigen::Vector3d::UnitY();
  Eigen::Vector3d look_at = Eigen::Vector3d::Zero();

  // B-spline fields.
  std::vector<Eigen::Vector3d> control_points;
  int degree = 3;
  std::vector<Eigen::Vector3d> look_ats;

  // Shared approximate up vector for the look-at construction.
  Eigen::Vector3d up = Eigen::Vector3d(0, -1, 0);

  // Intrinsics of the first training pose, copied onto sampled poses.
  double focal_px = 1.0;
  Eigen::Vector2d principal_point = Eigen::Vector2d::Zero();
  int width = 1;
  int height = 1;

  Eigen::Vector3d position_at(double u) const;
  Eigen::Vector3d look_at_at(double u) const;
};

struct PerturbSpec {
  double position_radius = 0.05;  // scene units
  double lookat_radius = 0.05;    // scene units
  double up_angle_max = 0.05;     // radians

  void validate() const;
};

/// Ellipse through the best-fit plane of the camera positions; semi-axis
/// lengths are 1.5x the in-plane standard deviations so sampled views sit
/// slightly outside the training hull.
PosePath fit_ellipse_path(std::span<const CameraPose> poses,
                          const Eigen::Vector3d& focus);

/// Clamped uniform cubic B-spline with control points at the camera
/// positions; per-pose look-at points sit at unit distance along each
/// optical axis and are interpolated with the same spline.
PosePath fit_bspline_path(std::span<const CameraPose> poses);

/// Draws a path parameter uniformly, perturbs position and look-at inside
/// balls, rotates the up vector about the view axis, and rebuilds the
/// rotation with the look-at construction.
CameraPose sample_novel_pose(const PosePath& path, const PerturbSpec& perturb,
                             Rng& rng);

/// Indices of the k observations closest (camera-position distance) to the
/// target pose, ascending by distance; ties break toward the lower index.
std::vector<int> nearest_views(const CameraPose& target,
                               std::span<const PosedImage> observations, int k);

}  // namespace voxprior
