// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>

#include "voxprior/errors.hpp"
#include "voxprior/types.hpp"

namespace voxprior {

template <typename S>
struct RayT {
  Eigen::Vector3<S> origin = Eigen::Vector3<S>::Zero();
  Eigen::Vector3<S> direction = Eigen::Vector3<S>::UnitZ();

  Eigen::Vector3<S> point_at(S t) const { return origin + t * direction; }
};

/// Pinhole camera with a camera-to-world rotation. Convention: the camera
/// looks along +z of the camera frame, +y points down in the image, and the
/// stored rotation maps camera-frame vectors into world frame.
template <typename S>
struct CameraPoseT {
  Eigen::Matrix3<S> rotation = Eigen::Matrix3<S>::Identity();
  Eigen::Vector3<S> position = Eigen::Vector3<S>::Zero();
  S focal_px = 1;
  Eigen::Vector2<S> principal_point = Eigen::Vector2<S>::Zero();
  int width = 1;
  int height = 1;

  Eigen::Vector3<S> forward() const { return rotation.col(2); }
  Eigen::Vector3<S> right() const { return rotation.col(0); }
  /// World-space up of the image (camera -y, since +y is down).
  Eigen::Vector3<S> up() const { return -rotation.col(1); }

  S rotation_defect() const {
    return (rotation.transpose() * rotation - Eigen::Matrix3<S>::Identity())
        .cwiseAbs()
        .maxCoeff();
  }

  bool valid_rotation(S tol = S(1e-9)) const {
    return rotation_defect() <= tol && rotation.determinant() > S(0);
  }

  /// Builds the rotation from a viewing direction and an approximate up
  /// vector: forward = normalize(target - position), right = forward x up,
  /// then up is re-orthogonalized.
  static CameraPoseT look_at(const Eigen::Vector3<S>& position,
                             const Eigen::Vector3<S>& target,
                             const Eigen::Vector3<S>& up_hint, S focal_px,
                             const Eigen::Vector2<S>& principal_point, int width,
                             int height) {
    const Eigen::Vector3<S> offset = target - position;
    if (offset.norm() < S(1e-9))
      throw DegenerateGeometryError("look_at: camera position coincides with target");
    const Eigen::Vector3<S> fwd = offset.normalized();
    Eigen::Vector3<S> right = fwd.cross(up_hint);
    if (right.norm() < S(1e-9))
      throw DegenerateGeometryError("look_at: up vector parallel to view direction");
    right.normalize();
    const Eigen::Vector3<S> up = right.cross(fwd);
    CameraPoseT pose;
    pose.rotation.col(0) = right;
    pose.rotation.col(1) = -up;
    pose.rotation.col(2) = fwd;
    pose.position = position;
    pose.focal_px = focal_px;
    pose.principal_point = principal_point;
    pose.width = width;
    pose.height = height;
    return pose;
  }
};

template <typename S>
struct ProjectionT {
  Eigen::Vector2<S> pixel;
  S depth;  // camera-frame z
};

/// The world ray through a (continuous) pixel coordinate.
template <typename S>
RayT<S> ray_for_pixel(const CameraPoseT<S>& pose, const Eigen::Vector2<S>& pixel) {
  if (pixel.x() < S(0) || pixel.x() > S(pose.width) || pixel.y() < S(0) ||
      pixel.y() > S(pose.height))
    throw BoundsError("ray_for_pixel: pixel outside image bounds");
  const Eigen::Vector3<S> dir_cam((pixel.x() - pose.principal_point.x()) / pose.focal_px,
                                  (pixel.y() - pose.principal_point.y()) / pose.focal_px,
                                  S(1));
  RayT<S> ray;
  ray.origin = pose.position;
  ray.direction = (pose.rotation * dir_cam).normalized();
  return ray;
}

/// Projects a world point; empty when the point is not strictly in front of
/// the camera (callers treat the gather as invalid).
template <typename S>
std::optional<ProjectionT<S>> project(const CameraPoseT<S>& pose,
                                      const Eigen::Vector3<S>& point) {
  const Eigen::Vector3<S> cam = pose.rotation.transpose() * (point - pose.position);
  if (cam.z() <= S(1e-9)) return std::nullopt;
  ProjectionT<S> out;
  out.pixel = Eigen::Vector2<S>(
      pose.focal_px * cam.x() / cam.z() + pose.principal_point.x(),
      pose.focal_px * cam.y() / cam.z() + pose.principal_point.y());
  out.depth = cam.z();
  return out;
}

/// Same pose with intrinsics rescaled to a new pixel grid.
template <typename S>
CameraPoseT<S> resize_camera(const CameraPoseT<S>& pose, int width, int height) {
  if (width <= 0 || height <= 0) throw ArgumentError("resize_camera: bad size");
  CameraPoseT<S> out = pose;
  const S sx = S(width) / S(pose.width);
  const S sy = S(height) / S(pose.height);
  out.focal_px = pose.focal_px * sx;
  out.principal_point = Eigen::Vector2<S>(pose.principal_point.x() * sx,
                                          pose.principal_point.y() * sy);
  out.width = width;
  out.height = height;
  return out;
}

using Ray = RayT<double>;
using CameraPose = CameraPoseT<double>;
using Projection = ProjectionT<double>;

/// An image together with the camera that captured it.
struct PosedImage {
  Image image;
  CameraPose pose;

  PosedImage() = default;
  PosedImage(Image img, CameraPose p) : image(std::move(img)), pose(std::move(p)) {
    if (image.width != pose.width || image.height != pose.height)
      throw ArgumentError("PosedImage: image dimensions do not match pose image_size");
  }
};

}  // namespace voxprior
