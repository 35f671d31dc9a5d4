// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/pose_path.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "voxprior/bspline.hpp"

namespace voxprior {

void PerturbSpec::validate() const {
  if (!(std::isfinite(position_radius) && position_radius >= 0.0) ||
      !(std::isfinite(lookat_radius) && lookat_radius >= 0.0) ||
      !(std::isfinite(up_angle_max) && up_angle_max >= 0.0))
    throw ArgumentError("PerturbSpec: fields must be finite and >= 0");
}

Eigen::Vector3d PosePath::position_at(double u) const {
  if (kind == PathKind::Ellipse) {
    const double a = 2.0 * M_PI * u;
    return center + std::cos(a) * axis_u + std::sin(a) * axis_v;
  }
  return bspline_eval<double>(control_points, degree, u);
}

Eigen::Vector3d PosePath::look_at_at(double u) const {
  if (kind == PathKind::Ellipse) return look_at;
  return bspline_eval<double>(look_ats, degree, u);
}

namespace {

Eigen::Vector3d mean_up(std::span<const CameraPose> poses) {
  Eigen::Vector3d up = Eigen::Vector3d::Zero();
  for (const CameraPose& pose : poses) up += pose.up();
  const double n = up.norm();
  if (n < 1e-9)
    throw DegenerateGeometryError("pose path: camera up vectors cancel out");
  return up / n;
}

void copy_intrinsics(PosePath& path, const CameraPose& reference) {
  path.focal_px = reference.focal_px;
  path.principal_point = reference.principal_point;
  path.width = reference.width;
  path.height = reference.height;
}

}  // namespace

PosePath fit_ellipse_path(std::span<const CameraPose> poses,
                          const Eigen::Vector3d& focus) {
  if (poses.size() < 3)
    throw InsufficientDataError("fit_ellipse_path: need at least 3 poses");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const CameraPose& pose : poses) centroid += pose.position;
  centroid /= static_cast<double>(poses.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const CameraPose& pose : poses) {
    const Eigen::Vector3d d = pose.position - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(poses.size());

  // Eigenvalues ascending; the two largest span the best-fit plane.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const double l1 = eig.eigenvalues()(2);
  const double l2 = eig.eigenvalues()(1);
  if (l2 <= 1e-12 * std::max(l1, 1e-300))
    throw DegenerateGeometryError("fit_ellipse_path: camera positions are collinear");

  PosePath path;
  path.kind = PathKind::Ellipse;
  path.center = centroid;
  path.axis_u = eig.eigenvectors().col(2) * (1.5 * std::sqrt(l1));
  path.axis_v = eig.eigenvectors().col(1) * (1.5 * std::sqrt(l2));
  path.look_at = focus;
  path.up = mean_up(poses);
  copy_intrinsics(path, poses[0]);
  return path;
}

PosePath fit_bspline_path(std::span<const CameraPose> poses) {
  constexpr int kDegree = 3;
  if (static_cast<int>(poses.size()) < kDegree + 1)
    throw InsufficientDataError("fit_bspline_path: need at least degree+1 poses");

  PosePath path;
  path.kind = PathKind::Bspline;
  path.degree = kDegree;
  for (const CameraPose& pose : poses) {
    path.control_points.push_back(pose.position);
    path.look_ats.push_back(pose.position + pose.forward());
  }
  path.up = mean_up(poses);
  copy_intrinsics(path, poses[0]);
  return path;
}

CameraPose sample_novel_pose(const PosePath& path, const PerturbSpec& perturb,
                             Rng& rng) {
  perturb.validate();

  for (int attempt = 0; attempt < 16; ++attempt) {
    const double u = rng.uniform();
    Eigen::Vector3d position = path.position_at(u);
    Eigen::Vector3d look_at = path.look_at_at(u);
    if (perturb.position_radius > 0.0) position += rng.in_ball(perturb.position_radius);
    if (perturb.lookat_radius > 0.0) look_at += rng.in_ball(perturb.lookat_radius);
    if ((look_at - position).norm() < 1e-9) continue;

    const Eigen::Vector3d fwd = (look_at - position).normalized();
    Eigen::Vector3d up = path.up;
    if (perturb.up_angle_max > 0.0) {
      const double angle = rng.uniform(-perturb.up_angle_max, perturb.up_angle_max);
      up = Eigen::AngleAxisd(angle, fwd) * up;
    }
    if (fwd.cross(up).norm() < 1e-9) continue;  // up collapsed onto the view axis

    return CameraPose::look_at(position, look_at, up, path.focal_px,
                               path.principal_point, path.width, path.height);
  }
  throw DegenerateGeometryError(
      "sample_novel_pose: perturbed position keeps coinciding with look-at");
}

std::vector<int> nearest_views(const CameraPose& target,
                               std::span<const PosedImage> observations, int k) {
  const int n = static_cast<int>(observations.size());
  if (k < 1 || k > n) throw BoundsError("nearest_views: k out of range");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i)
    dist[i] = (observations[i].pose.position - target.position).norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return dist[a] < dist[b]; });
  order.resize(k);
  return order;
}

}  // namespace voxprior
