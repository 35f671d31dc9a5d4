// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/geometry.hpp"

#include <Eigen/Eigenvalues>

namespace voxprior {

Eigen::Vector3d focus_point(std::span<const CameraPose> poses) {
  if (poses.size() < 2)
    throw InsufficientDataError("focus_point: need at least 2 poses");

  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (const CameraPose& pose : poses) {
    const Eigen::Vector3d d = pose.forward().normalized();
    const Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - d * d.transpose();
    a += m;
    b += m * pose.position;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(a);
  const Eigen::Vector3d evals = eig.eigenvalues();
  const double lambda_max = evals.maxCoeff();
  if (lambda_max <= 0.0)
    throw DegenerateGeometryError("focus_point: all axes parallel");

  // Pseudo-inverse solve; directions with negligible eigenvalue carry no
  // constraint and are set to zero (least-norm solution).
  const double tol = lambda_max * 1e-12;
  const bool singular = evals.minCoeff() <= tol;  // condition number > 1e12
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    if (evals(i) > tol) {
      const Eigen::Vector3d v = eig.eigenvectors().col(i);
      p += v * (v.dot(b) / evals(i));
    }
  }

  // A singular system is acceptable only when the axes genuinely share a
  // line (zero residual objective, e.g. two cameras facing each other).
  // Parallel-but-offset axes have no crossing at all; error out instead of
  // returning an arbitrary point on the minimizer line.
  if (singular) {
    double objective = 0.0;
    double scale = 0.0;
    for (const CameraPose& pose : poses) {
      const Eigen::Vector3d d = pose.forward().normalized();
      const Eigen::Vector3d rel = p - pose.position;
      objective += (rel - rel.dot(d) * d).squaredNorm();
      scale += rel.squaredNorm();
    }
    if (objective > 1e-12 * (1.0 + scale))
      throw DegenerateGeometryError(
          "focus_point: axes are parallel with no common crossing");
  }
  return p;
}

RescaleResult rescale_scene(std::span<const CameraPose> poses) {
  if (poses.size() < 2)
    throw InsufficientDataError("rescale_scene: need at least 2 poses");

  RescaleResult out;
  out.translation = -focus_point(poses);

  double max_coord = 0.0;
  for (const CameraPose& pose : poses)
    max_coord = std::max(max_coord,
                         (pose.position + out.translation).cwiseAbs().maxCoeff());
  if (max_coord < 1e-12)
    throw DegenerateGeometryError("rescale_scene: all camera positions coincident");
  out.scale = 1.0 / max_coord;

  out.poses = apply_rescale(out, poses);
  return out;
}

std::vector<CameraPose> apply_rescale(const RescaleResult& rescale,
                                      std::span<const CameraPose> poses) {
  std::vector<CameraPose> out(poses.begin(), poses.end());
  for (CameraPose& pose : out) pose.position = rescale.apply(pose.position);
  return out;
}

}  // namespace voxprior
