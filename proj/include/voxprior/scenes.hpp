// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "voxprior/camera.hpp"
#include "voxprior/pose_path.hpp"
#include "voxprior/voxel_field.hpp"

namespace voxprior {

struct SphereGeom {
  Eigen::Vector3d center;
  double radius;
  Eigen::Vector3d albedo;
};

struct BoxGeom {
  Eigen::Vector3d min;
  Eigen::Vector3d max;
  Eigen::Vector3d albedo;
};

using Primitive = std::variant<SphereGeom, BoxGeom>;

/// Analytically renderable test scene. Shading is Lambertian with one fixed
/// directional light plus ambient and no view dependence, so the image of a
/// surface point is the same from every camera.
struct SyntheticScene {
  std::vector<Primitive> primitives;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();

  void validate() const;  // albedos in [0,1], all geometry inside [-0.8,0.8]^3
};

// Fixed directional light (unit vector toward the light) and ambient term.
Eigen::Vector3d scene_light_direction();
constexpr double kSceneAmbient = 0.3;

/// Shaded color of a surface point with the given outward normal.
Eigen::Vector3d shade(const Eigen::Vector3d& albedo, const Eigen::Vector3d& normal);

struct SceneSpec {
  int n_primitives = 3;
  std::uint64_t seed = 0;
};

/// Seeded random placement with rejection: primitives never overlap pairwise
/// and stay inside the scene bounds. Throws CapacityError when placement
/// keeps failing.
SyntheticScene make_scene(const SceneSpec& spec);

struct SceneHit {
  double t;
  Eigen::Vector3d normal;
  Eigen::Vector3d albedo;
};

/// First intersection of the ray with any primitive.
std::optional<SceneHit> intersect_scene(const SyntheticScene& scene, const Ray& ray);

/// Exact first-hit ray tracing at the given resolution (one ray per pixel
/// center).
Image render_gt(const SyntheticScene& scene, const CameraPose& pose, int width,
                int height, int threads = 1);

/// Writes the scene into a voxel field: density from supersampled occupancy,
/// color from the shaded nearest surface point.
void bake_scene(const SyntheticScene& scene, VoxelField& field,
                double max_density = 400.0);

/// Train poses evenly spaced in path parameter, test poses at the midpoints
/// between consecutive train parameters; images are ground-truth renders.
std::pair<std::vector<PosedImage>, std::vector<PosedImage>> generate_views(
    const SyntheticScene& scene, const PosePath& path, int n_train, int n_test,
    int width, int height, int threads = 1);

}  // namespace voxprior
