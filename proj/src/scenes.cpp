// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/scenes.hpp"

#include <algorithm>
#include <cmath>

#include "voxprior/parallel.hpp"
#include "voxprior/rng.hpp"

namespace voxprior {

namespace {
constexpr double kSceneBound = 0.8;
constexpr double kDiffuse = 0.7;

Eigen::Vector3d primitive_min(const Primitive& p) {
  if (const auto* s = std::get_if<SphereGeom>(&p))
    return s->center.array() - s->radius;
  return std::get<BoxGeom>(p).min;
}

Eigen::Vector3d primitive_max(const Primitive& p) {
  if (const auto* s = std::get_if<SphereGeom>(&p))
    return s->center.array() + s->radius;
  return std::get<BoxGeom>(p).max;
}

// Distance from a point to the box surface (negative inside).
double box_signed_distance(const BoxGeom& b, const Eigen::Vector3d& p) {
  const Eigen::Vector3d center = 0.5 * (b.min + b.max);
  const Eigen::Vector3d half = 0.5 * (b.max - b.min);
  const Eigen::Vector3d q = (p - center).cwiseAbs() - half;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double signed_distance(const Primitive& prim, const Eigen::Vector3d& p) {
  if (const auto* s = std::get_if<SphereGeom>(&prim))
    return (p - s->center).norm() - s->radius;
  return box_signed_distance(std::get<BoxGeom>(prim), p);
}

// Conservative pairwise separation: spheres exactly, boxes via their corner
// spheres' bounding geometry.
double pair_separation(const Primitive& a, const Primitive& b) {
  if (const auto* sa = std::get_if<SphereGeom>(&a)) {
    if (const auto* sb = std::get_if<SphereGeom>(&b))
      return (sa->center - sb->center).norm() - sa->radius - sb->radius;
    return signed_distance(b, sa->center) - sa->radius;
  }
  if (std::holds_alternative<SphereGeom>(b)) return pair_separation(b, a);
  const auto& ba = std::get<BoxGeom>(a);
  const auto& bb = std::get<BoxGeom>(b);
  double sep = -1.0;
  for (int axis = 0; axis < 3; ++axis)
    sep = std::max(sep, std::max(bb.min(axis) - ba.max(axis),
                                 ba.min(axis) - bb.max(axis)));
  return sep;
}

std::optional<double> intersect_sphere(const SphereGeom& s, const Ray& ray) {
  const Eigen::Vector3d oc = ray.origin - s.center;
  const double b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  double t = -b - sq;
  if (t < 1e-9) t = -b + sq;
  if (t < 1e-9) return std::nullopt;
  return t;
}

struct BoxHit {
  double t;
  int axis;
  double sign;
};

std::optional<BoxHit> intersect_box(const BoxGeom& b, const Ray& ray) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  int enter_axis = 0;

  for (int axis = 0; axis < 3; ++axis) {
    const double d = ray.direction(axis);
    if (std::abs(d) < 1e-15) {
      if (ray.origin(axis) < b.min(axis) || ray.origin(axis) > b.max(axis))
        return std::nullopt;
      continue;
    }
    double t0 = (b.min(axis) - ray.origin(axis)) / d;
    double t1 = (b.max(axis) - ray.origin(axis)) / d;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_enter) {
      t_enter = t0;
      enter_axis = axis;
    }
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }
  if (t_enter < 1e-9) return std::nullopt;  // origin inside or box behind
  BoxHit hit;
  hit.t = t_enter;
  hit.axis = enter_axis;
  hit.sign = ray.direction(enter_axis) > 0.0 ? -1.0 : 1.0;
  return hit;
}

}  // namespace

void SyntheticScene::validate() const {
  if ((background.array() < 0.0).any() || (background.array() > 1.0).any())
    throw ArgumentError("scene: background outside [0,1]");
  for (const Primitive& prim : primitives) {
    Eigen::Vector3d albedo;
    if (const auto* s = std::get_if<SphereGeom>(&prim)) {
      if (s->radius <= 0.0) throw ArgumentError("scene: sphere radius must be positive");
      albedo = s->albedo;
    } else {
      const auto& b = std::get<BoxGeom>(prim);
      if ((b.min.array() >= b.max.array()).any())
        throw ArgumentError("scene: box min must be below max");
      albedo = b.albedo;
    }
    if ((albedo.array() < 0.0).any() || (albedo.array() > 1.0).any())
      throw ArgumentError("scene: albedo outside [0,1]");
    if ((primitive_min(prim).array() < -1.0).any() ||
        (primitive_max(prim).array() > 1.0).any())
      throw ArgumentError("scene: primitive extends outside [-1,1]^3");
  }
}

Eigen::Vector3d scene_light_direction() {
  return Eigen::Vector3d(0.35, -0.85, 0.25).normalized();
}

Eigen::Vector3d shade(const Eigen::Vector3d& albedo, const Eigen::Vector3d& normal) {
  const double lambert =
      std::max(0.0, normal.dot(scene_light_direction()));
  const double intensity = std::min(1.0, kSceneAmbient + kDiffuse * lambert);
  return albedo * intensity;
}

SyntheticScene make_scene(const SceneSpec& spec) {
  if (spec.n_primitives < 1)
    throw ArgumentError("make_scene: need at least one primitive");

  Rng rng(hash_combine(spec.seed, 0x5ce4e5));
  SyntheticScene scene;

  // Placement bounds keep geometry well inside the camera near plane after
  // the rig is normalized.
  constexpr double kCenterBound = 0.4;
  constexpr double kMinSize = 0.12;
  constexpr double kMaxSize = 0.3;

  int rejections = 0;
  while (static_cast<int>(scene.primitives.size()) < spec.n_primitives) {
    if (rejections > 1000)
      throw CapacityError("make_scene: placement failed after 1000 rejections");

    const bool sphere = rng.uniform() < 0.6;
    const Eigen::Vector3d center(rng.uniform(-kCenterBound, kCenterBound),
                                 rng.uniform(-kCenterBound, kCenterBound),
                                 rng.uniform(-kCenterBound, kCenterBound));
    const Eigen::Vector3d albedo(rng.uniform(0.25, 0.95), rng.uniform(0.25, 0.95),
                                 rng.uniform(0.25, 0.95));
    Primitive candidate;
    if (sphere) {
      candidate = SphereGeom{center, rng.uniform(kMinSize, kMaxSize), albedo};
    } else {
      const Eigen::Vector3d half(rng.uniform(kMinSize, kMaxSize) * 0.8,
                                 rng.uniform(kMinSize, kMaxSize) * 0.8,
                                 rng.uniform(kMinSize, kMaxSize) * 0.8);
      candidate = BoxGeom{center - half, center + half, albedo};
    }

    bool ok = (primitive_min(candidate).array() >= -kSceneBound).all() &&
              (primitive_max(candidate).array() <= kSceneBound).all();
    for (const Primitive& other : scene.primitives)
      ok = ok && pair_separation(candidate, other) > 0.02;
    if (ok) {
      scene.primitives.push_back(candidate);
    } else {
      ++rejections;
    }
  }
  scene.validate();
  return scene;
}

std::optional<SceneHit> intersect_scene(const SyntheticScene& scene, const Ray& ray) {
  std::optional<SceneHit> best;
  for (const Primitive& prim : scene.primitives) {
    if (const auto* s = std::get_if<SphereGeom>(&prim)) {
      const auto t = intersect_sphere(*s, ray);
      if (t && (!best || *t < best->t)) {
        SceneHit hit;
        hit.t = *t;
        hit.normal = (ray.point_at(*t) - s->center).normalized();
        hit.albedo = s->albedo;
        best = hit;
      }
    } else {
      const auto& b = std::get<BoxGeom>(prim);
      const auto boxhit = intersect_box(b, ray);
      if (boxhit && (!best || boxhit->t < best->t)) {
        SceneHit hit;
        hit.t = boxhit->t;
        hit.normal = Eigen::Vector3d::Zero();
        hit.normal(boxhit->axis) = boxhit->sign;
        hit.albedo = b.albedo;
        best = hit;
      }
    }
  }
  return best;
}

Image render_gt(const SyntheticScene& scene, const CameraPose& pose, int width,
                int height, int threads) {
  const CameraPose cam = resize_camera(pose, width, height);
  Image out(width, height, 3);
  parallel_for(out.pixel_count(), threads, [&](long idx) {
    const int px = static_cast<int>(idx) % width;
    const int py = static_cast<int>(idx) / width;
    const Ray ray = ray_for_pixel(cam, Eigen::Vector2d(px + 0.5, py + 0.5));
    const auto hit = intersect_scene(scene, ray);
    const Eigen::Vector3d color =
        hit ? shade(hit->albedo, hit->normal) : scene.background;
    out.data.row(idx) = color.transpose();
  });
  return out;
}

void bake_scene(const SyntheticScene& scene, VoxelField& field, double max_density) {
  const Eigen::Vector3i res = field.resolution();
  const Eigen::Vector3d spacing =
      (field.bbox_max() - field.bbox_min()).cwiseQuotient(
          (res - Eigen::Vector3i::Ones()).cast<double>());

  // 3x3x3 occupancy supersampling of the cell around each node keeps the
  // reconstructed surface within a fraction of a voxel.
  constexpr int kSub = 3;
  for (int iz = 0; iz < res.z(); ++iz)
    for (int iy = 0; iy < res.y(); ++iy)
      for (int ix = 0; ix < res.x(); ++ix) {
        const Eigen::Vector3d node = field.node_position(ix, iy, iz);
        int inside = 0;
        for (int sz = 0; sz < kSub; ++sz)
          for (int sy = 0; sy < kSub; ++sy)
            for (int sx = 0; sx < kSub; ++sx) {
              const Eigen::Vector3d offset(
                  ((sx + 0.5) / kSub - 0.5) * spacing.x(),
                  ((sy + 0.5) / kSub - 0.5) * spacing.y(),
                  ((sz + 0.5) / kSub - 0.5) * spacing.z());
              const Eigen::Vector3d p = node + offset;
              for (const Primitive& prim : scene.primitives)
                if (signed_distance(prim, p) <= 0.0) {
                  ++inside;
                  break;
                }
            }
        const double occupancy =
            static_cast<double>(inside) / (kSub * kSub * kSub);
        // Exponential ramp: max_density deep inside, ~1 right at the surface
        // (occupancy 1/2), negligible outside. Keeps the rendered silhouette
        // within a fraction of a voxel of the true boundary.
        const Eigen::Index index = field.node_index(ix, iy, iz);
        field.density_param(index) =
            occupancy > 0.0
                ? softplus_inverse(std::pow(max_density, 2.0 * occupancy - 1.0))
                : -40.0;

        // Color from the nearest primitive surface, shaded there.
        double best = std::numeric_limits<double>::infinity();
        Eigen::Vector3d color = Eigen::Vector3d::Constant(0.5);
        for (const Primitive& prim : scene.primitives) {
          const double d = std::abs(signed_distance(prim, node));
          if (d < best) {
            best = d;
            Eigen::Vector3d normal;
            Eigen::Vector3d albedo;
            if (const auto* s = std::get_if<SphereGeom>(&prim)) {
              normal = (node - s->center).stableNormalized();
              if (normal.squaredNorm() < 0.5) normal = Eigen::Vector3d::UnitY();
              albedo = s->albedo;
            } else {
              const auto& b = std::get<BoxGeom>(prim);
              const Eigen::Vector3d center = 0.5 * (b.min + b.max);
              const Eigen::Vector3d rel =
                  (node - center).cwiseQuotient(0.5 * (b.max - b.min));
              int axis;
              rel.cwiseAbs().maxCoeff(&axis);
              normal = Eigen::Vector3d::Zero();
              normal(axis) = rel(axis) >= 0.0 ? 1.0 : -1.0;
              albedo = b.albedo;
            }
            const Eigen::Vector3d shaded = shade(albedo, normal);
            color = shaded.cwiseMax(1e-4).cwiseMin(1.0 - 1e-4);
          }
        }
        for (int ch = 0; ch < 3; ++ch) {
          const double v = color(ch);
          field.color_param(index, ch) = std::log(v / (1.0 - v));
        }
      }
  field.mark_params_changed();
}

std::pair<std::vector<PosedImage>, std::vector<PosedImage>> generate_views(
    const SyntheticScene& scene, const PosePath& path, int n_train, int n_test,
    int width, int height, int threads) {
  if (n_train < 1) throw ArgumentError("generate_views: need at least one train view");

  const bool closed = path.kind == PathKind::Ellipse;
  std::vector<double> train_u, test_u;
  if (closed) {
    for (int i = 0; i < n_train; ++i)
      train_u.push_back(static_cast<double>(i) / n_train);
  } else {
    for (int i = 0; i < n_train; ++i)
      train_u.push_back(n_train == 1 ? 0.5
                                     : static_cast<double>(i) / (n_train - 1));
  }
  const int max_mid = closed ? n_train : n_train - 1;
  if (n_test > max_mid)
    throw ArgumentError("generate_views: more test views than train midpoints");
  for (int i = 0; i < n_test; ++i)
    test_u.push_back(closed ? (i + 0.5) / n_train : (i + 0.5) / (n_train - 1));

  auto make = [&](double u) {
    const CameraPose pose = CameraPose::look_at(
        path.position_at(u), path.look_at_at(u), path.up, path.focal_px,
        path.principal_point, path.width, path.height);
    const CameraPose sized = resize_camera(pose, width, height);
    return PosedImage(render_gt(scene, sized, width, height, threads), sized);
  };

  std::vector<PosedImage> train, test;
  for (double u : train_u) train.push_back(make(u));
  for (double u : test_u) test.push_back(make(u));
  return {std::move(train), std::move(test)};
}

}  // namespace voxprior
