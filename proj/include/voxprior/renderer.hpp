// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "voxprior/camera.hpp"
#include "voxprior/types.hpp"
#include "voxprior/voxel_field.hpp"

namespace voxprior {

enum class Spacing {
  Uniform,
  // Uniform up to distance 1, then linear in disparity out to far.
  UniformThenDisparity,
};

/// Maps a normalized ray coordinate s in [0,1] to a distance t in [near,far].
/// Monotone and continuous; the distortion regularizer works in s-space.
double spacing_to_distance(Spacing spacing, double near, double far, double s);

struct RenderConfig {
  int width = 64;
  int height = 64;
  double near = 0.5;
  double far = 4.0;
  int n_samples = 64;
  Spacing spacing = Spacing::Uniform;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();
  bool jitter = true;   // stratified jitter inside each bin; midpoints when off
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

/// Everything the backward pass needs, flat SoA over rays x samples.
struct RenderRecords {
  int n_rays = 0;
  int n_samples = 0;
  double near = 0.5, far = 4.0;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> origins;     // per ray
  std::vector<Eigen::Vector3d> directions;  // per ray
  std::vector<double> t_mid;                // per sample
  std::vector<double> s_mid;                // normalized coordinate of the sample
  std::vector<double> delta;                // bin width in t
  std::vector<double> s_delta;              // bin width in s
  std::vector<double> trans;                // exp(-sigma*delta), = 1 - alpha
  std::vector<double> big_t;                // transmittance before the sample
  std::vector<double> weight;               // big_t * alpha
  std::vector<Eigen::Vector3d> rgb;         // activated sample colors
  std::uint64_t field_version = 0;

  Eigen::Index flat(int ray, int sample) const {
    return static_cast<Eigen::Index>(ray) * n_samples + sample;
  }
};

struct RayRender {
  Eigen::Vector3d rgb = Eigen::Vector3d::Zero();
  double depth = 0.0;
  double accumulation = 0.0;
};

struct RenderOutput {
  Image rgb;                 // H x W x 3 in [0,1]
  Image depth;               // H x W x 1, expected termination distance
  Image accumulation;        // H x W x 1 opacity
  RenderRecords records;
};

/// Emission-absorption quadrature along one ray. Jitter values (one per
/// sample, in [0,1)) select the position inside each bin; pass nullptr for
/// midpoints. When records is given, the ray's samples are appended at
/// ray_index.
RayRender render_ray(const VoxelField& field, const Ray& ray, double near,
                     double far, int n_samples, Spacing spacing,
                     const Eigen::Vector3d& background,
                     const double* jitter = nullptr, RenderRecords* records = nullptr,
                     int ray_index = 0);

/// Renders every pixel of the camera at the config resolution. Deterministic:
/// jitter streams are derived from (seed, pixel, sample) counters.
RenderOutput render_image(const VoxelField& field, const CameraPose& pose,
                          const RenderConfig& config);

/// Analytic adjoint of the quadrature (suffix accumulation through the
/// transmittance product), scattered into the field's grad buffers.
void render_backward(VoxelField& field, const RenderRecords& records,
                     const Image& d_rgb, const Image* d_depth = nullptr);

/// Interval concentration penalty in normalized ray coordinates:
/// sum_ij w_i w_j |s_i - s_j| + (1/3) sum_i w_i^2 ds_i, averaged over rays.
double distortion_loss(const RenderRecords& records);

/// Gradient of upstream * distortion_loss into the field.
void distortion_loss_backward(VoxelField& field, const RenderRecords& records,
                              double upstream);

}  // namespace voxprior
