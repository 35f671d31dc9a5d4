// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "voxprior/recon.hpp"

namespace voxprior {

enum class PriorKind { None, Oracle, OracleNoisy };

/// One flat configuration record for the CLI; every field has a default and
/// serializes to/from a single JSON file with a schema-version gate and
/// unknown-key rejection.
struct RunConfig {
  std::uint64_t seed = 0;
  int iters = 1000;
  int grid_resolution = 64;

  double near = 0.5;
  double far = 4.0;
  int n_samples = 64;
  Spacing spacing = Spacing::Uniform;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();

  int latent_size = 64;
  int k_ddim = 10;
  double cfg_scale = 3.0;
  int n_condition_views = 3;

  double lambda_sample_start = 1.0;
  double lambda_sample_end = 0.1;
  double t_min_start = 1.0;
  double t_min_end = 0.0;
  double lambda_distortion = 0.01;
  bool use_perceptual = true;

  double lr_density = 0.05;
  double lr_color = 0.05;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.99;
  double adam_eps = 1e-8;

  int feature_channels = 16;
  int pe_frequencies = 6;
  int epipolar_depth_samples = 128;
  double epipolar_beta = 10.0;

  PathKind path_kind = PathKind::Ellipse;
  PerturbSpec perturb;

  PriorKind prior = PriorKind::None;
  double oracle_blur_sigma = 0.0;
  double oracle_noise_floor = 0.1;  // used by the oracle-noisy prior

  SampleMode mode = SampleMode::Sample;
  bool view_count_scaling = false;
  DistortionOn distortion_on = DistortionOn::Both;
  bool render_then_downsample = false;
  int threads = 0;  // 0 = hardware parallelism

  ReconConfig to_recon_config() const;
};

}  // namespace voxprior
