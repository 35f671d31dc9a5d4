// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "voxprior/adam.hpp"
#include "voxprior/conditioning.hpp"
#include "voxprior/diffusion.hpp"
#include "voxprior/losses.hpp"
#include "voxprior/pose_path.hpp"
#include "voxprior/renderer.hpp"
#include "voxprior/voxel_field.hpp"

namespace voxprior {

enum class SampleMode { Sample, Sds };
enum class DistortionOn { Recon, Novel, Both };

struct ReconConfig {
  int iters = 1000;
  AdamConfig adam_density;  // lr 0.05
  AdamConfig adam_color;    // lr 0.05
  int k_ddim = 10;
  double cfg_scale = 3.0;
  int n_condition_views = 3;
  Schedules schedules;
  RenderConfig render;  // resolution fields follow each view's image size
  int latent_size = 64;
  PerturbSpec perturb;
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::Sample;
  // Scales the sampled-target weight by 3/N_views, for capture-density sweeps.
  bool view_count_scaling = false;
  DistortionOn distortion_on = DistortionOn::Both;
  // Render novel views at observation resolution and downsample, instead of
  // rendering at latent resolution directly.
  bool render_then_downsample = false;
  EpipolarConfig epipolar;
  int threads = 1;

  void validate() const;
};

struct IterRecord {
  int iter;
  double recon;
  double sample;
  double distortion;
  double t_min;
  double lambda_sample;
};

struct ViewMetrics {
  double psnr;
  double ssim;
};

struct Metrics {
  std::vector<ViewMetrics> per_view;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
};

struct ReconReport {
  std::vector<IterRecord> iters;
  Metrics heldout;
};

/// PSNR/SSIM of deterministic (jitter-free) renders against held-out views.
Metrics evaluate(const VoxelField& field, std::span<const PosedImage> heldout,
                 const RenderConfig& render_config);

/// The full optimization loop. Each iteration fits one observed view with the
/// reconstruction loss, then (when a denoiser is present and the target
/// weight is nonzero) renders a sampled novel view, noises it, generates a
/// target with multistep sampling under classifier-free guidance, and applies
/// the image-space sample loss; distortion regularization and an
/// adaptive-moment update close the step. Poses must already be rescaled.
ReconReport reconstruct(VoxelField& field, std::span<const PosedImage> observations,
                        std::span<const PosedImage> heldout, const PosePath& path,
                        const ReconConfig& config, const DenoiserFn* denoiser);

}  // namespace voxprior
