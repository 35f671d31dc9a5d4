// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/run_config.hpp"

#include "voxprior/parallel.hpp"

namespace voxprior {

ReconConfig RunConfig::to_recon_config() const {
  ReconConfig rc;
  rc.iters = iters;
  rc.adam_density = {lr_density, adam_beta1, adam_beta2, adam_eps};
  rc.adam_color = {lr_color, adam_beta1, adam_beta2, adam_eps};
  rc.k_ddim = k_ddim;
  rc.cfg_scale = cfg_scale;
  rc.n_condition_views = n_condition_views;

  rc.schedules.total_iters = iters;
  rc.schedules.t_min_start = t_min_start;
  rc.schedules.t_min_end = t_min_end;
  rc.schedules.lambda_sample_start = lambda_sample_start;
  rc.schedules.lambda_sample_end = lambda_sample_end;
  rc.schedules.lambda_distortion = lambda_distortion;
  rc.schedules.use_perceptual = use_perceptual;

  rc.render.near = near;
  rc.render.far = far;
  rc.render.n_samples = n_samples;
  rc.render.spacing = spacing;
  rc.render.background = background;
  rc.render.jitter = true;
  rc.render.seed = seed;

  rc.latent_size = latent_size;
  rc.perturb = perturb;
  rc.seed = seed;
  rc.mode = mode;
  rc.view_count_scaling = view_count_scaling;
  rc.distortion_on = distortion_on;
  rc.render_then_downsample = render_then_downsample;

  // The conditioning renderer always marches from depth 0.5.
  rc.epipolar.near = 0.5;
  rc.epipolar.far = far;
  rc.epipolar.spacing = Spacing::UniformThenDisparity;
  rc.epipolar.n_depth = epipolar_depth_samples;
  rc.epipolar.beta = epipolar_beta;
  rc.epipolar.feature_channels = feature_channels;
  rc.epipolar.pe_frequencies = pe_frequencies;

  rc.threads = resolve_threads(threads);
  return rc;
}

}  // namespace voxprior
