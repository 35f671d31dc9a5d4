// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "voxprior/camera.hpp"
#include "voxprior/diffusion.hpp"
#include "voxprior/renderer.hpp"
#include "voxprior/rng.hpp"
#include "voxprior/schedule.hpp"
#include "voxprior/types.hpp"

namespace voxprior {

/// Training-time annealing: noise floor t_min falls linearly to 0 while the
/// sampled-target weight decays to 0.1 of its start value.
struct Schedules {
  int total_iters = 1000;
  double t_min_start = 1.0;
  double t_min_end = 0.0;
  double t_max = 1.0;
  double lambda_sample_start = 1.0;
  double lambda_sample_end = 0.1;
  double lambda_distortion = 0.01;
  bool use_perceptual = true;

  /// Noise-level weighting for sampled targets; sigma^2 downweights targets
  /// generated from barely noised (already grounded) renders.
  double w(double t) const {
    const double s = NoiseSchedule::sigma(t);
    return s * s;
  }
};

struct SchedulePoint {
  double t_min;
  double lambda_sample;
};

/// Linear interpolants; endpoints are exact.
SchedulePoint schedule_at(const Schedules& sched, int iter);

/// Smooth L1: mean of sqrt((a-b)^2 + eps^2) - eps, zero at equality.
double charbonnier(const Image& a, const Image& b, double eps = 1e-3);

/// d charbonnier / d a.
Image charbonnier_backward(const Image& a, const Image& b, double eps = 1e-3);

/// Pretrained-network-free perceptual distance: mean L1 between per-channel
/// gradient-magnitude maps at full, half and quarter resolution.
double perceptual_surrogate(const Image& a, const Image& b);

/// d perceptual_surrogate / d a.
Image perceptual_surrogate_backward(const Image& a, const Image& b);

/// w(t) * (mean L1 + perceptual surrogate). The sampled target is treated as
/// a constant; gradients flow into the rendering only.
double sample_loss(const Image& render, const Image& sample, double t,
                   const Schedules& sched);

/// d sample_loss / d render.
Image sample_loss_backward(const Image& render, const Image& sample, double t,
                           const Schedules& sched);

struct ReconLossResult {
  double value = 0.0;
  int view_index = 0;
  RenderOutput render;
};

/// Charbonnier reconstruction loss on one randomly drawn observation,
/// rendered in full at the config resolution. Forward only; pair with
/// recon_loss_backward.
ReconLossResult recon_loss(const VoxelField& field,
                           std::span<const PosedImage> observations,
                           const RenderConfig& config, Rng& rng);

/// Pushes the Charbonnier gradient of a recon_loss render into the field.
void recon_loss_backward(VoxelField& field, const ReconLossResult& result,
                         const PosedImage& observation);

/// Score-distillation gradient for the rendered image: noise the render,
/// query the denoiser once, and return w(t) * (eps_hat - eps) per element.
/// cfg_scale 1 uses the conditional prediction alone; larger scales apply
/// classifier-free guidance like the sampling path does.
Image sds_grad(const DenoiserFn& denoiser, const ConditioningBundle& cond,
               const Image& render, double t, const Schedules& sched, Rng& rng,
               double cfg_scale = 1.0);

}  // namespace voxprior
