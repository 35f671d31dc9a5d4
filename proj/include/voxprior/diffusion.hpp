// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "voxprior/camera.hpp"
#include "voxprior/geometry.hpp"
#include "voxprior/rng.hpp"
#include "voxprior/scenes.hpp"
#include "voxprior/schedule.hpp"
#include "voxprior/types.hpp"

namespace voxprior {

/// Everything a denoiser may condition on: the target-view conditioning
/// render, per-input summary embeddings, and the target pose itself.
struct ConditioningBundle {
  FeatureImage features;
  std::vector<Eigen::VectorXd> input_summaries;
  std::optional<CameraPose> target_pose;
};

/// Noise-prediction contract: maps (z_t, t, conditioning) to an estimate of
/// the noise in z_t, same shape as the input. A null conditioning pointer
/// requests the unconditional prediction.
using DenoiserFn =
    std::function<Image(const Image& z_t, double t, const ConditioningBundle*)>;

/// Fixed-length per-input embedding standing in for a learned image
/// embedding: channel means, channel variances, mean gradient magnitude and a
/// gradient-energy histogram (16 entries total).
Eigen::VectorXd summarize_input(const Image& image);

/// Deterministic multistep sampling from noise level t down to a clean
/// estimate: k uniformly spaced rungs above a small floor, classifier-free
/// guidance at every rung, final rung steps to t=0.
Image ddim_sample(const DenoiserFn& denoiser, const ConditioningBundle& cond,
                  Image z_t, double t, int k, double cfg_scale);

/// Diagnostic denoising objective: draw t and noise, corrupt x, and score the
/// prediction error per element.
double diffusion_loss(const DenoiserFn& denoiser, const ConditioningBundle* cond,
                      const Image& x, Rng& rng);

struct OracleConfig {
  double blur_sigma = 0.0;   // softens the prior's knowledge of the scene
  double noise_floor = 0.0;  // per-call corruption, simulating an imperfect prior
  std::uint64_t seed = 0;
  int latent_width = 64;
  int latent_height = 64;
  // Maps poses from the reconstruction frame back into scene coordinates
  // when the rig was rescaled.
  RescaleResult frame;
};

/// Test prior with full knowledge of the scene: predicts noise consistent
/// with the ground-truth render at the bundle's target pose (optionally
/// blurred and corrupted). Unconditional queries predict noise toward a
/// mid-gray image.
DenoiserFn make_oracle_denoiser(const SyntheticScene& scene, const OracleConfig& config);

}  // namespace voxprior
