// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/diffusion.hpp"

#include <cmath>

#include "voxprior/image_ops.hpp"

namespace voxprior {

Eigen::VectorXd summarize_input(const Image& image) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(16);
  out.segment(0, 3) = image.data.leftCols(3).colwise().mean().transpose();
  for (int c = 0; c < 3; ++c) {
    const auto col = image.data.col(c).array();
    out(3 + c) = (col - col.mean()).square().mean();
  }
  const Image gm = gradient_magnitude(luminance(image));
  out(6) = gm.data.mean();
  // Gradient-energy histogram over [0, 0.5), last bin open-ended.
  constexpr int kBins = 9;
  for (Eigen::Index i = 0; i < gm.data.rows(); ++i) {
    int bin = static_cast<int>(gm.data(i, 0) / 0.5 * (kBins - 1));
    bin = std::min(std::max(bin, 0), kBins - 1);
    out(7 + bin) += 1.0;
  }
  out.segment(7, kBins) /= static_cast<double>(gm.data.rows());
  return out;
}

Image ddim_sample(const DenoiserFn& denoiser, const ConditioningBundle& cond,
                  Image z_t, double t, int k, double cfg_scale) {
  if (k < 1) throw ArgumentError("ddim_sample: k must be >= 1");
  if (!(t > 0.0) || t > 1.0) throw ArgumentError("ddim_sample: t must be in (0,1]");

  // k rungs uniformly spaced from t down toward a small floor; the floor
  // shrinks with t so the ladder stays strictly decreasing for any t.
  const double floor = std::min(1e-3, 0.5 * t);
  const double step = (t - floor) / k;

  for (int rung = 0; rung < k; ++rung) {
    const double t_cur = t - rung * step;
    const double t_next = rung + 1 == k ? 0.0 : t - (rung + 1) * step;
    const Image eps_uncond = denoiser(z_t, t_cur, nullptr);
    const Image eps_cond = denoiser(z_t, t_cur, &cond);
    const Image eps_hat = cfg_combine(eps_uncond, eps_cond, cfg_scale);
    z_t = ddim_step(z_t, t_cur, t_next, eps_hat);
  }
  return z_t;
}

double diffusion_loss(const DenoiserFn& denoiser, const ConditioningBundle* cond,
                      const Image& x, Rng& rng) {
  const double t = 1.0 - rng.uniform();  // (0,1]
  Image eps(x.width, x.height, x.channels());
  for (Eigen::Index i = 0; i < eps.data.size(); ++i) eps.data(i) = rng.normal();
  const Image z = add_noise(x, t, eps);
  const Image eps_hat = denoiser(z, t, cond);
  require_same_shape(eps, eps_hat, "diffusion_loss");
  return (eps.data - eps_hat.data).array().square().mean();
}

DenoiserFn make_oracle_denoiser(const SyntheticScene& scene,
                                const OracleConfig& config) {
  struct State {
    SyntheticScene scene;
    OracleConfig config;
    Rng rng;
    // The clean render depends only on the pose; cache the last one since a
    // sampling run queries the same pose k times.
    std::optional<CameraPose> cached_pose;
    Image cached_clean;
  };
  auto state = std::make_shared<State>(
      State{scene, config, Rng(hash_combine(config.seed, 0x0eac1e)), {}, {}});

  return [state](const Image& z_t, double t, const ConditioningBundle* cond) -> Image {
    const auto& cfg = state->config;
    Image target;
    if (cond == nullptr) {
      target = constant_image(z_t.width, z_t.height, Eigen::Vector3d::Constant(0.5));
    } else {
      if (!cond->target_pose)
        throw ArgumentError("oracle denoiser: conditioning bundle carries no pose");
      const CameraPose& pose = cond->target_pose.value();
      const bool hit = state->cached_pose &&
                       state->cached_pose->position == pose.position &&
                       state->cached_pose->rotation == pose.rotation &&
                       state->cached_pose->focal_px == pose.focal_px;
      if (!hit) {
        CameraPose scene_pose = pose;
        scene_pose.position = cfg.frame.invert(pose.position);
        Image clean = render_gt(state->scene, scene_pose, cfg.latent_width,
                                cfg.latent_height);
        if (cfg.blur_sigma > 0.0) clean = gaussian_blur(clean, cfg.blur_sigma);
        state->cached_pose = pose;
        state->cached_clean = std::move(clean);
      }
      target = state->cached_clean;
      if (cfg.noise_floor > 0.0) {
        for (Eigen::Index i = 0; i < target.data.size(); ++i)
          target.data(i) += cfg.noise_floor * state->rng.normal();
      }
    }
    if (target.width != z_t.width || target.height != z_t.height)
      throw ArgumentError("oracle denoiser: latent resolution mismatch");

    // The noise prediction consistent with `target` being the clean image.
    const double alpha = NoiseSchedule::alpha(t);
    const double sigma = std::max(NoiseSchedule::sigma(t), 1e-6);
    Image eps_hat = z_t;
    eps_hat.data = (z_t.data - alpha * target.data) / sigma;
    return eps_hat;
  };
}

}  // namespace voxprior
