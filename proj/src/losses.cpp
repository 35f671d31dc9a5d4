// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/losses.hpp"

#include <cmath>

#include "voxprior/image_ops.hpp"

namespace voxprior {

SchedulePoint schedule_at(const Schedules& sched, int iter) {
  if (iter < 0 || iter > sched.total_iters)
    throw BoundsError("schedule_at: iteration out of range");
  const double u = static_cast<double>(iter) / sched.total_iters;
  SchedulePoint p;
  p.t_min = (1.0 - u) * sched.t_min_start + u * sched.t_min_end;
  p.lambda_sample = (1.0 - u) * sched.lambda_sample_start + u * sched.lambda_sample_end;
  return p;
}

double charbonnier(const Image& a, const Image& b, double eps) {
  require_same_shape(a, b, "charbonnier");
  // sqrt(d^2 + eps^2) - eps, written so equal images give exactly zero.
  const auto d2 = (a.data - b.data).array().square();
  return (d2 / ((d2 + eps * eps).sqrt() + eps)).mean();
}

Image charbonnier_backward(const Image& a, const Image& b, double eps) {
  require_same_shape(a, b, "charbonnier_backward");
  Image out = a;
  const auto diff = (a.data - b.data).array();
  out.data = (diff / (diff.square() + eps * eps).sqrt()).matrix() /
             static_cast<double>(a.data.size());
  return out;
}

namespace {
constexpr int kPerceptualScales = 3;

struct ScaleSize {
  int width, height;
};

ScaleSize scale_size(const Image& img, int scale) {
  return {std::max(1, img.width >> scale), std::max(1, img.height >> scale)};
}
}  // namespace

double perceptual_surrogate(const Image& a, const Image& b) {
  require_same_shape(a, b, "perceptual_surrogate");
  double total = 0.0;
  for (int s = 0; s < kPerceptualScales; ++s) {
    const ScaleSize sz = scale_size(a, s);
    const Image ga = gradient_magnitude(area_resample(a, sz.width, sz.height));
    const Image gb = gradient_magnitude(area_resample(b, sz.width, sz.height));
    total += (ga.data - gb.data).array().abs().mean();
  }
  return total / kPerceptualScales;
}

Image perceptual_surrogate_backward(const Image& a, const Image& b) {
  require_same_shape(a, b, "perceptual_surrogate_backward");
  Image out(a.width, a.height, a.channels());
  out.data.setZero();
  for (int s = 0; s < kPerceptualScales; ++s) {
    const ScaleSize sz = scale_size(a, s);
    const Image a_s = area_resample(a, sz.width, sz.height);
    const Image b_s = area_resample(b, sz.width, sz.height);
    const Image ga = gradient_magnitude(a_s);
    const Image gb = gradient_magnitude(b_s);

    Image d_gm = ga;
    d_gm.data = (ga.data - gb.data).array().sign().matrix() /
                (static_cast<double>(ga.data.size()) * kPerceptualScales);
    const Image d_scaled = gradient_magnitude_backward(a_s, d_gm);
    out.data += area_resample_adjoint(d_scaled, a.width, a.height).data;
  }
  return out;
}

double sample_loss(const Image& render, const Image& sample, double t,
                   const Schedules& sched) {
  require_same_shape(render, sample, "sample_loss");
  if (t < 0.0 || t > 1.0) throw ArgumentError("sample_loss: t must be in [0,1]");
  const double l1 = (render.data - sample.data).array().abs().mean();
  const double perc = sched.use_perceptual ? perceptual_surrogate(render, sample) : 0.0;
  return sched.w(t) * (l1 + perc);
}

Image sample_loss_backward(const Image& render, const Image& sample, double t,
                           const Schedules& sched) {
  require_same_shape(render, sample, "sample_loss_backward");
  if (t < 0.0 || t > 1.0) throw ArgumentError("sample_loss_backward: t must be in [0,1]");
  Image out = render;
  out.data = (render.data - sample.data).array().sign().matrix() /
             static_cast<double>(render.data.size());
  if (sched.use_perceptual)
    out.data += perceptual_surrogate_backward(render, sample).data;
  out.data *= sched.w(t);
  return out;
}

ReconLossResult recon_loss(const VoxelField& field,
                           std::span<const PosedImage> observations,
                           const RenderConfig& config, Rng& rng) {
  if (observations.empty())
    throw InsufficientDataError("recon_loss: need at least one observation");
  ReconLossResult result;
  result.view_index = static_cast<int>(rng.integer(observations.size()));
  const PosedImage& obs = observations[result.view_index];

  RenderConfig cfg = config;
  cfg.width = obs.image.width;
  cfg.height = obs.image.height;
  result.render = render_image(field, obs.pose, cfg);
  result.value = charbonnier(result.render.rgb, obs.image);
  return result;
}

void recon_loss_backward(VoxelField& field, const ReconLossResult& result,
                         const PosedImage& observation) {
  const Image d_rgb = charbonnier_backward(result.render.rgb, observation.image);
  render_backward(field, result.render.records, d_rgb);
}

Image sds_grad(const DenoiserFn& denoiser, const ConditioningBundle& cond,
               const Image& render, double t, const Schedules& sched, Rng& rng,
               double cfg_scale) {
  if (!(t > 0.0) || t > 1.0) throw ArgumentError("sds_grad: t must be in (0,1]");
  Image eps(render.width, render.height, render.channels());
  for (Eigen::Index i = 0; i < eps.data.size(); ++i) eps.data(i) = rng.normal();
  const Image z = add_noise(render, t, eps);

  Image eps_hat = denoiser(z, t, &cond);
  if (cfg_scale != 1.0)
    eps_hat = cfg_combine(denoiser(z, t, nullptr), eps_hat, cfg_scale);
  require_same_shape(eps_hat, render, "sds_grad");

  Image out = render;
  out.data = sched.w(t) * (eps_hat.data - eps.data);
  return out;
}

}  // namespace voxprior
