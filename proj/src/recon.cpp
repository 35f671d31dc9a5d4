// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/recon.hpp"

#include <cmath>

#include "voxprior/image_ops.hpp"
#include "voxprior/metrics.hpp"

namespace voxprior {

void ReconConfig::validate() const {
  if (iters < 1) throw ArgumentError("recon: iters must be >= 1");
  if (k_ddim < 1) throw ArgumentError("recon: k_ddim must be >= 1");
  if (n_condition_views < 1)
    throw ArgumentError("recon: n_condition_views must be >= 1");
  if (latent_size < 2) throw ArgumentError("recon: latent_size too small");
  render.validate();
}

Metrics evaluate(const VoxelField& field, std::span<const PosedImage> heldout,
                 const RenderConfig& render_config) {
  if (heldout.empty())
    throw InsufficientDataError("evaluate: need at least one held-out view");
  Metrics metrics;
  for (const PosedImage& view : heldout) {
    RenderConfig cfg = render_config;
    cfg.width = view.image.width;
    cfg.height = view.image.height;
    cfg.jitter = false;
    const RenderOutput render = render_image(field, view.pose, cfg);
    metrics.per_view.push_back(
        {psnr(render.rgb, view.image), ssim(render.rgb, view.image)});
  }
  for (const ViewMetrics& m : metrics.per_view) {
    metrics.mean_psnr += m.psnr;
    metrics.mean_ssim += m.ssim;
  }
  metrics.mean_psnr /= static_cast<double>(metrics.per_view.size());
  metrics.mean_ssim /= static_cast<double>(metrics.per_view.size());
  return metrics;
}

namespace {

Image draw_normal_image(int width, int height, int channels, Rng& rng) {
  Image img(width, height, channels);
  for (Eigen::Index i = 0; i < img.data.size(); ++i) img.data(i) = rng.normal();
  return img;
}

}  // namespace

ReconReport reconstruct(VoxelField& field, std::span<const PosedImage> observations,
                        std::span<const PosedImage> heldout, const PosePath& path,
                        const ReconConfig& config, const DenoiserFn* denoiser) {
  config.validate();
  if (observations.empty())
    throw InsufficientDataError("reconstruct: need at least one observation");
  const int n_obs = static_cast<int>(observations.size());
  if (denoiser && config.n_condition_views > n_obs)
    throw ArgumentError("reconstruct: fewer observations than conditioning views");

  Rng rng(hash_combine(config.seed, 0x7ec0d5));
  AdamState adam_density, adam_color;

  // View features and summaries are fixed per run; compute once.
  std::vector<FeatureImage> all_features;
  std::vector<Eigen::VectorXd> all_summaries;
  if (denoiser) {
    for (const PosedImage& obs : observations) {
      all_features.push_back(encode_input(obs, config.epipolar.feature_channels));
      all_summaries.push_back(summarize_input(obs.image));
    }
  }

  EpipolarConfig epipolar = config.epipolar;
  epipolar.out_width = config.latent_size;
  epipolar.out_height = config.latent_size;
  epipolar.threads = config.threads;

  ReconReport report;
  report.iters.reserve(config.iters);

  for (int iter = 0; iter < config.iters; ++iter) {
    try {
      const SchedulePoint sched_pt = schedule_at(config.schedules, iter);
      double lambda_eff = sched_pt.lambda_sample;
      if (config.view_count_scaling) lambda_eff *= 3.0 / n_obs;

      IterRecord record{iter, 0.0, 0.0, 0.0, sched_pt.t_min, lambda_eff};

      // Reconstruction term on one observed view.
      RenderConfig recon_cfg = config.render;
      recon_cfg.seed = hash_combine(config.seed, hash_combine(iter, 0));
      recon_cfg.threads = config.threads;
      ReconLossResult recon = recon_loss(field, observations, recon_cfg, rng);
      record.recon = recon.value;
      recon_loss_backward(field, recon, observations[recon.view_index]);
      if (config.distortion_on != DistortionOn::Novel) {
        record.distortion += distortion_loss(recon.render.records);
        distortion_loss_backward(field, recon.render.records,
                                 config.schedules.lambda_distortion);
      }

      // Sampled-target term at a novel view.
      if (denoiser && lambda_eff > 0.0) {
        const CameraPose pose = sample_novel_pose(path, config.perturb, rng);

        RenderConfig novel_cfg = config.render;
        novel_cfg.seed = hash_combine(config.seed, hash_combine(iter, 1));
        novel_cfg.threads = config.threads;
        novel_cfg.width = config.render_then_downsample ? observations[0].image.width
                                                        : config.latent_size;
        novel_cfg.height = config.render_then_downsample
                               ? observations[0].image.height
                               : config.latent_size;
        const RenderOutput novel = render_image(field, pose, novel_cfg);
        const Image x = config.render_then_downsample
                            ? area_resample(novel.rgb, config.latent_size,
                                            config.latent_size)
                            : novel.rgb;

        const double t = 1.0 - rng.uniform() * (1.0 - sched_pt.t_min);
        const Image eps = draw_normal_image(x.width, x.height, 3, rng);
        const Image z_t = add_noise(x, t, eps);

        const std::vector<int> nearest =
            nearest_views(pose, observations, config.n_condition_views);
        std::vector<PosedImage> cond_inputs;
        std::vector<FeatureImage> cond_features;
        ConditioningBundle bundle;
        for (int idx : nearest) {
          cond_inputs.push_back(observations[idx]);
          cond_features.push_back(all_features[idx]);
          bundle.input_summaries.push_back(all_summaries[idx]);
        }
        bundle.features = epipolar_render(cond_inputs, cond_features, pose, epipolar);
        bundle.target_pose = pose;

        Image d_x(x.width, x.height, 3);
        if (config.mode == SampleMode::Sample) {
          const Image sample =
              ddim_sample(*denoiser, bundle, z_t, t, config.k_ddim, config.cfg_scale);
          record.sample = sample_loss(x, sample, t, config.schedules);
          d_x = sample_loss_backward(x, sample, t, config.schedules);
          d_x.data *= lambda_eff;
        } else {
          const Image g = sds_grad(*denoiser, bundle, x, t, config.schedules, rng,
                                   config.cfg_scale);
          record.sample = g.data.array().abs().mean();
          d_x = g;
          d_x.data *= lambda_eff / static_cast<double>(g.data.size());
        }

        if (config.render_then_downsample) {
          const Image d_full =
              area_resample_adjoint(d_x, novel_cfg.width, novel_cfg.height);
          render_backward(field, novel.records, d_full);
        } else {
          render_backward(field, novel.records, d_x);
        }
        if (config.distortion_on != DistortionOn::Recon) {
          record.distortion += distortion_loss(novel.records);
          distortion_loss_backward(field, novel.records,
                                   config.schedules.lambda_distortion);
        }
      }

      adam_density.step(field.density_param, field.density_grad, config.adam_density);
      Eigen::Map<Eigen::VectorXd> color_params(field.color_param.data(),
                                               field.color_param.size());
      Eigen::Map<const Eigen::VectorXd> color_grads(field.color_grad.data(),
                                                    field.color_grad.size());
      adam_color.step(color_params, color_grads, config.adam_color);
      field.mark_params_changed();
      field.zero_grads();

      report.iters.push_back(record);
    } catch (const std::exception& e) {
      throw Error("reconstruct: iteration " + std::to_string(iter) + ": " + e.what());
    }
  }

  if (!heldout.empty()) report.heldout = evaluate(field, heldout, config.render);
  return report;
}

}  // namespace voxprior
