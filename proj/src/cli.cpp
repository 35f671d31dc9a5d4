// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "voxprior/geometry.hpp"
#include "voxprior/image_io.hpp"
#include "voxprior/image_ops.hpp"
#include "voxprior/parallel.hpp"
#include "voxprior/recon.hpp"
#include "voxprior/serialize.hpp"

namespace voxprior::cli {

namespace {

namespace fs = std::filesystem;

PosePath canonical_rig(int width, int height) {
  // Tilted ring around the scene: radius 2, lifted 0.8 against world -y
  // (the up direction under the y-down camera convention), aimed at the
  // origin. Roughly 55 degrees field of view.
  PosePath path;
  path.kind = PathKind::Ellipse;
  path.center = Eigen::Vector3d(0.0, -0.8, 0.0);
  path.axis_u = Eigen::Vector3d(2.0, 0.0, 0.0);
  path.axis_v = Eigen::Vector3d(0.0, 0.0, 2.0);
  path.look_at = Eigen::Vector3d::Zero();
  path.up = Eigen::Vector3d(0.0, -1.0, 0.0);
  path.focal_px = 0.7 * width;
  path.principal_point = Eigen::Vector2d(width / 2.0, height / 2.0);
  path.width = width;
  path.height = height;
  return path;
}

RunConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return RunConfig{};
  return run_config_from_json(load_json_file(config_path));
}

PosePath fit_path(PathKind kind, std::span<const CameraPose> poses) {
  if (kind == PathKind::Ellipse)
    return fit_ellipse_path(poses, focus_point(poses));
  return fit_bspline_path(poses);
}

std::optional<DenoiserFn> build_prior(const RunConfig& config,
                                      const SyntheticScene& scene,
                                      const RescaleResult& frame) {
  if (config.prior == PriorKind::None) return std::nullopt;
  OracleConfig oracle;
  oracle.blur_sigma = config.oracle_blur_sigma;
  oracle.noise_floor =
      config.prior == PriorKind::OracleNoisy ? config.oracle_noise_floor : 0.0;
  oracle.seed = config.seed;
  oracle.latent_width = config.latent_size;
  oracle.latent_height = config.latent_size;
  oracle.frame = frame;
  oracle.frame.poses.clear();
  return make_oracle_denoiser(scene, oracle);
}

Json metrics_to_json(const Metrics& metrics) {
  Json per_view = Json::array();
  for (const ViewMetrics& m : metrics.per_view)
    per_view.push_back(Json{{"psnr", m.psnr}, {"ssim", m.ssim}});
  return Json{{"per_view", per_view},
              {"mean_psnr", metrics.mean_psnr},
              {"mean_ssim", metrics.mean_ssim}};
}

int cmd_make_scene(const std::string& spec_path, const std::string& out_dir,
                   int threads) {
  const SceneDatasetSpec spec = dataset_spec_from_json(load_json_file(spec_path));
  Dataset dataset;
  dataset.scene = make_scene({spec.n_primitives, spec.seed});
  dataset.width = spec.width;
  dataset.height = spec.height;
  const PosePath rig = canonical_rig(spec.width, spec.height);
  std::tie(dataset.train, dataset.test) =
      generate_views(dataset.scene, rig, spec.n_train, spec.n_test, spec.width,
                     spec.height, resolve_threads(threads));
  save_dataset(out_dir, dataset);
  std::cout << "wrote " << dataset.train.size() << " train and "
            << dataset.test.size() << " test views to " << out_dir << "\n";
  return 0;
}

int cmd_fit(const std::string& dataset_dir, const RunConfig& config,
            const std::string& out_dir) {
  const Dataset dataset = load_dataset(dataset_dir);

  std::vector<CameraPose> train_poses;
  for (const PosedImage& view : dataset.train) train_poses.push_back(view.pose);
  const RescaleResult rescale = rescale_scene(train_poses);

  std::vector<PosedImage> observations, heldout;
  for (size_t i = 0; i < dataset.train.size(); ++i)
    observations.emplace_back(dataset.train[i].image, rescale.poses[i]);
  const std::vector<CameraPose> test_poses = apply_rescale(
      rescale, [&] {
        std::vector<CameraPose> poses;
        for (const PosedImage& view : dataset.test) poses.push_back(view.pose);
        return poses;
      }());
  for (size_t i = 0; i < dataset.test.size(); ++i)
    heldout.emplace_back(dataset.test[i].image, test_poses[i]);

  const PosePath path = fit_path(config.path_kind, rescale.poses);
  const auto denoiser = build_prior(config, dataset.scene, rescale);

  VoxelField field = VoxelField::make_default(config.grid_resolution);
  const ReconConfig recon_config = config.to_recon_config();
  const ReconReport report = reconstruct(field, observations, heldout, path,
                                         recon_config,
                                         denoiser ? &*denoiser : nullptr);

  fs::create_directories(out_dir);
  field.save(out_dir + "/checkpoint.voxf");
  save_json_file(out_dir + "/config.json", run_config_to_json(config));
  save_json_file(out_dir + "/path.json", path_to_json(path));

  Json poses_json = Json::array();
  for (const CameraPose& pose : rescale.poses) poses_json.push_back(pose_to_json(pose));
  save_json_file(out_dir + "/poses_rescaled.json", poses_json);

  {
    std::ofstream log(out_dir + "/losses.jsonl");
    if (!log) throw IoError("cannot open loss log for writing");
    for (const IterRecord& r : report.iters)
      log << Json{{"iter", r.iter},
                  {"recon", r.recon},
                  {"sample", r.sample},
                  {"distortion", r.distortion},
                  {"t_min", r.t_min},
                  {"lambda_sample", r.lambda_sample}}
                 .dump()
          << "\n";
  }

  save_json_file(out_dir + "/report.json",
                 Json{{"schema_version", 1},
                      {"iters", config.iters},
                      {"checkpoint", "checkpoint.voxf"},
                      {"heldout", metrics_to_json(report.heldout)}});
  std::cout << "held-out mean psnr " << report.heldout.mean_psnr << " dB, ssim "
            << report.heldout.mean_ssim << "\n";
  return 0;
}

int cmd_render(const std::string& checkpoint, const std::string& poses_path,
               const std::string& out_dir, bool depth, const RunConfig& config) {
  const VoxelField field = VoxelField::load(checkpoint);
  const Json poses_json = load_json_file(poses_path);
  if (!poses_json.is_array()) throw ArgumentError("render: poses file must be an array");

  fs::create_directories(out_dir);
  RenderConfig rc;
  rc.near = config.near;
  rc.far = config.far;
  rc.n_samples = config.n_samples;
  rc.spacing = config.spacing;
  rc.background = config.background;
  rc.jitter = false;
  rc.threads = resolve_threads(config.threads);

  int index = 0;
  for (const auto& entry : poses_json) {
    const CameraPose pose = pose_from_json(entry);
    rc.width = pose.width;
    rc.height = pose.height;
    const RenderOutput render = render_image(field, pose, rc);
    char name[64];
    std::snprintf(name, sizeof(name), "render_%03d.png", index);
    write_png(out_dir + "/" + name, render.rgb);
    if (depth) {
      std::snprintf(name, sizeof(name), "depth_%03d.pfm", index);
      write_pfm(out_dir + "/" + name, render.depth);
    }
    ++index;
  }
  std::cout << "rendered " << index << " poses to " << out_dir << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& dataset_dir,
             const std::string& split, const std::string& out_path,
             const RunConfig& config) {
  const VoxelField field = VoxelField::load(checkpoint);
  const Dataset dataset = load_dataset(dataset_dir);

  std::vector<CameraPose> train_poses;
  for (const PosedImage& view : dataset.train) train_poses.push_back(view.pose);
  const RescaleResult rescale = rescale_scene(train_poses);

  const std::vector<PosedImage>& source =
      split == "train" ? dataset.train : dataset.test;
  std::vector<PosedImage> views;
  for (const PosedImage& view : source) {
    CameraPose pose = view.pose;
    pose.position = rescale.apply(pose.position);
    views.emplace_back(view.image, pose);
  }

  RenderConfig rc;
  rc.near = config.near;
  rc.far = config.far;
  rc.n_samples = config.n_samples;
  rc.spacing = config.spacing;
  rc.background = config.background;
  rc.threads = resolve_threads(config.threads);
  const Metrics metrics = evaluate(field, views, rc);

  Json out = metrics_to_json(metrics);
  out["split"] = split;
  save_json_file(out_path, out);
  std::cout << split << " mean psnr " << metrics.mean_psnr << " dB, ssim "
            << metrics.mean_ssim << "\n";
  return 0;
}

int cmd_sample_poses(const std::string& poses_path, const std::string& path_kind,
                     int n, std::uint64_t seed, const std::string& out_path,
                     const PerturbSpec& perturb) {
  const Json poses_json = load_json_file(poses_path);
  if (!poses_json.is_array() || poses_json.empty())
    throw ArgumentError("sample-poses: poses file must be a non-empty array");
  std::vector<CameraPose> poses;
  for (const auto& entry : poses_json) poses.push_back(pose_from_json(entry));

  const PathKind kind = path_kind == "bspline" ? PathKind::Bspline : PathKind::Ellipse;
  const PosePath path = fit_path(kind, poses);

  Rng rng(seed);
  Json out = Json::array();
  for (int i = 0; i < n; ++i)
    out.push_back(pose_to_json(sample_novel_pose(path, perturb, rng)));
  save_json_file(out_path, out);
  std::cout << "sampled " << n << " poses to " << out_path << "\n";
  return 0;
}

int cmd_ddim_demo(const std::string& dataset_dir, int pose_index, double t, int k,
                  double cfg_scale, const RunConfig& config,
                  const std::string& out_dir) {
  const Dataset dataset = load_dataset(dataset_dir);
  if (pose_index < 0 || pose_index >= static_cast<int>(dataset.test.size()))
    throw BoundsError("ddim-demo: pose index out of range");

  std::vector<CameraPose> train_poses;
  for (const PosedImage& view : dataset.train) train_poses.push_back(view.pose);
  const RescaleResult rescale = rescale_scene(train_poses);

  std::vector<PosedImage> observations;
  for (size_t i = 0; i < dataset.train.size(); ++i)
    observations.emplace_back(dataset.train[i].image, rescale.poses[i]);

  CameraPose target = dataset.test[pose_index].pose;
  target.position = rescale.apply(target.position);

  RunConfig cfg = config;
  if (cfg.prior == PriorKind::None) cfg.prior = PriorKind::Oracle;
  const auto denoiser = build_prior(cfg, dataset.scene, rescale);

  // The clean image this demo grounds the sampler in: the held-out view at
  // latent resolution.
  const Image base = area_resample(dataset.test[pose_index].image, cfg.latent_size,
                                   cfg.latent_size);

  Rng rng(cfg.seed);
  Image eps(base.width, base.height, 3);
  for (Eigen::Index i = 0; i < eps.data.size(); ++i) eps.data(i) = rng.normal();
  const Image z_t = add_noise(base, t, eps);

  const ReconConfig recon_config = cfg.to_recon_config();
  EpipolarConfig epipolar = recon_config.epipolar;
  epipolar.out_width = cfg.latent_size;
  epipolar.out_height = cfg.latent_size;
  epipolar.threads = resolve_threads(cfg.threads);

  const std::vector<int> nearest = nearest_views(
      target, observations, std::min<int>(cfg.n_condition_views,
                                          static_cast<int>(observations.size())));
  std::vector<PosedImage> cond_inputs;
  std::vector<FeatureImage> cond_features;
  ConditioningBundle bundle;
  for (int idx : nearest) {
    cond_inputs.push_back(observations[idx]);
    cond_features.push_back(encode_input(observations[idx], epipolar.feature_channels));
    bundle.input_summaries.push_back(summarize_input(observations[idx].image));
  }
  bundle.features = epipolar_render(cond_inputs, cond_features, target, epipolar);
  bundle.target_pose = target;

  const Image sample = ddim_sample(*denoiser, bundle, z_t, t, k, cfg_scale);

  fs::create_directories(out_dir);
  write_png(out_dir + "/target.png", base);
  write_png(out_dir + "/noisy.png", clamp01(z_t));
  write_png(out_dir + "/sample.png", clamp01(sample));
  write_png(out_dir + "/conditioning_rgb.png", rgb_channels(bundle.features));
  std::cout << "wrote sample for test view " << pose_index << " at t=" << t
            << ", k=" << k << " to " << out_dir << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Few-view voxel radiance reconstruction with pluggable novel-view priors"};
  app.require_subcommand(1);

  std::string spec_path, dataset_dir, config_path, out_path, checkpoint, poses_path;
  std::string split = "test";
  std::string prior_flag, mode_flag, path_kind = "ellipse";
  int pose_index = 0, k = 10, n = 8;
  double t = 0.8;
  double demo_cfg_scale = 1.0;
  bool depth = false;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> iters_flag, threads_flag;

  auto* make_scene_cmd =
      app.add_subcommand("make-scene", "Generate a synthetic scene and dataset");
  make_scene_cmd->add_option("--spec", spec_path, "Scene spec JSON")->required();
  make_scene_cmd->add_option("--threads", threads_flag, "Worker threads (0 = hardware)");
  make_scene_cmd->add_option("--out", out_path, "Output dataset directory")->required();

  auto* fit_cmd = app.add_subcommand("fit", "Optimize a voxel field against a dataset");
  fit_cmd->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  fit_cmd->add_option("--config", config_path, "Run config JSON (defaults when omitted)");
  fit_cmd->add_option("--prior", prior_flag, "none | oracle | oracle-noisy");
  fit_cmd->add_option("--mode", mode_flag, "sample | sds");
  fit_cmd->add_option("--seed", seed_flag, "Override config seed");
  fit_cmd->add_option("--iters", iters_flag, "Override iteration count");
  fit_cmd->add_option("--threads", threads_flag, "Worker threads (0 = hardware)");
  fit_cmd->add_option("--out", out_path, "Output directory")->required();

  auto* render_cmd = app.add_subcommand("render", "Render a checkpoint at given poses");
  render_cmd->add_option("--checkpoint", checkpoint, "VOXF1 checkpoint")->required();
  render_cmd->add_option("--poses", poses_path, "JSON array of poses")->required();
  render_cmd->add_option("--config", config_path, "Run config JSON");
  render_cmd->add_flag("--depth", depth, "Also write PFM depth maps");
  render_cmd->add_option("--threads", threads_flag, "Worker threads");
  render_cmd->add_option("--out", out_path, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  eval_cmd->add_option("--checkpoint", checkpoint, "VOXF1 checkpoint")->required();
  eval_cmd->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  eval_cmd->add_option("--split", split, "test | train")
      ->check(CLI::IsMember({"test", "train"}));
  eval_cmd->add_option("--config", config_path, "Run config JSON");
  eval_cmd->add_option("--threads", threads_flag, "Worker threads");
  eval_cmd->add_option("--out", out_path, "Metrics JSON path")->required();

  auto* sample_cmd = app.add_subcommand("sample-poses", "Fit a path and sample novel poses");
  sample_cmd->add_option("--poses", poses_path, "JSON array of poses")->required();
  sample_cmd->add_option("--config", config_path, "Run config JSON (perturbation ranges)");
  sample_cmd->add_option("--path-kind", path_kind, "ellipse | bspline")
      ->check(CLI::IsMember({"ellipse", "bspline"}));
  sample_cmd->add_option("--n", n, "Number of poses to sample");
  sample_cmd->add_option("--seed", seed_flag, "Sampling seed");
  sample_cmd->add_option("--out", out_path, "Output JSON path")->required();

  auto* demo_cmd = app.add_subcommand("ddim-demo", "Sample one novel view with the prior");
  demo_cmd->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  demo_cmd->add_option("--pose-index", pose_index, "Test view index");
  demo_cmd->add_option("--t", t, "Starting noise level in (0,1]");
  demo_cmd->add_option("--k", k, "Sampling steps");
  demo_cmd->add_option("--cfg-scale", demo_cfg_scale,
                       "Guidance scale (1 = conditional prediction only)");
  demo_cmd->add_option("--config", config_path, "Run config JSON");
  demo_cmd->add_option("--prior", prior_flag, "oracle | oracle-noisy");
  demo_cmd->add_option("--seed", seed_flag, "Noise seed");
  demo_cmd->add_option("--threads", threads_flag, "Worker threads (0 = hardware)");
  demo_cmd->add_option("--out", out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = load_config(config_path);
    if (!prior_flag.empty()) {
      if (prior_flag == "none")
        config.prior = PriorKind::None;
      else if (prior_flag == "oracle")
        config.prior = PriorKind::Oracle;
      else if (prior_flag == "oracle-noisy")
        config.prior = PriorKind::OracleNoisy;
      else
        throw ArgumentError("unknown prior '" + prior_flag + "'");
    }
    if (!mode_flag.empty()) {
      if (mode_flag == "sample")
        config.mode = SampleMode::Sample;
      else if (mode_flag == "sds")
        config.mode = SampleMode::Sds;
      else
        throw ArgumentError("unknown mode '" + mode_flag + "'");
    }
    if (seed_flag) config.seed = *seed_flag;
    if (iters_flag) config.iters = *iters_flag;
    if (threads_flag) config.threads = *threads_flag;

    if (make_scene_cmd->parsed())
      return cmd_make_scene(spec_path, out_path, config.threads);
    if (fit_cmd->parsed()) return cmd_fit(dataset_dir, config, out_path);
    if (render_cmd->parsed())
      return cmd_render(checkpoint, poses_path, out_path, depth, config);
    if (eval_cmd->parsed())
      return cmd_eval(checkpoint, dataset_dir, split, out_path, config);
    if (sample_cmd->parsed())
      return cmd_sample_poses(poses_path, path_kind, n, seed_flag.value_or(0),
                              out_path, config.perturb);
    if (demo_cmd->parsed())
      return cmd_ddim_demo(dataset_dir, pose_index, t, k, demo_cfg_scale, config,
                           out_path);
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace voxprior::cli
