// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any gated check fails. Long-running
// reconstruction arms are driven through the installed CLI binary and shared
// between criteria within one invocation.
//
// Usage: acceptance [--criterion N[,M...]] [--workdir PATH]

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "voxprior/conditioning.hpp"
#include "voxprior/diffusion.hpp"
#include "voxprior/geometry.hpp"
#include "voxprior/image_ops.hpp"
#include "voxprior/losses.hpp"
#include "voxprior/metrics.hpp"
#include "voxprior/recon.hpp"
#include "voxprior/renderer.hpp"
#include "voxprior/scenes.hpp"
#include "voxprior/serialize.hpp"

#ifndef VOXPRIOR_CLI_PATH
#error "VOXPRIOR_CLI_PATH must point at the voxprior binary"
#endif

namespace {

using namespace voxprior;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Context {
  fs::path workdir;
  bool failed = false;

  // Reconstruction arms already computed this run: key -> (mean psnr, minutes).
  std::map<std::string, std::pair<double, double>> arms;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(Context& ctx, int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
            << detail << std::endl;
  if (!pass) ctx.failed = true;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VOXPRIOR_CLI_PATH) + " " + args;
  std::cerr << "  $ voxprior " << args << std::endl;
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic volume-rendering gradients vs central differences.

struct GradScenario {
  int grid;
  int image_size;  // 1 = single ray
  int n_samples;
};

double max_rel_grad_error(const GradScenario& sc, std::uint64_t seed) {
  Rng rng(seed);
  VoxelField field = VoxelField::make_default(sc.grid);
  for (Eigen::Index i = 0; i < field.node_count(); ++i) {
    field.density_param(i) = rng.uniform(-2.0, 2.5);
    for (int c = 0; c < 3; ++c) field.color_param(i, c) = rng.uniform(-2.0, 2.0);
  }
  field.mark_params_changed();

  const CameraPose cam = CameraPose::look_at(
      {0.2, -0.3, -3.0}, {0, 0, 0}, {0, -1, 0}, 0.9 * sc.image_size,
      {sc.image_size / 2.0, sc.image_size / 2.0}, sc.image_size, sc.image_size);
  RenderConfig cfg;
  cfg.width = sc.image_size;
  cfg.height = sc.image_size;
  cfg.near = 1.5;
  cfg.far = 5.0;
  cfg.n_samples = sc.n_samples;
  cfg.jitter = false;

  Image up(sc.image_size, sc.image_size, 3);
  for (Eigen::Index i = 0; i < up.data.size(); ++i) up.data(i) = rng.uniform(-1, 1);

  auto loss = [&] {
    const RenderOutput out = render_image(field, cam, cfg);
    return (out.rgb.data.array() * up.data.array()).sum();
  };

  field.zero_grads();
  const RenderOutput out = render_image(field, cam, cfg);
  render_backward(field, out.records, up);

  const double h = 1e-5;
  double worst = 0.0;
  auto check_param = [&](double& param, double analytic) {
    const double save = param;
    param = save + h;
    const double plus = loss();
    param = save - h;
    const double minus = loss();
    param = save;
    const double fd = (plus - minus) / (2 * h);
    if (std::abs(fd) < 1e-10 && std::abs(analytic) < 1e-10) return;
    worst = std::max(worst, std::abs(fd - analytic) /
                                std::max({std::abs(fd), std::abs(analytic), 1e-6}));
  };
  for (Eigen::Index i = 0; i < field.node_count(); ++i) {
    check_param(field.density_param(i), field.density_grad(i));
    for (int c = 0; c < 3; ++c) check_param(field.color_param(i, c), field.color_grad(i, c));
  }
  return worst;
}

void criterion_1(Context& ctx) {
  const auto start = Clock::now();
  double worst = 0.0;
  worst = std::max(worst, max_rel_grad_error({2, 1, 6}, 11));
  worst = std::max(worst, max_rel_grad_error({2, 4, 8}, 12));
  worst = std::max(worst, max_rel_grad_error({4, 1, 8}, 13));
  worst = std::max(worst, max_rel_grad_error({8, 1, 8}, 14));
  const double elapsed = seconds_since(start);
  std::ostringstream msg;
  msg << "gradient suite: max relative error " << worst << " (< 1e-3), " << elapsed
      << " s (< 10 s)";
  report(ctx, 1, worst < 1e-3 && elapsed < 10.0, msg.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: noise schedule identity and annealing endpoints.

void criterion_2(Context& ctx) {
  double worst_vp = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const double a = NoiseSchedule::alpha(t), s = NoiseSchedule::sigma(t);
    worst_vp = std::max(worst_vp, std::abs(a * a + s * s - 1.0));
  }
  Schedules sched;
  const SchedulePoint start = schedule_at(sched, 0);
  const SchedulePoint end = schedule_at(sched, sched.total_iters);
  const bool endpoints = start.t_min == 1.0 && start.lambda_sample == 1.0 &&
                         end.t_min == 0.0 && end.lambda_sample == 0.1;
  std::ostringstream msg;
  msg << "schedule suite: alpha^2+sigma^2 deviation " << worst_vp
      << " (< 1e-12), endpoints (1,1) and (0,0.1) " << (endpoints ? "exact" : "WRONG");
  report(ctx, 2, worst_vp < 1e-12 && endpoints, msg.str());
}

// ---------------------------------------------------------------------------
// Criterion 3: one-step oracle exactness, step composition, guidance algebra.

void criterion_3(Context& ctx) {
  SyntheticScene scene;
  scene.primitives.push_back(SphereGeom{{0, 0, 0}, 0.45, {0.8, 0.45, 0.3}});
  scene.primitives.push_back(BoxGeom{{0.2, -0.4, -0.2}, {0.5, -0.1, 0.15},
                                     {0.3, 0.6, 0.8}});
  const DenoiserFn oracle = make_oracle_denoiser(scene, OracleConfig{});
  const CameraPose pose = CameraPose::look_at({1.4, -1.0, -1.3}, {0, 0, 0}, {0, -1, 0},
                                              0.7 * 64, {32, 32}, 64, 64);
  const Image gt = render_gt(scene, pose, 64, 64);
  ConditioningBundle bundle;
  bundle.target_pose = pose;

  Rng rng(3);
  Image eps(64, 64, 3);
  for (Eigen::Index i = 0; i < eps.data.size(); ++i) eps.data(i) = rng.normal();

  // One-step recovery across the whole noise range. Exactly t=1 is excluded:
  // alpha(1) ~ 6e-17 underflows the single clean-estimate division.
  double worst_one_step = 0.0;
  for (int i = 1; i <= 999; ++i) {
    const double t = i / 1000.0;
    const Image z = add_noise(gt, t, eps);
    const Image sample = ddim_sample(oracle, bundle, z, t, 1, 1.0);
    worst_one_step =
        std::max(worst_one_step, (sample.data - gt.data).cwiseAbs().maxCoeff());
  }
  // Multistep from pure noise still recovers the image.
  const Image from_noise = ddim_sample(oracle, bundle, add_noise(gt, 1.0, eps), 1.0,
                                       10, 1.0);
  const double multistep_err = (from_noise.data - gt.data).cwiseAbs().maxCoeff();

  // Fixed-prediction step composition.
  Image eps_hat(64, 64, 3);
  for (Eigen::Index i = 0; i < eps_hat.data.size(); ++i) eps_hat.data(i) = rng.normal();
  const Image z = add_noise(gt, 0.9, eps);
  const Image two = ddim_step(ddim_step(z, 0.9, 0.5, eps_hat), 0.5, 0.05, eps_hat);
  const Image one = ddim_step(z, 0.9, 0.05, eps_hat);
  const double compose_err = (two.data - one.data).cwiseAbs().maxCoeff();

  // Guidance endpoints.
  Image u(8, 8, 3), c(8, 8, 3);
  for (Eigen::Index i = 0; i < u.data.size(); ++i) {
    u.data(i) = rng.normal();
    c.data(i) = rng.normal();
  }
  const bool cfg0 = (cfg_combine(u, c, 0.0).data - u.data).cwiseAbs().maxCoeff() == 0.0;
  const bool cfg1 = (cfg_combine(u, c, 1.0).data - c.data).cwiseAbs().maxCoeff() == 0.0;
  const Image expected3 = [&] {
    Image out = u;
    out.data = u.data + 3.0 * (c.data - u.data);
    return out;
  }();
  const double cfg3_err =
      (cfg_combine(u, c, 3.0).data - expected3.data).cwiseAbs().maxCoeff();

  std::ostringstream msg;
  msg << "ddim suite: one-step error " << worst_one_step << " (< 1e-6), k=10 from t=1 "
      << multistep_err << " (< 1e-5), composition " << compose_err
      << " (< 1e-12), cfg endpoints " << (cfg0 && cfg1 ? "exact" : "WRONG")
      << ", cfg(3) error " << cfg3_err;
  report(ctx, 3,
         worst_one_step < 1e-6 && multistep_err < 1e-5 && compose_err < 1e-12 &&
             cfg0 && cfg1 && cfg3_err < 1e-12,
         msg.str());
}

// ---------------------------------------------------------------------------
// Criterion 4: projection round trips, focus recovery, rescaling.

void criterion_4(Context& ctx) {
  Rng rng(4);
  double worst_roundtrip = 0.0;
  for (int i = 0; i < 10000; ++i) {
    CameraPose pose;
    const Eigen::Vector3d axis = rng.in_ball(1.0).normalized();
    pose.rotation =
        Eigen::AngleAxisd(rng.uniform(0.0, 2 * M_PI), axis).toRotationMatrix();
    pose.position = rng.in_ball(3.0);
    pose.focal_px = rng.uniform(20.0, 120.0);
    pose.principal_point = {rng.uniform(20.0, 44.0), rng.uniform(20.0, 44.0)};
    pose.width = 64;
    pose.height = 64;
    const Eigen::Vector2d pixel(rng.uniform(0, 64), rng.uniform(0, 64));
    const double depth = rng.uniform(0.1, 100.0);
    const auto proj = project(pose, ray_for_pixel(pose, pixel).point_at(depth));
    if (!proj) {
      worst_roundtrip = 1e9;
      break;
    }
    worst_roundtrip = std::max(worst_roundtrip, (proj->pixel - pixel).norm());
  }

  double worst_focus = 0.0;
  for (int trial = 0; trial < 16; ++trial) {
    const Eigen::Vector3d target = rng.in_ball(0.5);
    std::vector<CameraPose> poses;
    for (int i = 0; i < 8; ++i) {
      const double a = 2.0 * M_PI * i / 8 + rng.uniform(0.0, 0.3);
      poses.push_back(CameraPose::look_at(
          {2.2 * std::cos(a), rng.uniform(-1.5, -0.5), 2.2 * std::sin(a)}, target,
          {0, -1, 0}, 44.0, {32, 32}, 64, 64));
    }
    worst_focus = std::max(worst_focus, (focus_point(poses) - target).norm());
  }

  double worst_rescale_focus = 0.0, worst_cube = 0.0, worst_fill = 1.0;
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<CameraPose> poses;
    const Eigen::Vector3d target = rng.in_ball(0.6);
    for (int i = 0; i < 9; ++i) {
      const double a = 2.0 * M_PI * i / 9;
      const double radius = rng.uniform(1.5, 4.0);
      poses.push_back(CameraPose::look_at(
          {radius * std::cos(a), rng.uniform(-2.5, -1.0), radius * std::sin(a)},
          target + rng.in_ball(0.05), {0, -1, 0}, 44.0, {32, 32}, 64, 64));
    }
    const RescaleResult result = rescale_scene(poses);
    worst_rescale_focus =
        std::max(worst_rescale_focus, focus_point(result.poses).norm());
    double max_coord = 0.0;
    for (const CameraPose& pose : result.poses) {
      worst_cube = std::max(worst_cube, pose.position.cwiseAbs().maxCoeff() - 1.0);
      max_coord = std::max(max_coord, pose.position.cwiseAbs().maxCoeff());
    }
    worst_fill = std::min(worst_fill, max_coord);
  }

  std::ostringstream msg;
  msg << "geometry suite: round-trip " << worst_roundtrip << " px (< 1e-6 over 1e4), "
      << "focus recovery " << worst_focus << " (< 1e-6), rescaled focus "
      << worst_rescale_focus << " (< 1e-9), cube overflow " << worst_cube
      << " (<= 0), max-coordinate fill " << worst_fill << " (~1)";
  report(ctx, 4,
         worst_roundtrip < 1e-6 && worst_focus < 1e-6 && worst_rescale_focus < 1e-9 &&
             worst_cube <= 1e-12 && std::abs(worst_fill - 1.0) < 1e-9,
         msg.str());
}

// ---------------------------------------------------------------------------
// Criterion 5: conditioning renderer invariances.

void criterion_5(Context& ctx) {
  SyntheticScene scene;
  scene.primitives.push_back(SphereGeom{{-0.1, 0.05, 0.0}, 0.4, {0.85, 0.4, 0.3}});
  scene.primitives.push_back(BoxGeom{{0.15, -0.45, -0.3}, {0.55, -0.05, 0.1},
                                     {0.3, 0.55, 0.8}});
  auto ring_pose = [&](double angle, int size) {
    return CameraPose::look_at({2.0 * std::cos(angle), -0.8, 2.0 * std::sin(angle)},
                               {0, 0, 0}, {0, -1, 0}, 0.7 * size,
                               {size / 2.0, size / 2.0}, size, size);
  };

  // Permutation invariance at full working configuration.
  std::vector<PosedImage> inputs;
  std::vector<FeatureImage> features;
  for (double angle : {0.2, 1.9, 3.7}) {
    const CameraPose pose = ring_pose(angle, 64);
    inputs.emplace_back(render_gt(scene, pose, 64, 64), pose);
    features.push_back(encode_input(inputs.back()));
  }
  EpipolarConfig cfg;
  const CameraPose target = ring_pose(1.0, 64);
  const FeatureImage base = epipolar_render(inputs, features, target, cfg);
  std::vector<PosedImage> perm_inputs = {inputs[2], inputs[0], inputs[1]};
  std::vector<FeatureImage> perm_features = {features[2], features[0], features[1]};
  const FeatureImage permuted = epipolar_render(perm_inputs, perm_features, target, cfg);
  const double perm_err = (base.data - permuted.data).cwiseAbs().maxCoeff();

  // Identity view from a higher-resolution input.
  const CameraPose hi_pose = ring_pose(0.7, 256);
  const PosedImage hi_input(render_gt(scene, hi_pose, 256, 256), hi_pose);
  const std::vector<PosedImage> one_input = {hi_input};
  const std::vector<FeatureImage> one_feature = {encode_input(hi_input)};
  const FeatureImage identity = epipolar_render(one_input, one_feature, hi_pose, cfg);
  const double identity_psnr =
      psnr(rgb_channels(identity), area_resample(hi_input.image, 64, 64));

  // Photo-consistent point: red in every view at the true depth.
  const Eigen::Vector3d point(0.05, -0.1, 0.0);
  double red_err = 0.0, var_err = 0.0;
  {
    std::vector<PosedImage> painted;
    std::vector<FeatureImage> painted_features;
    for (double angle : {0.3, 2.1, 4.2}) {
      const CameraPose pose = ring_pose(angle, 64);
      Image img(64, 64, 3);
      img.data.setConstant(0.2);
      const auto proj = project(pose, point);
      for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
          if ((Eigen::Vector2d(x + 0.5, y + 0.5) - proj->pixel).norm() < 3.0)
            img.at(x, y, 0) = 1.0, img.at(x, y, 1) = 0.0, img.at(x, y, 2) = 0.0;
      painted.emplace_back(img, pose);
      painted_features.push_back(encode_input(painted.back()));
    }
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> gathered;
    for (size_t v = 0; v < painted.size(); ++v) {
      const GatherSample g = gather_at_point(point, painted[v].pose, painted_features[v]);
      if (!g.valid) {
        red_err = 1e9;
        break;
      }
      const Eigen::Vector3d rgb = g.values.head(3);
      red_err = std::max(red_err,
                         (rgb - Eigen::Vector3d(1, 0, 0)).cwiseAbs().maxCoeff());
      gathered.push_back(rgb);
      mean += rgb / 3.0;
    }
    for (const Eigen::Vector3d& g : gathered)
      var_err = std::max(var_err, (g - mean).cwiseAbs().maxCoeff());
  }

  std::ostringstream msg;
  msg << "conditioning suite: permutation deviation " << perm_err
      << " (< 1e-9), identity-view psnr " << identity_psnr
      << " dB (> 30), red-point error " << red_err << " / cross-view spread "
      << var_err << " (< 1e-6)";
  report(ctx, 5,
         perm_err < 1e-9 && identity_psnr > 30.0 && red_err < 1e-6 && var_err < 1e-6,
         msg.str());
}

// ---------------------------------------------------------------------------
// Reconstruction arms (criteria 6-8).

struct ArmSpec {
  int n_train = 3;
  std::string prior = "oracle";  // none | oracle | oracle-noisy
  std::string mode = "sample";
  int seed = 0;
  bool view_count_scaling = false;
};

std::string arm_key(const ArmSpec& arm) {
  std::ostringstream key;
  key << arm.n_train << "v_" << arm.prior << "_" << arm.mode << "_s" << arm.seed
      << (arm.view_count_scaling ? "_scaled" : "");
  return key.str();
}

fs::path dataset_dir(Context& ctx, int n_train) {
  const fs::path dir = ctx.workdir / ("data_" + std::to_string(n_train) + "v");
  if (!fs::exists(dir / "manifest.json")) {
    const fs::path spec = ctx.workdir / ("spec_" + std::to_string(n_train) + "v.json");
    std::ofstream os(spec);
    os << R"({"n_primitives": 3, "seed": 7, "n_train": )" << n_train
       << R"(, "n_test": 3, "width": 64, "height": 64})";
    os.close();
    if (run_cli("make-scene --spec " + spec.string() + " --out " + dir.string()) != 0)
      throw Error("acceptance: make-scene failed");
  }
  return dir;
}

// Runs (or reuses) one reconstruction arm; returns (held-out psnr, minutes).
std::pair<double, double> run_arm(Context& ctx, const ArmSpec& arm) {
  const std::string key = arm_key(arm);
  if (const auto it = ctx.arms.find(key); it != ctx.arms.end()) return it->second;

  const fs::path data = dataset_dir(ctx, arm.n_train);
  const fs::path out = ctx.workdir / ("run_" + key);
  const fs::path cfg_path = ctx.workdir / ("cfg_" + key + ".json");
  {
    RunConfig config;
    config.view_count_scaling = arm.view_count_scaling;
    save_json_file(cfg_path.string(), run_config_to_json(config));
  }

  const auto start = Clock::now();
  const int status = run_cli("fit --dataset " + data.string() + " --config " +
                             cfg_path.string() + " --prior " + arm.prior + " --mode " +
                             arm.mode + " --seed " + std::to_string(arm.seed) +
                             " --out " + out.string());
  const double minutes = seconds_since(start) / 60.0;
  if (status != 0) throw Error("acceptance: fit failed for arm " + key);

  const Json report = load_json_file((out / "report.json").string());
  const double psnr_db = report.at("heldout").at("mean_psnr").get<double>();
  std::cerr << "  arm " << key << ": " << psnr_db << " dB in " << minutes << " min"
            << std::endl;
  ctx.arms[key] = {psnr_db, minutes};
  return ctx.arms[key];
}

double mean_over_seeds(Context& ctx, const ArmSpec& base, int n_seeds,
                       double* max_minutes = nullptr) {
  double total = 0.0;
  for (int seed = 0; seed < n_seeds; ++seed) {
    ArmSpec arm = base;
    arm.seed = seed;
    const auto [psnr_db, minutes] = run_arm(ctx, arm);
    total += psnr_db;
    if (max_minutes) *max_minutes = std::max(*max_minutes, minutes);
  }
  return total / n_seeds;
}

void criterion_6(Context& ctx) {
  double max_minutes = 0.0;
  const double none = mean_over_seeds(ctx, {3, "none", "sample", 0, false}, 5,
                                      &max_minutes);
  const double oracle = mean_over_seeds(ctx, {3, "oracle", "sample", 0, false}, 5,
                                        &max_minutes);
  const double noisy = mean_over_seeds(ctx, {3, "oracle-noisy", "sample", 0, false}, 5,
                                       &max_minutes);
  std::ostringstream msg;
  msg << "oracle-prior reconstruction: baseline " << none << " dB, oracle " << oracle
      << " dB (needs >= +3), oracle-noisy " << noisy
      << " dB (needs >= +1), slowest arm " << max_minutes << " min (< 15)";
  report(ctx, 6,
         oracle >= none + 3.0 && noisy >= none + 1.0 && max_minutes < 15.0,
         msg.str());
}

void criterion_7(Context& ctx) {
  bool completed = true;
  double sds = 0.0, sample = 0.0;
  try {
    sample = mean_over_seeds(ctx, {3, "oracle", "sample", 0, false}, 5);
    sds = mean_over_seeds(ctx, {3, "oracle", "sds", 0, false}, 5);
  } catch (const Error&) {
    completed = false;
  }
  std::ostringstream msg;
  msg << "distillation ablation: sds mode "
      << (completed ? "completed" : "DID NOT COMPLETE") << "; sds " << sds
      << " dB vs sample " << sample << " dB; ordering sds <= sample + 0.5 dB "
      << (sds <= sample + 0.5 ? "holds" : "does not hold")
      << " (logged, not gated)";
  report(ctx, 7, completed && std::isfinite(sds) && std::isfinite(sample), msg.str());
}

void criterion_8(Context& ctx) {
  // The 3-view pair reuses the criterion-6 arms (the scaling multiplier is
  // exactly 1 at three views).
  const double none3 = mean_over_seeds(ctx, {3, "none", "sample", 0, false}, 5);
  const double oracle3 = mean_over_seeds(ctx, {3, "oracle", "sample", 0, false}, 5);
  const auto [none6, m1] = run_arm(ctx, {6, "none", "sample", 0, true});
  const auto [oracle6, m2] = run_arm(ctx, {6, "oracle", "sample", 0, true});
  const auto [none9, m3] = run_arm(ctx, {9, "none", "sample", 0, true});
  const auto [oracle9, m4] = run_arm(ctx, {9, "oracle", "sample", 0, true});

  const double d3 = oracle3 - none3, d6 = oracle6 - none6, d9 = oracle9 - none9;
  std::ostringstream msg;
  msg << "view-count scaling: prior minus baseline at 3/6/9 views = " << d3 << " / "
      << d6 << " / " << d9 << " dB (all >= 0)";
  report(ctx, 8, d3 >= 0.0 && d6 >= 0.0 && d9 >= 0.0, msg.str());
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical CLI reruns.

bool identical_trees(const fs::path& a, const fs::path& b, std::string& mismatch) {
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(a))
    names.insert(entry.path().filename().string());
  for (const auto& entry : fs::directory_iterator(b))
    names.insert(entry.path().filename().string());
  for (const std::string& name : names) {
    if (!fs::exists(a / name) || !fs::exists(b / name) ||
        slurp(a / name) != slurp(b / name)) {
      mismatch = name;
      return false;
    }
  }
  return true;
}

void criterion_9(Context& ctx) {
  const fs::path dir = ctx.workdir / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path spec = dir / "spec.json";
  std::ofstream(spec)
      << R"({"n_primitives": 2, "seed": 9, "n_train": 3, "n_test": 2, "width": 32, "height": 32})";
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg)
      << R"({"schema_version": 1, "grid_resolution": 16, "latent_size": 16,)"
      << R"( "n_samples": 24, "epipolar_depth_samples": 16, "k_ddim": 3})";

  std::vector<std::string> problems;
  auto rerun_and_compare = [&](const std::string& what, const std::string& args_a,
                               const std::string& args_b, const fs::path& out_a,
                               const fs::path& out_b) {
    if (run_cli(args_a) != 0 || run_cli(args_b) != 0) {
      problems.push_back(what + " (nonzero exit)");
      return;
    }
    std::string mismatch;
    if (fs::is_directory(out_a)) {
      if (!identical_trees(out_a, out_b, mismatch))
        problems.push_back(what + " (" + mismatch + ")");
    } else if (slurp(out_a) != slurp(out_b)) {
      problems.push_back(what);
    }
  };

  rerun_and_compare("make-scene",
                    "make-scene --spec " + spec.string() + " --out " + (dir / "da").string(),
                    "make-scene --spec " + spec.string() + " --out " + (dir / "db").string(),
                    dir / "da", dir / "db");

  const std::string fit_args = "fit --dataset " + (dir / "da").string() + " --config " +
                               cfg.string() + " --prior oracle-noisy --seed 5 --iters 30";
  rerun_and_compare("fit", fit_args + " --out " + (dir / "fa").string(),
                    fit_args + " --out " + (dir / "fb").string(), dir / "fa", dir / "fb");

  const std::string ckpt = (dir / "fa" / "checkpoint.voxf").string();
  rerun_and_compare("render",
                    "render --checkpoint " + ckpt + " --poses " +
                        (dir / "fa" / "poses_rescaled.json").string() + " --config " +
                        cfg.string() + " --depth --out " + (dir / "ra").string(),
                    "render --checkpoint " + ckpt + " --poses " +
                        (dir / "fa" / "poses_rescaled.json").string() + " --config " +
                        cfg.string() + " --depth --out " + (dir / "rb").string(),
                    dir / "ra", dir / "rb");

  rerun_and_compare("eval",
                    "eval --checkpoint " + ckpt + " --dataset " + (dir / "da").string() +
                        " --config " + cfg.string() + " --out " + (dir / "ea.json").string(),
                    "eval --checkpoint " + ckpt + " --dataset " + (dir / "da").string() +
                        " --config " + cfg.string() + " --out " + (dir / "eb.json").string(),
                    dir / "ea.json", dir / "eb.json");

  rerun_and_compare("sample-poses",
                    "sample-poses --poses " + (dir / "fa" / "poses_rescaled.json").string() +
                        " --n 6 --seed 2 --out " + (dir / "pa.json").string(),
                    "sample-poses --poses " + (dir / "fa" / "poses_rescaled.json").string() +
                        " --n 6 --seed 2 --out " + (dir / "pb.json").string(),
                    dir / "pa.json", dir / "pb.json");

  const std::string demo_args = "ddim-demo --dataset " + (dir / "da").string() +
                                " --config " + cfg.string() +
                                " --prior oracle-noisy --pose-index 0 --t 0.7 --k 3 --seed 8";
  rerun_and_compare("ddim-demo", demo_args + " --out " + (dir / "ga").string(),
                    demo_args + " --out " + (dir / "gb").string(), dir / "ga",
                    dir / "gb");

  std::ostringstream msg;
  msg << "determinism: byte-identical reruns for make-scene, fit, render, eval, "
         "sample-poses, ddim-demo";
  if (!problems.empty()) {
    msg << "; mismatches:";
    for (const std::string& p : problems) msg << " " << p;
  }
  report(ctx, 9, problems.empty(), msg.str());
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  fs::path workdir = fs::temp_directory_path() / "voxprior_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string item; std::getline(ss, item, ',');)
        selected.insert(std::stoi(item));
    } else if (arg == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--criterion N[,M...]] [--workdir PATH]\n";
      return 2;
    }
  }

  Context ctx;
  ctx.workdir = workdir;
  fs::create_directories(ctx.workdir);

  const std::vector<std::pair<int, void (*)(Context&)>> criteria = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3},
      {4, criterion_4}, {5, criterion_5}, {6, criterion_6},
      {7, criterion_7}, {8, criterion_8}, {9, criterion_9},
  };

  for (const auto& [number, fn] : criteria) {
    if (!selected.empty() && !selected.contains(number)) continue;
    try {
      fn(ctx);
    } catch (const std::exception& e) {
      report(ctx, number, false, std::string("exception: ") + e.what());
    }
  }
  return ctx.failed ? 1 : 0;
}
