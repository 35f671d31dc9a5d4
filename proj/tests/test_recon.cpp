// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "voxprior/geometry.hpp"
#include "voxprior/recon.hpp"
#include "voxprior/scenes.hpp"

using namespace voxprior;

namespace {

struct SmallProblem {
  SyntheticScene scene;
  std::vector<PosedImage> observations;
  std::vector<PosedImage> heldout;
  PosePath path;
  RescaleResult rescale;
};

SmallProblem make_problem(int n_train, int size) {
  SmallProblem problem;
  problem.scene = make_scene({2, 13});

  PosePath rig;
  rig.kind = PathKind::Ellipse;
  rig.center = {0, -0.8, 0};
  rig.axis_u = {2, 0, 0};
  rig.axis_v = {0, 0, 2};
  rig.look_at = {0, 0, 0};
  rig.up = {0, -1, 0};
  rig.focal_px = 0.7 * size;
  rig.principal_point = {size / 2.0, size / 2.0};
  rig.width = size;
  rig.height = size;

  auto [train, test] = generate_views(problem.scene, rig, n_train, n_train, size, size);

  std::vector<CameraPose> train_poses;
  for (const auto& view : train) train_poses.push_back(view.pose);
  problem.rescale = rescale_scene(train_poses);
  for (size_t i = 0; i < train.size(); ++i)
    problem.observations.emplace_back(train[i].image, problem.rescale.poses[i]);
  for (auto& view : test) {
    CameraPose pose = view.pose;
    pose.position = problem.rescale.apply(pose.position);
    problem.heldout.emplace_back(view.image, pose);
  }
  problem.path = fit_ellipse_path(problem.rescale.poses,
                                  focus_point(problem.rescale.poses));
  return problem;
}

ReconConfig small_config(int iters, int latent = 16) {
  ReconConfig cfg;
  cfg.iters = iters;
  cfg.schedules.total_iters = iters;
  cfg.latent_size = latent;
  cfg.k_ddim = 2;
  cfg.render.n_samples = 32;
  cfg.epipolar.n_depth = 32;
  cfg.epipolar.out_width = latent;
  cfg.epipolar.out_height = latent;
  return cfg;
}

DenoiserFn oracle_for(const SmallProblem& problem, int latent, double floor = 0.0) {
  OracleConfig oracle;
  oracle.latent_width = latent;
  oracle.latent_height = latent;
  oracle.noise_floor = floor;
  oracle.frame = problem.rescale;
  oracle.frame.poses.clear();
  return make_oracle_denoiser(problem.scene, oracle);
}

}  // namespace

TEST_CASE("recon loss trends down on a one-view problem") {
  SmallProblem problem = make_problem(3, 24);
  problem.observations.resize(1);
  VoxelField field(Eigen::Vector3i::Constant(24), Eigen::Vector3d::Constant(-1.0),
                   Eigen::Vector3d::Constant(1.0));

  ReconConfig cfg = small_config(220);
  const ReconReport report =
      reconstruct(field, problem.observations, problem.heldout, problem.path, cfg,
                  nullptr);
  REQUIRE(static_cast<int>(report.iters.size()) == 220);

  auto window_mean = [&](int begin, int count) {
    double total = 0.0;
    for (int i = begin; i < begin + count; ++i) total += report.iters[i].recon;
    return total / count;
  };
  // Short-horizon smoke (50 iterations) and the long-window variant.
  CHECK(window_mean(40, 10) < window_mean(0, 10));
  CHECK(window_mean(120, 100) < window_mean(0, 100));
}

TEST_CASE("a zero sample weight equals running without the prior") {
  const SmallProblem problem = make_problem(3, 16);

  ReconConfig cfg = small_config(8);
  cfg.schedules.lambda_sample_start = 0.0;
  cfg.schedules.lambda_sample_end = 0.0;

  VoxelField with_prior(Eigen::Vector3i::Constant(8), Eigen::Vector3d::Constant(-1.0),
                        Eigen::Vector3d::Constant(1.0));
  VoxelField without(Eigen::Vector3i::Constant(8), Eigen::Vector3d::Constant(-1.0),
                     Eigen::Vector3d::Constant(1.0));

  const DenoiserFn oracle = oracle_for(problem, cfg.latent_size);
  const ReconReport a = reconstruct(with_prior, problem.observations, problem.heldout,
                                    problem.path, cfg, &oracle);
  const ReconReport b = reconstruct(without, problem.observations, problem.heldout,
                                    problem.path, cfg, nullptr);

  CHECK(with_prior.density_param == without.density_param);
  CHECK(with_prior.color_param == without.color_param);
  CHECK(a.heldout.mean_psnr == b.heldout.mean_psnr);
}

TEST_CASE("identical seeds give bitwise-identical runs") {
  const SmallProblem problem = make_problem(3, 16);
  ReconConfig cfg = small_config(6);
  cfg.seed = 21;

  const DenoiserFn oracle_a = oracle_for(problem, cfg.latent_size, 0.05);
  const DenoiserFn oracle_b = oracle_for(problem, cfg.latent_size, 0.05);

  VoxelField field_a(Eigen::Vector3i::Constant(8), Eigen::Vector3d::Constant(-1.0),
                     Eigen::Vector3d::Constant(1.0));
  VoxelField field_b(Eigen::Vector3i::Constant(8), Eigen::Vector3d::Constant(-1.0),
                     Eigen::Vector3d::Constant(1.0));
  const ReconReport a = reconstruct(field_a, problem.observations, problem.heldout,
                                    problem.path, cfg, &oracle_a);
  const ReconReport b = reconstruct(field_b, problem.observations, problem.heldout,
                                    problem.path, cfg, &oracle_b);

  CHECK(field_a.density_param == field_b.density_param);
  CHECK(field_a.color_param == field_b.color_param);
  REQUIRE(a.iters.size() == b.iters.size());
  for (size_t i = 0; i < a.iters.size(); ++i) {
    CHECK(a.iters[i].recon == b.iters[i].recon);
    CHECK(a.iters[i].sample == b.iters[i].sample);
  }
  CHECK(a.heldout.mean_psnr == b.heldout.mean_psnr);
}

TEST_CASE("sds mode runs end to end") {
  const SmallProblem problem = make_problem(3, 16);
  ReconConfig cfg = small_config(6);
  cfg.mode = SampleMode::Sds;
  const DenoiserFn oracle = oracle_for(problem, cfg.latent_size);
  VoxelField field(Eigen::Vector3i::Constant(8), Eigen::Vector3d::Constant(-1.0),
                   Eigen::Vector3d::Constant(1.0));
  const ReconReport report = reconstruct(field, problem.observations, problem.heldout,
                                         problem.path, cfg, &oracle);
  CHECK(static_cast<int>(report.iters.size()) == 6);
  for (const IterRecord& r : report.iters) CHECK(std::isfinite(r.sample));
}

TEST_CASE("evaluate computes per-view and mean metrics") {
  const SmallProblem problem = make_problem(3, 16);
  VoxelField field = VoxelField::make_default(16);
  bake_scene(problem.scene, field);
  // Evaluation happens in the rescaled frame; bake in scene coordinates and
  // evaluate against unrescaled views instead.
  std::vector<PosedImage> views;
  for (const auto& view : problem.heldout) {
    CameraPose pose = view.pose;
    pose.position = problem.rescale.invert(pose.position);
    views.emplace_back(view.image, pose);
  }
  RenderConfig rc;
  rc.near = 0.5;
  rc.far = 4.0;
  rc.n_samples = 64;
  const Metrics metrics = evaluate(field, views, rc);
  REQUIRE(metrics.per_view.size() == views.size());
  double mean = 0.0;
  for (const auto& m : metrics.per_view) {
    CHECK(std::isfinite(m.psnr));
    CHECK(m.ssim <= 1.0);
    mean += m.psnr;
  }
  CHECK(metrics.mean_psnr == doctest::Approx(mean / views.size()));
  // A baked field is a decent reconstruction.
  CHECK(metrics.mean_psnr > 18.0);
}

TEST_CASE("evaluate of identical content reports the psnr cap") {
  const SmallProblem problem = make_problem(3, 16);
  VoxelField field = VoxelField::make_default(4);
  RenderConfig rc;
  rc.n_samples = 8;
  // Render the field at the held-out poses and evaluate against itself.
  std::vector<PosedImage> views;
  for (const auto& view : problem.heldout) {
    rc.width = view.image.width;
    rc.height = view.image.height;
    rc.jitter = false;
    views.emplace_back(render_image(field, view.pose, rc).rgb, view.pose);
  }
  const Metrics metrics = evaluate(field, views, rc);
  for (const auto& m : metrics.per_view) CHECK(m.psnr == 99.0);
}

TEST_CASE("reconstruct validates its configuration") {
  const SmallProblem problem = make_problem(3, 16);
  VoxelField field = VoxelField::make_default(4);
  ReconConfig cfg = small_config(4);
  cfg.iters = 0;
  CHECK_THROWS_AS(reconstruct(field, problem.observations, problem.heldout,
                              problem.path, cfg, nullptr),
                  ArgumentError);
  ReconConfig cfg2 = small_config(4);
  const DenoiserFn oracle = oracle_for(problem, cfg2.latent_size);
  cfg2.n_condition_views = 99;
  CHECK_THROWS_AS(reconstruct(field, problem.observations, problem.heldout,
                              problem.path, cfg2, &oracle),
                  ArgumentError);
}

TEST_CASE("errors carry the failing iteration index") {
  const SmallProblem problem = make_problem(3, 16);
  VoxelField field = VoxelField::make_default(4);
  ReconConfig cfg = small_config(4);
  // A denoiser that returns the wrong shape trips the sampling step.
  const DenoiserFn broken = [](const Image&, double, const ConditioningBundle*) {
    return Image(2, 2, 3);
  };
  try {
    reconstruct(field, problem.observations, problem.heldout, problem.path, cfg,
                &broken);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("iteration 0") != std::string::npos);
  }
}
