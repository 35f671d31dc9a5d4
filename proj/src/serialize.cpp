// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "voxprior/image_io.hpp"

namespace voxprior {

namespace {

constexpr int kSchemaVersion = 1;

void require_keys(const Json& j, const std::set<std::string>& known,
                  const char* what) {
  if (!j.is_object()) throw ArgumentError(std::string(what) + ": expected an object");
  for (const auto& item : j.items())
    if (!known.contains(item.key()))
      throw ArgumentError(std::string(what) + ": unknown key '" + item.key() + "'");
}

void check_schema(const Json& j, const char* what) {
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
    throw ArgumentError(std::string(what) + ": unsupported schema_version");
}

Eigen::Vector3d vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ArgumentError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json vec3_to_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Json pose_to_json(const CameraPose& pose) {
  Json rotation = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rotation.push_back(pose.rotation(r, c));
  return Json{
      {"rotation", rotation},
      {"position", vec3_to_json(pose.position)},
      {"focal_px", pose.focal_px},
      {"principal_point", Json::array({pose.principal_point.x(), pose.principal_point.y()})},
      {"image_size", Json::array({pose.width, pose.height})},
  };
}

CameraPose pose_from_json(const Json& j) {
  require_keys(j, {"rotation", "position", "focal_px", "principal_point", "image_size"},
               "pose");
  CameraPose pose;
  const auto& rotation = j.at("rotation");
  if (!rotation.is_array() || rotation.size() != 9)
    throw ArgumentError("pose: rotation must be 9 row-major values");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rotation[r * 3 + c].get<double>();
  pose.position = vec3_from_json(j.at("position"));
  pose.focal_px = j.at("focal_px").get<double>();
  pose.principal_point = Eigen::Vector2d(j.at("principal_point")[0].get<double>(),
                                         j.at("principal_point")[1].get<double>());
  pose.width = j.at("image_size")[0].get<int>();
  pose.height = j.at("image_size")[1].get<int>();
  if (pose.width <= 0 || pose.height <= 0)
    throw ArgumentError("pose: image_size must be positive");
  if (pose.focal_px <= 0.0) throw ArgumentError("pose: focal_px must be positive");
  if (!pose.valid_rotation(1e-6))
    throw ArgumentError("pose: rotation is not orthonormal");
  if (pose.principal_point.x() < 0.0 || pose.principal_point.x() > pose.width ||
      pose.principal_point.y() < 0.0 || pose.principal_point.y() > pose.height)
    throw ArgumentError("pose: principal point outside the image");
  return pose;
}

Json path_to_json(const PosePath& path) {
  Json j{
      {"kind", path.kind == PathKind::Ellipse ? "ellipse" : "bspline"},
      {"up", vec3_to_json(path.up)},
      {"focal_px", path.focal_px},
      {"principal_point", Json::array({path.principal_point.x(), path.principal_point.y()})},
      {"image_size", Json::array({path.width, path.height})},
  };
  if (path.kind == PathKind::Ellipse) {
    j["center"] = vec3_to_json(path.center);
    j["axis_u"] = vec3_to_json(path.axis_u);
    j["axis_v"] = vec3_to_json(path.axis_v);
    j["look_at"] = vec3_to_json(path.look_at);
  } else {
    j["degree"] = path.degree;
    Json cps = Json::array(), las = Json::array();
    for (const auto& p : path.control_points) cps.push_back(vec3_to_json(p));
    for (const auto& p : path.look_ats) las.push_back(vec3_to_json(p));
    j["control_points"] = cps;
    j["look_ats"] = las;
  }
  return j;
}

PosePath path_from_json(const Json& j) {
  PosePath path;
  const std::string kind = j.at("kind").get<std::string>();
  path.up = vec3_from_json(j.at("up"));
  path.focal_px = j.at("focal_px").get<double>();
  path.principal_point = Eigen::Vector2d(j.at("principal_point")[0].get<double>(),
                                         j.at("principal_point")[1].get<double>());
  path.width = j.at("image_size")[0].get<int>();
  path.height = j.at("image_size")[1].get<int>();
  if (kind == "ellipse") {
    path.kind = PathKind::Ellipse;
    path.center = vec3_from_json(j.at("center"));
    path.axis_u = vec3_from_json(j.at("axis_u"));
    path.axis_v = vec3_from_json(j.at("axis_v"));
    path.look_at = vec3_from_json(j.at("look_at"));
  } else if (kind == "bspline") {
    path.kind = PathKind::Bspline;
    path.degree = j.at("degree").get<int>();
    for (const auto& p : j.at("control_points")) path.control_points.push_back(vec3_from_json(p));
    for (const auto& p : j.at("look_ats")) path.look_ats.push_back(vec3_from_json(p));
  } else {
    throw ArgumentError("path: unknown kind '" + kind + "'");
  }
  return path;
}

Json scene_to_json(const SyntheticScene& scene) {
  Json prims = Json::array();
  for (const Primitive& prim : scene.primitives) {
    if (const auto* s = std::get_if<SphereGeom>(&prim)) {
      prims.push_back(Json{{"type", "sphere"},
                           {"center", vec3_to_json(s->center)},
                           {"radius", s->radius},
                           {"albedo", vec3_to_json(s->albedo)}});
    } else {
      const auto& b = std::get<BoxGeom>(prim);
      prims.push_back(Json{{"type", "box"},
                           {"min", vec3_to_json(b.min)},
                           {"max", vec3_to_json(b.max)},
                           {"albedo", vec3_to_json(b.albedo)}});
    }
  }
  return Json{{"background", vec3_to_json(scene.background)}, {"primitives", prims}};
}

SyntheticScene scene_from_json(const Json& j) {
  SyntheticScene scene;
  scene.background = vec3_from_json(j.at("background"));
  for (const auto& p : j.at("primitives")) {
    const std::string type = p.at("type").get<std::string>();
    if (type == "sphere") {
      scene.primitives.push_back(SphereGeom{vec3_from_json(p.at("center")),
                                            p.at("radius").get<double>(),
                                            vec3_from_json(p.at("albedo"))});
    } else if (type == "box") {
      scene.primitives.push_back(BoxGeom{vec3_from_json(p.at("min")),
                                         vec3_from_json(p.at("max")),
                                         vec3_from_json(p.at("albedo"))});
    } else {
      throw ArgumentError("scene: unknown primitive type '" + type + "'");
    }
  }
  scene.validate();
  return scene;
}

Json run_config_to_json(const RunConfig& c) {
  return Json{
      {"schema_version", kSchemaVersion},
      {"seed", c.seed},
      {"iters", c.iters},
      {"grid_resolution", c.grid_resolution},
      {"near", c.near},
      {"far", c.far},
      {"n_samples", c.n_samples},
      {"spacing", c.spacing == Spacing::Uniform ? "uniform" : "uniform-then-disparity"},
      {"background", vec3_to_json(c.background)},
      {"latent_size", c.latent_size},
      {"k_ddim", c.k_ddim},
      {"cfg_scale", c.cfg_scale},
      {"n_condition_views", c.n_condition_views},
      {"lambda_sample_start", c.lambda_sample_start},
      {"lambda_sample_end", c.lambda_sample_end},
      {"t_min_start", c.t_min_start},
      {"t_min_end", c.t_min_end},
      {"lambda_distortion", c.lambda_distortion},
      {"use_perceptual", c.use_perceptual},
      {"lr_density", c.lr_density},
      {"lr_color", c.lr_color},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_eps", c.adam_eps},
      {"feature_channels", c.feature_channels},
      {"pe_frequencies", c.pe_frequencies},
      {"epipolar_depth_samples", c.epipolar_depth_samples},
      {"epipolar_beta", c.epipolar_beta},
      {"path_kind", c.path_kind == PathKind::Ellipse ? "ellipse" : "bspline"},
      {"perturb_position_radius", c.perturb.position_radius},
      {"perturb_lookat_radius", c.perturb.lookat_radius},
      {"perturb_up_angle_max", c.perturb.up_angle_max},
      {"prior", c.prior == PriorKind::None
                    ? "none"
                    : (c.prior == PriorKind::Oracle ? "oracle" : "oracle-noisy")},
      {"oracle_blur_sigma", c.oracle_blur_sigma},
      {"oracle_noise_floor", c.oracle_noise_floor},
      {"mode", c.mode == SampleMode::Sample ? "sample" : "sds"},
      {"view_count_scaling", c.view_count_scaling},
      {"distortion_on", c.distortion_on == DistortionOn::Both
                            ? "both"
                            : (c.distortion_on == DistortionOn::Recon ? "recon" : "novel")},
      {"render_then_downsample", c.render_then_downsample},
      {"threads", c.threads},
  };
}

RunConfig run_config_from_json(const Json& j) {
  static const std::set<std::string> known = {
      "schema_version", "seed", "iters", "grid_resolution", "near", "far",
      "n_samples", "spacing", "background", "latent_size", "k_ddim", "cfg_scale",
      "n_condition_views", "lambda_sample_start", "lambda_sample_end",
      "t_min_start", "t_min_end", "lambda_distortion", "use_perceptual",
      "lr_density", "lr_color", "adam_beta1", "adam_beta2", "adam_eps",
      "feature_channels", "pe_frequencies", "epipolar_depth_samples",
      "epipolar_beta", "path_kind", "perturb_position_radius",
      "perturb_lookat_radius", "perturb_up_angle_max", "prior",
      "oracle_blur_sigma", "oracle_noise_floor", "mode", "view_count_scaling",
      "distortion_on", "render_then_downsample", "threads"};
  require_keys(j, known, "config");
  check_schema(j, "config");

  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("seed", c.seed);
  get("iters", c.iters);
  get("grid_resolution", c.grid_resolution);
  get("near", c.near);
  get("far", c.far);
  get("n_samples", c.n_samples);
  if (j.contains("spacing")) {
    const std::string s = j.at("spacing").get<std::string>();
    if (s == "uniform")
      c.spacing = Spacing::Uniform;
    else if (s == "uniform-then-disparity")
      c.spacing = Spacing::UniformThenDisparity;
    else
      throw ArgumentError("config: unknown spacing '" + s + "'");
  }
  if (j.contains("background")) c.background = vec3_from_json(j.at("background"));
  get("latent_size", c.latent_size);
  get("k_ddim", c.k_ddim);
  get("cfg_scale", c.cfg_scale);
  get("n_condition_views", c.n_condition_views);
  get("lambda_sample_start", c.lambda_sample_start);
  get("lambda_sample_end", c.lambda_sample_end);
  get("t_min_start", c.t_min_start);
  get("t_min_end", c.t_min_end);
  get("lambda_distortion", c.lambda_distortion);
  get("use_perceptual", c.use_perceptual);
  get("lr_density", c.lr_density);
  get("lr_color", c.lr_color);
  get("adam_beta1", c.adam_beta1);
  get("adam_beta2", c.adam_beta2);
  get("adam_eps", c.adam_eps);
  get("feature_channels", c.feature_channels);
  get("pe_frequencies", c.pe_frequencies);
  get("epipolar_depth_samples", c.epipolar_depth_samples);
  get("epipolar_beta", c.epipolar_beta);
  if (j.contains("path_kind")) {
    const std::string s = j.at("path_kind").get<std::string>();
    if (s == "ellipse")
      c.path_kind = PathKind::Ellipse;
    else if (s == "bspline")
      c.path_kind = PathKind::Bspline;
    else
      throw ArgumentError("config: unknown path_kind '" + s + "'");
  }
  get("perturb_position_radius", c.perturb.position_radius);
  get("perturb_lookat_radius", c.perturb.lookat_radius);
  get("perturb_up_angle_max", c.perturb.up_angle_max);
  if (j.contains("prior")) {
    const std::string s = j.at("prior").get<std::string>();
    if (s == "none")
      c.prior = PriorKind::None;
    else if (s == "oracle")
      c.prior = PriorKind::Oracle;
    else if (s == "oracle-noisy")
      c.prior = PriorKind::OracleNoisy;
    else
      throw ArgumentError("config: unknown prior '" + s + "'");
  }
  get("oracle_blur_sigma", c.oracle_blur_sigma);
  get("oracle_noise_floor", c.oracle_noise_floor);
  if (j.contains("mode")) {
    const std::string s = j.at("mode").get<std::string>();
    if (s == "sample")
      c.mode = SampleMode::Sample;
    else if (s == "sds")
      c.mode = SampleMode::Sds;
    else
      throw ArgumentError("config: unknown mode '" + s + "'");
  }
  get("view_count_scaling", c.view_count_scaling);
  if (j.contains("distortion_on")) {
    const std::string s = j.at("distortion_on").get<std::string>();
    if (s == "both")
      c.distortion_on = DistortionOn::Both;
    else if (s == "recon")
      c.distortion_on = DistortionOn::Recon;
    else if (s == "novel")
      c.distortion_on = DistortionOn::Novel;
    else
      throw ArgumentError("config: unknown distortion_on '" + s + "'");
  }
  get("render_then_downsample", c.render_then_downsample);
  get("threads", c.threads);
  return c;
}

SceneDatasetSpec dataset_spec_from_json(const Json& j) {
  require_keys(j,
               {"schema_version", "n_primitives", "seed", "n_train", "n_test",
                "width", "height"},
               "scene spec");
  check_schema(j, "scene spec");
  SceneDatasetSpec spec;
  if (j.contains("n_primitives")) spec.n_primitives = j.at("n_primitives").get<int>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("n_train")) spec.n_train = j.at("n_train").get<int>();
  if (j.contains("n_test")) spec.n_test = j.at("n_test").get<int>();
  if (j.contains("width")) spec.width = j.at("width").get<int>();
  if (j.contains("height")) spec.height = j.at("height").get<int>();
  return spec;
}

void save_dataset(const std::string& dir, const Dataset& dataset) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_json_file(dir + "/scene.json", scene_to_json(dataset.scene));

  Json manifest{{"schema_version", kSchemaVersion},
                {"scene", "scene.json"},
                {"width", dataset.width},
                {"height", dataset.height}};
  auto dump_split = [&](const char* name, const std::vector<PosedImage>& views) {
    Json arr = Json::array();
    for (size_t i = 0; i < views.size(); ++i) {
      char file[64];
      std::snprintf(file, sizeof(file), "%s_%03zu.png", name, i);
      write_png(dir + "/" + file, views[i].image);
      arr.push_back(Json{{"image", file}, {"pose", pose_to_json(views[i].pose)}});
    }
    manifest[name] = arr;
  };
  dump_split("train", dataset.train);
  dump_split("test", dataset.test);
  save_json_file(dir + "/manifest.json", manifest);
}

Dataset load_dataset(const std::string& dir) {
  const Json manifest = load_json_file(dir + "/manifest.json");
  check_schema(manifest, "manifest");
  Dataset dataset;
  dataset.scene =
      scene_from_json(load_json_file(dir + "/" + manifest.at("scene").get<std::string>()));
  dataset.width = manifest.at("width").get<int>();
  dataset.height = manifest.at("height").get<int>();
  auto load_split = [&](const char* name, std::vector<PosedImage>& out) {
    for (const auto& entry : manifest.at(name)) {
      const Image img = read_png(dir + "/" + entry.at("image").get<std::string>());
      out.emplace_back(img, pose_from_json(entry.at("pose")));
    }
  };
  load_split("train", dataset.train);
  load_split("test", dataset.test);
  return dataset;
}

Json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ArgumentError("json parse error in " + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
  if (!os) throw IoError("write failed for " + path);
}

}  // namespace voxprior
