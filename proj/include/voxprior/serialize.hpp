// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "voxprior/camera.hpp"
#include "voxprior/pose_path.hpp"
#include "voxprior/run_config.hpp"
#include "voxprior/scenes.hpp"

namespace voxprior {

using Json = nlohmann::json;

Json pose_to_json(const CameraPose& pose);
CameraPose pose_from_json(const Json& j);

Json path_to_json(const PosePath& path);
PosePath path_from_json(const Json& j);

Json scene_to_json(const SyntheticScene& scene);
SyntheticScene scene_from_json(const Json& j);

Json run_config_to_json(const RunConfig& config);
/// Rejects unknown keys and unexpected schema versions.
RunConfig run_config_from_json(const Json& j);

struct SceneDatasetSpec {
  int n_primitives = 3;
  std::uint64_t seed = 0;
  int n_train = 3;
  int n_test = 3;
  int width = 64;
  int height = 64;
};
SceneDatasetSpec dataset_spec_from_json(const Json& j);

struct Dataset {
  SyntheticScene scene;
  std::vector<PosedImage> train;
  std::vector<PosedImage> test;
  int width = 0;
  int height = 0;
};

/// Writes scene.json, manifest.json and one PNG per view into the directory.
void save_dataset(const std::string& dir, const Dataset& dataset);
Dataset load_dataset(const std::string& dir);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace voxprior
