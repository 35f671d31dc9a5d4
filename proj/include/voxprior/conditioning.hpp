// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "voxprior/camera.hpp"
#include "voxprior/renderer.hpp"
#include "voxprior/types.hpp"

namespace voxprior {

/// Channel layout of encode_input output. RGB first, then fixed analytic
/// features; kEncFeatureCount of them are defined, configs may keep fewer.
enum EncChannel : int {
  kEncR = 0,
  kEncG,
  kEncB,
  kEncLuminance,
  kEncDx,
  kEncDy,
  kEncGradMag1,
  kEncGradMag2,
  kEncGradMag4,
  kEncMean3,
  kEncMean7,
  kEncVar3,
  kEncVar7,
  kEncLaplacian,
  kEncDiag45,
  kEncOpponentRG,
  kEncOpponentYB,
  kEncMin3,
  kEncMax3,
  kEncCount,
};
constexpr int kEncFeatureCount = kEncCount - 3;
static_assert(kEncFeatureCount == 16);

/// Channels that vanish on constant images and ignore intensity shifts.
inline const std::vector<int>& encode_gradient_channels() {
  static const std::vector<int> channels = {kEncDx,       kEncDy,
                                            kEncGradMag1, kEncGradMag2,
                                            kEncGradMag4, kEncLaplacian,
                                            kEncDiag45};
  return channels;
}

/// Deterministic per-view feature stack at full input resolution:
/// RGB plus luminance statistics, multiscale gradient magnitudes, local
/// means/variances and opponent colors.
FeatureImage encode_input(const PosedImage& input, int feature_channels = kEncFeatureCount);

struct EpipolarConfig {
  int out_width = 64;
  int out_height = 64;
  int n_depth = 128;
  double near = 0.5;
  double far = 4.0;
  Spacing spacing = Spacing::UniformThenDisparity;
  double beta = 10.0;  // photo-consistency sharpness in the depth softmax
  int feature_channels = kEncFeatureCount;
  int pe_frequencies = 6;
  std::uint64_t projection_seed = 0x9d5f;
  int threads = 1;
};

/// Fuses posed input views into a target-view conditioning image. Per target
/// pixel the ray is marched, samples are reprojected into every input and
/// gathered bilinearly; cross-view mean/variance plus positionally encoded
/// locations form per-sample aggregates, a photo-consistency softmax over
/// depth fuses them, and a fixed seeded orthonormal projection reduces the
/// fused aggregate to the feature channels. Output channels: RGB head,
/// feature_channels projected features, and a validity flag.
FeatureImage epipolar_render(std::span<const PosedImage> inputs,
                             std::span<const FeatureImage> input_features,
                             const CameraPose& target, const EpipolarConfig& config);

/// First three channels as a standalone RGB image.
Image rgb_channels(const FeatureImage& feature_image);

struct GatherSample {
  bool valid = false;
  Eigen::VectorXd values;  // one entry per feature-image channel
};

/// Bilinear gather of one world point in one view; invalid when the point is
/// behind the camera or within half a pixel of the image border.
GatherSample gather_at_point(const Eigen::Vector3d& point, const CameraPose& view,
                             const FeatureImage& features);

/// Mean squared error between the conditioning RGB head and the target image
/// area-downsampled to the head's resolution.
double pixelnerf_loss(const Image& rendered_rgb, const PosedImage& target);

}  // namespace voxprior
