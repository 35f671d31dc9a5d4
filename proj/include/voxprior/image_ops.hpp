// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "voxprior/types.hpp"

namespace voxprior {

/// Exact area-averaging resample (box filter over the overlap of source and
/// destination pixel footprints); handles non-integer ratios.
Image area_resample(const Image& src, int width, int height);

/// Adjoint of area_resample: distributes destination-space gradients back to
/// source pixels with the same overlap weights.
Image area_resample_adjoint(const Image& d_dst, int src_width, int src_height);

/// Separable Gaussian blur with replicate borders; sigma <= 0 is identity.
Image gaussian_blur(const Image& src, double sigma);

/// Per-channel gradient magnitude from central differences with replicate
/// borders: sqrt(gx^2 + gy^2 + eps).
Image gradient_magnitude(const Image& src, double eps = 1e-12);

/// d(sum_i upstream_i * gm_i)/d(src) for gradient_magnitude.
Image gradient_magnitude_backward(const Image& src, const Image& upstream,
                                  double eps = 1e-12);

/// Single-channel luminance (Rec. 601 weights) of an RGB image.
Image luminance(const Image& rgb);

Image clamp01(const Image& src);

/// Constant-valued image.
Image constant_image(int width, int height, const Eigen::Vector3d& value);

}  // namespace voxprior
