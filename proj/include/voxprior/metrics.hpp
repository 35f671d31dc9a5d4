// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "voxprior/types.hpp"

namespace voxprior {

/// Peak signal-to-noise ratio of [0,1] images in dB, capped at 99 (the cap
/// stands in for infinity on identical images).
double psnr(const Image& a, const Image& b);

/// Structural similarity with an 11x11 Gaussian window (sigma 1.5),
/// K1=0.01, K2=0.03, dynamic range 1; windows fully inside the image,
/// averaged per channel then across channels.
double ssim(const Image& a, const Image& b);

}  // namespace voxprior
