// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "voxprior/types.hpp"

namespace voxprior {

/// 8-bit RGB PNG; values are clamped to [0,1] and rounded. The encoder emits
/// uncompressed (stored) deflate blocks, so output bytes are a pure function
/// of the pixels.
void write_png(const std::string& path, const Image& image);

/// Reads PNGs produced by write_png (8-bit RGB, stored deflate, filter 0);
/// anything else is an IoError.
Image read_png(const std::string& path);

/// Single-channel PFM, little-endian (scale -1.0), bottom row first.
void write_pfm(const std::string& path, const Image& image);

}  // namespace voxprior
