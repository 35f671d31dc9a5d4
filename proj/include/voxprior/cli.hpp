// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace voxprior::cli {

/// Entry point for the voxprior command-line tool.
/// Exit codes: 0 success, 2 usage or configuration problem, 3 runtime failure.
int run(int argc, const char* const* argv);

}  // namespace voxprior::cli
