// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/cli.hpp"

int main(int argc, char** argv) { return voxprior::cli::run(argc, argv); }
