// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace voxprior {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad call arguments: shape mismatches, out-of-range values.
struct ArgumentError : Error {
  using Error::Error;
};

struct BoundsError : ArgumentError {
  using ArgumentError::ArgumentError;
};

// Input geometry admits no solution (parallel axes, collinear cameras, ...).
struct DegenerateGeometryError : Error {
  using Error::Error;
};

struct InsufficientDataError : Error {
  using Error::Error;
};

// An object was used outside its valid lifetime (e.g. stale render records).
struct InvalidStateError : Error {
  using Error::Error;
};

struct CapacityError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace voxprior
