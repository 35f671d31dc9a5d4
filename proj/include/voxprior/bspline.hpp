// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "voxprior/errors.hpp"

namespace voxprior {

/// Clamped uniform knot vector on [0,1] for n control points of the given
/// degree: degree+1 zeros, uniform interior knots, degree+1 ones.
template <typename S>
std::vector<S> clamped_uniform_knots(int n_control, int degree) {
  if (degree < 1) throw ArgumentError("bspline: degree must be >= 1");
  if (n_control < degree + 1)
    throw InsufficientDataError("bspline: need at least degree+1 control points");
  const int n_knots = n_control + degree + 1;
  const int n_spans = n_control - degree;
  std::vector<S> knots(n_knots);
  for (int i = 0; i < n_knots; ++i) {
    if (i <= degree)
      knots[i] = S(0);
    else if (i >= n_control)
      knots[i] = S(1);
    else
      knots[i] = S(i - degree) / S(n_spans);
  }
  return knots;
}

/// de Boor evaluation of the clamped uniform B-spline at u in [0,1].
template <typename S>
Eigen::Vector3<S> bspline_eval(const std::vector<Eigen::Vector3<S>>& control,
                               int degree, S u) {
  const int n = static_cast<int>(control.size());
  const std::vector<S> knots = clamped_uniform_knots<S>(n, degree);
  u = std::min(std::max(u, S(0)), S(1));

  // Knot span index k with knots[k] <= u < knots[k+1] (clamped at the end).
  int k = degree;
  while (k < n - 1 && u >= knots[k + 1]) ++k;

  std::vector<Eigen::Vector3<S>> d(degree + 1);
  for (int j = 0; j <= degree; ++j) d[j] = control[k - degree + j];
  for (int r = 1; r <= degree; ++r) {
    for (int j = degree; j >= r; --j) {
      const int i = k - degree + j;
      const S denom = knots[i + degree - r + 1] - knots[i];
      const S t = denom > S(0) ? (u - knots[i]) / denom : S(0);
      d[j] = (S(1) - t) * d[j - 1] + t * d[j];
    }
  }
  return d[degree];
}

}  // namespace voxprior
