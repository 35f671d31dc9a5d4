// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "voxprior/types.hpp"

namespace voxprior {

/// Variance-preserving cosine schedule: alpha(t)^2 + sigma(t)^2 = 1, with
/// alpha(0)=1 (clean) and alpha(1)=0 (pure noise).
template <typename S>
struct NoiseScheduleT {
  static S alpha(S t) { return std::cos(S(M_PI_2) * t); }
  static S sigma(S t) { return std::sin(S(M_PI_2) * t); }
};

using NoiseSchedule = NoiseScheduleT<double>;

/// z_t = alpha(t) x + sigma(t) eps.
template <typename S>
ImageT<S> add_noise(const ImageT<S>& x, S t, const ImageT<S>& eps) {
  require_same_shape(x, eps, "add_noise");
  if (t < S(0) || t > S(1)) throw ArgumentError("add_noise: t must be in [0,1]");
  ImageT<S> z = x;
  z.data = NoiseScheduleT<S>::alpha(t) * x.data + NoiseScheduleT<S>::sigma(t) * eps.data;
  return z;
}

/// Deterministic denoising step: recover the clean estimate from the current
/// noise prediction, then renoise at the lower level.
template <typename S>
ImageT<S> ddim_step(const ImageT<S>& z, S t, S t_next, const ImageT<S>& eps_hat) {
  require_same_shape(z, eps_hat, "ddim_step");
  if (!(t_next < t) || t_next < S(0) || t > S(1))
    throw ArgumentError("ddim_step: need 0 <= t_next < t <= 1");
  const S alpha = std::max(NoiseScheduleT<S>::alpha(t), S(1e-6));
  ImageT<S> out = z;
  // x0_hat = (z - sigma(t) eps_hat) / alpha(t)
  out.data = (z.data - NoiseScheduleT<S>::sigma(t) * eps_hat.data) / alpha;
  out.data = NoiseScheduleT<S>::alpha(t_next) * out.data +
             NoiseScheduleT<S>::sigma(t_next) * eps_hat.data;
  return out;
}

/// Classifier-free guidance: uncond + scale * (cond - uncond), evaluated in
/// the algebraically equal lerp form so scales 0 and 1 are exact.
template <typename S>
ImageT<S> cfg_combine(const ImageT<S>& eps_uncond, const ImageT<S>& eps_cond,
                      S scale) {
  require_same_shape(eps_uncond, eps_cond, "cfg_combine");
  ImageT<S> out = eps_uncond;
  out.data = (S(1) - scale) * eps_uncond.data + scale * eps_cond.data;
  return out;
}

}  // namespace voxprior
