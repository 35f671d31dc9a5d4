// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/metrics.hpp"

#include <cmath>
#include <vector>

namespace voxprior {

double psnr(const Image& a, const Image& b) {
  const double err = mse(a, b);
  if (err <= 0.0) return 99.0;
  return std::min(99.0, -10.0 * std::log10(err));
}

namespace {
constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

Eigen::Matrix<double, kWindow, kWindow> gaussian_window() {
  Eigen::Matrix<double, kWindow, kWindow> w;
  const int r = kWindow / 2;
  for (int y = 0; y < kWindow; ++y)
    for (int x = 0; x < kWindow; ++x) {
      const double dx = x - r, dy = y - r;
      w(y, x) = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
    }
  return w / w.sum();
}
}  // namespace

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b, "ssim");
  if (a.width < kWindow || a.height < kWindow)
    throw ArgumentError("ssim: image smaller than the 11x11 window");

  static const Eigen::Matrix<double, kWindow, kWindow> window = gaussian_window();
  constexpr double c1 = kK1 * kK1;  // dynamic range 1
  constexpr double c2 = kK2 * kK2;

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double channel_sum = 0.0;
    long count = 0;
    for (int y = 0; y + kWindow <= a.height; ++y)
      for (int x = 0; x + kWindow <= a.width; ++x) {
        double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
        for (int wy = 0; wy < kWindow; ++wy)
          for (int wx = 0; wx < kWindow; ++wx) {
            const double w = window(wy, wx);
            const double va = a.at(x + wx, y + wy, c);
            const double vb = b.at(x + wx, y + wy, c);
            mu_a += w * va;
            mu_b += w * vb;
            aa += w * va * va;
            bb += w * vb * vb;
            ab += w * va * vb;
          }
        const double var_a = aa - mu_a * mu_a;
        const double var_b = bb - mu_b * mu_b;
        const double cov = ab - mu_a * mu_b;
        channel_sum += (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2) /
                       ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        ++count;
      }
    total += channel_sum / count;
  }
  return total / a.channels();
}

}  // namespace voxprior
