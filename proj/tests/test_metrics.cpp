// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "voxprior/metrics.hpp"

using namespace voxprior;

TEST_CASE("identical images hit the psnr cap and unit ssim") {
  Rng rng(1);
  const Image img = testing::random_image(rng, 32, 32);
  CHECK(psnr(img, img) == 99.0);
  CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("psnr of sigma 0.1 noise is 20 dB") {
  Rng rng(2);
  double total = 0.0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    Image img(16, 16, 3);
    img.data.setConstant(0.5);
    Image noisy = img;
    for (Eigen::Index i = 0; i < noisy.data.size(); ++i)
      noisy.data(i) += 0.1 * rng.normal();
    total += psnr(img, noisy);
  }
  CHECK(std::abs(total / trials - 20.0) < 0.2);
}

namespace {
// Straightforward re-derivation of windowed ssim, the independent route: an
// explicit double loop with the same Gaussian window constants.
double ssim_reference(const Image& a, const Image& b) {
  const int win = 11;
  const double sigma = 1.5, k1 = 0.01, k2 = 0.03;
  Eigen::MatrixXd w(win, win);
  for (int y = 0; y < win; ++y)
    for (int x = 0; x < win; ++x)
      w(y, x) = std::exp(-((x - 5.0) * (x - 5.0) + (y - 5.0) * (y - 5.0)) /
                         (2 * sigma * sigma));
  w /= w.sum();

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double acc = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + win <= a.height; ++y0)
      for (int x0 = 0; x0 + win <= a.width; ++x0) {
        double ma = 0, mb = 0;
        for (int y = 0; y < win; ++y)
          for (int x = 0; x < win; ++x) {
            ma += w(y, x) * a.at(x0 + x, y0 + y, c);
            mb += w(y, x) * b.at(x0 + x, y0 + y, c);
          }
        double va = 0, vb = 0, cov = 0;
        for (int y = 0; y < win; ++y)
          for (int x = 0; x < win; ++x) {
            const double da = a.at(x0 + x, y0 + y, c) - ma;
            const double db = b.at(x0 + x, y0 + y, c) - mb;
            va += w(y, x) * da * da;
            vb += w(y, x) * db * db;
            cov += w(y, x) * da * db;
          }
        acc += (2 * ma * mb + k1 * k1) * (2 * cov + k2 * k2) /
               ((ma * ma + mb * mb + k1 * k1) * (va + vb + k2 * k2));
        ++count;
      }
    total += acc / count;
  }
  return total / a.channels();
}
}  // namespace

TEST_CASE("ssim matches an independent reference implementation") {
  Rng rng(3);
  const Image a = testing::random_image(rng, 24, 24);
  Image b = a;
  for (Eigen::Index i = 0; i < b.data.size(); ++i) b.data(i) += 0.05 * rng.normal();
  // The two routes compute mu/var in different orders; agreement is numeric,
  // not bitwise.
  CHECK(ssim(a, b) == doctest::Approx(ssim_reference(a, b)).epsilon(1e-9));
}

TEST_CASE("ssim of an image against its negative is low") {
  Rng rng(4);
  // Content away from mid-gray, otherwise 1-x is too close to x.
  Image img(32, 32, 3);
  for (Eigen::Index i = 0; i < img.data.size(); ++i)
    img.data(i) = rng.uniform() < 0.5 ? rng.uniform(0.0, 0.2) : rng.uniform(0.8, 1.0);
  Image negative = img;
  negative.data = 1.0 - negative.data.array();
  CHECK(ssim(img, negative) < 0.2);
}

TEST_CASE("psnr decreases with error magnitude") {
  Image a(16, 16, 3);
  a.data.setConstant(0.5);
  Image b = a;
  b.data.array() += 0.01;
  Image c = a;
  c.data.array() += 0.1;
  CHECK(psnr(a, b) > psnr(a, c));
  CHECK(psnr(a, c) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("ssim rejects undersized images") {
  const Image tiny(8, 8, 3);
  CHECK_THROWS_AS(ssim(tiny, tiny), ArgumentError);
}
