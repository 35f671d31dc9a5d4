// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/conditioning.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "voxprior/image_ops.hpp"
#include "voxprior/parallel.hpp"
#include "voxprior/rng.hpp"

namespace voxprior {

namespace {

Image box_mean(const Image& src, int radius) {
  Image out(src.width, src.height, src.channels());
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(src.channels());
      int count = 0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
          const int sx = std::min(std::max(x + dx, 0), src.width - 1);
          const int sy = std::min(std::max(y + dy, 0), src.height - 1);
          acc += src.data.row(src.pixel_index(sx, sy));
          ++count;
        }
      out.data.row(out.pixel_index(x, y)) = acc / count;
    }
  return out;
}

/// Gradient magnitude of a single-channel image computed at a dyadic scale
/// and resampled back to full resolution. No epsilon floor: these channels
/// are never differentiated and must vanish exactly on constant images.
Image grad_mag_at_scale(const Image& lum, int scale) {
  if (scale == 1) return gradient_magnitude(lum, 0.0);
  const int w = std::max(1, lum.width / scale);
  const int h = std::max(1, lum.height / scale);
  return area_resample(gradient_magnitude(area_resample(lum, w, h), 0.0), lum.width,
                       lum.height);
}

}  // namespace

FeatureImage encode_input(const PosedImage& input, int feature_channels) {
  if (feature_channels < 1 || feature_channels > kEncFeatureCount)
    throw ArgumentError("encode_input: feature_channels out of range");
  const Image& rgb = input.image;
  const Image lum = luminance(rgb);

  FeatureImage out(rgb.width, rgb.height, 3 + feature_channels);
  out.data.leftCols(3) = rgb.data.leftCols(3);

  auto set_channel = [&](int channel, const Image& values) {
    if (channel < out.channels()) out.data.col(channel) = values.data.col(0);
  };

  set_channel(kEncLuminance, lum);

  Image dx(lum.width, lum.height, 1), dy(lum.width, lum.height, 1),
      lap(lum.width, lum.height, 1), d45(lum.width, lum.height, 1),
      min3(lum.width, lum.height, 1), max3(lum.width, lum.height, 1);
  for (int y = 0; y < lum.height; ++y)
    for (int x = 0; x < lum.width; ++x) {
      const int xl = std::max(x - 1, 0), xr = std::min(x + 1, lum.width - 1);
      const int yl = std::max(y - 1, 0), yr = std::min(y + 1, lum.height - 1);
      dx.at(x, y, 0) = 0.5 * (lum.at(xr, y, 0) - lum.at(xl, y, 0));
      dy.at(x, y, 0) = 0.5 * (lum.at(x, yr, 0) - lum.at(x, yl, 0));
      lap.at(x, y, 0) = lum.at(xr, y, 0) + lum.at(xl, y, 0) + lum.at(x, yr, 0) +
                        lum.at(x, yl, 0) - 4.0 * lum.at(x, y, 0);
      d45.at(x, y, 0) = 0.5 * (lum.at(xr, yr, 0) - lum.at(xl, yl, 0));
      double lo = lum.at(x, y, 0), hi = lo;
      for (int wy = yl; wy <= yr; ++wy)
        for (int wx = xl; wx <= xr; ++wx) {
          lo = std::min(lo, lum.at(wx, wy, 0));
          hi = std::max(hi, lum.at(wx, wy, 0));
        }
      min3.at(x, y, 0) = lo;
      max3.at(x, y, 0) = hi;
    }
  set_channel(kEncDx, dx);
  set_channel(kEncDy, dy);
  set_channel(kEncDiag45, d45);
  set_channel(kEncMin3, min3);
  set_channel(kEncMax3, max3);
  set_channel(kEncGradMag1, grad_mag_at_scale(lum, 1));
  set_channel(kEncGradMag2, grad_mag_at_scale(lum, 2));
  set_channel(kEncGradMag4, grad_mag_at_scale(lum, 4));

  const Image mean3 = box_mean(lum, 1);
  const Image mean7 = box_mean(lum, 3);
  set_channel(kEncMean3, mean3);
  set_channel(kEncMean7, mean7);

  Image lum_sq = lum;
  lum_sq.data = lum.data.array().square();
  Image var3 = box_mean(lum_sq, 1);
  var3.data = (var3.data - mean3.data.array().square().matrix()).cwiseMax(0.0);
  Image var7 = box_mean(lum_sq, 3);
  var7.data = (var7.data - mean7.data.array().square().matrix()).cwiseMax(0.0);
  set_channel(kEncVar3, var3);
  set_channel(kEncVar7, var7);

  set_channel(kEncLaplacian, lap);

  if (kEncOpponentRG < out.channels())
    out.data.col(kEncOpponentRG) = rgb.data.col(0) - rgb.data.col(1);
  if (kEncOpponentYB < out.channels())
    out.data.col(kEncOpponentYB) =
        0.5 * (rgb.data.col(0) + rgb.data.col(1)) - rgb.data.col(2);
  return out;
}

namespace {
// Half-pixel border margin keeps the bilinear footprint inside the image;
// the epsilon admits projections that land exactly on the margin.
constexpr double kMarginSlack = 1e-9;

inline bool in_margin(double u, double v, int width, int height) {
  return u >= 0.5 - kMarginSlack && u <= width - 0.5 + kMarginSlack &&
         v >= 0.5 - kMarginSlack && v <= height - 0.5 + kMarginSlack;
}
}  // namespace

GatherSample gather_at_point(const Eigen::Vector3d& point, const CameraPose& view,
                             const FeatureImage& features) {
  GatherSample out;
  const auto proj = project(view, point);
  if (!proj) return out;
  const double u = std::clamp(proj->pixel.x(), 0.5, view.width - 0.5);
  const double v = std::clamp(proj->pixel.y(), 0.5, view.height - 0.5);
  if (!in_margin(proj->pixel.x(), proj->pixel.y(), view.width, view.height))
    return out;

  const double fx = u - 0.5, fy = v - 0.5;
  const int x0 = std::min(static_cast<int>(std::floor(fx)), features.width - 2);
  const int y0 = std::min(static_cast<int>(std::floor(fy)), features.height - 2);
  const double ax = fx - x0, ay = fy - y0;

  out.valid = true;
  out.values = ((1 - ax) * (1 - ay)) * features.data.row(features.pixel_index(x0, y0)) +
               (ax * (1 - ay)) * features.data.row(features.pixel_index(x0 + 1, y0)) +
               ((1 - ax) * ay) * features.data.row(features.pixel_index(x0, y0 + 1)) +
               (ax * ay) * features.data.row(features.pixel_index(x0 + 1, y0 + 1));
  return out;
}

namespace {

/// Rows-orthonormal projection, fixed by the seed.
Eigen::MatrixXd random_orthonormal_projection(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(cols, cols);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  return q.leftCols(rows).transpose();
}

/// sin/cos of x at frequencies pi*2^k via angle doubling; out has 2*freqs
/// entries per input dimension (sin first).
void positional_encoding(const Eigen::Vector3d& p, int freqs, double* out) {
  int idx = 0;
  for (int dim = 0; dim < 3; ++dim) {
    double s = std::sin(M_PI * p(dim));
    double c = std::cos(M_PI * p(dim));
    for (int k = 0; k < freqs; ++k) {
      out[idx++] = s;
      out[idx++] = c;
      const double s2 = 2.0 * s * c;
      const double c2 = c * c - s * s;
      s = s2;
      c = c2;
    }
  }
}

}  // namespace

FeatureImage epipolar_render(std::span<const PosedImage> inputs,
                             std::span<const FeatureImage> input_features,
                             const CameraPose& target, const EpipolarConfig& config) {
  const int n_views = static_cast<int>(inputs.size());
  if (n_views < 1) throw ArgumentError("epipolar_render: need at least one input view");
  if (input_features.size() != inputs.size())
    throw ArgumentError("epipolar_render: inputs and features differ in count");
  const int channels = static_cast<int>(input_features[0].channels());
  for (int v = 0; v < n_views; ++v) {
    if (input_features[v].width != inputs[v].image.width ||
        input_features[v].height != inputs[v].image.height ||
        input_features[v].channels() != channels)
      throw ArgumentError("epipolar_render: feature image shape mismatch");
  }

  const int pe_dims = 6 * config.pe_frequencies;
  const int agg_dims = 2 * channels + pe_dims;
  const Eigen::MatrixXd projection = random_orthonormal_projection(
      config.feature_channels, agg_dims, config.projection_seed);

  const CameraPose cam = resize_camera(target, config.out_width, config.out_height);

  // Per-view camera-frame transform, applied to ray origin/direction once per
  // pixel; samples then move along a camera-frame line.
  struct ViewFrame {
    Eigen::Matrix3d rot_t;
    Eigen::Vector3d position;
    double focal;
    Eigen::Vector2d pp;
    int width, height;
  };
  std::vector<ViewFrame> frames(n_views);
  for (int v = 0; v < n_views; ++v) {
    const CameraPose& p = inputs[v].pose;
    frames[v] = {p.rotation.transpose(), p.position, p.focal_px, p.principal_point,
                 p.width, p.height};
  }

  std::vector<double> t_mids(config.n_depth);
  const double ds = 1.0 / config.n_depth;
  for (int i = 0; i < config.n_depth; ++i)
    t_mids[i] =
        spacing_to_distance(config.spacing, config.near, config.far, (i + 0.5) * ds);

  FeatureImage out(config.out_width, config.out_height, 3 + config.feature_channels + 1);

  parallel_for(config.out_height, config.threads, [&](long row) {
    const int y = static_cast<int>(row);
    // Scratch reused across the row's pixels.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> aggregates(
        config.n_depth, agg_dims);
    Eigen::VectorXd logits(config.n_depth);
    Eigen::VectorXd mean(channels), m2(channels);
    Eigen::RowVectorXd fused(agg_dims);
    std::vector<Eigen::Vector3d> cam_origin(n_views), cam_dir(n_views);

    for (int x = 0; x < config.out_width; ++x) {
      const Ray ray = ray_for_pixel(cam, Eigen::Vector2d(x + 0.5, y + 0.5));
      // Camera-frame line of this ray in every view; samples move along it.
      for (int v = 0; v < n_views; ++v) {
        cam_origin[v] = frames[v].rot_t * (ray.origin - frames[v].position);
        cam_dir[v] = frames[v].rot_t * ray.direction;
      }
      int n_valid_samples = 0;
      double max_logit = -std::numeric_limits<double>::infinity();

      for (int i = 0; i < config.n_depth; ++i) {
        double* mean_raw = mean.data();
        double* m2_raw = m2.data();
        std::fill(mean_raw, mean_raw + channels, 0.0);
        std::fill(m2_raw, m2_raw + channels, 0.0);
        int n_valid = 0;
        for (int v = 0; v < n_views; ++v) {
          const ViewFrame& fr = frames[v];
          const Eigen::Vector3d pc = cam_origin[v] + t_mids[i] * cam_dir[v];
          if (pc.z() <= 1e-9) continue;
          double u = fr.focal * pc.x() / pc.z() + fr.pp.x();
          double w = fr.focal * pc.y() / pc.z() + fr.pp.y();
          if (!in_margin(u, w, fr.width, fr.height)) continue;
          u = std::clamp(u, 0.5, fr.width - 0.5);
          w = std::clamp(w, 0.5, fr.height - 0.5);
          const FeatureImage& feat = input_features[v];
          const double fx = u - 0.5, fy = w - 0.5;
          const int x0 = std::min(static_cast<int>(std::floor(fx)), feat.width - 2);
          const int y0 = std::min(static_cast<int>(std::floor(fy)), feat.height - 2);
          const double ax = fx - x0, ay = fy - y0;
          const double w00 = (1 - ax) * (1 - ay), w10 = ax * (1 - ay);
          const double w01 = (1 - ax) * ay, w11 = ax * ay;
          // Rows are contiguous; one fused pass over the channels.
          const double* r00 = feat.data.data() + feat.pixel_index(x0, y0) * channels;
          const double* r10 = r00 + channels;
          const double* r01 =
              feat.data.data() + feat.pixel_index(x0, y0 + 1) * channels;
          const double* r11 = r01 + channels;
          for (int ch = 0; ch < channels; ++ch) {
            const double g =
                w00 * r00[ch] + w10 * r10[ch] + w01 * r01[ch] + w11 * r11[ch];
            mean_raw[ch] += g;
            m2_raw[ch] += g * g;
          }
          ++n_valid;
        }

        if (n_valid == 0) {
          logits(i) = -std::numeric_limits<double>::infinity();
          continue;
        }
        double* agg = aggregates.data() + static_cast<Eigen::Index>(i) * agg_dims;
        double var_sum = 0.0;
        const double inv_n = 1.0 / n_valid;
        for (int ch = 0; ch < channels; ++ch) {
          const double mu = mean_raw[ch] * inv_n;
          const double var = std::max(m2_raw[ch] * inv_n - mu * mu, 0.0);
          agg[ch] = mu;
          agg[channels + ch] = var;
          var_sum += var;
        }

        // Low cross-view variance means photo-consistent depth.
        logits(i) = -config.beta * (var_sum / channels);
        max_logit = std::max(max_logit, logits(i));
        ++n_valid_samples;

        const Eigen::Vector3d point = ray.point_at(t_mids[i]);
        positional_encoding(point, config.pe_frequencies, agg + 2 * channels);
      }

      const Eigen::Index pixel = out.pixel_index(x, y);
      if (n_valid_samples == 0) {
        out.data.row(pixel).setZero();
        out.data(pixel, 0) = 0.5;
        out.data(pixel, 1) = 0.5;
        out.data(pixel, 2) = 0.5;
        continue;  // validity flag stays 0
      }

      double weight_sum = 0.0;
      fused.setZero();
      for (int i = 0; i < config.n_depth; ++i) {
        if (!std::isfinite(logits(i))) continue;
        const double w = std::exp(logits(i) - max_logit);
        fused += w * aggregates.row(i);
        weight_sum += w;
      }
      fused /= weight_sum;

      out.data.row(pixel).segment(0, 3) = fused.segment(0, 3);  // RGB head
      out.data.row(pixel).segment(3, config.feature_channels) =
          (projection * fused.transpose()).transpose();
      out.data(pixel, 3 + config.feature_channels) = 1.0;
    }
  });
  return out;
}

Image rgb_channels(const FeatureImage& feature_image) {
  Image out(feature_image.width, feature_image.height, 3);
  out.data = feature_image.data.leftCols(3);
  return out;
}

double pixelnerf_loss(const Image& rendered_rgb, const PosedImage& target) {
  if (rendered_rgb.channels() != 3)
    throw ArgumentError("pixelnerf_loss: rendered image must have 3 channels");
  const Image down =
      area_resample(target.image, rendered_rgb.width, rendered_rgb.height);
  return mse(rendered_rgb, down);
}

}  // namespace voxprior
