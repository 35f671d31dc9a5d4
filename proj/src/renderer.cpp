// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/renderer.hpp"

#include <cmath>

#include "voxprior/parallel.hpp"
#include "voxprior/rng.hpp"

namespace voxprior {

namespace {
// Caps the optical depth of a single interval so 1-alpha never underflows to
// zero (the backward pass divides by it).
constexpr double kMaxTau = 80.0;
constexpr double kDepthEps = 1e-10;
}  // namespace

double spacing_to_distance(Spacing spacing, double near, double far, double s) {
  if (spacing == Spacing::Uniform) return near + (far - near) * s;

  // Uniform [near,1] for s in [0,0.5], then 1/t linear down to 1/far.
  if (far <= 1.0) return near + (far - near) * s;
  if (near >= 1.0) {
    const double inv = 1.0 / near + (1.0 / far - 1.0 / near) * s;
    return 1.0 / inv;
  }
  if (s <= 0.5) return near + (1.0 - near) * (2.0 * s);
  const double inv = 1.0 + (1.0 / far - 1.0) * (2.0 * s - 1.0);
  return 1.0 / inv;
}

void RenderConfig::validate() const {
  if (width <= 0 || height <= 0) throw ArgumentError("render: bad resolution");
  if (!(near > 0.0) || !(far > near)) throw ArgumentError("render: need 0 < near < far");
  if (n_samples < 2) throw ArgumentError("render: need at least 2 samples");
}

RayRender render_ray(const VoxelField& field, const Ray& ray, double near,
                     double far, int n_samples, Spacing spacing,
                     const Eigen::Vector3d& background, const double* jitter,
                     RenderRecords* records, int ray_index) {
  if (!(near > 0.0) || !(far > near)) throw ArgumentError("render_ray: need 0 < near < far");
  if (n_samples < 2) throw ArgumentError("render_ray: need at least 2 samples");

  RayRender out;
  double transmittance = 1.0;
  double depth_acc = 0.0;
  const double ds = 1.0 / n_samples;

  for (int i = 0; i < n_samples; ++i) {
    const double u = jitter ? jitter[i] : 0.5;
    const double s0 = i * ds;
    const double s_mid = (i + u) * ds;
    const double t0 = spacing_to_distance(spacing, near, far, s0);
    const double t1 = spacing_to_distance(spacing, near, far, s0 + ds);
    const double t_mid = spacing_to_distance(spacing, near, far, s_mid);
    const double delta = t1 - t0;

    const FieldSample sample = field.query(ray.point_at(t_mid));
    const double tau = std::min(sample.density * delta, kMaxTau);
    const double trans = std::exp(-tau);
    const double alpha = 1.0 - trans;
    const double w = transmittance * alpha;

    out.rgb += w * sample.rgb;
    depth_acc += w * t_mid;
    out.accumulation += w;

    if (records) {
      const Eigen::Index f = records->flat(ray_index, i);
      records->t_mid[f] = t_mid;
      records->s_mid[f] = s_mid;
      records->delta[f] = delta;
      records->s_delta[f] = ds;
      records->trans[f] = trans;
      records->big_t[f] = transmittance;
      records->weight[f] = w;
      records->rgb[f] = sample.rgb;
    }
    transmittance *= trans;
  }

  out.rgb += transmittance * background;
  out.depth = depth_acc / std::max(out.accumulation, kDepthEps);
  if (records) {
    records->origins[ray_index] = ray.origin;
    records->directions[ray_index] = ray.direction;
  }
  return out;
}

RenderOutput render_image(const VoxelField& field, const CameraPose& pose,
                          const RenderConfig& config) {
  config.validate();
  const CameraPose cam = resize_camera(pose, config.width, config.height);

  RenderOutput out;
  out.rgb = Image(config.width, config.height, 3);
  out.depth = Image(config.width, config.height, 1);
  out.accumulation = Image(config.width, config.height, 1);

  RenderRecords& rec = out.records;
  rec.n_rays = config.width * config.height;
  rec.n_samples = config.n_samples;
  rec.near = config.near;
  rec.far = config.far;
  rec.background = config.background;
  rec.field_version = field.version();
  rec.origins.resize(rec.n_rays);
  rec.directions.resize(rec.n_rays);
  const Eigen::Index total = static_cast<Eigen::Index>(rec.n_rays) * rec.n_samples;
  rec.t_mid.resize(total);
  rec.s_mid.resize(total);
  rec.delta.resize(total);
  rec.s_delta.resize(total);
  rec.trans.resize(total);
  rec.big_t.resize(total);
  rec.weight.resize(total);
  rec.rgb.resize(total);

  parallel_for(rec.n_rays, config.threads, [&](long ray_index) {
    const int px = static_cast<int>(ray_index) % config.width;
    const int py = static_cast<int>(ray_index) / config.width;
    const Ray ray =
        ray_for_pixel(cam, Eigen::Vector2d(px + 0.5, py + 0.5));

    std::vector<double> jitter;
    const double* jitter_ptr = nullptr;
    if (config.jitter) {
      jitter.resize(config.n_samples);
      for (int i = 0; i < config.n_samples; ++i)
        jitter[i] = hash_unit(config.seed, static_cast<std::uint64_t>(ray_index), i);
      jitter_ptr = jitter.data();
    }

    const RayRender r =
        render_ray(field, ray, config.near, config.far, config.n_samples,
                   config.spacing, config.background, jitter_ptr, &rec,
                   static_cast<int>(ray_index));
    out.rgb.data.row(ray_index) = r.rgb.transpose();
    out.depth.data(ray_index, 0) = r.depth;
    out.accumulation.data(ray_index, 0) = r.accumulation;
  });
  return out;
}

namespace {

void check_records(const VoxelField& field, const RenderRecords& records) {
  if (records.field_version != field.version())
    throw InvalidStateError(
        "render records are stale: field parameters changed since the forward pass");
}

/// Backpropagates per-sample weight gradients g_w (and, when up_rgb is given,
/// per-sample color gradients w_i * up_rgb) of one ray into the field.
void backprop_ray(VoxelField& field, const RenderRecords& rec, int ray,
                  const std::vector<double>& g_w, const Eigen::Vector3d* up_rgb) {
  const int n = rec.n_samples;
  double suffix = 0.0;  // sum_{j>i} g_w[j] * w_j
  for (int i = n - 1; i >= 0; --i) {
    const Eigen::Index f = rec.flat(ray, i);
    const double d_alpha = rec.big_t[f] * g_w[i] - suffix / rec.trans[f];
    suffix += g_w[i] * rec.weight[f];

    // alpha = 1 - exp(-sigma*delta), so d sigma = d_alpha * delta * trans.
    const double d_sigma = d_alpha * rec.delta[f] * rec.trans[f];
    Eigen::Vector3d d_color = Eigen::Vector3d::Zero();
    if (up_rgb) d_color = rec.weight[f] * (*up_rgb);

    const Eigen::Vector3d point =
        rec.origins[ray] + rec.t_mid[f] * rec.directions[ray];
    field.query_backward(point, d_sigma, d_color);
  }
}

}  // namespace

void render_backward(VoxelField& field, const RenderRecords& records,
                     const Image& d_rgb, const Image* d_depth) {
  check_records(field, records);
  if (d_rgb.pixel_count() != records.n_rays || d_rgb.channels() != 3)
    throw ArgumentError("render_backward: upstream shape mismatch");
  if (d_depth && (d_depth->pixel_count() != records.n_rays || d_depth->channels() != 1))
    throw ArgumentError("render_backward: depth upstream shape mismatch");

  const int n = records.n_samples;
  std::vector<double> g_w(n);
  for (int ray = 0; ray < records.n_rays; ++ray) {
    const Eigen::Vector3d up_rgb = d_rgb.data.row(ray).transpose();

    double acc = 0.0, depth_num = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Index f = records.flat(ray, i);
      acc += records.weight[f];
      depth_num += records.weight[f] * records.t_mid[f];
    }

    double up_depth = 0.0;
    double depth = 0.0;
    const double acc_clamped = std::max(acc, kDepthEps);
    if (d_depth) {
      up_depth = d_depth->data(ray, 0);
      depth = depth_num / acc_clamped;
    }

    for (int i = 0; i < n; ++i) {
      const Eigen::Index f = records.flat(ray, i);
      // rgb = sum w_i c_i + (1 - sum w_i) * bg, so d rgb / d w_i = c_i - bg.
      double g = (records.rgb[f] - records.background).dot(up_rgb);
      if (d_depth) {
        const double d_depth_dw =
            acc > kDepthEps ? (records.t_mid[f] - depth) / acc_clamped
                            : records.t_mid[f] / kDepthEps;
        g += up_depth * d_depth_dw;
      }
      g_w[i] = g;
    }
    backprop_ray(field, records, ray, g_w, &up_rgb);
  }
}

double distortion_loss(const RenderRecords& records) {
  const int n = records.n_samples;
  double total = 0.0;
  for (int ray = 0; ray < records.n_rays; ++ray) {
    double loss = 0.0;
    double prefix_w = 0.0, prefix_ws = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Index f = records.flat(ray, i);
      const double w = records.weight[f];
      const double s = records.s_mid[f];
      // Samples are ordered in s, so the bilateral term folds into prefixes.
      loss += 2.0 * w * (s * prefix_w - prefix_ws);
      loss += w * w * records.s_delta[f] / 3.0;
      prefix_w += w;
      prefix_ws += w * s;
    }
    total += loss;
  }
  return total / std::max(records.n_rays, 1);
}

void distortion_loss_backward(VoxelField& field, const RenderRecords& records,
                              double upstream) {
  check_records(field, records);
  const int n = records.n_samples;
  const double scale = upstream / std::max(records.n_rays, 1);

  std::vector<double> g_w(n);
  for (int ray = 0; ray < records.n_rays; ++ray) {
    double total_w = 0.0, total_ws = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Index f = records.flat(ray, i);
      total_w += records.weight[f];
      total_ws += records.weight[f] * records.s_mid[f];
    }

    double prefix_w = 0.0, prefix_ws = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Index f = records.flat(ray, i);
      const double w = records.weight[f];
      const double s = records.s_mid[f];
      // d/dw_i of sum_jk w_j w_k |s_j - s_k| = 2 sum_j w_j |s_i - s_j|.
      const double suffix_w = total_w - prefix_w - w;
      const double suffix_ws = total_ws - prefix_ws - w * s;
      const double pairwise = s * prefix_w - prefix_ws + suffix_ws - s * suffix_w;
      g_w[i] = scale * (2.0 * pairwise + 2.0 / 3.0 * w * records.s_delta[f]);
      prefix_w += w;
      prefix_ws += w * s;
    }
    backprop_ray(field, records, ray, g_w, nullptr);
  }
}

}  // namespace voxprior
