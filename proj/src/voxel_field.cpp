// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#include "voxprior/voxel_field.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace voxprior {

namespace {
constexpr char kMagic[5] = {'V', 'O', 'X', 'F', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

template <typename T>
void write_raw(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw IoError("checkpoint: truncated file");
  return value;
}
}  // namespace

VoxelField::VoxelField(const Eigen::Vector3i& resolution,
                       const Eigen::Vector3d& bbox_min,
                       const Eigen::Vector3d& bbox_max)
    : res_(resolution), lo_(bbox_min), hi_(bbox_max) {
  if ((res_.array() < 2).any())
    throw ArgumentError("VoxelField: resolution must be at least 2 per axis");
  if ((hi_.array() <= lo_.array()).any())
    throw ArgumentError("VoxelField: bbox max must exceed bbox min");
  const Eigen::Index n = node_count();
  density_param = Eigen::VectorXd::Constant(n, -2.0);
  color_param.setZero(n, 3);
  density_grad = Eigen::VectorXd::Zero(n);
  color_grad.setZero(n, 3);
}

VoxelField VoxelField::make_default(int resolution) {
  return VoxelField(Eigen::Vector3i::Constant(resolution),
                    Eigen::Vector3d::Constant(-1.0), Eigen::Vector3d::Constant(1.0));
}

Eigen::Vector3d VoxelField::node_position(int ix, int iy, int iz) const {
  const Eigen::Vector3d f(static_cast<double>(ix) / (res_.x() - 1),
                          static_cast<double>(iy) / (res_.y() - 1),
                          static_cast<double>(iz) / (res_.z() - 1));
  return lo_ + f.cwiseProduct(hi_ - lo_);
}

bool VoxelField::corners(const Eigen::Vector3d& point, Corner out[8]) const {
  if ((point.array() < lo_.array()).any() || (point.array() > hi_.array()).any())
    return false;

  int base[3];
  double frac[3];
  for (int axis = 0; axis < 3; ++axis) {
    const double g =
        (point(axis) - lo_(axis)) / (hi_(axis) - lo_(axis)) * (res_(axis) - 1);
    int i0 = static_cast<int>(std::floor(g));
    i0 = std::min(std::max(i0, 0), res_(axis) - 2);
    base[axis] = i0;
    frac[axis] = g - i0;
  }

  int c = 0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? frac[0] : 1.0 - frac[0]) *
                         (dy ? frac[1] : 1.0 - frac[1]) *
                         (dz ? frac[2] : 1.0 - frac[2]);
        out[c++] = {node_index(base[0] + dx, base[1] + dy, base[2] + dz), w};
      }
  return true;
}

FieldSample VoxelField::query(const Eigen::Vector3d& point) const {
  Corner corner[8];
  if (!corners(point, corner)) return FieldSample{0.0, Eigen::Vector3d::Constant(0.5)};

  const double* density = density_param.data();
  const double* color = color_param.data();  // row-major, 3 per node
  double raw_density = 0.0;
  double raw_color[3] = {0.0, 0.0, 0.0};
  for (const Corner& c : corner) {
    raw_density += c.weight * density[c.index];
    const double* row = color + c.index * 3;
    raw_color[0] += c.weight * row[0];
    raw_color[1] += c.weight * row[1];
    raw_color[2] += c.weight * row[2];
  }

  FieldSample s;
  s.density = softplus(raw_density);
  s.rgb = Eigen::Vector3d(sigmoid(raw_color[0]), sigmoid(raw_color[1]),
                          sigmoid(raw_color[2]));
  return s;
}

void VoxelField::query_backward(const Eigen::Vector3d& point, double d_density,
                                const Eigen::Vector3d& d_rgb) {
  Corner corner[8];
  if (!corners(point, corner)) return;

  const double* density = density_param.data();
  const double* color = color_param.data();
  double raw_density = 0.0;
  double raw_color[3] = {0.0, 0.0, 0.0};
  for (const Corner& c : corner) {
    raw_density += c.weight * density[c.index];
    const double* row = color + c.index * 3;
    raw_color[0] += c.weight * row[0];
    raw_color[1] += c.weight * row[1];
    raw_color[2] += c.weight * row[2];
  }

  const double d_raw_density = d_density * softplus_grad(raw_density);
  double d_raw_color[3];
  for (int ch = 0; ch < 3; ++ch) {
    const double s = sigmoid(raw_color[ch]);
    d_raw_color[ch] = d_rgb(ch) * s * (1.0 - s);
  }

  double* dg = density_grad.data();
  double* cg = color_grad.data();
  for (const Corner& c : corner) {
    dg[c.index] += c.weight * d_raw_density;
    double* row = cg + c.index * 3;
    row[0] += c.weight * d_raw_color[0];
    row[1] += c.weight * d_raw_color[1];
    row[2] += c.weight * d_raw_color[2];
  }
}

void VoxelField::zero_grads() {
  density_grad.setZero();
  color_grad.setZero();
}

void VoxelField::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("checkpoint: cannot open for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  for (int axis = 0; axis < 3; ++axis)
    write_raw(os, static_cast<std::uint32_t>(res_(axis)));
  for (int axis = 0; axis < 3; ++axis) write_raw(os, lo_(axis));
  for (int axis = 0; axis < 3; ++axis) write_raw(os, hi_(axis));

  const Eigen::Index n = node_count();
  std::vector<float> buf(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) buf[i] = static_cast<float>(density_param(i));
  os.write(reinterpret_cast<const char*>(buf.data()), n * sizeof(float));

  buf.resize(static_cast<size_t>(n) * 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int ch = 0; ch < 3; ++ch)
      buf[static_cast<size_t>(i) * 3 + ch] = static_cast<float>(color_param(i, ch));
  os.write(reinterpret_cast<const char*>(buf.data()), n * 3 * sizeof(float));
  if (!os) throw IoError("checkpoint: write failed: " + path);
}

VoxelField VoxelField::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("checkpoint: cannot open: " + path);
  char magic[5];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("checkpoint: bad magic (expected VOXF1)");

  Eigen::Vector3i res;
  for (int axis = 0; axis < 3; ++axis)
    res(axis) = static_cast<int>(read_raw<std::uint32_t>(is));
  Eigen::Vector3d lo, hi;
  for (int axis = 0; axis < 3; ++axis) lo(axis) = read_raw<double>(is);
  for (int axis = 0; axis < 3; ++axis) hi(axis) = read_raw<double>(is);

  VoxelField field(res, lo, hi);
  const Eigen::Index n = field.node_count();
  std::vector<float> buf(static_cast<size_t>(n));
  is.read(reinterpret_cast<char*>(buf.data()), n * sizeof(float));
  if (!is) throw IoError("checkpoint: truncated density block");
  for (Eigen::Index i = 0; i < n; ++i) field.density_param(i) = buf[i];

  buf.resize(static_cast<size_t>(n) * 3);
  is.read(reinterpret_cast<char*>(buf.data()), n * 3 * sizeof(float));
  if (!is) throw IoError("checkpoint: truncated color block");
  for (Eigen::Index i = 0; i < n; ++i)
    for (int ch = 0; ch < 3; ++ch)
      field.color_param(i, ch) = buf[static_cast<size_t>(i) * 3 + ch];

  field.mark_params_changed();
  return field;
}

}  // namespace voxprior
