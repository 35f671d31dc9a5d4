// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cmath>

namespace voxprior {

struct AdamConfig {
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
};

/// Adaptive-moment descent state for one flat parameter block, with the usual
/// bias correction.
class AdamState {
 public:
  void step(Eigen::Ref<Eigen::VectorXd> params,
            const Eigen::Ref<const Eigen::VectorXd>& grads, const AdamConfig& cfg) {
    if (m_.size() != params.size()) {
      m_ = Eigen::VectorXd::Zero(params.size());
      v_ = Eigen::VectorXd::Zero(params.size());
      t_ = 0;
    }
    ++t_;
    m_ = cfg.beta1 * m_ + (1.0 - cfg.beta1) * grads;
    v_ = cfg.beta2 * v_.array().matrix() +
         (1.0 - cfg.beta2) * grads.array().square().matrix();
    const double correction1 = 1.0 - std::pow(cfg.beta1, t_);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t_);
    params.array() -= cfg.lr * (m_.array() / correction1) /
                      ((v_.array() / correction2).sqrt() + cfg.eps);
  }

 private:
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace voxprior
