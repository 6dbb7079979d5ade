// Copyright 2026 The Tempo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEMPO_CORE_OPTIM_HPP_
#define TEMPO_CORE_OPTIM_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "autograd.hpp"

namespace tempo::nn {

// Linear warmup to the peak rate, then linear decay to zero at total_steps.
// Steps are 1-based.
inline double warmup_linear_decay(double peak, int step, int warmup, int total) {
  if (warmup > 0 && step <= warmup) {
    return peak * static_cast<double>(step) / static_cast<double>(warmup);
  }
  if (total <= warmup) return peak;
  const double remain = static_cast<double>(total - step) /
                        static_cast<double>(total - warmup);
  return peak * std::max(0.0, remain);
}

template <typename T>
class Adam {
 public:
  explicit Adam(const ParameterSet<T>& params, double beta1 = 0.9,
                double beta2 = 0.98, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params) {
      m_.push_back(Matrix<T>::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix<T>::Zero(p.value.rows(), p.value.cols()));
    }
  }

  void step(ParameterSet<T>& params, const Gradients<T>& grads, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    const T b1 = static_cast<T>(beta1_), b2 = static_cast<T>(beta2_);
    const T step_size = static_cast<T>(lr / c1);
    const T inv_c2 = static_cast<T>(1.0 / c2);
    const T eps = static_cast<T>(eps_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!grads.touched(i)) continue;
      const Matrix<T>& g = grads.raw(i);
      m_[i] = b1 * m_[i] + (T(1) - b1) * g;
      v_[i] = b2 * v_[i] + (T(1) - b2) * g.cwiseProduct(g);
      params[i].value.array() -=
          step_size * m_[i].array() / ((v_[i].array() * inv_c2).sqrt() + eps);
    }
  }

  int steps() const { return t_; }

 private:
  double beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Matrix<T>> m_, v_;
};

// Rescales gradients so their global L2 norm is at most max_norm; returns the
// norm before clipping.
template <typename T>
double clip_global_norm(Gradients<T>& grads, double max_norm) {
  const double norm = std::sqrt(static_cast<double>(grads.squared_norm()));
  if (max_norm > 0.0 && norm > max_norm) {
    grads.scale(static_cast<T>(max_norm / norm));
  }
  return norm;
}

}  // namespace tempo::nn

#endif  // TEMPO_CORE_OPTIM_HPP_
