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

#ifndef TEMPO_CORE_AUTOGRAD_HPP_
#define TEMPO_CORE_AUTOGRAD_HPP_

// Reverse-mode differentiation over dense row-major matrices. A Tape records
// one forward pass; parameter leaves read the live parameter values and
// write their gradients straight into a Gradients buffer.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace tempo::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
struct Parameter {
  std::string name;
  Matrix<T> value;
};

// Ordered parameter registry. Registration order is the checkpoint order.
template <typename T>
class ParameterSet {
 public:
  std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    params_.push_back({std::move(name), Matrix<T>::Zero(rows, cols)});
    return params_.size() - 1;
  }

  Parameter<T>& operator[](std::size_t id) { return params_[id]; }
  const Parameter<T>& operator[](std::size_t id) const { return params_[id]; }
  std::size_t size() const { return params_.size(); }

  std::size_t total_elements() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter<T>> params_;
};

// Gradient buffers aligned with a ParameterSet; allocated on first touch.
template <typename T>
class Gradients {
 public:
  explicit Gradients(const ParameterSet<T>& params) : grads_(params.size()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      shapes_.emplace_back(params[i].value.rows(), params[i].value.cols());
    }
  }

  Matrix<T>& at(std::size_t id) {
    auto& g = grads_[id];
    if (g.size() == 0) g = Matrix<T>::Zero(shapes_[id].first, shapes_[id].second);
    return g;
  }

  bool touched(std::size_t id) const { return grads_[id].size() != 0; }
  const Matrix<T>& raw(std::size_t id) const { return grads_[id]; }
  std::size_t size() const { return grads_.size(); }

  void zero() {
    for (auto& g : grads_) {
      if (g.size() != 0) g.setZero();
    }
  }

  T squared_norm() const {
    T s = 0;
    for (const auto& g : grads_) {
      if (g.size() != 0) s += g.squaredNorm();
    }
    return s;
  }

  void scale(T factor) {
    for (auto& g : grads_) {
      if (g.size() != 0) g *= factor;
    }
  }

 private:
  std::vector<Matrix<T>> grads_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes_;
};

struct Var {
  int id = -1;
};

// Shared pointwise math, also used by the no-tape inference path.
template <typename T>
T gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x / std::sqrt(T(2))));
}

template <typename T>
T gelu_grad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x / std::sqrt(T(2))));
  const T pdf = std::exp(T(-0.5) * x * x) / std::sqrt(T(2) * T(M_PI));
  return cdf + x * pdf;
}

// Row-wise layer normalization; also returns the normalized rows and the
// reciprocal standard deviations for the backward pass.
template <typename T>
void layer_norm_rows(const Matrix<T>& x, const Matrix<T>& gain,
                     const Matrix<T>& bias, T eps, Matrix<T>& y,
                     Matrix<T>* xhat_out, std::vector<T>* rstd_out) {
  const Eigen::Index n = x.rows(), c = x.cols();
  y.resize(n, c);
  if (xhat_out) xhat_out->resize(n, c);
  if (rstd_out) rstd_out->resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = x.row(r);
    const T mean = row.mean();
    const T var = (row.array() - mean).square().mean();
    const T rstd = T(1) / std::sqrt(var + eps);
    auto xh = ((row.array() - mean) * rstd).matrix();
    y.row(r) = (xh.array() * gain.array() + bias.array()).matrix();
    if (xhat_out) xhat_out->row(r) = xh;
    if (rstd_out) (*rstd_out)[r] = rstd;
  }
}

// Softmax over each row after adding an optional 0 / -inf mask. Rows that
// are fully masked come out as zeros.
template <typename T>
void softmax_rows_inplace(Matrix<T>& x) {
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    const T mx = row.maxCoeff();
    if (!std::isfinite(mx)) {
      row.setZero();
      continue;
    }
    row = (row.array() - mx).exp().matrix();
    row /= row.sum();
  }
}

template <typename T>
class Tape {
 public:
  Tape(const ParameterSet<T>& params, Gradients<T>* grads)
      : params_(&params), grads_(grads) {
    nodes_.reserve(256);
  }

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return grads_ != nullptr; }

  const Matrix<T>& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.param >= 0 ? (*params_)[n.param].value : n.value;
  }

  T scalar(Var v) const { return value(v)(0, 0); }

  Var param(std::size_t id) {
    Node n;
    n.param = static_cast<int>(id);
    n.needs_grad = recording();
    return push(std::move(n));
  }

  Var constant(Matrix<T> v) {
    Node n;
    n.value = std::move(v);
    return push(std::move(n));
  }

  // Seeds d(loss)/d(loss) = 1 and runs every recorded backward step.
  void backward(Var loss) {
    if (!recording()) {
      throw Error(ErrorCode::kInternal, "backward on a non-recording tape");
    }
    grad_ref(loss.id).setOnes();
    for (int i = loss.id; i >= 0; --i) {
      Node& n = nodes_[i];
      if (!n.backward || !n.needs_grad) continue;
      if (n.param < 0 && n.grad.size() == 0) continue;  // unreached
      n.backward();
    }
  }

  // ---- ops -----------------------------------------------------------

  Var matmul(Var a, Var b) {
    Matrix<T> out = value(a) * value(b);
    return op(std::move(out), {a, b}, [this, a, b](int self) {
      const Matrix<T>& g = grad_ref(self);
      if (needs(a)) grad_ref(a.id).noalias() += g * value(b).transpose();
      if (needs(b)) grad_ref(b.id).noalias() += value(a).transpose() * g;
    });
  }

  // a * b^T
  Var matmul_nt(Var a, Var b) {
    Matrix<T> out = value(a) * value(b).transpose();
    return op(std::move(out), {a, b}, [this, a, b](int self) {
      const Matrix<T>& g = grad_ref(self);
      if (needs(a)) grad_ref(a.id).noalias() += g * value(b);
      if (needs(b)) grad_ref(b.id).noalias() += g.transpose() * value(a);
    });
  }

  Var add(Var a, Var b) {
    check_same(a, b, "add");
    Matrix<T> out = value(a) + value(b);
    return op(std::move(out), {a, b}, [this, a, b](int self) {
      const Matrix<T>& g = grad_ref(self);
      if (needs(a)) grad_ref(a.id) += g;
      if (needs(b)) grad_ref(b.id) += g;
    });
  }

  // a (n x c) plus a 1 x c row broadcast over every row.
  Var add_row(Var a, Var row) {
    if (value(row).rows() != 1 || value(row).cols() != value(a).cols()) {
      throw Error(ErrorCode::kShapeMismatch, "add_row: bad bias shape");
    }
    Matrix<T> out = value(a).rowwise() + value(row).row(0);
    return op(std::move(out), {a, row}, [this, a, row](int self) {
      const Matrix<T>& g = grad_ref(self);
      if (needs(a)) grad_ref(a.id) += g;
      if (needs(row)) grad_ref(row.id) += g.colwise().sum();
    });
  }

  Var scale(Var a, T s) {
    Matrix<T> out = value(a) * s;
    return op(std::move(out), {a}, [this, a, s](int self) {
      if (needs(a)) grad_ref(a.id) += grad_ref(self) * s;
    });
  }

  Var hadamard(Var a, Var b) {
    check_same(a, b, "hadamard");
    Matrix<T> out = value(a).cwiseProduct(value(b));
    return op(std::move(out), {a, b}, [this, a, b](int self) {
      const Matrix<T>& g = grad_ref(self);
      if (needs(a)) grad_ref(a.id) += g.cwiseProduct(value(b));
      if (needs(b)) grad_ref(b.id) += g.cwiseProduct(value(a));
    });
  }

  Var gelu(Var a) {
    Matrix<T> out = value(a).unaryExpr([](T x) { return nn::gelu(x); });
    return op(std::move(out), {a}, [this, a](int self) {
      if (!needs(a)) return;
      grad_ref(a.id) += grad_ref(self).cwiseProduct(
          value(a).unaryExpr([](T x) { return gelu_grad(x); }));
    });
  }

  Var tanh(Var a) {
    Matrix<T> out = value(a).array().tanh().matrix();
    return op(std::move(out), {a}, [this, a](int self) {
      if (!needs(a)) return;
      const Matrix<T>& y = value(Var{self});
      grad_ref(a.id) +=
          grad_ref(self).cwiseProduct((T(1) - y.array().square()).matrix());
    });
  }

  Var sigmoid(Var a) {
    Matrix<T> out =
        (T(1) / (T(1) + (-value(a).array()).exp())).matrix();
    return op(std::move(out), {a}, [this, a](int self) {
      if (!needs(a)) return;
      const Matrix<T>& y = value(Var{self});
      grad_ref(a.id) += grad_ref(self).cwiseProduct(
          (y.array() * (T(1) - y.array())).matrix());
    });
  }

  Var layer_norm(Var x, Var gain, Var bias, T eps = T(1e-5)) {
    Matrix<T> y, xhat;
    std::vector<T> rstd;
    layer_norm_rows(value(x), value(gain), value(bias), eps, y, &xhat, &rstd);
    const int aux = stash(std::move(xhat));
    return op(std::move(y), {x, gain, bias},
              [this, x, gain, bias, aux, rstd = std::move(rstd)](int self) {
                const Matrix<T>& g = grad_ref(self);
                const Matrix<T>& xh = stash_[aux];
                if (needs(gain)) {
                  grad_ref(gain.id) += g.cwiseProduct(xh).colwise().sum();
                }
                if (needs(bias)) grad_ref(bias.id) += g.colwise().sum();
                if (!needs(x)) return;
                const auto& gv = value(gain);
                Matrix<T>& gx = grad_ref(x.id);
                const T c = static_cast<T>(xh.cols());
                for (Eigen::Index r = 0; r < xh.rows(); ++r) {
                  const auto dxh = (g.row(r).array() * gv.row(0).array()).eval();
                  const T m1 = dxh.sum() / c;
                  const T m2 = (dxh * xh.row(r).array()).sum() / c;
                  gx.row(r).array() +=
                      rstd[r] * (dxh - m1 - xh.row(r).array() * m2);
                }
              });
  }

  // Row softmax of (x + mask); mask entries are 0 or -inf and may be null.
  Var softmax_rows(Var x, const Matrix<T>* mask = nullptr) {
    Matrix<T> y = value(x);
    if (mask) y += *mask;
    softmax_rows_inplace(y);
    return op(std::move(y), {x}, [this, x](int self) {
      if (!needs(x)) return;
      const Matrix<T>& y = value(Var{self});
      const Matrix<T>& g = grad_ref(self);
      const auto dot = (g.cwiseProduct(y)).rowwise().sum().eval();
      grad_ref(x.id) +=
          (y.array() * (g.colwise() - dot).array()).matrix();
    });
  }

  Var gather_rows(Var table, std::span<const int> rows) {
    const Matrix<T>& tv = value(table);
    Matrix<T> out(static_cast<Eigen::Index>(rows.size()), tv.cols());
    std::vector<int> idx(rows.begin(), rows.end());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (idx[r] < 0 || idx[r] >= tv.rows()) {
        throw Error(ErrorCode::kShapeMismatch, "gather_rows: index out of range");
      }
      out.row(r) = tv.row(idx[r]);
    }
    return op(std::move(out), {table}, [this, table, idx = std::move(idx)](int self) {
      if (!needs(table)) return;
      const Matrix<T>& g = grad_ref(self);
      Matrix<T>& gt = grad_ref(table.id);
      for (std::size_t r = 0; r < idx.size(); ++r) gt.row(idx[r]) += g.row(r);
    });
  }

  Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count) {
    Matrix<T> out = value(a).middleCols(begin, count);
    return op(std::move(out), {a}, [this, a, begin, count](int self) {
      if (needs(a)) grad_ref(a.id).middleCols(begin, count) += grad_ref(self);
    });
  }

  Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count) {
    Matrix<T> out = value(a).middleRows(begin, count);
    return op(std::move(out), {a}, [this, a, begin, count](int self) {
      if (needs(a)) grad_ref(a.id).middleRows(begin, count) += grad_ref(self);
    });
  }

  Var concat_cols(const std::vector<Var>& parts) {
    Eigen::Index rows = value(parts.front()).rows(), cols = 0;
    for (Var p : parts) {
      if (value(p).rows() != rows) {
        throw Error(ErrorCode::kShapeMismatch, "concat_cols: row mismatch");
      }
      cols += value(p).cols();
    }
    Matrix<T> out(rows, cols);
    Eigen::Index at = 0;
    for (Var p : parts) {
      out.middleCols(at, value(p).cols()) = value(p);
      at += value(p).cols();
    }
    return op(std::move(out), parts, [this, parts](int self) {
      const Matrix<T>& g = grad_ref(self);
      Eigen::Index at = 0;
      for (Var p : parts) {
        const auto w = value(p).cols();
        if (needs(p)) grad_ref(p.id) += g.middleCols(at, w);
        at += w;
      }
    });
  }

  Var concat_rows(const std::vector<Var>& parts) {
    Eigen::Index cols = value(parts.front()).cols(), rows = 0;
    for (Var p : parts) {
      if (value(p).cols() != cols) {
        throw Error(ErrorCode::kShapeMismatch, "concat_rows: column mismatch");
      }
      rows += value(p).rows();
    }
    Matrix<T> out(rows, cols);
    Eigen::Index at = 0;
    for (Var p : parts) {
      out.middleRows(at, value(p).rows()) = value(p);
      at += value(p).rows();
    }
    return op(std::move(out), parts, [this, parts](int self) {
      const Matrix<T>& g = grad_ref(self);
      Eigen::Index at = 0;
      for (Var p : parts) {
        const auto h = value(p).rows();
        if (needs(p)) grad_ref(p.id) += g.middleRows(at, h);
        at += h;
      }
    });
  }

  // Inverted dropout; identity when p == 0 or rng is null.
  Var dropout(Var a, T p, Rng* rng) {
    if (p <= T(0) || rng == nullptr) return a;
    const T keep_scale = T(1) / (T(1) - p);
    Matrix<T> mask(value(a).rows(), value(a).cols());
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
      mask.data()[i] = rng->uniform() < p ? T(0) : keep_scale;
    }
    Matrix<T> out = value(a).cwiseProduct(mask);
    const int aux = stash(std::move(mask));
    return op(std::move(out), {a}, [this, a, aux](int self) {
      if (needs(a)) grad_ref(a.id) += grad_ref(self).cwiseProduct(stash_[aux]);
    });
  }

  // Sum over rows of -log softmax(logits + mask)[gold]; rows whose gold id
  // equals `ignore` contribute nothing. Result is 1 x 1.
  Var cross_entropy_sum(Var logits, std::span<const int> gold, int ignore,
                        const Matrix<T>* mask = nullptr) {
    const Matrix<T>& lv = value(logits);
    if (static_cast<Eigen::Index>(gold.size()) != lv.rows()) {
      throw Error(ErrorCode::kShapeMismatch, "cross_entropy: length mismatch");
    }
    Matrix<T> probs = lv;
    if (mask) probs += *mask;
    softmax_rows_inplace(probs);
    T loss = 0;
    std::vector<int> g(gold.begin(), gold.end());
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (g[r] == ignore) continue;
      loss -= std::log(std::max(probs(r, g[r]), std::numeric_limits<T>::min()));
    }
    Matrix<T> out(1, 1);
    out(0, 0) = loss;
    const int aux = stash(std::move(probs));
    return op(std::move(out), {logits},
              [this, logits, aux, ignore, g = std::move(g)](int self) {
                if (!needs(logits)) return;
                const T up = grad_ref(self)(0, 0);
                const Matrix<T>& p = stash_[aux];
                Matrix<T>& gl = grad_ref(logits.id);
                for (std::size_t r = 0; r < g.size(); ++r) {
                  if (g[r] == ignore) continue;
                  gl.row(r) += up * p.row(r);
                  gl(r, g[r]) -= up;
                }
              });
  }

  // sum(a .* weights) as a 1 x 1 value.
  Var weighted_sum(Var a, const Matrix<T>& weights) {
    check_shape(value(a), weights, "weighted_sum");
    Matrix<T> out(1, 1);
    out(0, 0) = value(a).cwiseProduct(weights).sum();
    const int aux = stash(weights);
    return op(std::move(out), {a}, [this, a, aux](int self) {
      if (needs(a)) grad_ref(a.id) += grad_ref(self)(0, 0) * stash_[aux];
    });
  }

  Var sum(Var a) {
    Matrix<T> out(1, 1);
    out(0, 0) = value(a).sum();
    return op(std::move(out), {a}, [this, a](int self) {
      if (needs(a)) grad_ref(a.id).array() += grad_ref(self)(0, 0);
    });
  }

  // Column means over rows: n x c -> 1 x c.
  Var mean_rows(Var a) {
    const T inv = T(1) / static_cast<T>(value(a).rows());
    Matrix<T> out = value(a).colwise().sum() * inv;
    return op(std::move(out), {a}, [this, a, inv](int self) {
      if (needs(a)) grad_ref(a.id).rowwise() += grad_ref(self).row(0) * inv;
    });
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix<T> value;
    Matrix<T> grad;
    int param = -1;
    bool needs_grad = false;
    std::function<void()> backward;
  };

  Var push(Node n) {
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  bool needs(Var v) const { return nodes_[v.id].needs_grad; }

  Matrix<T>& grad_ref(int id) {
    Node& n = nodes_[id];
    if (n.param >= 0) return grads_->at(static_cast<std::size_t>(n.param));
    if (n.grad.size() == 0) {
      n.grad = Matrix<T>::Zero(n.value.rows(), n.value.cols());
    }
    return n.grad;
  }

  template <typename F>
  Var op(Matrix<T> out, const std::vector<Var>& inputs, F&& back) {
    Node n;
    n.value = std::move(out);
    if (recording()) {
      for (Var in : inputs) n.needs_grad = n.needs_grad || needs(in);
    }
    const int self = static_cast<int>(nodes_.size());
    if (n.needs_grad) {
      n.backward = [b = std::forward<F>(back), self]() mutable { b(self); };
    }
    return push(std::move(n));
  }

  int stash(Matrix<T> m) {
    if (!recording()) return -1;
    stash_.push_back(std::move(m));
    return static_cast<int>(stash_.size()) - 1;
  }

  void check_same(Var a, Var b, const char* what) const {
    check_shape(value(a), value(b), what);
  }

  static void check_shape(const Matrix<T>& a, const Matrix<T>& b,
                          const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      throw Error(ErrorCode::kShapeMismatch,
                  std::string(what) + ": shape mismatch");
    }
  }

  const ParameterSet<T>* params_;
  Gradients<T>* grads_;
  std::vector<Node> nodes_;
  std::vector<Matrix<T>> stash_;
};

}  // namespace tempo::nn

#endif  // TEMPO_CORE_AUTOGRAD_HPP_
