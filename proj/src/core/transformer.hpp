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

#ifndef TEMPO_CORE_TRANSFORMER_HPP_
#define TEMPO_CORE_TRANSFORMER_HPP_

// Pre-norm transformer building blocks shared by the seq2seq model and the
// discriminative baselines. Each block has a taped (differentiable) forward
// and a plain evaluation path used for incremental inference.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "autograd.hpp"
#include "rng.hpp"

namespace tempo::nn {

struct LinearIds {
  std::size_t w = 0, b = 0;
};
struct NormIds {
  std::size_t gain = 0, bias = 0;
};
struct AttentionIds {
  LinearIds q, k, v, o;
};
struct FeedForwardIds {
  LinearIds in, out;
};
struct EncoderLayerIds {
  NormIds attn_norm;
  AttentionIds attn;
  NormIds ffn_norm;
  FeedForwardIds ffn;
};
struct DecoderLayerIds {
  NormIds self_norm;
  AttentionIds self_attn;
  NormIds cross_norm;
  AttentionIds cross_attn;
  NormIds ffn_norm;
  FeedForwardIds ffn;
};

template <typename T>
void init_normal(Matrix<T>& m, double stddev, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<T>(rng.normal() * stddev);
  }
}

// Glorot-normal weights, zero bias. Weight is (in x out): y = x W + b.
template <typename T>
LinearIds add_linear(ParameterSet<T>& ps, const std::string& name, int in,
                     int out, Rng& rng) {
  LinearIds ids;
  ids.w = ps.add(name + ".weight", in, out);
  ids.b = ps.add(name + ".bias", 1, out);
  init_normal(ps[ids.w].value, std::sqrt(2.0 / (in + out)), rng);
  return ids;
}

template <typename T>
NormIds add_norm(ParameterSet<T>& ps, const std::string& name, int d) {
  NormIds ids;
  ids.gain = ps.add(name + ".gain", 1, d);
  ids.bias = ps.add(name + ".bias", 1, d);
  ps[ids.gain].value.setOnes();
  return ids;
}

template <typename T>
AttentionIds add_attention(ParameterSet<T>& ps, const std::string& name, int d,
                           Rng& rng) {
  return {add_linear(ps, name + ".query", d, d, rng),
          add_linear(ps, name + ".key", d, d, rng),
          add_linear(ps, name + ".value", d, d, rng),
          add_linear(ps, name + ".out", d, d, rng)};
}

template <typename T>
FeedForwardIds add_ffn(ParameterSet<T>& ps, const std::string& name, int d,
                       int d_ff, Rng& rng) {
  return {add_linear(ps, name + ".in", d, d_ff, rng),
          add_linear(ps, name + ".out", d_ff, d, rng)};
}

template <typename T>
EncoderLayerIds add_encoder_layer(ParameterSet<T>& ps, const std::string& name,
                                  int d, int d_ff, Rng& rng) {
  EncoderLayerIds ids;
  ids.attn_norm = add_norm(ps, name + ".attn_norm", d);
  ids.attn = add_attention(ps, name + ".attn", d, rng);
  ids.ffn_norm = add_norm(ps, name + ".ffn_norm", d);
  ids.ffn = add_ffn(ps, name + ".ffn", d, d_ff, rng);
  return ids;
}

template <typename T>
DecoderLayerIds add_decoder_layer(ParameterSet<T>& ps, const std::string& name,
                                  int d, int d_ff, Rng& rng) {
  DecoderLayerIds ids;
  ids.self_norm = add_norm(ps, name + ".self_norm", d);
  ids.self_attn = add_attention(ps, name + ".self_attn", d, rng);
  ids.cross_norm = add_norm(ps, name + ".cross_norm", d);
  ids.cross_attn = add_attention(ps, name + ".cross_attn", d, rng);
  ids.ffn_norm = add_norm(ps, name + ".ffn_norm", d);
  ids.ffn = add_ffn(ps, name + ".ffn", d, d_ff, rng);
  return ids;
}

// Additive masks (0 keeps, -inf blocks).
template <typename T>
Matrix<T> causal_mask(Eigen::Index n) {
  Matrix<T> m = Matrix<T>::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = r + 1; c < n; ++c) {
      m(r, c) = -std::numeric_limits<T>::infinity();
    }
  }
  return m;
}

template <typename T>
Matrix<T> key_padding_mask(Eigen::Index queries, const std::vector<bool>& key_valid) {
  Matrix<T> m = Matrix<T>::Zero(queries, static_cast<Eigen::Index>(key_valid.size()));
  for (std::size_t c = 0; c < key_valid.size(); ++c) {
    if (!key_valid[c]) m.col(c).setConstant(-std::numeric_limits<T>::infinity());
  }
  return m;
}

// ---- taped forward ---------------------------------------------------

template <typename T>
Var linear(Tape<T>& t, Var x, const LinearIds& ids) {
  return t.add_row(t.matmul(x, t.param(ids.w)), t.param(ids.b));
}

template <typename T>
Var norm(Tape<T>& t, Var x, const NormIds& ids) {
  return t.layer_norm(x, t.param(ids.gain), t.param(ids.bias));
}

template <typename T>
Var attention(Tape<T>& t, Var query_in, Var kv_in, const AttentionIds& ids,
              int heads, const Matrix<T>* mask,
              std::vector<Matrix<T>>* capture = nullptr) {
  const Var q = linear(t, query_in, ids.q);
  const Var k = linear(t, kv_in, ids.k);
  const Var v = linear(t, kv_in, ids.v);
  const Eigen::Index d = t.value(q).cols();
  const Eigen::Index dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  std::vector<Var> outs;
  outs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    const Var qh = t.slice_cols(q, h * dh, dh);
    const Var kh = t.slice_cols(k, h * dh, dh);
    const Var vh = t.slice_cols(v, h * dh, dh);
    const Var p = t.softmax_rows(t.scale(t.matmul_nt(qh, kh), scale), mask);
    if (capture) capture->push_back(t.value(p));
    outs.push_back(t.matmul(p, vh));
  }
  const Var joined = heads == 1 ? outs.front() : t.concat_cols(outs);
  return linear(t, joined, ids.o);
}

template <typename T>
Var feed_forward(Tape<T>& t, Var x, const FeedForwardIds& ids) {
  return linear(t, t.gelu(linear(t, x, ids.in)), ids.out);
}

struct BlockOptions {
  int heads = 1;
  double dropout = 0.0;
  Rng* rng = nullptr;  // null disables dropout
};

template <typename T>
Var encoder_layer(Tape<T>& t, Var x, const EncoderLayerIds& ids,
                  const Matrix<T>* mask, const BlockOptions& opt,
                  std::vector<Matrix<T>>* capture = nullptr) {
  const T p = static_cast<T>(opt.dropout);
  const Var h = norm(t, x, ids.attn_norm);
  x = t.add(x, t.dropout(attention(t, h, h, ids.attn, opt.heads, mask, capture),
                         p, opt.rng));
  const Var f = feed_forward(t, norm(t, x, ids.ffn_norm), ids.ffn);
  return t.add(x, t.dropout(f, p, opt.rng));
}

template <typename T>
Var decoder_layer(Tape<T>& t, Var x, Var memory, const DecoderLayerIds& ids,
                  const Matrix<T>* self_mask, const Matrix<T>* cross_mask,
                  const BlockOptions& opt,
                  std::vector<Matrix<T>>* capture = nullptr) {
  const T p = static_cast<T>(opt.dropout);
  const Var h = norm(t, x, ids.self_norm);
  x = t.add(x, t.dropout(attention(t, h, h, ids.self_attn, opt.heads,
                                   self_mask, capture),
                         p, opt.rng));
  const Var c = norm(t, x, ids.cross_norm);
  x = t.add(x, t.dropout(attention(t, c, memory, ids.cross_attn, opt.heads,
                                   cross_mask, capture),
                         p, opt.rng));
  const Var f = feed_forward(t, norm(t, x, ids.ffn_norm), ids.ffn);
  return t.add(x, t.dropout(f, p, opt.rng));
}

// ---- plain evaluation ------------------------------------------------

template <typename T>
Matrix<T> linear_eval(const ParameterSet<T>& ps, const Matrix<T>& x,
                      const LinearIds& ids) {
  Matrix<T> y = x * ps[ids.w].value;
  y.rowwise() += ps[ids.b].value.row(0);
  return y;
}

template <typename T>
Matrix<T> norm_eval(const ParameterSet<T>& ps, const Matrix<T>& x,
                    const NormIds& ids) {
  Matrix<T> y;
  layer_norm_rows(x, ps[ids.gain].value, ps[ids.bias].value, T(1e-5), y,
                  static_cast<Matrix<T>*>(nullptr),
                  static_cast<std::vector<T>*>(nullptr));
  return y;
}

template <typename T>
Matrix<T> feed_forward_eval(const ParameterSet<T>& ps, const Matrix<T>& x,
                            const FeedForwardIds& ids) {
  Matrix<T> h = linear_eval(ps, x, ids.in);
  h = h.unaryExpr([](T v) { return gelu(v); });
  return linear_eval(ps, h, ids.out);
}

// Attention with keys/values already projected.
template <typename T>
Matrix<T> attend_eval(const ParameterSet<T>& ps, const Matrix<T>& q,
                      const Matrix<T>& k, const Matrix<T>& v,
                      const AttentionIds& ids, int heads,
                      const Matrix<T>* mask) {
  const Eigen::Index d = q.cols();
  const Eigen::Index dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  Matrix<T> joined(q.rows(), d);
  for (int h = 0; h < heads; ++h) {
    Matrix<T> s = (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) * scale;
    if (mask) s += *mask;
    softmax_rows_inplace(s);
    joined.middleCols(h * dh, dh).noalias() = s * v.middleCols(h * dh, dh);
  }
  return linear_eval(ps, joined, ids.o);
}

template <typename T>
Matrix<T> encoder_layer_eval(const ParameterSet<T>& ps, const Matrix<T>& x,
                             const EncoderLayerIds& ids, const Matrix<T>* mask,
                             int heads) {
  const Matrix<T> h = norm_eval(ps, x, ids.attn_norm);
  Matrix<T> y = x + attend_eval(ps, linear_eval(ps, h, ids.attn.q),
                                linear_eval(ps, h, ids.attn.k),
                                linear_eval(ps, h, ids.attn.v), ids.attn, heads,
                                mask);
  y += feed_forward_eval(ps, norm_eval(ps, y, ids.ffn_norm), ids.ffn);
  return y;
}

}  // namespace tempo::nn

#endif  // TEMPO_CORE_TRANSFORMER_HPP_
