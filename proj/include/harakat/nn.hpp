#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "harakat/tape.hpp"

namespace harakat {

// Embedding init: uniform [-0.1, 0.1]. Hidden-layer init: normal(0, 0.01),
// biases zero.
constexpr double kEmbedInitRange = 0.1;
constexpr double kHiddenInitStd = 0.01;

template <class Real>
void init_embedding(Tensor<Real>& t, Rng& rng) {
  for (auto& x : t.data) x = Real(rng.uniform(-kEmbedInitRange, kEmbedInitRange));
}

template <class Real>
void init_hidden(Tensor<Real>& t, Rng& rng) {
  for (auto& x : t.data) x = Real(rng.normal(0.0, kHiddenInitStd));
}

template <class Real>
struct BiLstmLayerParams {
  LstmDirParams<Real> fwd, bwd;
};

template <class Real>
struct BiLstmStack {
  std::vector<BiLstmLayerParams<Real>> layers;
};

template <class Real>
struct DenseParams {
  Parameter<Real> w;  // [out, in]
  Parameter<Real> b;  // [1, out]
};

// Registers every tensor of a module with the model's parameter list.
template <class Real>
class ParamRegistry {
 public:
  void add(Parameter<Real>& p, std::string name) {
    p.name = std::move(name);
    p.index = int(params_.size());
    params_.push_back(&p);
  }
  const std::vector<Parameter<Real>*>& all() const { return params_; }

 private:
  std::vector<Parameter<Real>*> params_;
};

template <class Real>
LstmDirParams<Real> make_lstm_dir(int64_t in_dim, int64_t hidden, Rng& rng) {
  LstmDirParams<Real> p;
  p.wx = Parameter<Real>("", {4 * hidden, in_dim});
  p.wh = Parameter<Real>("", {4 * hidden, hidden});
  p.b = Parameter<Real>("", {1, 4 * hidden});
  init_hidden(p.wx.value, rng);
  init_hidden(p.wh.value, rng);
  return p;
}

template <class Real>
BiLstmStack<Real> make_bilstm(int64_t in_dim, int64_t hidden, int layers, Rng& rng) {
  BiLstmStack<Real> s;
  for (int l = 0; l < layers; ++l) {
    int64_t d = l == 0 ? in_dim : 2 * hidden;
    BiLstmLayerParams<Real> layer;
    layer.fwd = make_lstm_dir<Real>(d, hidden, rng);
    layer.bwd = make_lstm_dir<Real>(d, hidden, rng);
    s.layers.push_back(std::move(layer));
  }
  return s;
}

template <class Real>
DenseParams<Real> make_dense(int64_t in_dim, int64_t out_dim, Rng& rng) {
  DenseParams<Real> d;
  d.w = Parameter<Real>("", {out_dim, in_dim});
  d.b = Parameter<Real>("", {1, out_dim});
  init_hidden(d.w.value, rng);
  return d;
}

template <class Real>
void register_lstm_dir(ParamRegistry<Real>& reg, LstmDirParams<Real>& p, const std::string& prefix) {
  reg.add(p.wx, prefix + ".wx");
  reg.add(p.wh, prefix + ".wh");
  reg.add(p.b, prefix + ".b");
}

template <class Real>
void register_bilstm(ParamRegistry<Real>& reg, BiLstmStack<Real>& s, const std::string& prefix) {
  for (size_t l = 0; l < s.layers.size(); ++l) {
    register_lstm_dir(reg, s.layers[l].fwd, prefix + ".l" + std::to_string(l) + ".f");
    register_lstm_dir(reg, s.layers[l].bwd, prefix + ".l" + std::to_string(l) + ".b");
  }
}

template <class Real>
void register_dense(ParamRegistry<Real>& reg, DenseParams<Real>& d, const std::string& prefix) {
  reg.add(d.w, prefix + ".w");
  reg.add(d.b, prefix + ".b");
}

// Stacked BiLSTM over a [T, Din] node: per layer, forward and backward passes
// concatenated per timestep; inter-layer dropout in training mode.
template <class Real>
int bilstm_forward(Tape<Real>& t, int x, BiLstmStack<Real>& stack, Real dropout_p, Rng& rng) {
  int cur = x;
  for (size_t l = 0; l < stack.layers.size(); ++l) {
    if (l > 0) cur = dropout(t, cur, dropout_p, rng);
    int f = lstm(t, cur, stack.layers[l].fwd, /*reverse=*/false);
    int b = lstm(t, cur, stack.layers[l].bwd, /*reverse=*/true);
    cur = concat_cols(t, {f, b});
  }
  return cur;
}

// Single LSTM cell step on plain tensors (reference surface; the training
// path runs the fused tape op).
template <class Real>
std::pair<Tensor<Real>, Tensor<Real>> lstm_cell(const Tensor<Real>& x_t,
                                                const Tensor<Real>& h_prev,
                                                const Tensor<Real>& c_prev,
                                                const LstmDirParams<Real>& w) {
  int64_t H = w.hidden();
  int64_t din = w.wx.value.cols();
  if (x_t.numel() != din || h_prev.numel() != H || c_prev.numel() != H)
    throw ShapeMismatch("lstm_cell: input shapes");
  const auto& k = kernels::active<Real>();
  std::vector<Real> z(size_t(4 * H), Real(0));
  std::copy(w.b.value.data.begin(), w.b.value.data.end(), z.begin());
  k.gemv_acc(w.wx.value.data.data(), 4 * H, din, x_t.data.data(), z.data());
  k.gemv_acc(w.wh.value.data.data(), 4 * H, H, h_prev.data.data(), z.data());
  std::vector<Real> g(size_t(4 * H));
  k.vsigmoid(2 * H, z.data(), g.data());
  k.vtanh(H, z.data() + 2 * H, g.data() + 2 * H);
  k.vsigmoid(H, z.data() + 3 * H, g.data() + 3 * H);
  Tensor<Real> c({1, H}), h({1, H});
  k.mul(H, g.data() + H, c_prev.data.data(), c.data.data());
  k.mul_acc(H, g.data(), g.data() + 2 * H, c.data.data());
  std::vector<Real> tc(size_t(H), Real(0));
  k.vtanh(H, c.data.data(), tc.data());
  k.mul(H, g.data() + 3 * H, tc.data(), h.data.data());
  return {std::move(h), std::move(c)};
}

// Embedding lookup returning a stacked [n, dim] tensor (tape op with sparse
// row gradients; frozen tables skip accumulation).
template <class Real>
int embedding_forward(Tape<Real>& t, Parameter<Real>& table, const std::vector<int>& ids) {
  return embed_rows(t, table, ids);
}

// Loss plus the probabilities used for label feeding.
template <class Real>
struct SoftmaxCeOut {
  int loss;   // scalar node
  int probs;  // [n, C] node
};

template <class Real>
SoftmaxCeOut<Real> softmax_cross_entropy(Tape<Real>& t, int logits,
                                         const std::vector<int>& targets,
                                         const std::vector<uint8_t>& mask) {
  SoftmaxCeOut<Real> out;
  out.loss = masked_mean_ce(t, logits, targets, mask);
  out.probs = softmax_rows(t, logits);
  return out;
}

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over all trainable parameters; grads are zeroed after
// the step. t is the 1-based step count.
template <class Real>
void adam_step(const std::vector<Parameter<Real>*>& params, const AdamHyper& hp, int64_t t,
               double grad_clip = 0.0) {
  const auto& k = kernels::active<Real>();
  if (grad_clip > 0.0) {
    double sq = 0;
    for (auto* p : params)
      if (p->trainable) sq += double(k.dot(p->grad.numel(), p->grad.data.data(), p->grad.data.data()));
    double norm = std::sqrt(sq);
    if (norm > grad_clip) {
      Real s = Real(grad_clip / norm);
      for (auto* p : params)
        if (p->trainable) k.scale(p->grad.numel(), s, p->grad.data.data());
    }
  }
  Real bc1 = Real(1.0 - std::pow(hp.beta1, double(t)));
  Real bc2 = Real(1.0 - std::pow(hp.beta2, double(t)));
  for (auto* p : params) {
    if (!p->trainable) continue;
    k.adam(p->value.numel(), p->value.data.data(), p->grad.data.data(), p->m.data.data(),
           p->v.data.data(), Real(hp.lr), Real(hp.beta1), Real(hp.beta2), Real(hp.eps), bc1, bc2);
    p->grad.zero();
  }
}

template <class Real>
void zero_grads(const std::vector<Parameter<Real>*>& params) {
  for (auto* p : params) p->grad.zero();
}

}  // namespace harakat
