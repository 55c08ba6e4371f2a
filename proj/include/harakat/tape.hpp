#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "harakat/common.hpp"
#include "harakat/corpus.hpp"
#include "harakat/kernels.hpp"
#include "harakat/tensor.hpp"

namespace harakat {

// Weights of one LSTM direction. Gate layout inside the 4H axis: i, f, g, o.
template <class Real>
struct LstmDirParams {
  Parameter<Real> wx;  // [4H, Din]
  Parameter<Real> wh;  // [4H, H]
  Parameter<Real> b;   // [1, 4H]
  int64_t hidden() const { return wh.value.shape[1]; }
};

// Where parameter gradients accumulate. The default sink is the parameter's
// own grad tensor; data-parallel training swaps in per-thread buffers.
template <class Real>
class GradSink {
 public:
  virtual ~GradSink() = default;
  virtual Tensor<Real>& grad(Parameter<Real>& p) { return p.grad; }
};

// Per-slot gradient buffers for worker threads, indexed by Parameter::index.
template <class Real>
class BufferedGradSink : public GradSink<Real> {
 public:
  explicit BufferedGradSink(const std::vector<Parameter<Real>*>& params) {
    buffers_.reserve(params.size());
    for (auto* p : params) buffers_.emplace_back(p->value.shape);
  }
  Tensor<Real>& grad(Parameter<Real>& p) override { return buffers_[size_t(p.index)]; }
  // Adds the buffered gradients into the parameters' own grad tensors.
  void reduce_into(const std::vector<Parameter<Real>*>& params) {
    const auto& k = kernels::active<Real>();
    for (auto* p : params)
      k.axpy(p->grad.numel(), Real(1), buffers_[size_t(p->index)].data.data(),
             p->grad.data.data());
  }
  void zero() {
    for (auto& b : buffers_) b.zero();
  }

 private:
  std::vector<Tensor<Real>> buffers_;
};

// Reverse-mode tape. Nodes hold materialized values; backward closures are
// recorded during the forward pass and run in reverse order.
template <class Real>
class Tape {
 public:
  explicit Tape(bool training = true, GradSink<Real>* sink = nullptr)
      : training_(training), sink_(sink ? sink : &default_sink_) {}

  bool training() const { return training_; }

  const Tensor<Real>& val(int id) const { return nodes_[size_t(id)]->val; }

  // Gradient tensor of a node, allocated (zeroed) on first use.
  Tensor<Real>& grad(int id) {
    Node& n = *nodes_[size_t(id)];
    if (n.grad.empty() && n.val.numel() > 0) n.grad = Tensor<Real>(n.val.shape);
    return n.grad;
  }
  bool has_grad(int id) const { return !nodes_[size_t(id)]->grad.empty(); }

  Tensor<Real>& param_grad(Parameter<Real>& p) { return sink_->grad(p); }

  int add_input(Tensor<Real> v) { return add(std::move(v), nullptr); }

  int add(Tensor<Real> v, std::function<void()> back) {
    nodes_.push_back(std::make_unique<Node>());
    nodes_.back()->val = std::move(v);
    nodes_.back()->back = std::move(back);
    return int(nodes_.size()) - 1;
  }

  void backward(int loss_id) {
    Tensor<Real>& g = grad(loss_id);
    if (g.numel() != 1) throw ShapeMismatch("backward() seed must be scalar");
    g.data[0] = Real(1);
    backward_seeded();
  }

  // Runs the recorded closures in reverse; the caller has already written
  // output gradients (jacobian probes seed individual coordinates).
  void backward_seeded() {
    // Closures check whether their output ever received gradient.
    for (int id = int(nodes_.size()) - 1; id >= 0; --id) {
      Node& n = *nodes_[size_t(id)];
      if (n.back) n.back();
    }
  }

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<Real> val;
    Tensor<Real> grad;
    std::function<void()> back;
  };
  bool training_;
  GradSink<Real> default_sink_;
  GradSink<Real>* sink_;
  std::vector<std::unique_ptr<Node>> nodes_;
};

// ---- ops -------------------------------------------------------------------

// Rows of a trainable embedding table: out[k,:] = table[ids[k],:].
template <class Real>
int embed_rows(Tape<Real>& t, Parameter<Real>& table, const std::vector<int>& ids) {
  int64_t dim = table.value.cols();
  Tensor<Real> out({int64_t(ids.size()), dim});
  for (size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || int64_t(ids[k]) >= table.value.rows())
      throw IndexOutOfRange("embedding id " + std::to_string(ids[k]));
    std::copy(table.value.row(ids[k]), table.value.row(ids[k]) + dim, out.row(int64_t(k)));
  }
  int id = t.add(std::move(out), nullptr);
  if (table.trainable) {
    t.add(Tensor<Real>(), [&t, &table, ids, id, dim] {
      if (!t.has_grad(id)) return;
      const auto& k = kernels::active<Real>();
      Tensor<Real>& tg = t.param_grad(table);
      const Tensor<Real>& g = t.grad(id);
      for (size_t r = 0; r < ids.size(); ++r)
        k.axpy(dim, Real(1), g.row(int64_t(r)), tg.row(ids[r]));
    });
  }
  return id;
}

// Rows of the frozen pretrained table with the learned UNK row substituted
// where rows[k] < 0. Only the UNK parameter receives gradient.
template <class Real>
int pretrained_rows(Tape<Real>& t, const PretrainedEmbeddings<Real>& emb,
                    Parameter<Real>& unk_row, const std::vector<int64_t>& rows) {
  int64_t dim = emb.dim;
  Tensor<Real> out({int64_t(rows.size()), dim});
  for (size_t k = 0; k < rows.size(); ++k) {
    const Real* src = rows[k] < 0 ? unk_row.value.row(0) : emb.table.row(rows[k]);
    std::copy(src, src + dim, out.row(int64_t(k)));
  }
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, &unk_row, rows, id, dim] {
    if (!t.has_grad(id)) return;
    const auto& k = kernels::active<Real>();
    Tensor<Real>& ug = t.param_grad(unk_row);
    const Tensor<Real>& g = t.grad(id);
    for (size_t r = 0; r < rows.size(); ++r)
      if (rows[r] < 0) k.axpy(dim, Real(1), g.row(int64_t(r)), ug.row(0));
  });
  return id;
}

// Row-wise concatenation along columns.
template <class Real>
int concat_cols(Tape<Real>& t, const std::vector<int>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat_cols: no parts");
  int64_t rows = t.val(parts[0]).rows();
  int64_t cols = 0;
  for (int p : parts) {
    if (t.val(p).rows() != rows) throw ShapeMismatch("concat_cols: row mismatch");
    cols += t.val(p).cols();
  }
  Tensor<Real> out({rows, cols});
  int64_t off = 0;
  for (int p : parts) {
    const Tensor<Real>& v = t.val(p);
    for (int64_t r = 0; r < rows; ++r)
      std::copy(v.row(r), v.row(r) + v.cols(), out.row(r) + off);
    off += v.cols();
  }
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, parts, id, rows] {
    if (!t.has_grad(id)) return;
    const Tensor<Real>& g = t.grad(id);
    int64_t off2 = 0;
    for (int p : parts) {
      Tensor<Real>& pg = t.grad(p);
      int64_t c = pg.cols();
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t j = 0; j < c; ++j) pg.row(r)[j] += g.row(r)[off2 + j];
      off2 += c;
    }
  });
  return id;
}

// out[k,:] = a[idx[k],:], idx[k] == -1 yields a zero row (word-level outputs
// broadcast to characters; boundaries map to the sentinel).
template <class Real>
int gather_rows(Tape<Real>& t, int a, const std::vector<int64_t>& idx) {
  const Tensor<Real>& v = t.val(a);
  Tensor<Real> out({int64_t(idx.size()), v.cols()});
  for (size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= v.rows()) throw IndexOutOfRange("gather_rows index");
    if (idx[k] >= 0) std::copy(v.row(idx[k]), v.row(idx[k]) + v.cols(), out.row(int64_t(k)));
  }
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, a, idx, id] {
    if (!t.has_grad(id)) return;
    const Tensor<Real>& g = t.grad(id);
    Tensor<Real>& ag = t.grad(a);
    const auto& k = kernels::active<Real>();
    for (size_t r = 0; r < idx.size(); ++r)
      if (idx[r] >= 0) k.axpy(g.cols(), Real(1), g.row(int64_t(r)), ag.row(idx[r]));
  });
  return id;
}

// Single row as a [1, D] node.
template <class Real>
int take_row(Tape<Real>& t, int a, int64_t r) {
  const Tensor<Real>& v = t.val(a);
  if (r < 0 || r >= v.rows()) throw IndexOutOfRange("take_row");
  Tensor<Real> out({1, v.cols()});
  std::copy(v.row(r), v.row(r) + v.cols(), out.row(0));
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, a, r, id] {
    if (!t.has_grad(id)) return;
    const Tensor<Real>& g = t.grad(id);
    kernels::active<Real>().axpy(g.cols(), Real(1), g.row(0), t.grad(a).row(r));
  });
  return id;
}

// Stacks [1, D] nodes into [n, D].
template <class Real>
int stack_rows(Tape<Real>& t, const std::vector<int>& rows) {
  if (rows.empty()) throw ShapeMismatch("stack_rows: empty");
  int64_t cols = t.val(rows[0]).cols();
  Tensor<Real> out({int64_t(rows.size()), cols});
  for (size_t k = 0; k < rows.size(); ++k) {
    if (t.val(rows[k]).cols() != cols || t.val(rows[k]).rows() != 1)
      throw ShapeMismatch("stack_rows: shape mismatch");
    std::copy(t.val(rows[k]).row(0), t.val(rows[k]).row(0) + cols, out.row(int64_t(k)));
  }
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, rows, id, cols] {
    if (!t.has_grad(id)) return;
    const Tensor<Real>& g = t.grad(id);
    const auto& k = kernels::active<Real>();
    for (size_t r = 0; r < rows.size(); ++r)
      k.axpy(cols, Real(1), g.row(int64_t(r)), t.grad(rows[r]).row(0));
  });
  return id;
}

// Inverted dropout; identity in inference mode or when p == 0.
template <class Real>
int dropout(Tape<Real>& t, int a, Real p, Rng& rng) {
  if (p < Real(0) || p >= Real(1)) throw InvalidProbability("dropout p out of [0,1)");
  if (!t.training() || p == Real(0)) return a;
  const Tensor<Real>& v = t.val(a);
  Tensor<Real> mask(v.shape);
  Real keep_scale = Real(1) / (Real(1) - p);
  for (int64_t i = 0; i < v.numel(); ++i)
    mask.data[size_t(i)] = Real(rng.uniform()) < p ? Real(0) : keep_scale;
  Tensor<Real> out(v.shape);
  kernels::active<Real>().mul(v.numel(), v.data.data(), mask.data.data(), out.data.data());
  int id = t.add(std::move(out), nullptr);
  auto mask_ptr = std::make_shared<Tensor<Real>>(std::move(mask));
  t.add(Tensor<Real>(), [&t, a, id, mask_ptr] {
    if (!t.has_grad(id)) return;
    const Tensor<Real>& g = t.grad(id);
    kernels::active<Real>().mul_acc(g.numel(), g.data.data(), mask_ptr->data.data(),
                                    t.grad(a).data.data());
  });
  return id;
}

// out[k,:] = W a[k,:] + b for every row of a.
template <class Real>
int affine_rows(Tape<Real>& t, int a, Parameter<Real>& w, Parameter<Real>& b) {
  const Tensor<Real>& v = t.val(a);
  int64_t out_dim = w.value.rows();
  if (w.value.cols() != v.cols() || b.value.numel() != out_dim)
    throw ShapeMismatch("affine_rows: " + w.name);
  const auto& k = kernels::active<Real>();
  Tensor<Real> out({v.rows(), out_dim});
  for (int64_t r = 0; r < v.rows(); ++r) {
    std::copy(b.value.data.begin(), b.value.data.end(), out.row(r));
    k.gemv_acc(w.value.data.data(), out_dim, v.cols(), v.row(r), out.row(r));
  }
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, a, &w, &b, id] {
    if (!t.has_grad(id)) return;
    const auto& kk = kernels::active<Real>();
    const Tensor<Real>& g = t.grad(id);
    const Tensor<Real>& v2 = t.val(a);
    Tensor<Real>& ag = t.grad(a);
    Tensor<Real>& wg = t.param_grad(w);
    Tensor<Real>& bg = t.param_grad(b);
    for (int64_t r = 0; r < v2.rows(); ++r) {
      kk.gemv_t_acc(w.value.data.data(), g.cols(), v2.cols(), g.row(r), ag.row(r));
      kk.ger_acc(wg.data.data(), g.cols(), v2.cols(), g.row(r), v2.row(r));
      kk.axpy(g.cols(), Real(1), g.row(r), bg.data.data());
    }
  });
  return id;
}

// Row-wise stable softmax with full Jacobian backward (needed because the
// probabilities feed downstream layers).
template <class Real>
int softmax_rows(Tape<Real>& t, int a) {
  const Tensor<Real>& v = t.val(a);
  const auto& k = kernels::active<Real>();
  Tensor<Real> out(v.shape);
  std::vector<Real> buf(size_t(v.cols()));
  for (int64_t r = 0; r < v.rows(); ++r) {
    Real m = k.vmax(v.cols(), v.row(r));
    for (int64_t j = 0; j < v.cols(); ++j) buf[size_t(j)] = v.row(r)[j] - m;
    k.vexp(v.cols(), buf.data(), out.row(r));
    Real s = k.vsum(v.cols(), out.row(r));
    k.scale(v.cols(), Real(1) / s, out.row(r));
  }
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, a, id] {
    if (!t.has_grad(id)) return;
    const auto& kk = kernels::active<Real>();
    const Tensor<Real>& y = t.val(id);
    const Tensor<Real>& g = t.grad(id);
    Tensor<Real>& ag = t.grad(a);
    for (int64_t r = 0; r < y.rows(); ++r) {
      Real dot = kk.dot(y.cols(), g.row(r), y.row(r));
      for (int64_t j = 0; j < y.cols(); ++j)
        ag.row(r)[j] += (g.row(r)[j] - dot) * y.row(r)[j];
    }
  });
  return id;
}

// Constant one-hot of the row-wise argmax (hard label feeding at inference);
// no gradient flows through.
template <class Real>
int onehot_argmax_rows(Tape<Real>& t, int a) {
  const Tensor<Real>& v = t.val(a);
  Tensor<Real> out(v.shape);
  for (int64_t r = 0; r < v.rows(); ++r) {
    int64_t best = 0;
    for (int64_t j = 1; j < v.cols(); ++j)
      if (v.row(r)[j] > v.row(r)[best]) best = j;
    out.row(r)[best] = Real(1);
  }
  return t.add_input(std::move(out));
}

// Mean masked cross entropy over rows of logits. Returns the loss node; the
// per-row probabilities are cached for the fused backward. A fully masked
// input yields a constant 0 with no gradient.
template <class Real>
int masked_mean_ce(Tape<Real>& t, int logits, const std::vector<int>& targets,
                   const std::vector<uint8_t>& mask) {
  const Tensor<Real>& v = t.val(logits);
  if (int64_t(targets.size()) != v.rows() || int64_t(mask.size()) != v.rows())
    throw ShapeMismatch("masked_mean_ce: row mismatch");
  const auto& k = kernels::active<Real>();

  auto probs = std::make_shared<Tensor<Real>>(v.shape);
  int64_t count = 0;
  Real loss = 0;
  std::vector<Real> buf(size_t(v.cols()));
  for (int64_t r = 0; r < v.rows(); ++r) {
    Real m = k.vmax(v.cols(), v.row(r));
    for (int64_t j = 0; j < v.cols(); ++j) buf[size_t(j)] = v.row(r)[j] - m;
    k.vexp(v.cols(), buf.data(), probs->row(r));
    Real s = k.vsum(v.cols(), probs->row(r));
    k.scale(v.cols(), Real(1) / s, probs->row(r));
    if (!mask[size_t(r)]) continue;
    int tgt = targets[size_t(r)];
    if (tgt < 0 || int64_t(tgt) >= v.cols())
      throw IndexOutOfRange("target " + std::to_string(tgt) + " for " +
                            std::to_string(v.cols()) + " classes");
    loss += std::log(s) + m - v.row(r)[tgt];
    ++count;
  }

  Tensor<Real> out({1, 1});
  out.data[0] = count > 0 ? loss / Real(count) : Real(0);
  int id = t.add(std::move(out), nullptr);
  if (count > 0) {
    t.add(Tensor<Real>(), [&t, logits, targets, mask, probs, count, id] {
      if (!t.has_grad(id)) return;
      Real gscale = t.grad(id).data[0] / Real(count);
      Tensor<Real>& lg = t.grad(logits);
      for (int64_t r = 0; r < probs->rows(); ++r) {
        if (!mask[size_t(r)]) continue;
        for (int64_t j = 0; j < probs->cols(); ++j) lg.row(r)[j] += gscale * probs->row(r)[j];
        lg.row(r)[targets[size_t(r)]] -= gscale;
      }
    });
  }
  return id;
}

// s * sum(parts), all parts sharing one shape (task-loss combination).
template <class Real>
int add_scaled(Tape<Real>& t, const std::vector<int>& parts, Real s) {
  if (parts.empty()) throw ShapeMismatch("add_scaled: empty");
  Tensor<Real> out(t.val(parts[0]).shape);
  const auto& k = kernels::active<Real>();
  for (int p : parts) {
    if (!t.val(p).same_shape(out)) throw ShapeMismatch("add_scaled: shape mismatch");
    k.axpy(out.numel(), s, t.val(p).data.data(), out.data.data());
  }
  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, parts, s, id] {
    if (!t.has_grad(id)) return;
    const auto& kk = kernels::active<Real>();
    const Tensor<Real>& g = t.grad(id);
    for (int p : parts) kk.axpy(g.numel(), s, g.data.data(), t.grad(p).data.data());
  });
  return id;
}

// One LSTM direction over a [T, Din] sequence; returns [T, H] with row t
// holding the state after reading position t in scan order. Optional h0/c0
// nodes ([1, H]) receive gradients when given.
template <class Real>
int lstm(Tape<Real>& t, int x, LstmDirParams<Real>& w, bool reverse, int h0 = -1, int c0 = -1) {
  const Tensor<Real>& xs = t.val(x);
  int64_t T = xs.rows();
  int64_t din = xs.cols();
  int64_t H = w.hidden();
  if (w.wx.value.cols() != din || w.wx.value.rows() != 4 * H || w.b.value.numel() != 4 * H)
    throw ShapeMismatch("lstm: weight shapes for input dim " + std::to_string(din));
  if (T == 0) throw ShapeMismatch("lstm: empty sequence");

  const auto& k = kernels::active<Real>();

  auto gates = std::make_shared<Tensor<Real>>(std::vector<int64_t>{T, 4 * H});  // post-activation
  auto cells = std::make_shared<Tensor<Real>>(std::vector<int64_t>{T, H});
  auto tanhc = std::make_shared<Tensor<Real>>(std::vector<int64_t>{T, H});
  Tensor<Real> out({T, H});

  std::vector<Real> z(size_t(4 * H), Real(0));
  const Real* hprev = h0 >= 0 ? t.val(h0).row(0) : nullptr;
  const Real* cprev = c0 >= 0 ? t.val(c0).row(0) : nullptr;
  for (int64_t s = 0; s < T; ++s) {
    int64_t pos = reverse ? T - 1 - s : s;
    std::copy(w.b.value.data.begin(), w.b.value.data.end(), z.begin());
    k.gemv_acc(w.wx.value.data.data(), 4 * H, din, xs.row(pos), z.data());
    if (hprev) k.gemv_acc(w.wh.value.data.data(), 4 * H, H, hprev, z.data());

    Real* g = gates->row(pos);
    k.vsigmoid(2 * H, z.data(), g);                  // i, f
    k.vtanh(H, z.data() + 2 * H, g + 2 * H);         // g
    k.vsigmoid(H, z.data() + 3 * H, g + 3 * H);      // o

    Real* c = cells->row(pos);
    if (cprev)
      k.mul(H, g + H, cprev, c);  // f .* c_prev
    k.mul_acc(H, g, g + 2 * H, c);  // += i .* g
    k.vtanh(H, c, tanhc->row(pos));
    k.mul(H, g + 3 * H, tanhc->row(pos), out.row(pos));

    hprev = out.row(pos);
    cprev = c;
  }

  int id = t.add(std::move(out), nullptr);
  t.add(Tensor<Real>(), [&t, x, &w, reverse, h0, c0, id, gates, cells, tanhc, T, H, din] {
    if (!t.has_grad(id)) return;
    const auto& kk = kernels::active<Real>();
    const Tensor<Real>& y = t.val(id);
    const Tensor<Real>& g = t.grad(id);
    const Tensor<Real>& xs2 = t.val(x);
    Tensor<Real>& xg = t.grad(x);
    Tensor<Real>& wxg = t.param_grad(w.wx);
    Tensor<Real>& whg = t.param_grad(w.wh);
    Tensor<Real>& bg = t.param_grad(w.b);

    std::vector<Real> dh(size_t(H), Real(0)), dc(size_t(H), Real(0)), dz(size_t(4 * H), Real(0));
    std::vector<Real> dh_carry(size_t(H), Real(0));
    for (int64_t s = T - 1; s >= 0; --s) {
      int64_t pos = reverse ? T - 1 - s : s;
      int64_t prev = reverse ? pos + 1 : pos - 1;
      bool has_prev = s > 0;
      const Real* gt = gates->row(pos);
      const Real* tc = tanhc->row(pos);
      const Real* cprev2 = has_prev ? cells->row(prev) : (c0 >= 0 ? t.val(c0).row(0) : nullptr);
      const Real* hprev2 = has_prev ? y.row(prev) : (h0 >= 0 ? t.val(h0).row(0) : nullptr);

      for (int64_t j = 0; j < H; ++j) dh[size_t(j)] = g.row(pos)[j] + dh_carry[size_t(j)];
      for (int64_t j = 0; j < H; ++j) {
        Real i_ = gt[j], f_ = gt[H + j], g_ = gt[2 * H + j], o_ = gt[3 * H + j];
        Real dho = dh[size_t(j)];
        Real do_ = dho * tc[j];
        Real dcj = dc[size_t(j)] + dho * o_ * (Real(1) - tc[j] * tc[j]);
        Real di = dcj * g_;
        Real dgg = dcj * i_;
        Real df = cprev2 ? dcj * cprev2[j] : Real(0);
        dz[size_t(j)] = di * i_ * (Real(1) - i_);
        dz[size_t(H + j)] = df * f_ * (Real(1) - f_);
        dz[size_t(2 * H + j)] = dgg * (Real(1) - g_ * g_);
        dz[size_t(3 * H + j)] = do_ * o_ * (Real(1) - o_);
        dc[size_t(j)] = dcj * f_;  // flows to c_prev
      }

      kk.ger_acc(wxg.data.data(), 4 * H, din, dz.data(), xs2.row(pos));
      kk.axpy(4 * H, Real(1), dz.data(), bg.data.data());
      kk.gemv_t_acc(w.wx.value.data.data(), 4 * H, din, dz.data(), xg.row(pos));
      std::fill(dh_carry.begin(), dh_carry.end(), Real(0));
      if (hprev2) {
        kk.ger_acc(whg.data.data(), 4 * H, H, dz.data(), hprev2);
        kk.gemv_t_acc(w.wh.value.data.data(), 4 * H, H, dz.data(), dh_carry.data());
      }
    }
    // Initial-state gradients.
    if (h0 >= 0) kk.axpy(H, Real(1), dh_carry.data(), t.grad(h0).row(0));
    if (c0 >= 0) kk.axpy(H, Real(1), dc.data(), t.grad(c0).row(0));
  });
  return id;
}

}  // namespace harakat
