#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <string>
#include <vector>

#include "hdd/common.hpp"
#include "hdd/rng.hpp"

namespace hdd {

// Row-major dense matrix of 64-bit reals. Batches sit in rows.
struct Tensor2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor2D() = default;
  Tensor2D(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
  size_t size() const { return data.size(); }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// Y = X * W^T + b over a batch; W is [out x in], X is [batch x in].
inline Tensor2D linear_forward(const Tensor2D& weights, const std::vector<double>& bias, const Tensor2D& x) {
  if (x.cols != weights.cols || static_cast<int>(bias.size()) != weights.rows)
    throw std::invalid_argument("linear_forward: shape mismatch");
  Tensor2D y(x.rows, weights.rows);
  for (int b = 0; b < x.rows; ++b) {
    const double* xb = x.row(b);
    double* yb = y.row(b);
    for (int o = 0; o < weights.rows; ++o) {
      const double* w = weights.row(o);
      double s = bias[static_cast<size_t>(o)];
      for (int i = 0; i < weights.cols; ++i) s += w[i] * xb[i];
      yb[o] = s;
    }
  }
  return y;
}

// Gradients for linear_forward: accumulates dW += dY^T X and db += sum(dY),
// returns dX = dY W.
inline Tensor2D linear_backward(const Tensor2D& weights, const Tensor2D& x, const Tensor2D& d_y,
                                Tensor2D& d_weights, std::vector<double>& d_bias) {
  Tensor2D d_x(x.rows, x.cols);
  for (int b = 0; b < x.rows; ++b) {
    const double* xb = x.row(b);
    const double* dyb = d_y.row(b);
    double* dxb = d_x.row(b);
    for (int o = 0; o < weights.rows; ++o) {
      double g = dyb[o];
      if (g == 0.0) continue;
      d_bias[static_cast<size_t>(o)] += g;
      double* dw = d_weights.row(o);
      const double* w = weights.row(o);
      for (int i = 0; i < weights.cols; ++i) {
        dw[i] += g * xb[i];
        dxb[i] += g * w[i];
      }
    }
  }
  return d_x;
}

// Single-vector dense application: weights [out x in] * input + bias.
inline std::vector<double> dense_apply(const Tensor2D& weights, const std::vector<double>& bias,
                                       const std::vector<double>& input) {
  if (static_cast<int>(input.size()) != weights.cols || bias.size() != static_cast<size_t>(weights.rows))
    throw std::invalid_argument("dense_apply: shape mismatch");
  std::vector<double> out(static_cast<size_t>(weights.rows));
  for (int o = 0; o < weights.rows; ++o) {
    const double* w = weights.row(o);
    double s = bias[static_cast<size_t>(o)];
    for (int i = 0; i < weights.cols; ++i) s += w[i] * input[static_cast<size_t>(i)];
    out[static_cast<size_t>(o)] = s;
  }
  return out;
}

// Named parameter tensors with matching gradient and optimizer-state slots.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor2D value;
    Tensor2D grad;
    Tensor2D m;
    Tensor2D v;
  };

  Entry& add(const std::string& name, int rows, int cols) {
    if (find(name)) throw std::invalid_argument("duplicate parameter name '" + name + "'");
    // optimizer state (m, v) stays empty until the first optimizer step
    entries_.push_back(Entry{name, Tensor2D(rows, cols), Tensor2D(rows, cols), Tensor2D(), Tensor2D()});
    return entries_.back();
  }

  Entry* find(const std::string& name) {
    for (auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }

  std::deque<Entry>& entries() { return entries_; }
  const std::deque<Entry>& entries() const { return entries_; }

  void zero_grads() {
    for (auto& e : entries_) e.grad.fill(0.0);
  }

  size_t total_params() const {
    size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  long long step_count() const { return step_; }
  void set_step(long long s) { step_ = s; }

  // stops with the offending name when any gradient is non-finite
  void check_grads_finite() const {
    for (const auto& e : entries_)
      if (!e.grad.all_finite()) throw StageError("backprop", "non-finite gradient in parameter '" + e.name + "'");
  }

  std::vector<std::vector<double>> snapshot() const {
    std::vector<std::vector<double>> s;
    s.reserve(entries_.size());
    for (const auto& e : entries_) s.push_back(e.value.data);
    return s;
  }

  void restore(const std::vector<std::vector<double>>& s) {
    if (s.size() != entries_.size()) throw std::invalid_argument("restore: snapshot mismatch");
    for (size_t i = 0; i < entries_.size(); ++i) entries_[i].value.data = s[i];
  }

  // Checkpoint layout: "HDDW1", u32 entry count, per entry a u32-length name,
  // u32 rows, u32 cols, u64 offset into the payload; then float64 payload,
  // everything little-endian.
  void save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StageError("io", "cannot open for writing: " + path);
    out.write("HDDW1", 5);
    uint32_t count = static_cast<uint32_t>(entries_.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    uint64_t offset = 0;
    for (const auto& e : entries_) {
      uint32_t len = static_cast<uint32_t>(e.name.size());
      uint32_t r = static_cast<uint32_t>(e.value.rows), c = static_cast<uint32_t>(e.value.cols);
      out.write(reinterpret_cast<const char*>(&len), 4);
      out.write(e.name.data(), len);
      out.write(reinterpret_cast<const char*>(&r), 4);
      out.write(reinterpret_cast<const char*>(&c), 4);
      out.write(reinterpret_cast<const char*>(&offset), 8);
      offset += e.value.size() * sizeof(double);
    }
    for (const auto& e : entries_)
      out.write(reinterpret_cast<const char*>(e.value.data.data()),
                static_cast<std::streamsize>(e.value.size() * sizeof(double)));
    if (!out) throw StageError("io", "write failed: " + path);
  }

  void load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "HDDW1", 5) != 0) throw ConfigError(path + ": bad magic, expected HDDW1");
    uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 4);
    if (count != entries_.size()) throw ConfigError(path + ": parameter count mismatch");
    struct Loc {
      uint32_t rows, cols;
      uint64_t offset;
    };
    std::vector<Loc> locs;
    for (auto& e : entries_) {
      uint32_t len = 0;
      in.read(reinterpret_cast<char*>(&len), 4);
      std::string name(len, '\0');
      in.read(name.data(), len);
      Loc l{};
      in.read(reinterpret_cast<char*>(&l.rows), 4);
      in.read(reinterpret_cast<char*>(&l.cols), 4);
      in.read(reinterpret_cast<char*>(&l.offset), 8);
      if (!in || name != e.name || l.rows != static_cast<uint32_t>(e.value.rows) ||
          l.cols != static_cast<uint32_t>(e.value.cols))
        throw ConfigError(path + ": manifest mismatch at '" + e.name + "'");
      locs.push_back(l);
    }
    std::streampos payload = in.tellg();
    size_t i = 0;
    for (auto& e : entries_) {
      in.seekg(payload + static_cast<std::streamoff>(locs[i].offset));
      in.read(reinterpret_cast<char*>(e.value.data.data()),
              static_cast<std::streamsize>(e.value.size() * sizeof(double)));
      ++i;
    }
    if (!in) throw ConfigError(path + ": truncated payload");
  }

 private:
  std::deque<Entry> entries_;  // deque: stable addresses for wired layers
  long long step_ = 0;
};

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment update with bias correction.
inline void optimizer_step(ParamStore& store, const AdamHyper& h) {
  store.set_step(store.step_count() + 1);
  double t = static_cast<double>(store.step_count());
  double bc1 = 1.0 - std::pow(h.beta1, t);
  double bc2 = 1.0 - std::pow(h.beta2, t);
  for (auto& e : store.entries()) {
    if (e.m.size() != e.value.size()) {
      e.m = Tensor2D(e.value.rows, e.value.cols);
      e.v = Tensor2D(e.value.rows, e.value.cols);
    }
    for (size_t i = 0; i < e.value.size(); ++i) {
      double g = e.grad.data[i];
      e.m.data[i] = h.beta1 * e.m.data[i] + (1.0 - h.beta1) * g;
      e.v.data[i] = h.beta2 * e.v.data[i] + (1.0 - h.beta2) * g * g;
      double mhat = e.m.data[i] / bc1;
      double vhat = e.v.data[i] / bc2;
      e.value.data[i] -= h.lr * mhat / (std::sqrt(vhat) + h.eps);
    }
  }
}

inline void glorot_init(Tensor2D& w, RngStream& rng) {
  double scale = std::sqrt(6.0 / (w.rows + w.cols));
  for (double& v : w.data) v = rng.next_symmetric(scale);
}

// ---------------------------------------------------------------------------
// losses
// ---------------------------------------------------------------------------

enum class LossKind { bce, mse };

// Plain loss on probabilities/targets; bce requires pred strictly in (0,1).
inline double loss(const std::vector<double>& pred, const std::vector<double>& target, LossKind kind) {
  if (pred.size() != target.size() || pred.empty()) throw std::invalid_argument("loss: length mismatch");
  double s = 0.0;
  if (kind == LossKind::mse) {
    for (size_t i = 0; i < pred.size(); ++i) {
      double d = pred[i] - target[i];
      s += d * d;
    }
  } else {
    for (size_t i = 0; i < pred.size(); ++i) {
      if (!(pred[i] > 0.0 && pred[i] < 1.0))
        throw std::domain_error("loss: bce requires predictions in (0,1)");
      s += -(target[i] * std::log(pred[i]) + (1.0 - target[i]) * std::log(1.0 - pred[i]));
    }
  }
  return s / static_cast<double>(pred.size());
}

// Numerically stable binary cross-entropy on logits; returns mean loss and
// d(loss)/d(logit) already divided by the batch size.
inline std::pair<double, std::vector<double>> bce_with_logits(const std::vector<double>& logits,
                                                              const std::vector<double>& targets) {
  if (logits.size() != targets.size() || logits.empty())
    throw std::invalid_argument("bce_with_logits: length mismatch");
  double total = 0.0;
  std::vector<double> grad(logits.size());
  double inv = 1.0 / static_cast<double>(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    double z = logits[i], t = targets[i];
    total += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
    grad[i] = (sigmoid(z) - t) * inv;
  }
  return {total * inv, std::move(grad)};
}

inline std::pair<double, std::vector<double>> mse_with_grad(const std::vector<double>& preds,
                                                            const std::vector<double>& targets) {
  if (preds.size() != targets.size() || preds.empty()) throw std::invalid_argument("mse_with_grad: length mismatch");
  double total = 0.0;
  std::vector<double> grad(preds.size());
  double inv = 1.0 / static_cast<double>(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    double d = preds[i] - targets[i];
    total += d * d;
    grad[i] = 2.0 * d * inv;
  }
  return {total * inv, std::move(grad)};
}

// ---------------------------------------------------------------------------
// layers
// ---------------------------------------------------------------------------

// Fully connected layer with optional relu.
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(ParamStore& store, const std::string& prefix, int input_dim, int output_dim, bool relu,
             RngStream init)
      : relu_(relu) {
    w_ = &store.add(prefix + ".w", output_dim, input_dim);
    b_ = &store.add(prefix + ".b", 1, output_dim);
    glorot_init(w_->value, init);
  }

  Tensor2D forward(Tensor2D x) {
    x_ = std::move(x);
    Tensor2D y = linear_forward(w_->value, b_->value.data, x_);
    if (relu_) {
      mask_.assign(y.size(), 0);
      for (size_t i = 0; i < y.size(); ++i) {
        if (y.data[i] > 0.0) mask_[i] = 1;
        else y.data[i] = 0.0;
      }
    }
    y_cols_ = y.cols;
    return y;
  }

  Tensor2D backward(Tensor2D d_y) {
    if (relu_)
      for (size_t i = 0; i < d_y.size(); ++i)
        if (!mask_[i]) d_y.data[i] = 0.0;
    std::vector<double> db(static_cast<size_t>(y_cols_), 0.0);
    Tensor2D d_x = linear_backward(w_->value, x_, d_y, w_->grad, db);
    for (int i = 0; i < y_cols_; ++i) b_->grad.data[static_cast<size_t>(i)] += db[static_cast<size_t>(i)];
    return d_x;
  }

  int output_dim() const { return w_ ? w_->value.rows : 0; }

 private:
  ParamStore::Entry* w_ = nullptr;
  ParamStore::Entry* b_ = nullptr;
  bool relu_ = false;
  Tensor2D x_;
  std::vector<char> mask_;
  int y_cols_ = 0;
};

// Inverted dropout; identity when inactive.
class DropoutLayer {
 public:
  DropoutLayer() = default;
  explicit DropoutLayer(double rate) : rate_(rate) {}

  Tensor2D forward(Tensor2D x, bool training, RngStream& rng) {
    if (!training || rate_ <= 0.0) {
      active_ = false;
      return x;
    }
    active_ = true;
    double keep = 1.0 - rate_;
    mask_.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      mask_[i] = rng.next_double() >= rate_ ? 1.0 / keep : 0.0;
      x.data[i] *= mask_[i];
    }
    return x;
  }

  Tensor2D backward(Tensor2D d_y) const {
    if (!active_) return d_y;
    for (size_t i = 0; i < d_y.size(); ++i) d_y.data[i] *= mask_[i];
    return d_y;
  }

 private:
  double rate_ = 0.0;
  bool active_ = false;
  std::vector<double> mask_;
};

// Four-gate LSTM cell parameters: input weights W_* [hidden x input],
// recurrent weights U_* [hidden x hidden], biases b_* [hidden].
struct LstmParams {
  Tensor2D* W_i = nullptr;
  Tensor2D* W_f = nullptr;
  Tensor2D* W_c = nullptr;
  Tensor2D* W_o = nullptr;
  Tensor2D* U_i = nullptr;
  Tensor2D* U_f = nullptr;
  Tensor2D* U_c = nullptr;
  Tensor2D* U_o = nullptr;
  Tensor2D* b_i = nullptr;
  Tensor2D* b_f = nullptr;
  Tensor2D* b_c = nullptr;
  Tensor2D* b_o = nullptr;
};

struct LstmStep {
  Tensor2D f, i, cbar, o, c, h;
};

// One cell step:
//   f = sigmoid(W_f x + U_f h_prev + b_f)
//   i = sigmoid(W_i x + U_i h_prev + b_i)
//   cbar = tanh(W_c x + U_c h_prev + b_c)
//   c = f * c_prev + i * cbar
//   o = sigmoid(W_o x + U_o h_prev + b_o)
//   h = o * tanh(c)
inline LstmStep lstm_cell_step(const LstmParams& p, const Tensor2D& x, const Tensor2D& h_prev,
                               const Tensor2D& c_prev) {
  if (x.rows != h_prev.rows || h_prev.cols != p.U_i->cols || x.cols != p.W_i->cols)
    throw std::invalid_argument("lstm_cell_step: shape mismatch");
  auto gate = [&](const Tensor2D& W, const Tensor2D& U, const Tensor2D& b) {
    Tensor2D z = linear_forward(W, b.data, x);
    Tensor2D rec = linear_forward(U, std::vector<double>(static_cast<size_t>(U.rows), 0.0), h_prev);
    for (size_t k = 0; k < z.size(); ++k) z.data[k] += rec.data[k];
    return z;
  };
  LstmStep s;
  s.f = gate(*p.W_f, *p.U_f, *p.b_f);
  s.i = gate(*p.W_i, *p.U_i, *p.b_i);
  s.cbar = gate(*p.W_c, *p.U_c, *p.b_c);
  s.o = gate(*p.W_o, *p.U_o, *p.b_o);
  for (size_t k = 0; k < s.f.size(); ++k) {
    s.f.data[k] = sigmoid(s.f.data[k]);
    s.i.data[k] = sigmoid(s.i.data[k]);
    s.cbar.data[k] = std::tanh(s.cbar.data[k]);
    s.o.data[k] = sigmoid(s.o.data[k]);
  }
  s.c = Tensor2D(x.rows, p.U_i->cols);
  s.h = Tensor2D(x.rows, p.U_i->cols);
  for (size_t k = 0; k < s.c.size(); ++k) {
    s.c.data[k] = s.f.data[k] * c_prev.data[k] + s.i.data[k] * s.cbar.data[k];
    s.h.data[k] = s.o.data[k] * std::tanh(s.c.data[k]);
  }
  if (!s.h.all_finite() || !s.c.all_finite())
    throw StageError("lstm", "non-finite cell state (exploding state)");
  return s;
}

// LSTM over a sequence with full backpropagation through time. Initial state
// is zero; forward returns the last hidden state.
class LstmLayer {
 public:
  LstmLayer() = default;
  LstmLayer(ParamStore& store, const std::string& prefix, int input_dim, int hidden_dim, RngStream init)
      : input_dim_(input_dim), hidden_dim_(hidden_dim) {
    auto wire = [&](const char* gate, Tensor2D*& W, Tensor2D*& U, Tensor2D*& b) {
      W = &store.add(prefix + ".W_" + gate, hidden_dim, input_dim).value;
      U = &store.add(prefix + ".U_" + gate, hidden_dim, hidden_dim).value;
      b = &store.add(prefix + ".b_" + gate, 1, hidden_dim).value;
      glorot_init(*W, init);
      glorot_init(*U, init);
    };
    wire("i", params_.W_i, params_.U_i, params_.b_i);
    wire("f", params_.W_f, params_.U_f, params_.b_f);
    wire("c", params_.W_c, params_.U_c, params_.b_c);
    wire("o", params_.W_o, params_.U_o, params_.b_o);
    // forget gate starts open
    for (double& v : params_.b_f->data) v = 1.0;
    store_ = &store;
    prefix_ = prefix;
  }

  Tensor2D forward(std::vector<Tensor2D> xs) {
    xs_ = std::move(xs);
    steps_.clear();
    int batch = xs_.front().rows;
    Tensor2D h(batch, hidden_dim_), c(batch, hidden_dim_);
    for (const Tensor2D& x : xs_) {
      LstmStep s = lstm_cell_step(params_, x, h, c);
      h = s.h;
      c = s.c;
      steps_.push_back(std::move(s));
    }
    return h;
  }

  // d_last is dLoss/d(last hidden); returns per-step input gradients.
  std::vector<Tensor2D> backward(const Tensor2D& d_last) {
    int batch = d_last.rows;
    size_t T = steps_.size();
    std::vector<Tensor2D> d_xs(T);
    Tensor2D dh = d_last;
    Tensor2D dc(batch, hidden_dim_);

    auto grads = [&](const char* gate) {
      auto* W = store_->find(prefix_ + ".W_" + gate);
      auto* U = store_->find(prefix_ + ".U_" + gate);
      auto* b = store_->find(prefix_ + ".b_" + gate);
      return std::array<ParamStore::Entry*, 3>{W, U, b};
    };
    auto gi = grads("i"), gf = grads("f"), gc = grads("c"), go = grads("o");

    for (size_t t = T; t-- > 0;) {
      const LstmStep& s = steps_[t];
      const Tensor2D& c_prev = t == 0 ? zero_state(batch) : steps_[t - 1].c;
      const Tensor2D& h_prev = t == 0 ? zero_state(batch) : steps_[t - 1].h;

      Tensor2D dzi(batch, hidden_dim_), dzf(batch, hidden_dim_), dzc(batch, hidden_dim_),
          dzo(batch, hidden_dim_);
      for (size_t k = 0; k < dh.size(); ++k) {
        double tc = std::tanh(s.c.data[k]);
        double do_ = dh.data[k] * tc;
        double dck = dc.data[k] + dh.data[k] * s.o.data[k] * (1.0 - tc * tc);
        double di = dck * s.cbar.data[k];
        double df = dck * c_prev.data[k];
        double dcbar = dck * s.i.data[k];
        dc.data[k] = dck * s.f.data[k];  // flows to step t-1
        dzo.data[k] = do_ * s.o.data[k] * (1.0 - s.o.data[k]);
        dzi.data[k] = di * s.i.data[k] * (1.0 - s.i.data[k]);
        dzf.data[k] = df * s.f.data[k] * (1.0 - s.f.data[k]);
        dzc.data[k] = dcbar * (1.0 - s.cbar.data[k] * s.cbar.data[k]);
      }

      Tensor2D dx(batch, input_dim_);
      Tensor2D dh_prev(batch, hidden_dim_);
      auto accumulate = [&](const Tensor2D& dz, const std::array<ParamStore::Entry*, 3>& g) {
        std::vector<double> db(static_cast<size_t>(hidden_dim_), 0.0);
        Tensor2D dxi = linear_backward(g[0]->value, xs_[t], dz, g[0]->grad, db);
        for (size_t k = 0; k < dxi.size(); ++k) dx.data[k] += dxi.data[k];
        std::vector<double> dummy(static_cast<size_t>(hidden_dim_), 0.0);
        Tensor2D dhp = linear_backward(g[1]->value, h_prev, dz, g[1]->grad, dummy);
        for (size_t k = 0; k < dhp.size(); ++k) dh_prev.data[k] += dhp.data[k];
        for (int j = 0; j < hidden_dim_; ++j) g[2]->grad.data[static_cast<size_t>(j)] += db[static_cast<size_t>(j)];
      };
      accumulate(dzi, gi);
      accumulate(dzf, gf);
      accumulate(dzc, gc);
      accumulate(dzo, go);

      d_xs[t] = std::move(dx);
      dh = std::move(dh_prev);
    }
    return d_xs;
  }

  int hidden_dim() const { return hidden_dim_; }
  const LstmParams& params() const { return params_; }

 private:
  const Tensor2D& zero_state(int batch) const {
    if (zero_.rows != batch) zero_ = Tensor2D(batch, hidden_dim_);
    return zero_;
  }

  int input_dim_ = 0;
  int hidden_dim_ = 0;
  LstmParams params_;
  ParamStore* store_ = nullptr;
  std::string prefix_;
  std::vector<Tensor2D> xs_;
  std::vector<LstmStep> steps_;
  mutable Tensor2D zero_;
};

// Valid-mode 1-D convolution over the feature axis (single input channel,
// n_filters output channels), relu, then non-overlapping max pooling; the
// remainder tail is pooled as-is. Output is filter-major.
class Conv1dReluPool {
 public:
  Conv1dReluPool() = default;
  Conv1dReluPool(ParamStore& store, const std::string& prefix, int input_dim, int n_filters, int kernel_width,
                 int pool_width, RngStream init)
      : input_dim_(input_dim), n_filters_(n_filters), kernel_width_(kernel_width), pool_width_(pool_width) {
    if (input_dim < kernel_width)
      throw ConfigError("conv1d: input length " + std::to_string(input_dim) + " shorter than kernel " +
                        std::to_string(kernel_width));
    k_ = &store.add(prefix + ".kernels", n_filters, kernel_width);
    b_ = &store.add(prefix + ".bias", 1, n_filters);
    glorot_init(k_->value, init);
    conv_len_ = input_dim - kernel_width + 1;
    n_pools_ = (conv_len_ + pool_width - 1) / pool_width;
  }

  int output_dim() const { return n_filters_ * n_pools_; }

  Tensor2D forward(Tensor2D x) {
    x_ = std::move(x);
    int batch = x_.rows;
    Tensor2D y(batch, output_dim());
    argmax_.assign(static_cast<size_t>(batch) * output_dim(), -1);
    for (int b = 0; b < batch; ++b) {
      const double* xb = x_.row(b);
      for (int f = 0; f < n_filters_; ++f) {
        const double* k = k_->value.row(f);
        double bias = b_->value.data[static_cast<size_t>(f)];
        for (int p = 0; p < n_pools_; ++p) {
          int lo = p * pool_width_;
          int hi = std::min(lo + pool_width_, conv_len_);
          double best = 0.0;  // relu floor
          int best_pos = -1;
          for (int pos = lo; pos < hi; ++pos) {
            double acc = bias;
            for (int t = 0; t < kernel_width_; ++t) acc += k[t] * xb[pos + t];
            if (acc > best) {
              best = acc;
              best_pos = pos;
            }
          }
          y.at(b, f * n_pools_ + p) = best;
          argmax_[static_cast<size_t>(b) * output_dim() + f * n_pools_ + p] = best_pos;
        }
      }
    }
    return y;
  }

  Tensor2D backward(const Tensor2D& d_y) {
    int batch = x_.rows;
    Tensor2D d_x(batch, input_dim_);
    for (int b = 0; b < batch; ++b) {
      const double* xb = x_.row(b);
      double* dxb = d_x.row(b);
      for (int f = 0; f < n_filters_; ++f) {
        double* dk = k_->grad.row(f);
        const double* k = k_->value.row(f);
        for (int p = 0; p < n_pools_; ++p) {
          double g = d_y.at(b, f * n_pools_ + p);
          if (g == 0.0) continue;
          int pos = argmax_[static_cast<size_t>(b) * output_dim() + f * n_pools_ + p];
          if (pos < 0) continue;  // pooled a relu zero: no gradient
          b_->grad.data[static_cast<size_t>(f)] += g;
          for (int t = 0; t < kernel_width_; ++t) {
            dk[t] += g * xb[pos + t];
            dxb[pos + t] += g * k[t];
          }
        }
      }
    }
    return d_x;
  }

 private:
  int input_dim_ = 0;
  int n_filters_ = 0;
  int kernel_width_ = 0;
  int pool_width_ = 0;
  int conv_len_ = 0;
  int n_pools_ = 0;
  ParamStore::Entry* k_ = nullptr;
  ParamStore::Entry* b_ = nullptr;
  Tensor2D x_;
  std::vector<int> argmax_;
};

}  // namespace hdd
