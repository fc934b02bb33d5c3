#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "hdd/features.hpp"
#include "hdd/metrics.hpp"
#include "hdd/nn.hpp"

namespace hdd {

enum class Arch { mlp, cnn, lstm, cnn_lstm };

inline Arch parse_arch(const std::string& s) {
  if (s == "mlp") return Arch::mlp;
  if (s == "cnn") return Arch::cnn;
  if (s == "lstm") return Arch::lstm;
  if (s == "cnn_lstm") return Arch::cnn_lstm;
  throw ConfigError("unknown architecture '" + s + "' (mlp|cnn|lstm|cnn_lstm)");
}

inline std::string arch_name(Arch a) {
  switch (a) {
    case Arch::mlp: return "mlp";
    case Arch::cnn: return "cnn";
    case Arch::lstm: return "lstm";
    case Arch::cnn_lstm: return "cnn_lstm";
  }
  return "?";
}

enum class TaskHead { sigmoid_binary, linear_regression };

struct ModelConfig {
  Arch arch = Arch::lstm;
  int embed_dim = 32;
  int hidden_dim = 32;
  int n_filters = 8;
  int kernel_width = 5;
  int pool_width = 4;
  double dropout_rate = 0.5;
  TaskHead head = TaskHead::sigmoid_binary;
  uint64_t rng_seed = 1;

  void validate() const {
    if (embed_dim <= 0 || hidden_dim <= 0 || n_filters <= 0 || kernel_width <= 0 || pool_width <= 0)
      throw ConfigError("model: dimensions must be positive");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("model: dropout_rate must lie in [0,1)");
  }
};

// A batch ready for the model: log1p-scaled features, row-major
// [batch x steps*dim].
struct Batch {
  int steps = 0;
  int dim = 0;  // per-step feature dimension
  Tensor2D x;
  std::vector<double> targets;

  int size() const { return x.rows; }
};

inline Batch make_batch(const SampleSet& set, const std::vector<size_t>& indices) {
  Batch b;
  b.steps = set.steps;
  b.dim = static_cast<int>(set.step_dim());
  b.x = Tensor2D(static_cast<int>(indices.size()), static_cast<int>(set.sample_dim()));
  b.targets.resize(indices.size());
  for (size_t r = 0; r < indices.size(); ++r) {
    const float* src = set.sample(indices[r]);
    double* dst = b.x.row(static_cast<int>(r));
    for (size_t c = 0; c < set.sample_dim(); ++c) dst[c] = std::log1p(static_cast<double>(src[c]));
    b.targets[r] = static_cast<double>(set.targets[indices[r]]);
  }
  return b;
}

inline std::vector<size_t> all_indices(const SampleSet& set) {
  std::vector<size_t> idx(set.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

// The four architectures assembled from the kernel layers:
//   mlp:      flatten -> dense+relu -> dense+relu -> head
//   cnn:      flatten -> conv/relu/pool -> dense+relu -> head
//   lstm:     per step: dense embed -> LSTM -> last hidden -> head
//   cnn_lstm: per step: conv/relu/pool -> dense embed -> LSTM -> head
class Model {
 public:
  Model(ModelConfig cfg, int steps, int input_dim) : cfg_(cfg), steps_(steps), input_dim_(input_dim) {
    cfg_.validate();
    if (steps <= 0 || input_dim <= 0) throw ConfigError("model: empty input shape");
    RngStream init = RngStream::keyed(cfg_.rng_seed, "init");
    dropout_ = DropoutLayer(cfg_.dropout_rate);
    switch (cfg_.arch) {
      case Arch::mlp:
        fc1_ = DenseLayer(params_, "fc1", steps * input_dim, cfg_.hidden_dim, true, init);
        fc2_ = DenseLayer(params_, "fc2", cfg_.hidden_dim, cfg_.hidden_dim, true, init);
        head_ = DenseLayer(params_, "head", cfg_.hidden_dim, 1, false, init);
        break;
      case Arch::cnn:
        conv_ = Conv1dReluPool(params_, "conv", steps * input_dim, cfg_.n_filters, cfg_.kernel_width,
                               cfg_.pool_width, init);
        fc1_ = DenseLayer(params_, "fc1", conv_.output_dim(), cfg_.hidden_dim, true, init);
        head_ = DenseLayer(params_, "head", cfg_.hidden_dim, 1, false, init);
        break;
      case Arch::lstm:
        embed_ = DenseLayer(params_, "embed", input_dim, cfg_.embed_dim, false, init);
        lstm_ = LstmLayer(params_, "lstm", cfg_.embed_dim, cfg_.hidden_dim, init);
        head_ = DenseLayer(params_, "head", cfg_.hidden_dim, 1, false, init);
        break;
      case Arch::cnn_lstm:
        conv_ = Conv1dReluPool(params_, "conv", input_dim, cfg_.n_filters, cfg_.kernel_width, cfg_.pool_width,
                               init);
        embed_ = DenseLayer(params_, "embed", conv_.output_dim(), cfg_.embed_dim, false, init);
        lstm_ = LstmLayer(params_, "lstm", cfg_.embed_dim, cfg_.hidden_dim, init);
        head_ = DenseLayer(params_, "head", cfg_.hidden_dim, 1, false, init);
        break;
    }
  }

  const ModelConfig& config() const { return cfg_; }
  int steps() const { return steps_; }
  int input_dim() const { return input_dim_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Raw head outputs (logits for the binary head), one per batch row.
  std::vector<double> forward(const Batch& batch, bool training = false, uint64_t dropout_salt = 0) {
    if (batch.steps != steps_ || batch.dim != input_dim_)
      throw std::invalid_argument("model forward: batch shape mismatch");
    RngStream drop = RngStream::keyed(cfg_.rng_seed, "dropout", dropout_salt);
    Tensor2D out;
    switch (cfg_.arch) {
      case Arch::mlp: {
        Tensor2D h = fc1_.forward(batch.x);
        h = dropout_.forward(std::move(h), training, drop);
        h = fc2_.forward(std::move(h));
        h = dropout2_.forward(std::move(h), training, drop);
        out = head_.forward(std::move(h));
        break;
      }
      case Arch::cnn: {
        Tensor2D h = conv_.forward(batch.x);
        h = fc1_.forward(std::move(h));
        h = dropout_.forward(std::move(h), training, drop);
        out = head_.forward(std::move(h));
        break;
      }
      case Arch::lstm:
      case Arch::cnn_lstm: {
        std::vector<Tensor2D> xs;
        xs.reserve(static_cast<size_t>(steps_));
        for (int t = 0; t < steps_; ++t) {
          Tensor2D step(batch.x.rows, input_dim_);
          for (int b = 0; b < batch.x.rows; ++b)
            std::copy_n(batch.x.row(b) + static_cast<size_t>(t) * input_dim_, input_dim_, step.row(b));
          xs.push_back(std::move(step));
        }
        if (cfg_.arch == Arch::cnn_lstm) {
          conv_steps_.assign(static_cast<size_t>(steps_), Conv1dReluPool());
          std::vector<Tensor2D> pooled;
          for (int t = 0; t < steps_; ++t) {
            conv_steps_[static_cast<size_t>(t)] = conv_;  // shared weights, per-step caches
            pooled.push_back(conv_steps_[static_cast<size_t>(t)].forward(std::move(xs[static_cast<size_t>(t)])));
          }
          xs = std::move(pooled);
        }
        std::vector<Tensor2D> embedded;
        embed_steps_.assign(static_cast<size_t>(steps_), embed_);
        for (int t = 0; t < steps_; ++t)
          embedded.push_back(embed_steps_[static_cast<size_t>(t)].forward(std::move(xs[static_cast<size_t>(t)])));
        Tensor2D h = lstm_.forward(std::move(embedded));
        h = dropout_.forward(std::move(h), training, drop);
        out = head_.forward(std::move(h));
        break;
      }
    }
    std::vector<double> logits(static_cast<size_t>(out.rows));
    for (int b = 0; b < out.rows; ++b) logits[static_cast<size_t>(b)] = out.at(b, 0);
    return logits;
  }

  // d_logits is dLoss/d(head output); call right after forward(training).
  void backward(const std::vector<double>& d_logits) {
    Tensor2D d_out(static_cast<int>(d_logits.size()), 1);
    for (size_t b = 0; b < d_logits.size(); ++b) d_out.at(static_cast<int>(b), 0) = d_logits[b];
    switch (cfg_.arch) {
      case Arch::mlp: {
        Tensor2D d = head_.backward(std::move(d_out));
        d = dropout2_.backward(std::move(d));
        d = fc2_.backward(std::move(d));
        d = dropout_.backward(std::move(d));
        fc1_.backward(std::move(d));
        break;
      }
      case Arch::cnn: {
        Tensor2D d = head_.backward(std::move(d_out));
        d = dropout_.backward(std::move(d));
        d = fc1_.backward(std::move(d));
        conv_.backward(d);
        break;
      }
      case Arch::lstm:
      case Arch::cnn_lstm: {
        Tensor2D d = head_.backward(std::move(d_out));
        d = dropout_.backward(std::move(d));
        std::vector<Tensor2D> d_steps = lstm_.backward(d);
        for (int t = steps_ - 1; t >= 0; --t) {
          Tensor2D dx = embed_steps_[static_cast<size_t>(t)].backward(std::move(d_steps[static_cast<size_t>(t)]));
          if (cfg_.arch == Arch::cnn_lstm) conv_steps_[static_cast<size_t>(t)].backward(dx);
        }
        break;
      }
    }
    params_.check_grads_finite();
  }

  // Mean loss of the batch under the task head.
  double compute_loss(const Batch& batch, bool training = false, uint64_t dropout_salt = 0) {
    auto logits = forward(batch, training, dropout_salt);
    if (cfg_.head == TaskHead::sigmoid_binary) return bce_with_logits(logits, batch.targets).first;
    return mse_with_grad(logits, batch.targets).first;
  }

  // Forward + loss + full backward; returns the loss.
  double train_step_loss(const Batch& batch, bool training, uint64_t dropout_salt) {
    auto logits = forward(batch, training, dropout_salt);
    auto [l, grad] = cfg_.head == TaskHead::sigmoid_binary ? bce_with_logits(logits, batch.targets)
                                                           : mse_with_grad(logits, batch.targets);
    backward(grad);
    return l;
  }

  // Prediction scores with dropout disabled: sigmoid output for the binary
  // head, raw output for regression.
  std::vector<double> predict_batch(const Batch& batch) {
    auto logits = forward(batch, false, 0);
    if (cfg_.head == TaskHead::sigmoid_binary)
      for (double& v : logits) v = sigmoid(v);
    return logits;
  }

  static size_t expected_param_count(const ModelConfig& cfg, int steps, int input_dim) {
    auto dense = [](int in, int out) { return static_cast<size_t>(in) * out + out; };
    auto conv_out = [&](int in) {
      int conv_len = in - cfg.kernel_width + 1;
      int pools = (conv_len + cfg.pool_width - 1) / cfg.pool_width;
      return cfg.n_filters * pools;
    };
    size_t conv_params = static_cast<size_t>(cfg.n_filters) * cfg.kernel_width + cfg.n_filters;
    size_t lstm_params =
        4 * (static_cast<size_t>(cfg.hidden_dim) * cfg.embed_dim + static_cast<size_t>(cfg.hidden_dim) * cfg.hidden_dim +
             cfg.hidden_dim);
    switch (cfg.arch) {
      case Arch::mlp:
        return dense(steps * input_dim, cfg.hidden_dim) + dense(cfg.hidden_dim, cfg.hidden_dim) +
               dense(cfg.hidden_dim, 1);
      case Arch::cnn:
        return conv_params + dense(conv_out(steps * input_dim), cfg.hidden_dim) + dense(cfg.hidden_dim, 1);
      case Arch::lstm:
        return dense(input_dim, cfg.embed_dim) + lstm_params + dense(cfg.hidden_dim, 1);
      case Arch::cnn_lstm:
        return conv_params + dense(conv_out(input_dim), cfg.embed_dim) + lstm_params + dense(cfg.hidden_dim, 1);
    }
    return 0;
  }

 private:
  ModelConfig cfg_;
  int steps_;
  int input_dim_;
  ParamStore params_;
  DenseLayer fc1_, fc2_, head_, embed_;
  LstmLayer lstm_;
  Conv1dReluPool conv_;
  std::vector<Conv1dReluPool> conv_steps_;
  std::vector<DenseLayer> embed_steps_;
  DropoutLayer dropout_, dropout2_;
};

// Central-difference gradient check over every parameter coordinate; returns
// the maximum relative error against the analytic gradients. Dropout stays
// off: the checked function must be deterministic and differentiable.
inline double gradient_check(Model& model, const Batch& batch, double eps = 1e-5) {
  model.params().zero_grads();
  auto logits = model.forward(batch, false, 0);
  auto [l0, grad] = model.config().head == TaskHead::sigmoid_binary ? bce_with_logits(logits, batch.targets)
                                                                    : mse_with_grad(logits, batch.targets);
  (void)l0;
  model.backward(grad);

  double worst = 0.0;
  for (auto& e : model.params().entries()) {
    for (size_t i = 0; i < e.value.size(); ++i) {
      double saved = e.value.data[i];
      e.value.data[i] = saved + eps;
      double up = model.compute_loss(batch, false, 0);
      e.value.data[i] = saved - eps;
      double down = model.compute_loss(batch, false, 0);
      e.value.data[i] = saved;
      double numeric = (up - down) / (2.0 * eps);
      double analytic = e.grad.data[i];
      double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

struct TrainHyper {
  int epochs = 30;
  int batch_size = 32;
  AdamHyper adam;
  int patience = 5;
  uint64_t seed = 1;
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> val_metric;
  int best_epoch = -1;
  double wall_seconds = 0.0;
};

// Deterministic validation carve-out: an id lands in validation when its
// stable hash falls in the top decile (or the given fraction).
inline std::pair<SampleSet, SampleSet> split_validation(const SampleSet& set, double fraction = 0.1) {
  SampleSet train, val;
  for (SampleSet* s : {&train, &val}) {
    s->steps = set.steps;
    s->n_metapaths = set.n_metapaths;
    s->n_anchors = set.n_anchors;
  }
  uint64_t cut = static_cast<uint64_t>((1.0 - fraction) * 18446744073709551615.0);
  for (size_t i = 0; i < set.size(); ++i) {
    SampleSet& dst = splitmix64(fnv1a64(set.ids[i])) > cut ? val : train;
    dst.ids.push_back(set.ids[i]);
    dst.targets.push_back(set.targets[i]);
    dst.features.insert(dst.features.end(), set.sample(i), set.sample(i) + set.sample_dim());
  }
  return {std::move(train), std::move(val)};
}

namespace model_detail {

// Validation metric, larger is better: AUPR for the binary head (falls back to
// negated loss when the fold has no positive), negated MSE for regression.
inline double validation_metric(Model& model, const Batch& val) {
  auto logits = model.forward(val, false, 0);
  if (model.config().head == TaskHead::sigmoid_binary) {
    bool any_pos = false;
    for (double t : val.targets) any_pos |= t > 0.5;
    if (any_pos) {
      std::vector<double> scores(logits);
      for (double& v : scores) v = sigmoid(v);
      std::vector<int> labels(val.targets.size());
      for (size_t i = 0; i < labels.size(); ++i) labels[i] = val.targets[i] > 0.5 ? 1 : 0;
      return aupr(RankedPredictions::ranked(scores, labels, {}));
    }
    return -bce_with_logits(logits, val.targets).first;
  }
  return -mse_with_grad(logits, val.targets).first;
}

}  // namespace model_detail

// Minibatch optimization with early stopping on the validation metric; the
// parameters of the best epoch are restored before returning.
inline TrainReport train(Model& model, const SampleSet& train_set, const SampleSet& val_set,
                         const TrainHyper& hyper) {
  if (train_set.size() == 0) throw ConfigError("train: empty training set");
  auto t0 = std::chrono::steady_clock::now();

  Batch val = val_set.size() > 0 ? make_batch(val_set, all_indices(val_set)) : Batch{};
  TrainReport report;
  double best = -1e300;
  std::vector<std::vector<double>> best_params = model.params().snapshot();
  int best_epoch = -1;
  int stale = 0;

  std::vector<size_t> order = all_indices(train_set);
  uint64_t salt = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    RngStream shuffle_rng = RngStream::keyed(hyper.seed, "epoch", static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(hyper.batch_size)) {
      size_t end = std::min(order.size(), start + static_cast<size_t>(hyper.batch_size));
      std::vector<size_t> idx(order.begin() + static_cast<long>(start), order.begin() + static_cast<long>(end));
      Batch batch = make_batch(train_set, idx);
      model.params().zero_grads();
      double l = model.train_step_loss(batch, true, ++salt);
      if (!std::isfinite(l))
        throw StageError("train", "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                      std::to_string(batches));
      optimizer_step(model.params(), hyper.adam);
      loss_sum += l;
      ++batches;
    }
    report.epoch_loss.push_back(loss_sum / static_cast<double>(std::max<size_t>(batches, 1)));

    double metric = val.size() > 0 ? model_detail::validation_metric(model, val)
                                   : -report.epoch_loss.back();
    report.val_metric.push_back(metric);
    if (metric > best + 1e-12) {
      best = metric;
      best_params = model.params().snapshot();
      best_epoch = epoch;
      stale = 0;
    } else if (++stale >= hyper.patience) {
      break;
    }
  }
  model.params().restore(best_params);
  report.best_epoch = best_epoch;
  report.wall_seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// Scores for a whole sample set, in set order, dropout disabled.
inline std::vector<double> predict(Model& model, const SampleSet& set) {
  std::vector<double> out;
  out.reserve(set.size());
  const size_t chunk = 256;
  for (size_t start = 0; start < set.size(); start += chunk) {
    std::vector<size_t> idx;
    for (size_t i = start; i < std::min(set.size(), start + chunk); ++i) idx.push_back(i);
    Batch b = make_batch(set, idx);
    auto scores = model.predict_batch(b);
    out.insert(out.end(), scores.begin(), scores.end());
  }
  return out;
}

// Key-value sidecar describing a checkpoint.
inline std::string model_config_sidecar(const ModelConfig& cfg, int steps, int input_dim) {
  std::string s;
  s += "arch = " + arch_name(cfg.arch) + "\n";
  s += "embed_dim = " + std::to_string(cfg.embed_dim) + "\n";
  s += "hidden_dim = " + std::to_string(cfg.hidden_dim) + "\n";
  s += "n_filters = " + std::to_string(cfg.n_filters) + "\n";
  s += "kernel_width = " + std::to_string(cfg.kernel_width) + "\n";
  s += "pool_width = " + std::to_string(cfg.pool_width) + "\n";
  s += "dropout_rate = " + format_fixed(cfg.dropout_rate, 6) + "\n";
  s += std::string("head = ") + (cfg.head == TaskHead::sigmoid_binary ? "sigmoid_binary" : "linear_regression") +
       "\n";
  s += "rng_seed = " + std::to_string(cfg.rng_seed) + "\n";
  s += "steps = " + std::to_string(steps) + "\n";
  s += "input_dim = " + std::to_string(input_dim) + "\n";
  return s;
}

}  // namespace hdd
