// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "imbalgat/error.hpp"

namespace imbalgat {

void TrainConfig::validate() const {
  if (lr <= 0.0) throw ConfigError("lr must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  loss.validate();
}

ModelArch TrainConfig::arch_for(const GraphDataset& ds) const {
  if (model == ModelKind::gat)
    return ModelArch::gat(ds.num_features(), ds.num_classes, gat_hidden, gat_heads,
                          input_dropout, attn_dropout);
  return ModelArch::gcn(ds.num_features(), ds.num_classes, gcn_hidden, gcn_dropout);
}

std::string TrainConfig::hash() const {
  std::ostringstream s;
  s.precision(17);
  s << "model=" << static_cast<int>(model) << ";base=" << static_cast<int>(loss.base)
    << ";gamma=" << loss.gamma << ";lambda=" << loss.lambda
    << ";wsrc=" << static_cast<int>(loss.weight_source)
    << ";rlayer=" << loss.reg_layer << ";rhead=" << loss.reg_head
    << ";rred=" << static_cast<int>(loss.reg_reduction) << ";lr=" << lr
    << ";wd=" << weight_decay << ";epochs=" << epochs << ";seed=" << seed
    << ";patience=" << patience << ";select=" << static_cast<int>(select_by)
    << ";gh=" << gat_hidden << ";heads=" << gat_heads << ";gcnh=" << gcn_hidden
    << ";ido=" << input_dropout << ";ado=" << attn_dropout << ";gdo=" << gcn_dropout;
  std::string str = s.str();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : str) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

void AdamState::init(const std::vector<Tensor*>& params) {
  m.clear();
  v.clear();
  for (const Tensor* p : params) {
    m.emplace_back(p->size(), 0.0);
    v.emplace_back(p->size(), 0.0);
  }
  t = 0;
}

void adam_step(const std::vector<Tensor*>& params,
               const std::vector<const std::vector<double>*>& grads,
               AdamState& state, double lr, double weight_decay, double beta1,
               double beta2, double eps) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw DimensionError("adam_step: parameter/gradient/state count mismatch");
  state.t += 1;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = *params[pi];
    const std::vector<double>& g = *grads[pi];
    if (g.size() != p.size()) throw DimensionError("adam_step: gradient shape mismatch");
    auto& theta = p.data_mut();
    auto& mm = state.m[pi];
    auto& vv = state.v[pi];
    for (size_t i = 0; i < theta.size(); ++i) {
      double gi = g[i] + weight_decay * theta[i];
      mm[i] = beta1 * mm[i] + (1.0 - beta1) * gi;
      vv[i] = beta2 * vv[i] + (1.0 - beta2) * gi * gi;
      double mhat = mm[i] / bc1;
      double vhat = vv[i] / bc2;
      theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

namespace {

// Class weights are fed to the loss mean-normalized: the ratios carry the
// imbalance signal while the loss keeps the scale of the unweighted
// baseline, so the published lr / weight-decay pair applies unchanged.
ClassWeights normalized(ClassWeights w) {
  double mean = 0.0;
  for (double x : w.w) mean += x;
  mean /= static_cast<double>(w.w.size());
  for (double& x : w.w) x /= mean;
  return w;
}

ClassWeights weights_for(const GraphDataset& ds, const Split& split,
                         WeightSource source) {
  switch (source) {
    case WeightSource::full_dataset:
      return normalized(class_weights(ds.class_counts()));
    case WeightSource::train_split: {
      std::vector<size_t> counts(ds.num_classes, 0);
      for (int32_t v : split.train_idx)
        counts[static_cast<size_t>(ds.labels[static_cast<size_t>(v)])]++;
      return normalized(class_weights(counts));
    }
    case WeightSource::uniform: {
      ClassWeights w;
      w.w.assign(ds.num_classes, 1.0);
      return w;
    }
  }
  throw ConfigError("unknown weight source");
}

double plain_ce(const Tensor& probs, const std::vector<int32_t>& labels,
                const std::vector<int32_t>& nodes) {
  double acc = 0.0;
  for (int32_t v : nodes) {
    double p = probs(static_cast<size_t>(v),
                     static_cast<size_t>(labels[static_cast<size_t>(v)]));
    acc -= std::log(p < Tape::kLogEps ? Tape::kLogEps : p);
  }
  return acc / static_cast<double>(nodes.size());
}

double masked_attention_mean_of(const GraphDataset& ds, const ModelParams& params,
                                const MinorityMask& mask, const LossConfig& loss) {
  if (params.arch.kind != ModelKind::gat || mask.edge_slots.empty()) return 0.0;
  Tape tape;
  ForwardResult fwd = model_forward(tape, ds, params, false, nullptr);
  const EdgeVector* head = fwd.attention.find(loss.reg_layer, loss.reg_head);
  if (!head) return 0.0;
  double acc = 0.0;
  for (int64_t s : mask.edge_slots) acc += head->values()[static_cast<size_t>(s)];
  return acc / static_cast<double>(mask.edge_slots.size());
}

}  // namespace

TrainReport train(const GraphDataset& ds, const Split& split,
                  const MinorityMask& mask, const TrainConfig& config) {
  config.validate();
  if (split.train_idx.empty()) throw DataError("train split is empty");
  auto t0 = std::chrono::steady_clock::now();

  const bool is_gat = config.model == ModelKind::gat;
  const double lambda = is_gat ? config.loss.lambda : 0.0;
  ClassWeights weights = weights_for(ds, split, config.loss.weight_source);

  ModelParams params = init_params(config.arch_for(ds), config.seed);
  std::vector<Tensor*> flat = params.flat();
  AdamState adam;
  adam.init(flat);
  Rng dropout_rng(config.seed ^ 0xD1B54A32D192ED03ull);

  TrainReport report;
  report.seed = config.seed;
  report.config_hash = config.hash();

  Tape tape;
  double best_score = 0.0;
  bool have_best = false;
  size_t best_epoch = 0;
  ModelParams best_params;
  size_t since_best = 0;

  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    tape.reset();
    flat = params.flat();
    for (Tensor* p : flat) tape.watch(*p);

    EpochStats stats;
    try {
      ForwardResult fwd = model_forward(tape, ds, params, /*training=*/true, &dropout_rng);
      Tensor base = config.loss.base == BaseLoss::weighted_ce
                        ? weighted_ce(tape, fwd.probs, ds.labels, split.train_idx, weights)
                        : focal_loss(tape, fwd.probs, ds.labels, split.train_idx,
                                     config.loss.gamma);
      Tensor reg = (is_gat && lambda > 0.0)
                       ? kl_attention_reg(tape, fwd.attention, mask, config.loss)
                       : Tensor(1, 1, 0.0);
      Tensor total = total_loss(tape, base, reg, lambda);
      stats.base_loss = base.data()[0];
      stats.reg_value = reg.data()[0];
      stats.train_loss = total.data()[0];

      tape.backward(total);
      std::vector<const std::vector<double>*> grads;
      grads.reserve(flat.size());
      for (Tensor* p : flat) grads.push_back(&tape.grad(*p));
      adam_step(flat, grads, adam, config.lr, config.weight_decay);
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what() +
                         " (config " + config.hash() + ")");
    }

    Tape eval_tape;
    ForwardResult eval_fwd = model_forward(eval_tape, ds, params, false, nullptr);
    MetricsReport val = compute_metrics(eval_fwd.probs, ds.labels, split.val_idx,
                                        ds.num_classes);
    stats.val_acc = val.accuracy;
    stats.val_macro_f1 = val.macro_f1;
    stats.val_loss = plain_ce(eval_fwd.probs, ds.labels, split.val_idx);
    report.epochs.push_back(stats);

    bool improved = false;
    if (config.select_by == SelectBy::val_macro_f1)
      improved = !have_best || val.macro_f1 > best_score;
    else if (config.select_by == SelectBy::val_loss)
      improved = !have_best || stats.val_loss < best_score;
    if (improved) {
      best_score = config.select_by == SelectBy::val_loss ? stats.val_loss
                                                          : val.macro_f1;
      best_epoch = epoch;
      best_params = params.clone();
      have_best = true;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (config.patience > 0 && since_best >= config.patience) break;
  }

  if (config.select_by == SelectBy::final_epoch || !have_best) {
    report.selected_epoch = report.epochs.size();
    report.params = params.clone();
  } else {
    report.selected_epoch = best_epoch;
    report.params = std::move(best_params);
  }

  Tape final_tape;
  ForwardResult final_fwd = model_forward(final_tape, ds, report.params, false, nullptr);
  report.test = compute_metrics(final_fwd.probs, ds.labels, split.test_idx, ds.num_classes);
  report.val_at_selected =
      compute_metrics(final_fwd.probs, ds.labels, split.val_idx, ds.num_classes);
  report.masked_attention_mean =
      masked_attention_mean_of(ds, report.params, mask, config.loss);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

MetricsReport evaluate(const GraphDataset& ds, const std::vector<int32_t>& nodes,
                       const ModelParams& params) {
  if (nodes.empty()) throw DimensionError("evaluate: empty node set");
  Tape tape;
  ForwardResult fwd = model_forward(tape, ds, params, false, nullptr);
  return compute_metrics(fwd.probs, ds.labels, nodes, ds.num_classes);
}

SweepResult sweep(const GraphDataset& ds, const Split& split,
                  const MinorityMask& mask, TrainConfig base,
                  const std::vector<double>& lambda_grid) {
  if (lambda_grid.empty()) throw ConfigError("sweep: empty lambda grid");
  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double l : grid)
    if (l < 0.0 || l > 1.0) throw ConfigError("sweep: lambda grid must lie in [0,1]");
  SweepResult result;
  double best = -1.0;
  for (double l : grid) {
    base.loss.lambda = l;
    TrainReport rep = train(ds, split, mask, base);
    double score = rep.val_at_selected.macro_f1;
    if (score > best) {  // strict: ties keep the earlier (smaller) lambda
      best = score;
      result.best_lambda = l;
    }
    result.runs.emplace_back(l, std::move(rep));
  }
  return result;
}

void TrainReport::write_epochs_csv(std::ostream& out) const {
  out << "epoch,train_loss,base,reg,val_acc,val_f1\n";
  out.precision(17);
  for (size_t i = 0; i < epochs.size(); ++i) {
    const EpochStats& e = epochs[i];
    out << (i + 1) << ',' << e.train_loss << ',' << e.base_loss << ',' << e.reg_value
        << ',' << e.val_acc << ',' << e.val_macro_f1 << '\n';
  }
}

}  // namespace imbalgat
