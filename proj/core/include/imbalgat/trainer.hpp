// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imbalgat/losses.hpp"
#include "imbalgat/metrics.hpp"
#include "imbalgat/model.hpp"

namespace imbalgat {

enum class SelectBy { val_macro_f1, val_loss, final_epoch };

struct TrainConfig {
  ModelKind model = ModelKind::gat;
  LossConfig loss;
  double lr = 5e-3;
  double weight_decay = 5e-4;
  size_t epochs = 300;
  uint64_t seed = 42;
  size_t patience = 0;  // 0 = disabled
  SelectBy select_by = SelectBy::val_macro_f1;

  // architecture knobs
  size_t gat_hidden = 8;
  size_t gat_heads = 2;
  size_t gcn_hidden = 16;
  double input_dropout = 0.6;
  double attn_dropout = 0.6;
  double gcn_dropout = 0.5;

  void validate() const;
  ModelArch arch_for(const GraphDataset& ds) const;
  // Canonical fingerprint of every field; stable across runs.
  std::string hash() const;
};

struct AdamState {
  std::vector<std::vector<double>> m, v;
  int64_t t = 0;
  void init(const std::vector<Tensor*>& params);
};

// L2 weight decay folded into the gradient (g += wd * theta) before the
// bias-corrected Adam update.
void adam_step(const std::vector<Tensor*>& params,
               const std::vector<const std::vector<double>*>& grads,
               AdamState& state, double lr, double weight_decay,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

struct EpochStats {
  double train_loss = 0.0;  // base + lambda * reg
  double base_loss = 0.0;
  double reg_value = 0.0;
  double val_acc = 0.0;
  double val_macro_f1 = 0.0;
  double val_loss = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  size_t selected_epoch = 0;  // 1-based
  MetricsReport test;
  MetricsReport val_at_selected;
  // mean attention over the mask's edge slots on the designated head,
  // evaluation-mode forward of the selected parameters (0 for GCN or an
  // empty mask)
  double masked_attention_mean = 0.0;
  uint64_t seed = 0;
  std::string config_hash;
  double wall_seconds = 0.0;
  ModelParams params;  // selected checkpoint

  void write_epochs_csv(std::ostream& out) const;
};

// Full-batch training with per-epoch validation and checkpoint selection.
// The regularizer runs on the designated head for GAT models; the GCN path
// never evaluates it (lambda is forced to 0).
TrainReport train(const GraphDataset& ds, const Split& split,
                  const MinorityMask& mask, const TrainConfig& config);

MetricsReport evaluate(const GraphDataset& ds, const std::vector<int32_t>& nodes,
                       const ModelParams& params);

struct SweepResult {
  double best_lambda = 0.0;
  std::vector<std::pair<double, TrainReport>> runs;
};

// Trains once per lambda, selects by validation macro-F1 with deterministic
// ties toward the smaller lambda.
SweepResult sweep(const GraphDataset& ds, const Split& split,
                  const MinorityMask& mask, TrainConfig base,
                  const std::vector<double>& lambda_grid);

}  // namespace imbalgat
