// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "imbalgat/graph.hpp"
#include "imbalgat/metrics.hpp"
#include "imbalgat/trainer.hpp"

namespace imbalgat {

// One experiment, fully serializable; the resolved form is written next to
// every run's results so it can be replayed bit-for-bit.
struct ExperimentConfig {
  std::string dataset_name = "cora";
  std::string dataset_dir = "data/cora";
  bool use_cache = true;
  SplitKind split_kind = SplitKind::standard;
  double split_ratio = 1.0;
  uint64_t split_seed = 0;
  std::vector<int32_t> minority_classes;  // empty = dataset default
  TrainConfig train;
  std::string out_dir = "runs/exp";

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static ExperimentConfig load_file(const std::string& path);
  std::string hash() const;

  GraphDataset load_graph() const;
  SplitPolicy split_policy(const GraphDataset& ds) const;
  std::vector<int32_t> resolve_minority(const GraphDataset& ds) const;
};

// Applies a dotted-path override like "loss.lambda=0.3" onto a config JSON.
// The path must already exist in the document (catches typos).
void apply_override(nlohmann::json& config, const std::string& key_value);

nlohmann::json metrics_to_json(const MetricsReport& m);
nlohmann::json report_to_json(const TrainReport& r, bool include_timing);

// enum <-> string helpers shared by config and CLI
std::string to_string(ModelKind k);
std::string to_string(BaseLoss b);
std::string to_string(WeightSource w);
std::string to_string(RegReduction r);
std::string to_string(SelectBy s);
std::string to_string(SplitKind s);
ModelKind model_kind_from(const std::string& s);
BaseLoss base_loss_from(const std::string& s);
WeightSource weight_source_from(const std::string& s);
RegReduction reg_reduction_from(const std::string& s);
SelectBy select_by_from(const std::string& s);
SplitKind split_kind_from(const std::string& s);

}  // namespace imbalgat
