// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/experiment.hpp"

#include <fstream>

#include "imbalgat/dataset_io.hpp"
#include "imbalgat/error.hpp"

namespace imbalgat {

using nlohmann::json;

std::string to_string(ModelKind k) { return k == ModelKind::gat ? "gat" : "gcn"; }
std::string to_string(BaseLoss b) {
  return b == BaseLoss::weighted_ce ? "weighted_ce" : "focal";
}
std::string to_string(WeightSource w) {
  switch (w) {
    case WeightSource::full_dataset: return "full_dataset";
    case WeightSource::train_split: return "train_split";
    case WeightSource::uniform: return "uniform";
  }
  return "?";
}
std::string to_string(RegReduction r) {
  return r == RegReduction::sum ? "sum" : "mean";
}
std::string to_string(SelectBy s) {
  switch (s) {
    case SelectBy::val_macro_f1: return "val_macro_f1";
    case SelectBy::val_loss: return "val_loss";
    case SelectBy::final_epoch: return "final_epoch";
  }
  return "?";
}
std::string to_string(SplitKind s) {
  return s == SplitKind::standard ? "standard" : "imbalanced";
}

namespace {

[[noreturn]] void bad_enum(const std::string& what, const std::string& s) {
  throw ConfigError("unknown " + what + ": \"" + s + "\"");
}

}  // namespace

ModelKind model_kind_from(const std::string& s) {
  if (s == "gat") return ModelKind::gat;
  if (s == "gcn") return ModelKind::gcn;
  bad_enum("model kind", s);
}
BaseLoss base_loss_from(const std::string& s) {
  if (s == "weighted_ce") return BaseLoss::weighted_ce;
  if (s == "focal") return BaseLoss::focal;
  bad_enum("base loss", s);
}
WeightSource weight_source_from(const std::string& s) {
  if (s == "full_dataset") return WeightSource::full_dataset;
  if (s == "train_split") return WeightSource::train_split;
  if (s == "uniform") return WeightSource::uniform;
  bad_enum("weight source", s);
}
RegReduction reg_reduction_from(const std::string& s) {
  if (s == "sum") return RegReduction::sum;
  if (s == "mean") return RegReduction::mean;
  bad_enum("reg reduction", s);
}
SelectBy select_by_from(const std::string& s) {
  if (s == "val_macro_f1") return SelectBy::val_macro_f1;
  if (s == "val_loss") return SelectBy::val_loss;
  if (s == "final_epoch") return SelectBy::final_epoch;
  bad_enum("select_by", s);
}
SplitKind split_kind_from(const std::string& s) {
  if (s == "standard") return SplitKind::standard;
  if (s == "imbalanced") return SplitKind::imbalanced;
  bad_enum("split policy", s);
}

json ExperimentConfig::to_json() const {
  json j;
  j["dataset"] = {{"name", dataset_name}, {"dir", dataset_dir}, {"cache", use_cache}};
  j["split"] = {{"policy", to_string(split_kind)},
                {"ratio", split_ratio},
                {"seed", split_seed}};
  j["minority_classes"] = minority_classes;
  j["model"] = {{"kind", to_string(train.model)},
                {"gat_hidden", train.gat_hidden},
                {"gat_heads", train.gat_heads},
                {"gcn_hidden", train.gcn_hidden},
                {"input_dropout", train.input_dropout},
                {"attn_dropout", train.attn_dropout},
                {"gcn_dropout", train.gcn_dropout}};
  j["loss"] = {{"base", to_string(train.loss.base)},
               {"gamma", train.loss.gamma},
               {"lambda", train.loss.lambda},
               {"weight_source", to_string(train.loss.weight_source)},
               {"reg_layer", train.loss.reg_layer},
               {"reg_head", train.loss.reg_head},
               {"reg_reduction", to_string(train.loss.reg_reduction)}};
  j["train"] = {{"lr", train.lr},
                {"weight_decay", train.weight_decay},
                {"epochs", train.epochs},
                {"seed", train.seed},
                {"patience", train.patience},
                {"select_by", to_string(train.select_by)}};
  j["out_dir"] = out_dir;
  return j;
}

namespace {

template <class T>
void read_if(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

void read_enum(const json& j, const char* key, auto parse, auto& into) {
  if (j.contains(key)) into = parse(j.at(key).get<std::string>());
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      read_if(d, "name", cfg.dataset_name);
      read_if(d, "dir", cfg.dataset_dir);
      read_if(d, "cache", cfg.use_cache);
    }
    if (j.contains("split")) {
      const json& s = j.at("split");
      read_enum(s, "policy", split_kind_from, cfg.split_kind);
      read_if(s, "ratio", cfg.split_ratio);
      read_if(s, "seed", cfg.split_seed);
    }
    read_if(j, "minority_classes", cfg.minority_classes);
    if (j.contains("model")) {
      const json& m = j.at("model");
      read_enum(m, "kind", model_kind_from, cfg.train.model);
      read_if(m, "gat_hidden", cfg.train.gat_hidden);
      read_if(m, "gat_heads", cfg.train.gat_heads);
      read_if(m, "gcn_hidden", cfg.train.gcn_hidden);
      read_if(m, "input_dropout", cfg.train.input_dropout);
      read_if(m, "attn_dropout", cfg.train.attn_dropout);
      read_if(m, "gcn_dropout", cfg.train.gcn_dropout);
    }
    if (j.contains("loss")) {
      const json& l = j.at("loss");
      read_enum(l, "base", base_loss_from, cfg.train.loss.base);
      read_if(l, "gamma", cfg.train.loss.gamma);
      read_if(l, "lambda", cfg.train.loss.lambda);
      read_enum(l, "weight_source", weight_source_from, cfg.train.loss.weight_source);
      read_if(l, "reg_layer", cfg.train.loss.reg_layer);
      read_if(l, "reg_head", cfg.train.loss.reg_head);
      read_enum(l, "reg_reduction", reg_reduction_from, cfg.train.loss.reg_reduction);
    }
    if (j.contains("train")) {
      const json& t = j.at("train");
      read_if(t, "lr", cfg.train.lr);
      read_if(t, "weight_decay", cfg.train.weight_decay);
      read_if(t, "epochs", cfg.train.epochs);
      read_if(t, "seed", cfg.train.seed);
      read_if(t, "patience", cfg.train.patience);
      read_enum(t, "select_by", select_by_from, cfg.train.select_by);
    }
    read_if(j, "out_dir", cfg.out_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.train.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

std::string ExperimentConfig::hash() const {
  std::string dump = to_json().dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GraphDataset ExperimentConfig::load_graph() const {
  return load_dataset(dataset_dir, dataset_name, use_cache);
}

SplitPolicy ExperimentConfig::split_policy(const GraphDataset& ds) const {
  SplitPolicy pol;
  pol.kind = split_kind;
  pol.ratio = split_ratio;
  pol.minority_classes = resolve_minority(ds);
  return pol;
}

std::vector<int32_t> ExperimentConfig::resolve_minority(const GraphDataset& ds) const {
  if (!minority_classes.empty()) return minority_classes;
  return default_minority_classes(ds);
}

void apply_override(json& config, const std::string& key_value) {
  auto eq = key_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like path.to.key=value: " + key_value);
  std::string path = key_value.substr(0, eq);
  std::string value = key_value.substr(eq + 1);

  std::string pointer = "/";
  for (char c : path) pointer += (c == '.') ? '/' : c;
  json::json_pointer ptr(pointer);
  if (!config.contains(ptr))
    throw ConfigError("override path does not exist in the config: " + path);

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // plain string
  }
  config[ptr] = parsed;
}

json metrics_to_json(const MetricsReport& m) {
  return json{{"accuracy", m.accuracy},
              {"macro_f1", m.macro_f1},
              {"auc_roc", m.auc_roc},
              {"per_class_f1", m.per_class_f1},
              {"confusion", m.confusion}};
}

json report_to_json(const TrainReport& r, bool include_timing) {
  json j;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["epochs_run"] = r.epochs.size();
  j["selected_epoch"] = r.selected_epoch;
  j["test"] = metrics_to_json(r.test);
  j["val_at_selected"] = metrics_to_json(r.val_at_selected);
  j["masked_attention_mean"] = r.masked_attention_mean;
  json curve = json::array();
  for (size_t i = 0; i < r.epochs.size(); ++i) {
    const EpochStats& e = r.epochs[i];
    curve.push_back({{"epoch", i + 1},
                     {"train_loss", e.train_loss},
                     {"base", e.base_loss},
                     {"reg", e.reg_value},
                     {"val_acc", e.val_acc},
                     {"val_f1", e.val_macro_f1},
                     {"val_loss", e.val_loss}});
  }
  j["curve"] = std::move(curve);
  if (include_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

}  // namespace imbalgat
