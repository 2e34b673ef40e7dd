// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "imbalgat/experiment.hpp"

namespace imbalgat {

enum class Method { gcn_ce, gcn_fl, reg_ce, reg_fl };
constexpr Method kAllMethods[] = {Method::gcn_ce, Method::gcn_fl, Method::reg_ce,
                                  Method::reg_fl};
std::string method_name(Method m);

// Published comparison values, embedded so gaps can be printed offline.
// `table1` rows carry (accuracy, auc-roc, macro-f1); `minority_f1` carries
// the per-minority-class F1 rows of the per-class tables.
struct PaperRow {
  double accuracy = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
};
std::optional<PaperRow> paper_table1(const std::string& dataset, Method m);
std::optional<PaperRow> paper_table1_graphsmote(const std::string& dataset);
std::vector<double> paper_minority_f1(const std::string& dataset, Method m);
// Published class-share percentages (largest table row order).
std::vector<double> paper_class_percent(const std::string& dataset);

// Replication bands around the published headline row (reg_ce): mean metric
// must land inside paper +- tol; auc_floor applies when > 0.
struct StrictBand {
  double acc_tol = 0.0;
  double f1_tol = 0.0;
  double auc_floor = 0.0;
};
std::optional<StrictBand> strict_band(const std::string& dataset);

struct MethodSummary {
  Method method = Method::gcn_ce;
  std::vector<double> acc, auc, f1;        // per seed
  std::vector<double> minority_f1_mean;    // mean per minority class over seeds
  double masked_attention = 0.0;           // mean over seeds
  double mean_acc = 0.0, std_acc = 0.0;
  double mean_auc = 0.0, std_auc = 0.0;
  double mean_f1 = 0.0, std_f1 = 0.0;
};

struct ReproduceResult {
  std::string table;  // t1 | t4 | t5
  std::string dataset;
  std::vector<uint64_t> seeds;
  std::vector<int32_t> minority_classes;
  std::vector<MethodSummary> methods;
  bool strict_pass = true;

  nlohmann::json to_json() const;  // deterministic: no timestamps
  void print_table(std::ostream& out) const;
};

// Runs the {GCN+CE, GCN+FL, Reg+CE, Reg+FL} grid over `num_seeds` seeds
// starting at base.train.seed and summarizes against the published values.
ReproduceResult run_reproduce(const GraphDataset& ds, const std::string& table,
                              const ExperimentConfig& base, size_t num_seeds,
                              std::ostream* progress = nullptr);

TrainConfig method_config(const ExperimentConfig& base, Method m);

}  // namespace imbalgat
