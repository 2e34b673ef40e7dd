// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/repro.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "imbalgat/error.hpp"

namespace imbalgat {

std::string method_name(Method m) {
  switch (m) {
    case Method::gcn_ce: return "gcn_ce";
    case Method::gcn_fl: return "gcn_fl";
    case Method::reg_ce: return "reg_ce";
    case Method::reg_fl: return "reg_fl";
  }
  return "?";
}

namespace {

std::string pretty_name(Method m) {
  switch (m) {
    case Method::gcn_ce: return "GCN with CE";
    case Method::gcn_fl: return "GCN with FL";
    case Method::reg_ce: return "Reg with CE";
    case Method::reg_fl: return "Reg with FL";
  }
  return "?";
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

std::optional<PaperRow> paper_table1(const std::string& dataset, Method m) {
  // Results table, "Results for Cora and Citeseer Datasets" (acc, auc, f1)
  if (dataset == "cora") {
    switch (m) {
      case Method::gcn_ce: return PaperRow{0.804, 0.959, 0.783};
      case Method::gcn_fl: return PaperRow{0.802, 0.971, 0.785};
      case Method::reg_ce: return PaperRow{0.827, 0.975, 0.806};
      case Method::reg_fl: return PaperRow{0.823, 0.976, 0.805};
    }
  }
  if (dataset == "citeseer") {
    switch (m) {
      case Method::gcn_ce: return PaperRow{0.673, 0.897, 0.609};
      case Method::gcn_fl: return PaperRow{0.648, 0.875, 0.608};
      case Method::reg_ce: return PaperRow{0.683, 0.895, 0.640};
      case Method::reg_fl: return PaperRow{0.668, 0.893, 0.615};
    }
  }
  return std::nullopt;
}

std::optional<PaperRow> paper_table1_graphsmote(const std::string& dataset) {
  if (dataset == "cora") return PaperRow{0.774, 0.953, 0.768};
  if (dataset == "citeseer") return PaperRow{0.31, 0.632, 0.283};
  return std::nullopt;
}

std::vector<double> paper_minority_f1(const std::string& dataset, Method m) {
  // Per-class tables: cora minority columns (shares 9/13/11/7), citeseer (8/15)
  if (dataset == "cora") {
    switch (m) {
      case Method::gcn_ce: return {0.65, 0.78, 0.77, 0.71};
      case Method::gcn_fl: return {0.85, 0.88, 0.74, 0.73};
      case Method::reg_ce: return {0.85, 0.92, 0.74, 0.73};
      case Method::reg_fl: return {0.85, 0.93, 0.74, 0.73};
    }
  }
  if (dataset == "citeseer") {
    switch (m) {
      case Method::gcn_ce: return {0.24, 0.66};
      case Method::gcn_fl: return {0.29, 0.73};
      case Method::reg_ce: return {0.32, 0.71};
      case Method::reg_fl: return {0.26, 0.71};
    }
  }
  return {};
}

std::vector<double> paper_class_percent(const std::string& dataset) {
  if (dataset == "cora") return {29, 9, 16, 13, 15, 11, 7};
  if (dataset == "citeseer") return {18, 20, 21, 8, 15, 18};
  return {};
}

namespace {

// Published shares of the starred (minority) labels in printed column order.
std::vector<double> paper_minority_share(const std::string& dataset) {
  if (dataset == "cora") return {9, 13, 11, 7};
  if (dataset == "citeseer") return {8, 15};
  return {};
}

// Permutation aligning our minority ids with the published minority columns
// by share rank (largest share first on both sides).
std::vector<size_t> column_alignment(const std::vector<double>& published_shares) {
  std::vector<size_t> order(published_shares.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return published_shares[a] > published_shares[b];
  });
  return order;
}

}  // namespace

std::optional<StrictBand> strict_band(const std::string& dataset) {
  if (dataset == "cora") return StrictBand{0.03, 0.03, 0.94};
  if (dataset == "citeseer") return StrictBand{0.04, 0.04, 0.0};
  return std::nullopt;
}

TrainConfig method_config(const ExperimentConfig& base, Method m) {
  TrainConfig cfg = base.train;
  switch (m) {
    case Method::gcn_ce:
      cfg.model = ModelKind::gcn;
      cfg.loss.base = BaseLoss::weighted_ce;
      cfg.loss.lambda = 0.0;
      break;
    case Method::gcn_fl:
      cfg.model = ModelKind::gcn;
      cfg.loss.base = BaseLoss::focal;
      cfg.loss.lambda = 0.0;
      break;
    case Method::reg_ce:
      cfg.model = ModelKind::gat;
      cfg.loss.base = BaseLoss::weighted_ce;
      break;
    case Method::reg_fl:
      cfg.model = ModelKind::gat;
      cfg.loss.base = BaseLoss::focal;
      break;
  }
  return cfg;
}

ReproduceResult run_reproduce(const GraphDataset& ds, const std::string& table,
                              const ExperimentConfig& base, size_t num_seeds,
                              std::ostream* progress) {
  if (table != "t1" && table != "t4" && table != "t5")
    throw ConfigError("unknown table: " + table + " (expected t1, t4 or t5)");
  if (num_seeds == 0) throw ConfigError("need at least one seed");

  ReproduceResult result;
  result.table = table;
  result.dataset = ds.name;

  Split split = make_split(ds, base.split_policy(ds), base.split_seed);
  std::vector<int32_t> minority = base.resolve_minority(ds);
  MinorityMask mask = minority_mask(ds, split, minority);

  // report minority classes ordered by descending share to line up with the
  // published per-class columns
  auto counts = ds.class_counts();
  std::vector<int32_t> minority_by_share = minority;
  std::stable_sort(minority_by_share.begin(), minority_by_share.end(),
                   [&](int32_t a, int32_t b) {
                     return counts[static_cast<size_t>(a)] > counts[static_cast<size_t>(b)];
                   });
  result.minority_classes = minority_by_share;

  for (Method m : kAllMethods) {
    MethodSummary summary;
    summary.method = m;
    std::vector<std::vector<double>> minority_f1(minority_by_share.size());
    std::vector<double> attn;
    TrainConfig cfg = method_config(base, m);
    for (size_t s = 0; s < num_seeds; ++s) {
      cfg.seed = base.train.seed + s;
      if (progress)
        *progress << "[reproduce] " << method_name(m) << " seed " << cfg.seed
                  << " ..." << std::flush;
      TrainReport rep = train(ds, split, mask, cfg);
      if (progress)
        *progress << " test f1 " << std::fixed << std::setprecision(4)
                  << rep.test.macro_f1 << "\n";
      summary.acc.push_back(rep.test.accuracy);
      summary.auc.push_back(rep.test.auc_roc);
      summary.f1.push_back(rep.test.macro_f1);
      for (size_t c = 0; c < minority_by_share.size(); ++c)
        minority_f1[c].push_back(
            rep.test.per_class_f1[static_cast<size_t>(minority_by_share[c])]);
      attn.push_back(rep.masked_attention_mean);
    }
    summary.mean_acc = mean_of(summary.acc);
    summary.std_acc = std_of(summary.acc);
    summary.mean_auc = mean_of(summary.auc);
    summary.std_auc = std_of(summary.auc);
    summary.mean_f1 = mean_of(summary.f1);
    summary.std_f1 = std_of(summary.f1);
    for (auto& col : minority_f1) summary.minority_f1_mean.push_back(mean_of(col));
    summary.masked_attention = mean_of(attn);
    result.methods.push_back(std::move(summary));
  }

  for (size_t s = 0; s < num_seeds; ++s) result.seeds.push_back(base.train.seed + s);

  if (auto band = strict_band(ds.name)) {
    const MethodSummary* reg = nullptr;
    const MethodSummary* gcn = nullptr;
    for (const auto& m : result.methods) {
      if (m.method == Method::reg_ce) reg = &m;
      if (m.method == Method::gcn_ce) gcn = &m;
    }
    auto paper = paper_table1(ds.name, Method::reg_ce);
    bool ok = true;
    ok = ok && std::abs(reg->mean_acc - paper->accuracy) <= band->acc_tol;
    ok = ok && std::abs(reg->mean_f1 - paper->f1) <= band->f1_tol;
    if (band->auc_floor > 0.0) ok = ok && reg->mean_auc >= band->auc_floor;
    ok = ok && reg->mean_f1 > gcn->mean_f1;
    result.strict_pass = ok;
  }
  return result;
}

nlohmann::json ReproduceResult::to_json() const {
  nlohmann::json j;
  j["table"] = table;
  j["dataset"] = dataset;
  j["seeds"] = seeds;
  j["minority_classes"] = minority_classes;
  j["strict_pass"] = strict_pass;
  nlohmann::json jmethods = nlohmann::json::object();
  for (const auto& m : methods) {
    nlohmann::json jm;
    jm["accuracy"] = {{"mean", m.mean_acc}, {"std", m.std_acc}, {"per_seed", m.acc}};
    jm["auc_roc"] = {{"mean", m.mean_auc}, {"std", m.std_auc}, {"per_seed", m.auc}};
    jm["macro_f1"] = {{"mean", m.mean_f1}, {"std", m.std_f1}, {"per_seed", m.f1}};
    jm["minority_f1_mean"] = m.minority_f1_mean;
    jm["masked_attention_mean"] = m.masked_attention;
    if (auto p = paper_table1(dataset, m.method)) {
      jm["paper"] = {{"accuracy", p->accuracy}, {"auc_roc", p->auc}, {"macro_f1", p->f1}};
      jm["gap"] = {{"accuracy", std::abs(m.mean_acc - p->accuracy)},
                   {"auc_roc", std::abs(m.mean_auc - p->auc)},
                   {"macro_f1", std::abs(m.mean_f1 - p->f1)}};
    }
    auto pm = paper_minority_f1(dataset, m.method);
    if (!pm.empty()) {
      auto order = column_alignment(paper_minority_share(dataset));
      std::vector<double> aligned;
      for (size_t k : order) aligned.push_back(pm[k]);
      jm["paper_minority_f1"] = aligned;
    }
    jmethods[method_name(m.method)] = std::move(jm);
  }
  j["methods"] = std::move(jmethods);
  return j;
}

void ReproduceResult::print_table(std::ostream& out) const {
  out << std::fixed << std::setprecision(3);
  if (table == "t1") {
    out << "== " << dataset << ": accuracy / auc-roc / macro-f1 over " << seeds.size()
        << " seed(s) ==\n";
    out << std::left << std::setw(14) << "method" << std::right << std::setw(8) << "acc"
        << std::setw(8) << "paper" << std::setw(7) << "gap" << std::setw(8) << "auc"
        << std::setw(8) << "paper" << std::setw(7) << "gap" << std::setw(8) << "f1"
        << std::setw(8) << "paper" << std::setw(7) << "gap" << "\n";
    for (const auto& m : methods) {
      out << std::left << std::setw(14) << pretty_name(m.method) << std::right;
      auto p = paper_table1(dataset, m.method);
      auto cell = [&](double ours, double paper_v) {
        out << std::setw(8) << ours;
        if (p)
          out << std::setw(8) << paper_v << std::setw(7) << std::abs(ours - paper_v);
        else
          out << std::setw(8) << "-" << std::setw(7) << "-";
      };
      cell(m.mean_acc, p ? p->accuracy : 0);
      cell(m.mean_auc, p ? p->auc : 0);
      cell(m.mean_f1, p ? p->f1 : 0);
      out << "\n";
    }
    if (auto gs = paper_table1_graphsmote(dataset)) {
      out << std::left << std::setw(14) << "GraphSMOTE" << std::right << std::setw(8)
          << "-" << std::setw(8) << gs->accuracy << std::setw(7) << "-" << std::setw(8)
          << "-" << std::setw(8) << gs->auc << std::setw(7) << "-" << std::setw(8)
          << "-" << std::setw(8) << gs->f1 << std::setw(7) << "-"
          << "  (published only)\n";
    }
  } else {
    out << "== " << dataset << ": minority per-class F1 over " << seeds.size()
        << " seed(s), classes ";
    for (size_t i = 0; i < minority_classes.size(); ++i)
      out << (i ? "," : "") << minority_classes[i];
    out << " (largest share first) ==\n";
    out << std::left << std::setw(14) << "method" << std::right;
    for (size_t c = 0; c < minority_classes.size(); ++c)
      out << std::setw(9) << ("ours#" + std::to_string(c)) << std::setw(9)
          << ("paper#" + std::to_string(c));
    out << std::setw(10) << "mean" << std::setw(10) << "paper" << "\n";
    for (const auto& m : methods) {
      out << std::left << std::setw(14) << pretty_name(m.method) << std::right;
      auto pm = paper_minority_f1(dataset, m.method);
      std::vector<double> aligned;
      if (!pm.empty()) {
        auto order = column_alignment(paper_minority_share(dataset));
        for (size_t k : order) aligned.push_back(pm[k]);
      }
      double ours_mean = 0, paper_mean = 0;
      for (size_t c = 0; c < m.minority_f1_mean.size(); ++c) {
        out << std::setw(9) << m.minority_f1_mean[c];
        ours_mean += m.minority_f1_mean[c];
        if (c < aligned.size()) {
          out << std::setw(9) << aligned[c];
          paper_mean += aligned[c];
        } else {
          out << std::setw(9) << "-";
        }
      }
      ours_mean /= static_cast<double>(m.minority_f1_mean.size());
      out << std::setw(10) << ours_mean;
      if (!aligned.empty())
        out << std::setw(10) << paper_mean / static_cast<double>(aligned.size());
      else
        out << std::setw(10) << "-";
      out << "\n";
    }
  }
  out << (strict_pass ? "[strict: PASS]" : "[strict: FAIL]") << "\n";
}

}  // namespace imbalgat
