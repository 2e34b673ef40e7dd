// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "imbalgat/dataset_io.hpp"
#include "imbalgat/losses.hpp"
#include "imbalgat/model.hpp"

namespace imbalgat {

GraphDataset synthetic_graph(size_t num_nodes, double edge_prob, size_t num_features,
                             size_t num_classes, uint64_t seed) {
  Rng rng(seed);
  ContentData content;
  std::vector<double> feat(num_nodes * num_features, 0.0);
  for (size_t v = 0; v < num_nodes; ++v) {
    size_t ones = 0;
    for (size_t j = 0; j < num_features; ++j) {
      if (rng.uniform() < 0.4) {
        feat[v * num_features + j] = 1.0;
        ++ones;
      }
    }
    if (ones == 0) feat[v * num_features + v % num_features] = 1.0;
    content.node_ids.push_back("s" + std::to_string(v));
    content.id_index.emplace(content.node_ids.back(), static_cast<int32_t>(v));
    content.labels.push_back(static_cast<int32_t>(v % num_classes));
  }
  content.features = Tensor(num_nodes, num_features, std::move(feat));
  for (size_t c = 0; c < num_classes; ++c)
    content.class_names.push_back("c" + std::to_string(c));

  CitesData cites;
  for (size_t u = 0; u < num_nodes; ++u)
    for (size_t v = u + 1; v < num_nodes; ++v)
      if (rng.uniform() < edge_prob) {
        cites.edges.emplace_back(static_cast<int32_t>(u), static_cast<int32_t>(v));
        cites.raw_lines++;
      }
  return build_graph(std::move(content), cites, "synthetic");
}

namespace {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

struct Instance {
  GraphDataset ds;
  ModelParams params;
  Split split;
  MinorityMask mask;
  LossConfig loss;
  ClassWeights weights;
};

double forward_loss(Instance& inst, bool watch, Tape& tape) {
  ModelParams& p = inst.params;
  if (watch)
    for (Tensor* t : p.flat()) tape.watch(*t);
  else
    for (Tensor* t : p.flat()) t->node = kNoNode;
  ForwardResult fwd = model_forward(tape, inst.ds, p, /*training=*/false, nullptr);
  Tensor base = inst.loss.base == BaseLoss::weighted_ce
                    ? weighted_ce(tape, fwd.probs, inst.ds.labels, inst.split.train_idx,
                                  inst.weights)
                    : focal_loss(tape, fwd.probs, inst.ds.labels, inst.split.train_idx,
                                 inst.loss.gamma);
  Tensor reg = kl_attention_reg(tape, fwd.attention, inst.mask, inst.loss);
  Tensor total = total_loss(tape, base, reg, inst.loss.lambda);
  if (watch) tape.backward(total);
  return total.data()[0];
}

}  // namespace

GradcheckReport run_gradcheck(size_t instances, uint64_t seed, double tolerance,
                              std::ostream* log) {
  auto t0 = std::chrono::steady_clock::now();
  GradcheckReport report;
  report.instances = instances;
  report.tolerance = tolerance;
  Rng meta(seed);

  for (size_t k = 0; k < instances; ++k) {
    size_t v_count = 3 + static_cast<size_t>(meta.uniform() * 6);  // 3..8
    size_t m = 3 + static_cast<size_t>(meta.uniform() * 4);        // 3..6
    size_t n_classes = 2 + static_cast<size_t>(meta.uniform() * 2);
    n_classes = std::min(n_classes, v_count);
    size_t hidden = 2 + static_cast<size_t>(meta.uniform() * 3);
    size_t heads = 1 + static_cast<size_t>(meta.uniform() * 2);
    double edge_prob = 0.3 + 0.4 * meta.uniform();

    Instance inst;
    inst.ds = synthetic_graph(v_count, edge_prob, m, n_classes, meta.raw());
    ModelArch arch = ModelArch::gat(m, n_classes, hidden, heads,
                                    /*input_dropout=*/0.0, /*attn_dropout=*/0.0);
    inst.params = init_params(arch, meta.raw());

    // every node is a train node; a random nonempty class subset is minority
    for (size_t v = 0; v < v_count; ++v)
      inst.split.train_idx.push_back(static_cast<int32_t>(v));
    std::vector<int32_t> minority;
    for (size_t c = 0; c < n_classes; ++c)
      if (meta.uniform() < 0.5) minority.push_back(static_cast<int32_t>(c));
    if (minority.empty()) minority.push_back(0);
    inst.mask = minority_mask(inst.ds, inst.split, minority);

    inst.loss.base = (k % 2 == 0) ? BaseLoss::weighted_ce : BaseLoss::focal;
    inst.loss.gamma = 0.6;
    inst.loss.lambda = (k % 3 == 0) ? 0.0 : 0.5;
    inst.loss.reg_reduction = (k % 2 == 0) ? RegReduction::sum : RegReduction::mean;
    inst.weights = class_weights(inst.ds.class_counts());

    Tape tape;
    forward_loss(inst, /*watch=*/true, tape);
    std::vector<std::vector<double>> analytic;
    for (Tensor* p : inst.params.flat()) analytic.push_back(tape.grad(*p));

    const double h = 1e-5;
    double worst = 0.0;
    auto flat = inst.params.flat();
    for (size_t pi = 0; pi < flat.size(); ++pi) {
      Tensor* p = flat[pi];
      for (size_t i = 0; i < p->size(); ++i) {
        double orig = p->data()[i];
        p->data_mut()[i] = orig + h;
        Tape tp;
        double fp = forward_loss(inst, false, tp);
        p->data_mut()[i] = orig - h;
        Tape tm;
        double fm = forward_loss(inst, false, tm);
        p->data_mut()[i] = orig;
        double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, rel_err(analytic[pi][i], fd));
        report.params_checked++;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, worst);
    if (log)
      *log << "instance " << k << ": V=" << v_count << " m=" << m
           << " heads=" << heads << " max_rel_err=" << worst << "\n";
  }

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.pass = report.max_rel_err < tolerance;
  return report;
}

}  // namespace imbalgat
