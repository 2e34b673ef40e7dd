// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/losses.hpp"

#include <cmath>

#include "imbalgat/error.hpp"

namespace imbalgat {

void LossConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0,1]");
  if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
}

ClassWeights class_weights(const std::vector<size_t>& class_counts) {
  ClassWeights cw;
  cw.w.reserve(class_counts.size());
  for (size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] == 0)
      throw DataError("class " + std::to_string(c) + " is absent from the weight source");
    cw.w.push_back(1.0 / std::sqrt(static_cast<double>(class_counts[c])));
  }
  return cw;
}

namespace {

Tensor gather_target_probs(Tape& tape, const Tensor& probs,
                           const std::vector<int32_t>& labels,
                           const std::vector<int32_t>& mask) {
  if (mask.empty()) throw DimensionError("loss mask is empty");
  std::vector<int32_t> cols;
  cols.reserve(mask.size());
  for (int32_t v : mask) {
    if (v < 0 || static_cast<size_t>(v) >= probs.rows())
      throw DimensionError("loss mask index out of range");
    cols.push_back(labels[static_cast<size_t>(v)]);
  }
  return tape.gather(probs, mask, cols);
}

}  // namespace

Tensor weighted_ce(Tape& tape, const Tensor& probs,
                   const std::vector<int32_t>& labels,
                   const std::vector<int32_t>& mask, const ClassWeights& weights) {
  Tensor pt = gather_target_probs(tape, probs, labels, mask);
  Tensor nll = tape.neg(tape.log(pt));
  std::vector<double> per_node_w;
  per_node_w.reserve(mask.size());
  for (int32_t v : mask)
    per_node_w.push_back(weights.w[static_cast<size_t>(labels[static_cast<size_t>(v)])]);
  Tensor weighted = tape.cmul(nll, per_node_w);
  return tape.affine(tape.sum(weighted), 1.0 / static_cast<double>(mask.size()), 0.0);
}

Tensor focal_loss(Tape& tape, const Tensor& probs,
                  const std::vector<int32_t>& labels,
                  const std::vector<int32_t>& mask, double gamma) {
  if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
  Tensor pt = gather_target_probs(tape, probs, labels, mask);
  Tensor nll = tape.neg(tape.log(pt));
  Tensor modulating = tape.pow(tape.affine(pt, -1.0, 1.0), gamma);
  Tensor per_node = tape.mul(modulating, nll);
  return tape.affine(tape.sum(per_node), 1.0 / static_cast<double>(mask.size()), 0.0);
}

Tensor kl_attention_reg(Tape& tape, const AttentionRecord& att,
                        const MinorityMask& mask, const LossConfig& config) {
  if (mask.edge_slots.empty()) return Tensor(1, 1, 0.0);
  const EdgeVector* head = att.find(config.reg_layer, config.reg_head);
  if (!head)
    throw ConfigError("regularized head (layer " + std::to_string(config.reg_layer) +
                      ", head " + std::to_string(config.reg_head) +
                      ") is not present in the attention record");
  Tensor a = tape.edge_gather(*head, mask.edge_slots);
  Tensor reg = tape.sum(tape.neg(tape.log(a)));
  if (config.reg_reduction == RegReduction::mean)
    reg = tape.affine(reg, 1.0 / static_cast<double>(mask.edge_slots.size()), 0.0);
  return reg;
}

Tensor total_loss(Tape& tape, const Tensor& base, const Tensor& reg, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0,1]");
  if (reg.node < 0 && lambda == 0.0) return base;
  return tape.add(base, tape.affine(reg, lambda, 0.0));
}

}  // namespace imbalgat
