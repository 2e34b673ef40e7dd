// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "imbalgat/graph.hpp"
#include "imbalgat/model.hpp"
#include "imbalgat/tape.hpp"

namespace imbalgat {

enum class BaseLoss { weighted_ce, focal };
enum class WeightSource { full_dataset, train_split, uniform };
enum class RegReduction { sum, mean };

struct LossConfig {
  BaseLoss base = BaseLoss::weighted_ce;
  double gamma = 0.6;   // focal exponent
  double lambda = 0.1;  // regularizer strength, in [0,1]
  WeightSource weight_source = WeightSource::full_dataset;
  size_t reg_layer = 0;  // designated attention head for the regularizer
  size_t reg_head = 0;
  RegReduction reg_reduction = RegReduction::sum;

  void validate() const;
};

struct ClassWeights {
  std::vector<double> w;  // per-class positive weights
};

// W_c = 1 / sqrt(N(c)); every count must be >= 1.
ClassWeights class_weights(const std::vector<size_t>& class_counts);

// (sum over mask of W_{y_v} * -log p_v[y_v]) / |mask|, log eps-clamped.
Tensor weighted_ce(Tape& tape, const Tensor& probs,
                   const std::vector<int32_t>& labels,
                   const std::vector<int32_t>& mask, const ClassWeights& weights);

// mean over mask of (1 - p_t)^gamma * -log p_t with p_t = p_v[y_v].
Tensor focal_loss(Tape& tape, const Tensor& probs,
                  const std::vector<int32_t>& labels,
                  const std::vector<int32_t>& mask, double gamma);

// -sum over the mask's edge slots of log a[slot] on the designated head
// (divided by the slot count under mean reduction). Returns a constant 0
// for an empty mask. Always >= 0; equals 0 iff every masked weight is 1.
Tensor kl_attention_reg(Tape& tape, const AttentionRecord& att,
                        const MinorityMask& mask, const LossConfig& config);

// base + lambda * reg.
Tensor total_loss(Tape& tape, const Tensor& base, const Tensor& reg, double lambda);

}  // namespace imbalgat
