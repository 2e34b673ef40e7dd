// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "imbalgat/tensor.hpp"

namespace imbalgat {

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double auc_roc = 0.0;
  std::vector<double> per_class_f1;
  std::vector<std::vector<int64_t>> confusion;  // [true][pred]
};

// Fraction of `mask` where pred == truth.
double accuracy(const std::vector<int32_t>& pred, const std::vector<int32_t>& truth,
                const std::vector<int32_t>& mask);

// Per-class F1 with the 0/0 -> 0 convention, macro = unweighted mean over
// all num_classes classes.
std::pair<std::vector<double>, double> f1_scores(const std::vector<int32_t>& pred,
                                                 const std::vector<int32_t>& truth,
                                                 const std::vector<int32_t>& mask,
                                                 size_t num_classes);

// One-vs-rest AUC per class via the Mann-Whitney rank statistic with
// midrank tie handling; macro-averaged over classes that have at least one
// positive and one negative in the mask (others are excluded).
double auc_roc_macro(const Tensor& probs, const std::vector<int32_t>& truth,
                     const std::vector<int32_t>& mask, size_t num_classes);

std::vector<int32_t> argmax_rows(const Tensor& probs);

MetricsReport compute_metrics(const Tensor& probs, const std::vector<int32_t>& truth,
                              const std::vector<int32_t>& mask, size_t num_classes);

}  // namespace imbalgat
