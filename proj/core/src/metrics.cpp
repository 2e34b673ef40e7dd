// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "imbalgat/error.hpp"

namespace imbalgat {

double accuracy(const std::vector<int32_t>& pred, const std::vector<int32_t>& truth,
                const std::vector<int32_t>& mask) {
  if (mask.empty()) throw DimensionError("accuracy: empty mask");
  size_t correct = 0;
  for (int32_t v : mask)
    if (pred[static_cast<size_t>(v)] == truth[static_cast<size_t>(v)]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

std::pair<std::vector<double>, double> f1_scores(const std::vector<int32_t>& pred,
                                                 const std::vector<int32_t>& truth,
                                                 const std::vector<int32_t>& mask,
                                                 size_t num_classes) {
  if (mask.empty()) throw DimensionError("f1_scores: empty mask");
  std::vector<int64_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (int32_t v : mask) {
    int32_t t = truth[static_cast<size_t>(v)];
    int32_t p = pred[static_cast<size_t>(v)];
    if (t == p)
      tp[static_cast<size_t>(t)]++;
    else {
      fp[static_cast<size_t>(p)]++;
      fn[static_cast<size_t>(t)]++;
    }
  }
  std::vector<double> f1(num_classes, 0.0);
  double macro = 0.0;
  for (size_t c = 0; c < num_classes; ++c) {
    double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    f1[c] = denom > 0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
    macro += f1[c];
  }
  macro /= static_cast<double>(num_classes);
  return {std::move(f1), macro};
}

double auc_roc_macro(const Tensor& probs, const std::vector<int32_t>& truth,
                     const std::vector<int32_t>& mask, size_t num_classes) {
  if (mask.empty()) throw DimensionError("auc_roc_macro: empty mask");
  size_t n = mask.size();
  std::vector<size_t> order(n);
  std::vector<double> scores(n), ranks(n);
  double total = 0.0;
  size_t usable = 0;
  for (size_t c = 0; c < num_classes; ++c) {
    size_t positives = 0;
    for (size_t i = 0; i < n; ++i) {
      scores[i] = probs(static_cast<size_t>(mask[i]), c);
      if (truth[static_cast<size_t>(mask[i])] == static_cast<int32_t>(c)) ++positives;
    }
    if (positives == 0 || positives == n) continue;  // AUC undefined, excluded
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] < scores[b]; });
    // midranks over tied score runs
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
      double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
      for (size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
      i = j + 1;
    }
    double rank_sum = 0.0;
    for (size_t k = 0; k < n; ++k)
      if (truth[static_cast<size_t>(mask[k])] == static_cast<int32_t>(c))
        rank_sum += ranks[k];
    double p = static_cast<double>(positives);
    double q = static_cast<double>(n - positives);
    total += (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
    ++usable;
  }
  if (usable == 0)
    throw DataError("auc_roc_macro: no class has both positives and negatives");
  return total / static_cast<double>(usable);
}

std::vector<int32_t> argmax_rows(const Tensor& probs) {
  std::vector<int32_t> out(probs.rows(), 0);
  for (size_t i = 0; i < probs.rows(); ++i) {
    size_t best = 0;
    for (size_t j = 1; j < probs.cols(); ++j)
      if (probs(i, j) > probs(i, best)) best = j;
    out[i] = static_cast<int32_t>(best);
  }
  return out;
}

MetricsReport compute_metrics(const Tensor& probs, const std::vector<int32_t>& truth,
                              const std::vector<int32_t>& mask, size_t num_classes) {
  MetricsReport rep;
  std::vector<int32_t> pred = argmax_rows(probs);
  rep.accuracy = accuracy(pred, truth, mask);
  auto [per_class, macro] = f1_scores(pred, truth, mask, num_classes);
  rep.per_class_f1 = std::move(per_class);
  rep.macro_f1 = macro;
  rep.auc_roc = auc_roc_macro(probs, truth, mask, num_classes);
  rep.confusion.assign(num_classes, std::vector<int64_t>(num_classes, 0));
  for (int32_t v : mask)
    rep.confusion[static_cast<size_t>(truth[static_cast<size_t>(v)])]
                 [static_cast<size_t>(pred[static_cast<size_t>(v)])]++;
  return rep;
}

}  // namespace imbalgat
