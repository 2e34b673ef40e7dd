// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbalgat/error.hpp"

namespace imbalgat {

std::vector<size_t> GraphDataset::class_counts() const {
  std::vector<size_t> counts(num_classes, 0);
  for (int32_t l : labels) counts[static_cast<size_t>(l)]++;
  return counts;
}

Split make_split(const GraphDataset& ds, const SplitPolicy& policy, uint64_t seed) {
  (void)seed;  // the file-order policies are seed-independent by design
  size_t v_count = ds.num_nodes;
  size_t need = policy.train_per_class * ds.num_classes + policy.val_size + policy.test_size;
  if (v_count < need)
    throw DataError("dataset too small for the requested split sizes");

  auto counts = ds.class_counts();
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < policy.train_per_class)
      throw DataError("class " + ds.class_names[c] + " has fewer than " +
                      std::to_string(policy.train_per_class) + " nodes");
  }

  Split split;
  std::vector<uint8_t> in_train(v_count, 0), in_val(v_count, 0);
  std::vector<size_t> taken(ds.num_classes, 0);
  for (size_t v = 0; v < v_count; ++v) {
    size_t c = static_cast<size_t>(ds.labels[v]);
    if (taken[c] < policy.train_per_class) {
      taken[c]++;
      in_train[v] = 1;
      split.train_idx.push_back(static_cast<int32_t>(v));
    }
  }

  if (policy.kind == SplitKind::imbalanced) {
    if (policy.ratio <= 0.0 || policy.ratio > 1.0)
      throw ConfigError("imbalanced split ratio must be in (0,1]");
    size_t keep = static_cast<size_t>(
        std::ceil(static_cast<double>(policy.train_per_class) * policy.ratio));
    std::vector<uint8_t> minority(ds.num_classes, 0);
    for (int32_t c : policy.minority_classes) {
      if (c < 0 || static_cast<size_t>(c) >= ds.num_classes)
        throw ConfigError("minority class id out of range");
      minority[static_cast<size_t>(c)] = 1;
    }
    std::vector<int32_t> trimmed;
    std::vector<size_t> kept(ds.num_classes, 0);
    for (int32_t v : split.train_idx) {
      size_t c = static_cast<size_t>(ds.labels[static_cast<size_t>(v)]);
      if (minority[c] && kept[c] >= keep) {
        in_train[static_cast<size_t>(v)] = 0;
        continue;
      }
      kept[c]++;
      trimmed.push_back(v);
    }
    split.train_idx = std::move(trimmed);
    split.policy_name = "imbalanced";
  } else {
    split.policy_name = "standard";
  }

  for (size_t v = 0; v < v_count && split.val_idx.size() < policy.val_size; ++v) {
    if (!in_train[v]) {
      in_val[v] = 1;
      split.val_idx.push_back(static_cast<int32_t>(v));
    }
  }
  if (split.val_idx.size() < policy.val_size)
    throw DataError("not enough nodes for the validation set");

  for (size_t i = v_count; i-- > 0 && split.test_idx.size() < policy.test_size;) {
    if (!in_train[i] && !in_val[i]) split.test_idx.push_back(static_cast<int32_t>(i));
  }
  if (split.test_idx.size() < policy.test_size)
    throw DataError("not enough nodes for the test set");
  std::reverse(split.test_idx.begin(), split.test_idx.end());
  return split;
}

MinorityMask minority_mask(const GraphDataset& ds, const Split& split,
                           const std::vector<int32_t>& minority_classes) {
  std::vector<uint8_t> is_minority(ds.num_classes, 0);
  for (int32_t c : minority_classes) {
    if (c < 0 || static_cast<size_t>(c) >= ds.num_classes)
      throw ConfigError("minority class id out of range");
    is_minority[static_cast<size_t>(c)] = 1;
  }
  MinorityMask mask;
  mask.minority_classes = minority_classes;
  std::sort(mask.minority_classes.begin(), mask.minority_classes.end());
  std::vector<int32_t> rows(split.train_idx);
  std::sort(rows.begin(), rows.end());
  for (int32_t v : rows) {
    if (!is_minority[static_cast<size_t>(ds.labels[static_cast<size_t>(v)])]) continue;
    mask.minority_rows.push_back(v);
    auto [b, e] = ds.csr.row_span(static_cast<size_t>(v));
    for (int64_t s = b; s < e; ++s) mask.edge_slots.push_back(s);
  }
  return mask;
}

std::vector<int32_t> default_minority_classes(const GraphDataset& ds) {
  size_t k = 0;
  if (ds.name == "cora") k = 4;
  if (ds.name == "citeseer") k = 2;
  if (k == 0 || ds.num_classes <= k) return {};
  auto counts = ds.class_counts();
  std::vector<int32_t> ids(ds.num_classes);
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int32_t a, int32_t b) {
    return counts[static_cast<size_t>(a)] < counts[static_cast<size_t>(b)];
  });
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace imbalgat
