// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "imbalgat/csr.hpp"
#include "imbalgat/tensor.hpp"

namespace imbalgat {

// Immutable citation graph: symmetrized CSR with one self-loop per row,
// row-normalized features, first-appearance class ids.
struct GraphDataset {
  std::string name;
  size_t num_nodes = 0;
  size_t num_classes = 0;
  Tensor features;                       // V x m, each row sums to 1 or is all-zero
  std::vector<int32_t> labels;           // size V
  Csr csr;
  uint64_t fp = 0;                       // csr_fingerprint(csr)
  size_t raw_edge_count = 0;             // distinct undirected citation pairs
  size_t raw_cite_lines = 0;             // lines in the .cites file
  size_t skipped_cite_lines = 0;         // lines referencing unknown ids
  std::vector<std::string> node_order;   // node ids in file order
  std::vector<std::string> class_names;  // index = class id

  GraphView view() const { return {&csr, fp}; }
  size_t num_features() const { return features.cols(); }
  std::vector<size_t> class_counts() const;
};

struct Split {
  std::vector<int32_t> train_idx, val_idx, test_idx;
  std::string policy_name;
};

enum class SplitKind { standard, imbalanced };

struct SplitPolicy {
  SplitKind kind = SplitKind::standard;
  double ratio = 1.0;                     // imbalanced: keep ceil(20*ratio) per minority class
  std::vector<int32_t> minority_classes;  // used by the imbalanced policy
  size_t train_per_class = 20;
  size_t val_size = 500;
  size_t test_size = 1000;
};

// Deterministic file-order split. Train: first `train_per_class` nodes of
// each class in file order. Val: first `val_size` non-train nodes in file
// order. Test: last `test_size` nodes in file order that are in neither.
Split make_split(const GraphDataset& ds, const SplitPolicy& policy, uint64_t seed);

struct MinorityMask {
  std::vector<int32_t> minority_classes;
  std::vector<int32_t> minority_rows;  // train nodes carrying minority labels
  std::vector<int64_t> edge_slots;     // union of their CSR segments
};

MinorityMask minority_mask(const GraphDataset& ds, const Split& split,
                           const std::vector<int32_t>& minority_classes);

// Built-in defaults: the four smallest classes for cora, the two smallest
// for citeseer (the starred rows of the class-distribution table), empty
// otherwise. The label-string -> id mapping is printed by `inspect` so the
// set can be overridden in config.
std::vector<int32_t> default_minority_classes(const GraphDataset& ds);

}  // namespace imbalgat
