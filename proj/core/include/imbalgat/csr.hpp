// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace imbalgat {

// Compressed sparse row adjacency. Column indices are sorted within each row
// and every row contains a self-loop slot.
struct Csr {
  std::vector<int64_t> row_offsets;  // size V+1
  std::vector<int32_t> col_indices;  // size nnz

  size_t num_nodes() const { return row_offsets.empty() ? 0 : row_offsets.size() - 1; }
  size_t nnz() const { return col_indices.size(); }
  std::pair<int64_t, int64_t> row_span(size_t v) const {
    return {row_offsets[v], row_offsets[v + 1]};
  }
  size_t degree(size_t v) const {
    return static_cast<size_t>(row_offsets[v + 1] - row_offsets[v]);
  }
};

// FNV-1a over the CSR arrays; ties EdgeVectors to the graph they index.
uint64_t csr_fingerprint(const Csr& csr);

// Cheap view passed to the edge kernels.
struct GraphView {
  const Csr* csr = nullptr;
  uint64_t fingerprint = 0;
};

}  // namespace imbalgat
