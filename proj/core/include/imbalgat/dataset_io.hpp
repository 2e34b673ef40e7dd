// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "imbalgat/graph.hpp"

namespace imbalgat {

struct ContentData {
  Tensor features;  // V x m raw 0/1 values, file order
  std::vector<int32_t> labels;
  std::unordered_map<std::string, int32_t> id_index;
  std::vector<std::string> node_ids;
  std::vector<std::string> class_names;  // by first appearance
};

// Lines: <node_id> TAB f_1 ... f_m TAB <class_string>, f_i in {0,1}.
ContentData parse_content(const std::string& path);

struct CitesData {
  std::vector<std::pair<int32_t, int32_t>> edges;  // (cited_row, citing_row)
  size_t raw_lines = 0;
  size_t skipped = 0;  // lines referencing ids missing from the content file
};

// Lines: <cited_id> TAB <citing_id>.
CitesData parse_cites(const std::string& path,
                      const std::unordered_map<std::string, int32_t>& id_index);

// Dedupes edges, drops self-citations, symmetrizes, adds self-loops, builds
// a sorted CSR and row-normalizes features.
GraphDataset build_graph(ContentData content, const CitesData& cites,
                         std::string name);

// Reads <dir>/<name>.content and <dir>/<name>.cites.
GraphDataset load_dataset_text(const std::string& dir, const std::string& name);

// Same, but consults the binary cache under IMBALGAT_CACHE_DIR (or
// `cache_dir` when non-empty). The cache is keyed by a hash of the raw text
// files and is purely an optimization.
GraphDataset load_dataset(const std::string& dir, const std::string& name,
                          bool use_cache = true, const std::string& cache_dir = "");

// Versioned binary cache (magic bytes "IGAT1"); round-trips bit-identically.
void save_cache(const std::string& path, const GraphDataset& ds, uint64_t source_hash);
GraphDataset load_cache(const std::string& path, uint64_t expected_source_hash);

uint64_t hash_file_bytes(const std::string& path);

}  // namespace imbalgat
