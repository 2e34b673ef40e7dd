// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>

#include "imbalgat/graph.hpp"

namespace imbalgat {

// Random small graph with self-loops, binary features (>=1 per row) and
// round-robin labels, built through the regular graph construction path.
GraphDataset synthetic_graph(size_t num_nodes, double edge_prob, size_t num_features,
                             size_t num_classes, uint64_t seed);

struct GradcheckReport {
  size_t instances = 0;
  size_t params_checked = 0;
  double max_rel_err = 0.0;
  double tolerance = 1e-4;
  double seconds = 0.0;
  bool pass = false;
};

// Builds random (graph, GAT model, loss) instances and compares tape
// gradients of every parameter against central finite differences
// (h = 1e-5, relative error denominator max(|a|,|b|,1e-8)).
GradcheckReport run_gradcheck(size_t instances, uint64_t seed, double tolerance = 1e-4,
                              std::ostream* log = nullptr);

}  // namespace imbalgat
