// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imbalgat/graph.hpp"
#include "imbalgat/tape.hpp"

namespace imbalgat {

enum class ModelKind { gat, gcn };
enum class Activation { elu, relu, identity };

struct LayerSpec {
  size_t in_dim = 0;
  size_t out_dim = 0;
  size_t heads = 1;      // per-head width is out_dim
  bool concat = true;    // concatenate heads; averaged otherwise
  Activation act = Activation::identity;

  bool operator==(const LayerSpec&) const = default;
};

struct ModelArch {
  ModelKind kind = ModelKind::gat;
  std::vector<LayerSpec> layers;
  double input_dropout = 0.0;  // applied to every layer input in training
  double attn_dropout = 0.0;   // applied to normalized attention coefficients

  // 2-layer GAT: heads x hidden concatenated, then a single averaged head
  // producing class scores. ELU on the hidden layer, identity on the output.
  static ModelArch gat(size_t in_dim, size_t num_classes, size_t hidden = 8,
                       size_t heads = 2, double input_dropout = 0.6,
                       double attn_dropout = 0.6);
  // 2-layer GCN with ReLU hidden activation.
  static ModelArch gcn(size_t in_dim, size_t num_classes, size_t hidden = 16,
                       double dropout = 0.5);

  bool operator==(const ModelArch&) const = default;
};

struct GatHeadParams {
  Tensor W;         // in_dim x out_dim
  Tensor attn_src;  // out_dim x 1
  Tensor attn_dst;  // out_dim x 1
};

struct ModelParams {
  ModelArch arch;
  std::vector<std::vector<GatHeadParams>> gat_layers;  // [layer][head]
  std::vector<Tensor> gcn_weights;                     // [layer]

  std::vector<Tensor*> flat();
  std::vector<const Tensor*> flat() const;
  ModelParams clone() const;
};

// Glorot-uniform initialization, deterministic per seed.
ModelParams init_params(const ModelArch& arch, uint64_t seed);

struct AttentionRecord {
  struct Entry {
    size_t layer = 0;
    size_t head = 0;
    EdgeVector att;  // normalized coefficients (pre-dropout)
  };
  std::vector<Entry> entries;
  const EdgeVector* find(size_t layer, size_t head) const;
};

struct ForwardResult {
  Tensor probs;  // V x N, rows sum to 1
  AttentionRecord attention;
};

// One GAT layer: per head z = h W, raw slot score (v,u) =
// leaky_relu(attn_src^T z_v + attn_dst^T z_u), segment softmax, optional
// coefficient dropout, weighted aggregation; heads combined and activated.
// Returns the combined output and the per-head normalized coefficients.
std::pair<Tensor, std::vector<EdgeVector>> gat_layer_forward(
    Tape& tape, const Tensor& h, const GraphDataset& ds,
    const std::vector<GatHeadParams>& heads, bool concat, Activation act,
    double attn_dropout, bool training, Rng* rng);

// Symmetric-normalized propagation: out = act(A_hat h W) with
// A_hat = D^-1/2 (A+I) D^-1/2 realized as constant edge weights.
Tensor gcn_layer_forward(Tape& tape, const Tensor& h, const GraphDataset& ds,
                         const Tensor& W, Activation act);

// Constant 1/sqrt(deg(v) deg(u)) weights over the CSR slots.
EdgeVector gcn_norm_weights(const GraphDataset& ds);

// Full 2-layer forward ending in a row softmax.
ForwardResult model_forward(Tape& tape, const GraphDataset& ds,
                            const ModelParams& params, bool training,
                            Rng* rng);

// Versioned checkpoint (magic "IGATM1"); load rejects a mismatched
// architecture descriptor when `expected` is provided.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path,
                            const std::optional<ModelArch>& expected = std::nullopt);

}  // namespace imbalgat
