// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/model.hpp"

#include <cmath>
#include <fstream>

#include "imbalgat/error.hpp"

namespace imbalgat {

ModelArch ModelArch::gat(size_t in_dim, size_t num_classes, size_t hidden,
                         size_t heads, double input_dropout, double attn_dropout) {
  ModelArch a;
  a.kind = ModelKind::gat;
  a.layers.push_back({in_dim, hidden, heads, /*concat=*/true, Activation::elu});
  a.layers.push_back({hidden * heads, num_classes, 1, /*concat=*/false, Activation::identity});
  a.input_dropout = input_dropout;
  a.attn_dropout = attn_dropout;
  return a;
}

ModelArch ModelArch::gcn(size_t in_dim, size_t num_classes, size_t hidden, double dropout) {
  ModelArch a;
  a.kind = ModelKind::gcn;
  a.layers.push_back({in_dim, hidden, 1, false, Activation::relu});
  a.layers.push_back({hidden, num_classes, 1, false, Activation::identity});
  a.input_dropout = dropout;
  a.attn_dropout = 0.0;
  return a;
}

std::vector<Tensor*> ModelParams::flat() {
  std::vector<Tensor*> out;
  for (auto& layer : gat_layers)
    for (auto& head : layer) {
      out.push_back(&head.W);
      out.push_back(&head.attn_src);
      out.push_back(&head.attn_dst);
    }
  for (auto& w : gcn_weights) out.push_back(&w);
  return out;
}

std::vector<const Tensor*> ModelParams::flat() const {
  std::vector<const Tensor*> out;
  for (const auto& layer : gat_layers)
    for (const auto& head : layer) {
      out.push_back(&head.W);
      out.push_back(&head.attn_src);
      out.push_back(&head.attn_dst);
    }
  for (const auto& w : gcn_weights) out.push_back(&w);
  return out;
}

ModelParams ModelParams::clone() const {
  ModelParams p;
  p.arch = arch;
  for (const auto& layer : gat_layers) {
    std::vector<GatHeadParams> heads;
    for (const auto& h : layer)
      heads.push_back({h.W.clone(), h.attn_src.clone(), h.attn_dst.clone()});
    p.gat_layers.push_back(std::move(heads));
  }
  for (const auto& w : gcn_weights) p.gcn_weights.push_back(w.clone());
  return p;
}

namespace {

Tensor glorot(size_t rows, size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) throw ConfigError("zero-dimension layer");
  double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t(rows, cols);
  for (auto& v : t.data_mut()) v = rng.uniform(-bound, bound);
  return t;
}

Tensor apply_activation(Tape& tape, const Tensor& x, Activation act) {
  switch (act) {
    case Activation::elu: return tape.elu(x);
    case Activation::relu: return tape.relu(x);
    case Activation::identity: return x;
  }
  throw ConfigError("unknown activation");
}

}  // namespace

ModelParams init_params(const ModelArch& arch, uint64_t seed) {
  Rng rng(seed);
  ModelParams p;
  p.arch = arch;
  if (arch.layers.empty()) throw ConfigError("architecture has no layers");
  for (size_t li = 0; li + 1 < arch.layers.size(); ++li) {
    size_t expect = arch.layers[li].concat
                        ? arch.layers[li].out_dim * arch.layers[li].heads
                        : arch.layers[li].out_dim;
    if (arch.layers[li + 1].in_dim != expect)
      throw ConfigError("layer input dim does not match previous layer output");
  }
  if (arch.kind == ModelKind::gat) {
    for (const auto& spec : arch.layers) {
      if (spec.heads == 0) throw ConfigError("layer head list is empty");
      std::vector<GatHeadParams> heads;
      for (size_t h = 0; h < spec.heads; ++h) {
        GatHeadParams hp;
        hp.W = glorot(spec.in_dim, spec.out_dim, rng);
        hp.attn_src = glorot(spec.out_dim, 1, rng);
        hp.attn_dst = glorot(spec.out_dim, 1, rng);
        heads.push_back(std::move(hp));
      }
      p.gat_layers.push_back(std::move(heads));
    }
  } else {
    for (const auto& spec : arch.layers)
      p.gcn_weights.push_back(glorot(spec.in_dim, spec.out_dim, rng));
  }
  return p;
}

const EdgeVector* AttentionRecord::find(size_t layer, size_t head) const {
  for (const auto& e : entries)
    if (e.layer == layer && e.head == head) return &e.att;
  return nullptr;
}

std::pair<Tensor, std::vector<EdgeVector>> gat_layer_forward(
    Tape& tape, const Tensor& h, const GraphDataset& ds,
    const std::vector<GatHeadParams>& heads, bool concat, Activation act,
    double attn_dropout, bool training, Rng* rng) {
  if (heads.empty()) throw ConfigError("gat layer: head list is empty");
  GraphView g = ds.view();
  std::vector<EdgeVector> atts;
  std::vector<Tensor> outs;
  for (const auto& head : heads) {
    Tensor z = tape.matmul(h, head.W);
    Tensor src_term = tape.matmul(z, head.attn_src);
    Tensor dst_term = tape.matmul(z, head.attn_dst);
    EdgeVector raw = tape.edge_score(src_term, dst_term, g);
    EdgeVector scored = tape.leaky_relu(raw, Tape::kLeakyReluAlpha);
    EdgeVector att = tape.segment_softmax(scored, g);
    atts.push_back(att);
    EdgeVector used = att;
    if (training && attn_dropout > 0.0) {
      if (!rng) throw ConfigError("training-mode forward needs an rng");
      used = tape.dropout(att, attn_dropout, *rng);
    }
    outs.push_back(tape.segment_weighted_sum(used, z, g));
  }
  Tensor combined;
  if (outs.size() == 1) {
    combined = outs[0];
  } else if (concat) {
    combined = tape.concat_cols(outs);
  } else {
    combined = outs[0];
    for (size_t i = 1; i < outs.size(); ++i) combined = tape.add(combined, outs[i]);
    combined = tape.affine(combined, 1.0 / static_cast<double>(outs.size()), 0.0);
  }
  return {apply_activation(tape, combined, act), std::move(atts)};
}

EdgeVector gcn_norm_weights(const GraphDataset& ds) {
  const Csr& csr = ds.csr;
  EdgeVector w(csr.nnz(), 0.0, ds.fp);
  auto& wv = w.values_mut();
  std::vector<double> inv_sqrt_deg(ds.num_nodes);
  for (size_t v = 0; v < ds.num_nodes; ++v)
    inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(csr.degree(v)));
  for (size_t v = 0; v < ds.num_nodes; ++v) {
    auto [b, e] = csr.row_span(v);
    for (int64_t s = b; s < e; ++s)
      wv[static_cast<size_t>(s)] =
          inv_sqrt_deg[v] *
          inv_sqrt_deg[static_cast<size_t>(csr.col_indices[static_cast<size_t>(s)])];
  }
  return w;
}

Tensor gcn_layer_forward(Tape& tape, const Tensor& h, const GraphDataset& ds,
                         const Tensor& W, Activation act) {
  if (h.cols() != W.rows()) throw DimensionError("gcn layer: shape mismatch");
  Tensor z = tape.matmul(h, W);
  EdgeVector norm = gcn_norm_weights(ds);
  Tensor agg = tape.segment_weighted_sum(norm, z, ds.view());
  return apply_activation(tape, agg, act);
}

ForwardResult model_forward(Tape& tape, const GraphDataset& ds,
                            const ModelParams& params, bool training, Rng* rng) {
  const ModelArch& arch = params.arch;
  if (arch.layers.empty()) throw ConfigError("architecture has no layers");
  if (arch.layers.front().in_dim != ds.num_features() ||
      arch.layers.back().out_dim != ds.num_classes)
    throw DimensionError("model dimensions do not match dataset");

  ForwardResult result;
  Tensor h = ds.features;
  for (size_t li = 0; li < arch.layers.size(); ++li) {
    if (training && arch.input_dropout > 0.0) {
      if (!rng) throw ConfigError("training-mode forward needs an rng");
      h = tape.dropout(h, arch.input_dropout, *rng);
    }
    const LayerSpec& spec = arch.layers[li];
    if (arch.kind == ModelKind::gat) {
      auto [out, atts] = gat_layer_forward(tape, h, ds, params.gat_layers[li],
                                           spec.concat, spec.act,
                                           arch.attn_dropout, training, rng);
      for (size_t hi = 0; hi < atts.size(); ++hi)
        result.attention.entries.push_back({li, hi, atts[hi]});
      h = out;
    } else {
      h = gcn_layer_forward(tape, h, ds, params.gcn_weights[li], spec.act);
    }
  }
  result.probs = tape.row_softmax(h);
  return result;
}

// ---- checkpoint io -----------------------------------------------------

namespace {

constexpr char kCkptMagic[6] = {'I', 'G', 'A', 'T', 'M', '1'};
constexpr uint32_t kCkptVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("truncated checkpoint");
  return v;
}

void put_tensor(std::ofstream& out, const Tensor& t) {
  put(out, static_cast<uint64_t>(t.rows()));
  put(out, static_cast<uint64_t>(t.cols()));
  out.write(reinterpret_cast<const char*>(t.data().data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
}

Tensor get_tensor(std::ifstream& in) {
  uint64_t r = get<uint64_t>(in), c = get<uint64_t>(in);
  std::vector<double> data(r * c);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw DataError("truncated checkpoint");
  return Tensor(r, c, std::move(data));
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCkptMagic, sizeof(kCkptMagic));
  put(out, kCkptVersion);
  const ModelArch& a = params.arch;
  put(out, static_cast<uint8_t>(a.kind));
  put(out, a.input_dropout);
  put(out, a.attn_dropout);
  put(out, static_cast<uint32_t>(a.layers.size()));
  for (const auto& l : a.layers) {
    put(out, static_cast<uint64_t>(l.in_dim));
    put(out, static_cast<uint64_t>(l.out_dim));
    put(out, static_cast<uint64_t>(l.heads));
    put(out, static_cast<uint8_t>(l.concat));
    put(out, static_cast<uint8_t>(l.act));
  }
  for (const Tensor* t : params.flat()) put_tensor(out, *t);
}

ModelParams load_checkpoint(const std::string& path,
                            const std::optional<ModelArch>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[6];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 6, kCkptMagic))
    throw DataError("bad checkpoint magic: " + path);
  if (get<uint32_t>(in) != kCkptVersion) throw DataError("unsupported checkpoint version");
  ModelArch a;
  a.kind = static_cast<ModelKind>(get<uint8_t>(in));
  a.input_dropout = get<double>(in);
  a.attn_dropout = get<double>(in);
  uint32_t n_layers = get<uint32_t>(in);
  for (uint32_t i = 0; i < n_layers; ++i) {
    LayerSpec l;
    l.in_dim = get<uint64_t>(in);
    l.out_dim = get<uint64_t>(in);
    l.heads = get<uint64_t>(in);
    l.concat = get<uint8_t>(in) != 0;
    l.act = static_cast<Activation>(get<uint8_t>(in));
    a.layers.push_back(l);
  }
  if (expected && !(a == *expected))
    throw DataError("checkpoint architecture does not match the expected descriptor");
  ModelParams p;
  p.arch = a;
  if (a.kind == ModelKind::gat) {
    for (const auto& spec : a.layers) {
      std::vector<GatHeadParams> heads;
      for (size_t h = 0; h < spec.heads; ++h) {
        GatHeadParams hp;
        hp.W = get_tensor(in);
        hp.attn_src = get_tensor(in);
        hp.attn_dst = get_tensor(in);
        if (hp.W.rows() != spec.in_dim || hp.W.cols() != spec.out_dim)
          throw DataError("checkpoint tensor shape does not match descriptor");
        heads.push_back(std::move(hp));
      }
      p.gat_layers.push_back(std::move(heads));
    }
  } else {
    for (const auto& spec : a.layers) {
      Tensor w = get_tensor(in);
      if (w.rows() != spec.in_dim || w.cols() != spec.out_dim)
        throw DataError("checkpoint tensor shape does not match descriptor");
      p.gcn_weights.push_back(std::move(w));
    }
  }
  return p;
}

}  // namespace imbalgat
