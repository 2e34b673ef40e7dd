// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/tape.hpp"

#include <cmath>
#include <cstring>

#include "imbalgat/kernels.hpp"

namespace imbalgat {

void check_finite(const std::vector<double>& v, const char* op) {
  for (double x : v) {
    if (!std::isfinite(x))
      throw NumericError(std::string(op) + " produced a non-finite value");
  }
}

uint64_t csr_fingerprint(const Csr& csr) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const void* p, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  mix(csr.row_offsets.data(), csr.row_offsets.size() * sizeof(int64_t));
  mix(csr.col_indices.data(), csr.col_indices.size() * sizeof(int32_t));
  return h;
}

NodeId Tape::new_node(size_t len, bool leaf) {
  if (len == 0) throw DimensionError("empty tensor cannot be recorded on the tape");
  nodes_.push_back({len, leaf});
  grads_.emplace_back();
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::watch(Tensor& t) {
  t.requires_grad = true;
  t.node = new_node(t.size(), /*leaf=*/true);
  leaves_.push_back(t.node);
  return t.node;
}

NodeId Tape::watch(EdgeVector& e) {
  e.requires_grad = true;
  e.node = new_node(e.size(), /*leaf=*/true);
  leaves_.push_back(e.node);
  return e.node;
}

std::vector<double>& Tape::grad_acc(NodeId id) {
  auto& g = grads_[static_cast<size_t>(id)];
  if (g.empty()) g.assign(nodes_[static_cast<size_t>(id)].len, 0.0);
  return g;
}

const std::vector<double>* Tape::grad_if(NodeId id) const {
  const auto& g = grads_[static_cast<size_t>(id)];
  return g.empty() ? nullptr : &g;
}

const std::vector<double>& Tape::grad_checked(NodeId id, size_t len,
                                              const char* what) const {
  if (id < 0 || static_cast<size_t>(id) >= nodes_.size())
    throw DimensionError(std::string(what) + " is not on this tape");
  const auto* g = grad_if(id);
  if (!g)
    throw DimensionError(std::string(what) + " has no gradient (run backward first)");
  if (g->size() != len)
    throw DimensionError(std::string(what) + " gradient shape mismatch");
  return *g;
}

const std::vector<double>& Tape::grad(const Tensor& t) const {
  return grad_checked(t.node, t.size(), "tensor");
}

const std::vector<double>& Tape::grad(const EdgeVector& e) const {
  return grad_checked(e.node, e.size(), "edge vector");
}

void Tape::backward(const Tensor& loss) {
  if (loss.node < 0 || static_cast<size_t>(loss.node) >= nodes_.size())
    throw DimensionError("loss is not on this tape");
  if (loss.size() != 1) throw DimensionError("loss must be a scalar");
  grads_[static_cast<size_t>(loss.node)] = {1.0};
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)(*this);
  for (NodeId l : leaves_) grad_acc(l);
  ran_backward_ = true;
}

void Tape::reset() {
  nodes_.clear();
  records_.clear();
  grads_.clear();
  leaves_.clear();
  ran_backward_ = false;
}

// ---- helpers -----------------------------------------------------------

namespace {

void ensure_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(op) + ": shape mismatch");
}

void ensure_graph(const EdgeVector& e, const GraphView& g, const char* op) {
  if (e.graph_fingerprint() != g.fingerprint)
    throw DimensionError(std::string(op) + ": edge vector fingerprint does not match graph");
  if (e.size() != g.csr->nnz())
    throw DimensionError(std::string(op) + ": edge vector length does not match graph");
}

}  // namespace

template <class F, class DF>
Tensor Tape::unary_t(const Tensor& x, const char* name, F f, DF df) {
  Tensor out(x.rows(), x.cols());
  {
    auto& o = out.data_mut();
    const auto& xs = x.data();
    for (size_t i = 0; i < xs.size(); ++i) o[i] = f(xs[i]);
  }
  check_finite(out.data(), name);
  if (x.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId xn = x.node, on = out.node;
  Tensor xs = x, ys = out;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    const auto& xv = xs.data();
    const auto& yv = ys.data();
    for (size_t i = 0; i < gx.size(); ++i) gx[i] += (*go)[i] * df(xv[i], yv[i]);
  });
  return out;
}

template <class F, class DF>
EdgeVector Tape::unary_e(const EdgeVector& x, const char* name, F f, DF df) {
  EdgeVector out(x.size(), 0.0, x.graph_fingerprint());
  {
    auto& o = out.values_mut();
    const auto& xs = x.values();
    for (size_t i = 0; i < xs.size(); ++i) o[i] = f(xs[i]);
  }
  check_finite(out.values(), name);
  if (x.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId xn = x.node, on = out.node;
  EdgeVector xs = x, ys = out;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    const auto& xv = xs.values();
    const auto& yv = ys.values();
    for (size_t i = 0; i < gx.size(); ++i) gx[i] += (*go)[i] * df(xv[i], yv[i]);
  });
  return out;
}

// ---- tensor ops --------------------------------------------------------

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions do not match");
  size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out(m, n);
  matmul_nn(a.data().data(), b.data().data(), out.data_mut().data(), m, k, n);
  check_finite(out.data(), "matmul");
  bool ta = a.node >= 0, tb = b.node >= 0;
  if (!ta && !tb) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId an = a.node, bn = b.node, on = out.node;
  Tensor a_saved = tb ? a : Tensor();
  Tensor b_saved = ta ? b : Tensor();
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    if (an >= 0) {
      auto& ga = t.grad_acc(an);
      matmul_nt(go->data(), b_saved.data().data(), ga.data(), m, n, k);
    }
    if (bn >= 0) {
      auto& gb = t.grad_acc(bn);
      matmul_tn(a_saved.data().data(), go->data(), gb.data(), m, k, n);
    }
  });
  return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  ensure_same_shape(a, b, "add");
  Tensor out(a.rows(), a.cols());
  {
    auto& o = out.data_mut();
    const auto& av = a.data();
    const auto& bv = b.data();
    for (size_t i = 0; i < o.size(); ++i) o[i] = av[i] + bv[i];
  }
  check_finite(out.data(), "add");
  bool ta = a.node >= 0, tb = b.node >= 0;
  if (!ta && !tb) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId an = a.node, bn = b.node, on = out.node;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    if (an >= 0) {
      auto& ga = t.grad_acc(an);
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += (*go)[i];
    }
    if (bn >= 0) {
      auto& gb = t.grad_acc(bn);
      for (size_t i = 0; i < gb.size(); ++i) gb[i] += (*go)[i];
    }
  });
  return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  ensure_same_shape(a, b, "mul");
  Tensor out(a.rows(), a.cols());
  {
    auto& o = out.data_mut();
    const auto& av = a.data();
    const auto& bv = b.data();
    for (size_t i = 0; i < o.size(); ++i) o[i] = av[i] * bv[i];
  }
  check_finite(out.data(), "mul");
  bool ta = a.node >= 0, tb = b.node >= 0;
  if (!ta && !tb) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId an = a.node, bn = b.node, on = out.node;
  Tensor a_saved = tb ? a : Tensor();
  Tensor b_saved = ta ? b : Tensor();
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    if (an >= 0) {
      auto& ga = t.grad_acc(an);
      const auto& bv = b_saved.data();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += (*go)[i] * bv[i];
    }
    if (bn >= 0) {
      auto& gb = t.grad_acc(bn);
      const auto& av = a_saved.data();
      for (size_t i = 0; i < gb.size(); ++i) gb[i] += (*go)[i] * av[i];
    }
  });
  return out;
}

Tensor Tape::affine(const Tensor& x, double s, double t) {
  return unary_t(
      x, "affine", [s, t](double v) { return s * v + t; },
      [s](double, double) { return s; });
}

Tensor Tape::exp(const Tensor& x) {
  return unary_t(
      x, "exp", [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor Tape::log(const Tensor& x) {
  return unary_t(
      x, "log",
      [](double v) { return std::log(v < kLogEps ? kLogEps : v); },
      [](double v, double) { return 1.0 / (v < kLogEps ? kLogEps : v); });
}

Tensor Tape::pow(const Tensor& x, double gamma) {
  return unary_t(
      x, "pow", [gamma](double v) { return std::pow(v, gamma); },
      [gamma](double v, double) {
        if (v == 0.0) return gamma == 1.0 ? 1.0 : 0.0;
        return gamma * std::pow(v, gamma - 1.0);
      });
}

Tensor Tape::leaky_relu(const Tensor& x, double alpha) {
  return unary_t(
      x, "leaky_relu",
      [alpha](double v) { return v > 0.0 ? v : alpha * v; },
      [alpha](double v, double) { return v > 0.0 ? 1.0 : alpha; });
}

Tensor Tape::elu(const Tensor& x) {
  return unary_t(
      x, "elu",
      [](double v) { return v > 0.0 ? v : std::expm1(v); },
      [](double v, double y) { return v > 0.0 ? 1.0 : y + 1.0; });
}

Tensor Tape::cmul(const Tensor& x, const std::vector<double>& c) {
  if (c.size() != x.size()) throw DimensionError("cmul: constant length mismatch");
  Tensor out(x.rows(), x.cols());
  {
    auto& o = out.data_mut();
    const auto& xv = x.data();
    for (size_t i = 0; i < o.size(); ++i) o[i] = xv[i] * c[i];
  }
  check_finite(out.data(), "cmul");
  if (x.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId xn = x.node, on = out.node;
  std::vector<double> cs = c;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    for (size_t i = 0; i < gx.size(); ++i) gx[i] += (*go)[i] * cs[i];
  });
  return out;
}

Tensor Tape::sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  Tensor out(1, 1, acc);
  check_finite(out.data(), "sum");
  if (x.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(1);
  NodeId xn = x.node, on = out.node;
  size_t len = x.size();
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    double g = (*go)[0];
    for (size_t i = 0; i < len; ++i) gx[i] += g;
  });
  return out;
}

Tensor Tape::mean(const Tensor& x) {
  if (x.size() == 0) throw DimensionError("mean of an empty tensor");
  return affine(sum(x), 1.0 / static_cast<double>(x.size()), 0.0);
}

Tensor Tape::row_softmax(const Tensor& x) {
  size_t r = x.rows(), c = x.cols();
  if (c == 0) throw DimensionError("row_softmax: empty rows");
  Tensor out(r, c);
  {
    auto& o = out.data_mut();
    const auto& xv = x.data();
    for (size_t i = 0; i < r; ++i) {
      const double* row = xv.data() + i * c;
      double mx = row[0];
      for (size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
      double z = 0.0;
      for (size_t j = 0; j < c; ++j) {
        double e = std::exp(row[j] - mx);
        o[i * c + j] = e;
        z += e;
      }
      for (size_t j = 0; j < c; ++j) o[i * c + j] /= z;
    }
  }
  check_finite(out.data(), "row_softmax");
  if (x.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId xn = x.node, on = out.node;
  Tensor ys = out;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    const auto& yv = ys.data();
    for (size_t i = 0; i < r; ++i) {
      const double* a = yv.data() + i * c;
      const double* g = go->data() + i * c;
      double dot = 0.0;
      for (size_t j = 0; j < c; ++j) dot += a[j] * g[j];
      for (size_t j = 0; j < c; ++j) gx[i * c + j] += a[j] * (g[j] - dot);
    }
  });
  return out;
}

Tensor Tape::concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  size_t r = parts[0].rows();
  size_t total = 0;
  bool tracked = false;
  for (const auto& p : parts) {
    if (p.rows() != r) throw DimensionError("concat_cols: row count mismatch");
    total += p.cols();
    tracked = tracked || p.node >= 0;
  }
  Tensor out(r, total);
  {
    auto& o = out.data_mut();
    size_t off = 0;
    for (const auto& p : parts) {
      const auto& pv = p.data();
      size_t pc = p.cols();
      for (size_t i = 0; i < r; ++i)
        std::memcpy(o.data() + i * total + off, pv.data() + i * pc, pc * sizeof(double));
      off += pc;
    }
  }
  if (!tracked) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId on = out.node;
  struct Slice { NodeId node; size_t off, cols; };
  std::vector<Slice> slices;
  size_t off = 0;
  for (const auto& p : parts) {
    slices.push_back({p.node, off, p.cols()});
    off += p.cols();
  }
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    for (const auto& s : slices) {
      if (s.node < 0) continue;
      auto& gp = t.grad_acc(s.node);
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < s.cols; ++j)
          gp[i * s.cols + j] += (*go)[i * total + s.off + j];
    }
  });
  return out;
}

Tensor Tape::dropout(const Tensor& x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0,1)");
  if (rate == 0.0) return x;
  double keep = 1.0 - rate, inv = 1.0 / keep;
  Tensor out(x.rows(), x.cols());
  std::vector<uint8_t> mask;
  bool tracked = x.node >= 0;
  if (tracked) mask.assign(x.size(), 0);
  {
    auto& o = out.data_mut();
    const auto& xv = x.data();
    for (size_t i = 0; i < xv.size(); ++i) {
      double v = xv[i];
      if (v == 0.0) continue;  // structural zero, no draw
      if (rng.uniform() < keep) {
        o[i] = v * inv;
        if (tracked) mask[i] = 1;
      }
    }
  }
  if (!tracked) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId xn = x.node, on = out.node;
  auto mask_p = std::make_shared<std::vector<uint8_t>>(std::move(mask));
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    const auto& m = *mask_p;
    for (size_t i = 0; i < gx.size(); ++i)
      if (m[i]) gx[i] += (*go)[i] * inv;
  });
  return out;
}

Tensor Tape::gather(const Tensor& m, const std::vector<int32_t>& rows,
                    const std::vector<int32_t>& cols) {
  if (rows.size() != cols.size()) throw DimensionError("gather: index length mismatch");
  if (rows.empty()) throw DimensionError("gather: empty index set");
  size_t n = rows.size(), C = m.cols();
  Tensor out(n, 1);
  {
    auto& o = out.data_mut();
    const auto& mv = m.data();
    for (size_t i = 0; i < n; ++i) {
      size_t r = static_cast<size_t>(rows[i]), c = static_cast<size_t>(cols[i]);
      if (r >= m.rows() || c >= C) throw DimensionError("gather: index out of range");
      o[i] = mv[r * C + c];
    }
  }
  if (m.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId mn = m.node, on = out.node;
  std::vector<int32_t> rs = rows, cs = cols;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gm = t.grad_acc(mn);
    for (size_t i = 0; i < rs.size(); ++i)
      gm[static_cast<size_t>(rs[i]) * C + static_cast<size_t>(cs[i])] += (*go)[i];
  });
  return out;
}

// ---- edge ops ----------------------------------------------------------

EdgeVector Tape::edge_score(const Tensor& src_term, const Tensor& dst_term,
                            const GraphView& g) {
  const Csr& csr = *g.csr;
  size_t V = csr.num_nodes();
  if (src_term.rows() != V || src_term.cols() != 1 || dst_term.rows() != V ||
      dst_term.cols() != 1)
    throw DimensionError("edge_score: terms must be V x 1");
  EdgeVector out(csr.nnz(), 0.0, g.fingerprint);
  {
    auto& o = out.values_mut();
    const auto& sv = src_term.data();
    const auto& dv = dst_term.data();
    for (size_t v = 0; v < V; ++v) {
      auto [b, e] = csr.row_span(v);
      for (int64_t s = b; s < e; ++s)
        o[static_cast<size_t>(s)] = sv[v] + dv[static_cast<size_t>(csr.col_indices[static_cast<size_t>(s)])];
    }
  }
  check_finite(out.values(), "edge_score");
  bool ts = src_term.node >= 0, td = dst_term.node >= 0;
  if (!ts && !td) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId sn = src_term.node, dn = dst_term.node, on = out.node;
  std::vector<int64_t> offs = csr.row_offsets;
  std::vector<int32_t> cols = csr.col_indices;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    size_t nv = offs.size() - 1;
    if (sn >= 0) {
      auto& gs = t.grad_acc(sn);
      for (size_t v = 0; v < nv; ++v) {
        double acc = 0.0;
        for (int64_t s = offs[v]; s < offs[v + 1]; ++s) acc += (*go)[static_cast<size_t>(s)];
        gs[v] += acc;
      }
    }
    if (dn >= 0) {
      auto& gd = t.grad_acc(dn);
      for (size_t s = 0; s < cols.size(); ++s)
        gd[static_cast<size_t>(cols[s])] += (*go)[s];
    }
  });
  return out;
}

EdgeVector Tape::leaky_relu(const EdgeVector& e, double alpha) {
  return unary_e(
      e, "leaky_relu",
      [alpha](double v) { return v > 0.0 ? v : alpha * v; },
      [alpha](double v, double) { return v > 0.0 ? 1.0 : alpha; });
}

EdgeVector Tape::dropout(const EdgeVector& e, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0,1)");
  if (rate == 0.0) return e;
  double keep = 1.0 - rate, inv = 1.0 / keep;
  EdgeVector out(e.size(), 0.0, e.graph_fingerprint());
  std::vector<uint8_t> mask;
  bool tracked = e.node >= 0;
  if (tracked) mask.assign(e.size(), 0);
  {
    auto& o = out.values_mut();
    const auto& xv = e.values();
    for (size_t i = 0; i < xv.size(); ++i) {
      double v = xv[i];
      if (v == 0.0) continue;
      if (rng.uniform() < keep) {
        o[i] = v * inv;
        if (tracked) mask[i] = 1;
      }
    }
  }
  if (!tracked) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId xn = e.node, on = out.node;
  auto mask_p = std::make_shared<std::vector<uint8_t>>(std::move(mask));
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    const auto& m = *mask_p;
    for (size_t i = 0; i < gx.size(); ++i)
      if (m[i]) gx[i] += (*go)[i] * inv;
  });
  return out;
}

EdgeVector Tape::segment_softmax(const EdgeVector& scores, const GraphView& g) {
  ensure_graph(scores, g, "segment_softmax");
  const Csr& csr = *g.csr;
  size_t V = csr.num_nodes();
  EdgeVector out(scores.size(), 0.0, g.fingerprint);
  {
    auto& o = out.values_mut();
    const auto& sv = scores.values();
    for (size_t v = 0; v < V; ++v) {
      auto [b, e] = csr.row_span(v);
      double mx = sv[static_cast<size_t>(b)];
      for (int64_t s = b + 1; s < e; ++s) mx = std::max(mx, sv[static_cast<size_t>(s)]);
      double z = 0.0;
      for (int64_t s = b; s < e; ++s) {
        double ex = std::exp(sv[static_cast<size_t>(s)] - mx);
        o[static_cast<size_t>(s)] = ex;
        z += ex;
      }
      for (int64_t s = b; s < e; ++s) o[static_cast<size_t>(s)] /= z;
    }
  }
  check_finite(out.values(), "segment_softmax");
  if (scores.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId xn = scores.node, on = out.node;
  EdgeVector ys = out;
  std::vector<int64_t> offs = csr.row_offsets;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& gx = t.grad_acc(xn);
    const auto& a = ys.values();
    size_t nv = offs.size() - 1;
    for (size_t v = 0; v < nv; ++v) {
      double dot = 0.0;
      for (int64_t s = offs[v]; s < offs[v + 1]; ++s)
        dot += a[static_cast<size_t>(s)] * (*go)[static_cast<size_t>(s)];
      for (int64_t s = offs[v]; s < offs[v + 1]; ++s) {
        size_t i = static_cast<size_t>(s);
        gx[i] += a[i] * ((*go)[i] - dot);
      }
    }
  });
  return out;
}

Tensor Tape::segment_weighted_sum(const EdgeVector& weights, const Tensor& h,
                                  const GraphView& g) {
  ensure_graph(weights, g, "segment_weighted_sum");
  const Csr& csr = *g.csr;
  size_t V = csr.num_nodes(), d = h.cols();
  if (h.rows() != V)
    throw DimensionError("segment_weighted_sum: h row count does not match graph");
  Tensor out(V, d);
  {
    auto& o = out.data_mut();
    const auto& wv = weights.values();
    const auto& hv = h.data();
    for (size_t v = 0; v < V; ++v) {
      auto [b, e] = csr.row_span(v);
      double* orow = o.data() + v * d;
      for (int64_t s = b; s < e; ++s) {
        double w = wv[static_cast<size_t>(s)];
        if (w == 0.0) continue;
        const double* hrow =
            hv.data() + static_cast<size_t>(csr.col_indices[static_cast<size_t>(s)]) * d;
        for (size_t j = 0; j < d; ++j) orow[j] += w * hrow[j];
      }
    }
  }
  check_finite(out.data(), "segment_weighted_sum");
  bool tw = weights.node >= 0, th = h.node >= 0;
  if (!tw && !th) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId wn = weights.node, hn = h.node, on = out.node;
  EdgeVector w_saved = weights;
  Tensor h_saved = h;
  std::vector<int64_t> offs = csr.row_offsets;
  std::vector<int32_t> cols = csr.col_indices;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    size_t nv = offs.size() - 1;
    const auto& wv = w_saved.values();
    const auto& hv = h_saved.data();
    if (wn >= 0) {
      auto& gw = t.grad_acc(wn);
      for (size_t v = 0; v < nv; ++v) {
        const double* grow = go->data() + v * d;
        for (int64_t s = offs[v]; s < offs[v + 1]; ++s) {
          const double* hrow = hv.data() + static_cast<size_t>(cols[static_cast<size_t>(s)]) * d;
          double acc = 0.0;
          for (size_t j = 0; j < d; ++j) acc += grow[j] * hrow[j];
          gw[static_cast<size_t>(s)] += acc;
        }
      }
    }
    if (hn >= 0) {
      auto& gh = t.grad_acc(hn);
      for (size_t v = 0; v < nv; ++v) {
        const double* grow = go->data() + v * d;
        for (int64_t s = offs[v]; s < offs[v + 1]; ++s) {
          double w = wv[static_cast<size_t>(s)];
          if (w == 0.0) continue;
          double* ghrow = gh.data() + static_cast<size_t>(cols[static_cast<size_t>(s)]) * d;
          for (size_t j = 0; j < d; ++j) ghrow[j] += w * grow[j];
        }
      }
    }
  });
  return out;
}

Tensor Tape::edge_gather(const EdgeVector& e, const std::vector<int64_t>& slots) {
  if (slots.empty()) throw DimensionError("edge_gather: empty slot set");
  Tensor out(slots.size(), 1);
  {
    auto& o = out.data_mut();
    const auto& ev = e.values();
    for (size_t i = 0; i < slots.size(); ++i) {
      if (slots[i] < 0 || static_cast<size_t>(slots[i]) >= ev.size())
        throw DimensionError("edge_gather: slot out of range");
      o[i] = ev[static_cast<size_t>(slots[i])];
    }
  }
  if (e.node < 0) return out;
  out.requires_grad = true;
  out.node = new_node(out.size());
  NodeId en = e.node, on = out.node;
  std::vector<int64_t> ss = slots;
  record([=](Tape& t) {
    const auto* go = t.grad_if(on);
    if (!go) return;
    auto& ge = t.grad_acc(en);
    for (size_t i = 0; i < ss.size(); ++i) ge[static_cast<size_t>(ss[i])] += (*go)[i];
  });
  return out;
}

}  // namespace imbalgat
