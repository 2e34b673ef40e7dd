// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "imbalgat/csr.hpp"
#include "imbalgat/tensor.hpp"

namespace imbalgat {

// Reverse-mode differentiation tape over dense matrices and edge vectors.
//
// Define-by-run: each forward op records a backward closure; backward()
// replays the records in exact reverse order of recording, accumulating
// gradients keyed by node id. The tape is rebuilt every forward pass and
// owned by a single training run.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a leaf. Marks the operand requires_grad and assigns its node.
  NodeId watch(Tensor& t);
  NodeId watch(EdgeVector& e);

  // Seeds d(loss)/d(loss) = 1 and replays the tape backward. `loss` must be
  // a scalar (1x1) tensor recorded on this tape. After the call every
  // watched leaf has a gradient (zeros when it did not influence the loss).
  void backward(const Tensor& loss);

  const std::vector<double>& grad(const Tensor& t) const;
  const std::vector<double>& grad(const EdgeVector& e) const;

  // Drops all records, gradients and node bookkeeping.
  void reset();
  size_t num_nodes() const { return nodes_.size(); }
  size_t num_records() const { return records_.size(); }

  // ---- tensor ops ------------------------------------------------------
  Tensor matmul(const Tensor& a, const Tensor& b);
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  // s*x + t, elementwise; covers neg (s=-1), scaling and 1-x (s=-1, t=1).
  Tensor affine(const Tensor& x, double s, double t);
  Tensor neg(const Tensor& x) { return affine(x, -1.0, 0.0); }
  Tensor exp(const Tensor& x);
  // log with the input clamped to >= kLogEps before evaluation.
  Tensor log(const Tensor& x);
  Tensor pow(const Tensor& x, double gamma);
  Tensor leaky_relu(const Tensor& x, double alpha = kLeakyReluAlpha);
  Tensor relu(const Tensor& x) { return leaky_relu(x, 0.0); }
  Tensor elu(const Tensor& x);
  // Elementwise product with a constant vector (not differentiated w.r.t. c).
  Tensor cmul(const Tensor& x, const std::vector<double>& c);
  Tensor sum(const Tensor& x);   // -> 1x1
  Tensor mean(const Tensor& x);  // -> 1x1
  Tensor row_softmax(const Tensor& x);
  Tensor concat_cols(const std::vector<Tensor>& parts);
  // Inverted dropout; draws one uniform per nonzero entry (zeros stay zero
  // without consuming randomness). Identity when rate == 0 or !training.
  Tensor dropout(const Tensor& x, double rate, Rng& rng);
  // out[i] = m(rows[i], cols[i]) as an n x 1 column.
  Tensor gather(const Tensor& m, const std::vector<int32_t>& rows,
                const std::vector<int32_t>& cols);

  // ---- edge ops --------------------------------------------------------
  // score[slot in row v] = src_term[v] + dst_term[col[slot]];
  // src_term/dst_term are V x 1 columns.
  EdgeVector edge_score(const Tensor& src_term, const Tensor& dst_term,
                        const GraphView& g);
  EdgeVector leaky_relu(const EdgeVector& e, double alpha = kLeakyReluAlpha);
  EdgeVector dropout(const EdgeVector& e, double rate, Rng& rng);
  // Softmax over each node's CSR segment, max-subtracted for stability.
  // Every segment sums to 1 and entries lie in (0, 1].
  EdgeVector segment_softmax(const EdgeVector& scores, const GraphView& g);
  // out[v,:] = sum over v's CSR slots of weights[slot] * h[col[slot],:].
  Tensor segment_weighted_sum(const EdgeVector& weights, const Tensor& h,
                              const GraphView& g);
  // out[i] = e[slots[i]] as an n x 1 column.
  Tensor edge_gather(const EdgeVector& e, const std::vector<int64_t>& slots);

  static constexpr double kLogEps = 1e-10;
  static constexpr double kLeakyReluAlpha = 0.2;

 private:
  struct NodeInfo {
    size_t len = 0;
    bool leaf = false;
  };

  template <class F, class DF>
  Tensor unary_t(const Tensor& x, const char* name, F f, DF df);
  template <class F, class DF>
  EdgeVector unary_e(const EdgeVector& x, const char* name, F f, DF df);

  NodeId new_node(size_t len, bool leaf = false);
  std::vector<double>& grad_acc(NodeId id);
  const std::vector<double>* grad_if(NodeId id) const;
  void record(std::function<void(Tape&)> fn) { records_.push_back(std::move(fn)); }
  const std::vector<double>& grad_checked(NodeId id, size_t len,
                                          const char* what) const;

  std::vector<NodeInfo> nodes_;
  std::vector<std::function<void(Tape&)>> records_;
  std::vector<std::vector<double>> grads_;  // parallel to nodes_, empty = untouched
  std::vector<NodeId> leaves_;
  bool ran_backward_ = false;
};

// Throws NumericError when any entry of `v` is NaN or Inf.
void check_finite(const std::vector<double>& v, const char* op);

}  // namespace imbalgat
