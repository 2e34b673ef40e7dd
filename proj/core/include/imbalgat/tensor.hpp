// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <random>
#include <vector>

#include "imbalgat/error.hpp"

namespace imbalgat {

using NodeId = int32_t;
constexpr NodeId kNoNode = -1;

// Dense row-major matrix of 64-bit floats. The buffer is shared on copy and
// copied on mutation, so passing tensors around and saving them on the tape
// is cheap even for the large feature matrices.
class Tensor {
 public:
  Tensor() = default;
  Tensor(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        buf_(std::make_shared<std::vector<double>>(rows * cols, fill)) {}
  Tensor(size_t rows, size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols),
        buf_(std::make_shared<std::vector<double>>(std::move(data))) {
    if (buf_->size() != rows_ * cols_)
      throw DimensionError("tensor data length does not match shape");
  }

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return rows_ * cols_; }
  bool empty() const { return size() == 0; }

  const std::vector<double>& data() const { return *buf_; }
  // Copy-on-write: detaches from any shared buffer before mutation.
  std::vector<double>& data_mut() {
    if (buf_.use_count() > 1)
      buf_ = std::make_shared<std::vector<double>>(*buf_);
    return *buf_;
  }

  double operator()(size_t r, size_t c) const { return (*buf_)[r * cols_ + c]; }
  void set(size_t r, size_t c, double v) { data_mut()[r * cols_ + c] = v; }

  Tensor clone() const {
    Tensor t(rows_, cols_, std::vector<double>(*buf_));
    t.requires_grad = requires_grad;
    return t;
  }

  bool requires_grad = false;
  NodeId node = kNoNode;  // handle into the active tape, -1 when untracked

 private:
  size_t rows_ = 0, cols_ = 0;
  std::shared_ptr<std::vector<double>> buf_ = std::make_shared<std::vector<double>>();
};

inline Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  size_t r = rows.size();
  size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged initializer");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

// One value per directed CSR edge slot (self-loops included). Tied to a
// specific graph through its fingerprint.
class EdgeVector {
 public:
  EdgeVector() = default;
  EdgeVector(size_t n, double fill, uint64_t fingerprint)
      : fp_(fingerprint),
        buf_(std::make_shared<std::vector<double>>(n, fill)) {}
  EdgeVector(std::vector<double> values, uint64_t fingerprint)
      : fp_(fingerprint),
        buf_(std::make_shared<std::vector<double>>(std::move(values))) {}

  size_t size() const { return buf_->size(); }
  const std::vector<double>& values() const { return *buf_; }
  std::vector<double>& values_mut() {
    if (buf_.use_count() > 1)
      buf_ = std::make_shared<std::vector<double>>(*buf_);
    return *buf_;
  }
  uint64_t graph_fingerprint() const { return fp_; }

  bool requires_grad = false;
  NodeId node = kNoNode;

 private:
  uint64_t fp_ = 0;
  std::shared_ptr<std::vector<double>> buf_ = std::make_shared<std::vector<double>>();
};

// Deterministic uniform doubles: identical sequences on every platform for a
// fixed seed (std::uniform_real_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  // [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace imbalgat
