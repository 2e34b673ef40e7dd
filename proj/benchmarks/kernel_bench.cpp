// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "imbalgat/kernels.hpp"
#include "imbalgat/tape.hpp"

using namespace imbalgat;

namespace {

std::vector<double> random_dense(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

// 0/1 matrix with the sparsity of a bag-of-words feature matrix.
std::vector<double> random_sparse01(size_t n, double density, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n, 0.0);
  for (auto& x : v)
    if (rng.uniform() < density) x = 1.0;
  return v;
}

Csr chain_csr(size_t v_count) {
  Csr csr;
  csr.row_offsets.push_back(0);
  for (size_t v = 0; v < v_count; ++v) {
    if (v > 0) csr.col_indices.push_back(static_cast<int32_t>(v - 1));
    csr.col_indices.push_back(static_cast<int32_t>(v));
    if (v + 1 < v_count) csr.col_indices.push_back(static_cast<int32_t>(v + 1));
    csr.row_offsets.push_back(static_cast<int64_t>(csr.col_indices.size()));
  }
  return csr;
}

}  // namespace

static void BM_MatmulDense(benchmark::State& state) {
  size_t m = static_cast<size_t>(state.range(0)), k = 256, n = 16;
  auto a = random_dense(m * k, 1);
  auto b = random_dense(k * n, 2);
  std::vector<double> c(m * n);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    matmul_nn(a.data(), b.data(), c.data(), m, k, n);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_MatmulDense)->Arg(256)->Arg(1024);

static void BM_MatmulSparseFeatures(benchmark::State& state) {
  // cora-like shapes: 2708 x 1433 features at ~1.3% density times 1433 x 16
  size_t m = 2708, k = 1433, n = 16;
  auto a = random_sparse01(m * k, 0.013, 3);
  auto b = random_dense(k * n, 4);
  std::vector<double> c(m * n);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    matmul_nn(a.data(), b.data(), c.data(), m, k, n);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_MatmulSparseFeatures);

static void BM_SegmentSoftmax(benchmark::State& state) {
  size_t v_count = static_cast<size_t>(state.range(0));
  Csr csr = chain_csr(v_count);
  GraphView g{&csr, csr_fingerprint(csr)};
  EdgeVector s(csr.nnz(), 0.0, g.fingerprint);
  Rng rng(5);
  for (auto& x : s.values_mut()) x = rng.uniform(-2, 2);
  for (auto _ : state) {
    Tape t;
    EdgeVector a = t.segment_softmax(s, g);
    benchmark::DoNotOptimize(a.values().data());
  }
}
BENCHMARK(BM_SegmentSoftmax)->Arg(2708)->Arg(10000);

static void BM_SegmentWeightedSum(benchmark::State& state) {
  size_t v_count = 2708, d = 16;
  Csr csr = chain_csr(v_count);
  GraphView g{&csr, csr_fingerprint(csr)};
  EdgeVector w(csr.nnz(), 0.3, g.fingerprint);
  Tensor h(v_count, d);
  Rng rng(6);
  for (auto& x : h.data_mut()) x = rng.uniform(-1, 1);
  for (auto _ : state) {
    Tape t;
    Tensor out = t.segment_weighted_sum(w, h, g);
    benchmark::DoNotOptimize(out.data().data());
  }
}
BENCHMARK(BM_SegmentWeightedSum);

BENCHMARK_MAIN();
