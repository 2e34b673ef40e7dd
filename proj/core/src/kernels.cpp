// SPDX-License-Identifier: Apache-2.0
#include "imbalgat/kernels.hpp"

namespace imbalgat {

void matmul_nn(const double* a, const double* b, double* c,
               size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (size_t l = 0; l < k; ++l) {
      double av = arow[l];
      if (av == 0.0) continue;
      const double* brow = b + l * n;
      for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_nt(const double* a, const double* b, double* c,
               size_t m, size_t n, size_t k) {
  for (size_t i = 0; i < m; ++i) {
    const double* arow = a + i * n;
    double* crow = c + i * k;
    for (size_t j = 0; j < k; ++j) {
      const double* brow = b + j * n;
      double acc = 0.0;
      for (size_t l = 0; l < n; ++l) acc += arow[l] * brow[l];
      crow[j] += acc;
    }
  }
}

void matmul_tn(const double* a, const double* b, double* c,
               size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    const double* brow = b + i * n;
    for (size_t l = 0; l < k; ++l) {
      double av = arow[l];
      if (av == 0.0) continue;
      double* crow = c + l * n;
      for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace imbalgat
