// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace imbalgat {

// Dense matmul kernels. All of them accumulate into c, which the caller
// zero-initializes for a plain product. The _nn and _tn variants skip zero
// entries of `a`, which makes products against the sparse 0/1 feature
// matrices cheap without a separate sparse type.

// c[m x n] += a[m x k] * b[k x n]
void matmul_nn(const double* a, const double* b, double* c,
               size_t m, size_t k, size_t n);

// c[m x k] += a[m x n] * b^T, where b is [k x n]
void matmul_nt(const double* a, const double* b, double* c,
               size_t m, size_t n, size_t k);

// c[k x n] += a^T * b, where a is [m x k] and b is [m x n]
void matmul_tn(const double* a, const double* b, double* c,
               size_t m, size_t k, size_t n);

}  // namespace imbalgat
