// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_GEMM_HPP_
#define WDSRKIT_GEMM_HPP_

#include <cstdint>

#include "wdsrkit/common.hpp"

namespace wdsrkit {

/// C(M,N) += A(M,K) * B(K,N), all row-major. Each output element is a
/// fixed-order reduction over k, so results are identical for any thread
/// partition over rows.
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n) {
    parallel_for(
        m,
        [&](int64_t i0, int64_t i1) {
            for (int64_t i = i0; i < i1; ++i) {
                const T* arow = a + i * k;
                T* crow = c + i * n;
                for (int kk = 0; kk < k; ++kk) {
                    const T aik = arow[kk];
                    const T* brow = b + (int64_t)kk * n;
                    for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
                }
            }
        },
        // grain in rows; scale so tiny matrices stay single-threaded
        std::max<int64_t>(1, (int64_t(1) << 22) / std::max(1, k * n)));
}

/// dst(cols,rows) = src(rows,cols)^T, row-major.
template <typename T>
void transpose(const T* src, T* dst, int rows, int cols) {
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) dst[(int64_t)j * rows + i] = src[(int64_t)i * cols + j];
}

}  // namespace wdsrkit

#endif  // WDSRKIT_GEMM_HPP_
