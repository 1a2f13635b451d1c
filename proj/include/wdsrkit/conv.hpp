// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_CONV_HPP_
#define WDSRKIT_CONV_HPP_

#include "wdsrkit/gemm.hpp"
#include "wdsrkit/tensor.hpp"

namespace wdsrkit {

namespace detail {

/// Unfolds x(cin,h,w) into col(cin*k*k, h*w) with zero padding (k-1)/2.
template <typename T>
void im2col(const T* x, T* col, int cin, int h, int w, int k) {
    const int pad = (k - 1) / 2;
    const int64_t hw = (int64_t)h * w;
    for (int c = 0; c < cin; ++c)
        for (int kh = 0; kh < k; ++kh)
            for (int kw = 0; kw < k; ++kw) {
                T* dst = col + (((int64_t)c * k + kh) * k + kw) * hw;
                for (int oh = 0; oh < h; ++oh) {
                    const int ih = oh + kh - pad;
                    T* drow = dst + (int64_t)oh * w;
                    if (ih < 0 || ih >= h) {
                        for (int ow = 0; ow < w; ++ow) drow[ow] = T(0);
                        continue;
                    }
                    const T* srow = x + ((int64_t)c * h + ih) * w;
                    for (int ow = 0; ow < w; ++ow) {
                        const int iw = ow + kw - pad;
                        drow[ow] = (iw >= 0 && iw < w) ? srow[iw] : T(0);
                    }
                }
            }
}

/// Folds col(cin*k*k, h*w) back into dx(cin,h,w), accumulating overlaps.
template <typename T>
void col2im_add(const T* col, T* dx, int cin, int h, int w, int k) {
    const int pad = (k - 1) / 2;
    const int64_t hw = (int64_t)h * w;
    for (int c = 0; c < cin; ++c)
        for (int kh = 0; kh < k; ++kh)
            for (int kw = 0; kw < k; ++kw) {
                const T* src = col + (((int64_t)c * k + kh) * k + kw) * hw;
                for (int oh = 0; oh < h; ++oh) {
                    const int ih = oh + kh - pad;
                    if (ih < 0 || ih >= h) continue;
                    T* drow = dx + ((int64_t)c * h + ih) * w;
                    const T* srow = src + (int64_t)oh * w;
                    for (int ow = 0; ow < w; ++ow) {
                        const int iw = ow + kw - pad;
                        if (iw >= 0 && iw < w) drow[iw] += srow[ow];
                    }
                }
            }
}

}  // namespace detail

/// 2-D convolution, cross-correlation convention, stride 1, zero "same"
/// padding. x is (N,Cin,H,W), weight (Cout,Cin,K,K), bias (Cout). Output
/// keeps the input spatial size. Implemented as im2col + GEMM; the im2col
/// buffer is recomputed in backward instead of being cached.
template <typename T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& weight, const TensorT<T>& bias) {
    if (x.ndim() != 4) throw ShapeError("conv2d: input must be NCHW, got " + shape_str(x.shape()));
    if (weight.ndim() != 4)
        throw ShapeError("conv2d: weight must be (Cout,Cin,Kh,Kw), got " + shape_str(weight.shape()));
    const int n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int cout = weight.dim(0), k = weight.dim(2);
    if (weight.dim(1) != cin)
        throw ShapeError("conv2d: input channels " + std::to_string(cin) +
                         " do not match weight " + shape_str(weight.shape()));
    if (weight.dim(3) != k || (k != 1 && k != 3 && k != 5))
        throw ShapeError("conv2d: kernel must be square 1, 3 or 5, got " + shape_str(weight.shape()));
    if (bias.numel() != cout)
        throw ShapeError("conv2d: bias " + shape_str(bias.shape()) + " does not match Cout " +
                         std::to_string(cout));

    const int64_t hw = (int64_t)h * w;
    const int ck = cin * k * k;
    std::vector<T> out((size_t)((int64_t)n * cout * hw));

    {
        std::vector<T> col((size_t)ck * hw);
        const auto& bv = bias.data();
        for (int s = 0; s < n; ++s) {
            detail::im2col(x.data().data() + (int64_t)s * cin * hw, col.data(), cin, h, w, k);
            T* y = out.data() + (int64_t)s * cout * hw;
            std::fill(y, y + (int64_t)cout * hw, T(0));
            gemm_nn(weight.data().data(), col.data(), y, cout, ck, (int)hw);
            for (int oc = 0; oc < cout; ++oc) {
                const T b = bv[(size_t)oc];
                T* row = y + (int64_t)oc * hw;
                for (int64_t i = 0; i < hw; ++i) row[i] += b;
            }
        }
    }

    auto xn = x.node(), wn = weight.node(), bn = bias.node();
    auto bw = [xn, wn, bn, n, cin, h, w, cout, k](detail::NodeT<T>& node) {
        const int64_t hw = (int64_t)h * w;
        const int ck = cin * k * k;
        const auto& dy = node.grad;
        std::vector<T> col((size_t)ck * hw);

        if (wn->requires_grad || bn->requires_grad) {
            if (wn->requires_grad) wn->accum_grad_init();
            if (bn->requires_grad) bn->accum_grad_init();
            // dW^T(ck,cout) accumulated over samples as col_s * dY_s^T,
            // then folded back; keeps every GEMM in the fast nn layout.
            std::vector<T> dwt((size_t)ck * cout, T(0));
            std::vector<T> dyt((size_t)hw * cout);
            for (int s = 0; s < n; ++s) {
                const T* dys = dy.data() + (int64_t)s * cout * hw;
                if (wn->requires_grad) {
                    detail::im2col(xn->data.data() + (int64_t)s * cin * hw, col.data(), cin, h, w, k);
                    transpose(dys, dyt.data(), cout, (int)hw);
                    gemm_nn(col.data(), dyt.data(), dwt.data(), ck, (int)hw, cout);
                }
                if (bn->requires_grad) {
                    for (int oc = 0; oc < cout; ++oc) {
                        double sum = 0;
                        const T* row = dys + (int64_t)oc * hw;
                        for (int64_t i = 0; i < hw; ++i) sum += (double)row[i];
                        bn->grad[(size_t)oc] += (T)sum;
                    }
                }
            }
            if (wn->requires_grad)
                for (int oc = 0; oc < cout; ++oc)
                    for (int j = 0; j < ck; ++j)
                        wn->grad[(size_t)((int64_t)oc * ck + j)] += dwt[(size_t)((int64_t)j * cout + oc)];
        }

        if (xn->requires_grad) {
            xn->accum_grad_init();
            std::vector<T> wt((size_t)ck * cout);
            transpose(wn->data.data(), wt.data(), cout, ck);
            std::vector<T> dcol((size_t)ck * hw);
            for (int s = 0; s < n; ++s) {
                std::fill(dcol.begin(), dcol.end(), T(0));
                gemm_nn(wt.data(), dy.data() + (int64_t)s * cout * hw, dcol.data(), ck, cout, (int)hw);
                detail::col2im_add(dcol.data(), xn->grad.data() + (int64_t)s * cin * hw, cin, h, w, k);
            }
        }
    };
    return detail::make_op<T>("conv2d", Shape{n, cout, h, w}, std::move(out), {x, weight, bias},
                              std::move(bw));
}

/// Standard kernel init: uniform in +-sqrt(1/(Cin*Kh*Kw)).
template <typename T>
TensorT<T> conv_kernel_init(int cout, int cin, int k, Rng& rng) {
    const T bound = (T)std::sqrt(1.0 / ((double)cin * k * k));
    return TensorT<T>::uniform(Shape{cout, cin, k, k}, -bound, bound, rng);
}

}  // namespace wdsrkit

#endif  // WDSRKIT_CONV_HPP_
