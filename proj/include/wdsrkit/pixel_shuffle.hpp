// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_PIXEL_SHUFFLE_HPP_
#define WDSRKIT_PIXEL_SHUFFLE_HPP_

#include "wdsrkit/tensor.hpp"

namespace wdsrkit {

namespace detail {

// out(n, c, S*h+dy, S*w+dx) = in(n, c*S^2 + dy*S + dx, h, w)
template <typename T>
void shuffle_kernel(const T* in, T* out, int n, int c_out, int h, int w, int s) {
    const int64_t in_plane = (int64_t)h * w;
    const int64_t out_plane = in_plane * s * s;
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < c_out; ++c)
            for (int dy = 0; dy < s; ++dy)
                for (int dx = 0; dx < s; ++dx) {
                    const T* src = in + ((int64_t)b * c_out * s * s + (int64_t)c * s * s + dy * s + dx) * in_plane;
                    T* dst = out + ((int64_t)b * c_out + c) * out_plane;
                    for (int y = 0; y < h; ++y) {
                        T* drow = dst + ((int64_t)(s * y + dy) * (s * w)) + dx;
                        const T* srow = src + (int64_t)y * w;
                        for (int x = 0; x < w; ++x) drow[(int64_t)x * s] = srow[x];
                    }
                }
}

template <typename T>
void unshuffle_kernel(const T* in, T* out, int n, int c_out, int h, int w, int s) {
    // exact inverse of shuffle_kernel; (h,w) are the small spatial dims
    const int64_t small_plane = (int64_t)h * w;
    const int64_t big_plane = small_plane * s * s;
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < c_out; ++c)
            for (int dy = 0; dy < s; ++dy)
                for (int dx = 0; dx < s; ++dx) {
                    T* dst = out + ((int64_t)b * c_out * s * s + (int64_t)c * s * s + dy * s + dx) * small_plane;
                    const T* src = in + ((int64_t)b * c_out + c) * big_plane;
                    for (int y = 0; y < h; ++y) {
                        const T* srow = src + ((int64_t)(s * y + dy) * (s * w)) + dx;
                        T* drow = dst + (int64_t)y * w;
                        for (int x = 0; x < w; ++x) drow[x] = srow[(int64_t)x * s];
                    }
                }
}

}  // namespace detail

/// (N, C*S^2, H, W) -> (N, C, S*H, S*W). Bijective rearrangement; backward
/// is the inverse rearrangement.
template <typename T>
TensorT<T> pixel_shuffle(const TensorT<T>& x, int s) {
    if (x.ndim() != 4) throw ShapeError("pixel_shuffle: input must be NCHW, got " + shape_str(x.shape()));
    const int n = x.dim(0), c_in = x.dim(1), h = x.dim(2), w = x.dim(3);
    if (s < 1 || c_in % (s * s) != 0)
        throw ShapeError("pixel_shuffle: channel count " + std::to_string(c_in) +
                         " not divisible by S^2 with S=" + std::to_string(s));
    const int c_out = c_in / (s * s);
    std::vector<T> out(x.data().size());
    detail::shuffle_kernel(x.data().data(), out.data(), n, c_out, h, w, s);
    auto xn = x.node();
    return detail::make_op<T>("pixel_shuffle", Shape{n, c_out, s * h, s * w}, std::move(out), {x},
                              [xn, n, c_out, h, w, s](detail::NodeT<T>& node) {
                                  if (!xn->requires_grad) return;
                                  xn->accum_grad_init();
                                  std::vector<T> tmp(node.grad.size());
                                  detail::unshuffle_kernel(node.grad.data(), tmp.data(), n, c_out, h, w, s);
                                  for (size_t i = 0; i < tmp.size(); ++i) xn->grad[i] += tmp[i];
                              });
}

/// (N, C, S*H, S*W) -> (N, C*S^2, H, W); inverse of pixel_shuffle.
template <typename T>
TensorT<T> pixel_unshuffle(const TensorT<T>& x, int s) {
    if (x.ndim() != 4) throw ShapeError("pixel_unshuffle: input must be NCHW, got " + shape_str(x.shape()));
    const int n = x.dim(0), c = x.dim(1), hs = x.dim(2), ws = x.dim(3);
    if (s < 1 || hs % s != 0 || ws % s != 0)
        throw ShapeError("pixel_unshuffle: spatial dims " + shape_str(x.shape()) +
                         " not divisible by S=" + std::to_string(s));
    const int h = hs / s, w = ws / s;
    std::vector<T> out(x.data().size());
    detail::unshuffle_kernel(x.data().data(), out.data(), n, c, h, w, s);
    auto xn = x.node();
    return detail::make_op<T>("pixel_unshuffle", Shape{n, c * s * s, h, w}, std::move(out), {x},
                              [xn, n, c, h, w, s](detail::NodeT<T>& node) {
                                  if (!xn->requires_grad) return;
                                  xn->accum_grad_init();
                                  std::vector<T> tmp(node.grad.size());
                                  detail::shuffle_kernel(node.grad.data(), tmp.data(), n, c, h, w, s);
                                  for (size_t i = 0; i < tmp.size(); ++i) xn->grad[i] += tmp[i];
                              });
}

}  // namespace wdsrkit

#endif  // WDSRKIT_PIXEL_SHUFFLE_HPP_
