// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_BICUBIC_HPP_
#define WDSRKIT_BICUBIC_HPP_

#include <algorithm>
#include <cmath>

#include "wdsrkit/image.hpp"

namespace wdsrkit {

/// Cubic convolution kernel with a = -0.5 (Catmull-Rom family). The four
/// taps at any sampling phase sum to exactly 1.
inline double cubic_weight(double t) {
    constexpr double a = -0.5;
    const double x = std::abs(t);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

namespace detail {

struct CubicTaps {
    int i0;        // leftmost source index before clamping
    double w[4];
};

// Half-pixel-centers mapping: src = (dst + 0.5) * (src_n / dst_n) - 0.5.
inline CubicTaps cubic_taps(int dst, int dst_n, int src_n) {
    const double src = ((double)dst + 0.5) * ((double)src_n / (double)dst_n) - 0.5;
    const int base = (int)std::floor(src);
    CubicTaps t;
    t.i0 = base - 1;
    for (int j = 0; j < 4; ++j) t.w[j] = cubic_weight(src - (double)(t.i0 + j));
    return t;
}

inline int clamp_idx(int i, int n) { return i < 0 ? 0 : i >= n ? n - 1 : i; }

}  // namespace detail

/// Separable bicubic resize with clamp-to-edge boundaries, computed in
/// double per channel, clipped to [0,255] and rounded at the end.
inline ImageBuf bicubic_resize(const ImageBuf& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw ShapeError("bicubic_resize: output must be at least 1x1");
    if (out_w == img.width && out_h == img.height) return img;

    // horizontal pass into a double buffer at (out_w, height)
    std::vector<double> mid((size_t)out_w * img.height * 3);
    for (int x = 0; x < out_w; ++x) {
        const auto t = detail::cubic_taps(x, out_w, img.width);
        int ix[4];
        for (int j = 0; j < 4; ++j) ix[j] = detail::clamp_idx(t.i0 + j, img.width);
        for (int y = 0; y < img.height; ++y)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int j = 0; j < 4; ++j) acc += t.w[j] * (double)img.at(ix[j], y, c);
                mid[((size_t)y * out_w + x) * 3 + c] = acc;
            }
    }

    ImageBuf out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const auto t = detail::cubic_taps(y, out_h, img.height);
        int iy[4];
        for (int j = 0; j < 4; ++j) iy[j] = detail::clamp_idx(t.i0 + j, img.height);
        for (int x = 0; x < out_w; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int j = 0; j < 4; ++j) acc += t.w[j] * mid[((size_t)iy[j] * out_w + x) * 3 + c];
                const double v = std::clamp(acc, 0.0, 255.0);
                out.at(x, y, c) = (uint8_t)std::lround(v);
            }
    }
    return out;
}

/// Degrade an HR image to its 1/S bicubic LR counterpart. Dimensions must
/// already be multiples of S (dataset preparation crops first).
inline ImageBuf bicubic_downsample(const ImageBuf& img, int s) {
    if (s < 1) throw ConfigError("bicubic_downsample: scale must be >= 1");
    if (s == 1) return img;
    if (img.width % s != 0 || img.height % s != 0)
        throw DataError("bicubic_downsample: " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                        " not divisible by scale " + std::to_string(s));
    return bicubic_resize(img, img.width / s, img.height / s);
}

inline ImageBuf bicubic_upsample(const ImageBuf& img, int s) {
    if (s < 1) throw ConfigError("bicubic_upsample: scale must be >= 1");
    return s == 1 ? img : bicubic_resize(img, img.width * s, img.height * s);
}

}  // namespace wdsrkit

#endif  // WDSRKIT_BICUBIC_HPP_
