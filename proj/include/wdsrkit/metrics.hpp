// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_METRICS_HPP_
#define WDSRKIT_METRICS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>

#include "wdsrkit/tensor.hpp"

namespace wdsrkit {

/// Mean absolute error over all elements. Subgradient at zero difference is
/// defined as 0.
template <typename T>
TensorT<T> l1_loss(const TensorT<T>& pred, const TensorT<T>& target) {
    if (pred.shape() != target.shape())
        throw ShapeError("l1_loss: shape mismatch " + shape_str(pred.shape()) + " vs " + shape_str(target.shape()));
    const int64_t n = pred.numel();
    const T* p = pred.data().data();
    const T* t = target.data().data();
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) acc += std::abs((double)p[i] - (double)t[i]);
    auto pn = pred.node();
    auto tn = target.node();
    return detail::make_op<T>("l1_loss", Shape{1}, std::vector<T>{(T)(acc / (double)n)}, {pred, target},
                              [pn, tn, n](detail::NodeT<T>& node) {
                                  const T dy = node.grad[0] / (T)n;
                                  if (pn->requires_grad) pn->accum_grad_init();
                                  if (tn->requires_grad) tn->accum_grad_init();
                                  for (int64_t i = 0; i < n; ++i) {
                                      const T d = pn->data[i] - tn->data[i];
                                      const T s = d > T(0) ? dy : d < T(0) ? -dy : T(0);
                                      if (pn->requires_grad) pn->grad[i] += s;
                                      if (tn->requires_grad) tn->grad[i] -= s;
                                  }
                              });
}

/// PSNR on RGB pixel values: both inputs are clipped to [0,255] and rounded
/// to integers, then 10*log10(255^2 / MSE). Identical images give +infinity.
inline double psnr_rgb(const float* pred, const float* target, int64_t n) {
    if (n < 1) throw ShapeError("psnr_rgb: empty input");
    auto q = [](float v) {
        const float c = v < 0.f ? 0.f : v > 255.f ? 255.f : v;
        return (double)std::lround(c);
    };
    double se = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const double d = q(pred[i]) - q(target[i]);
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = se / (double)n;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

inline double psnr_rgb_u8(const uint8_t* pred, const uint8_t* target, int64_t n) {
    if (n < 1) throw ShapeError("psnr_rgb: empty input");
    double se = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const double d = (double)pred[i] - (double)target[i];
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / (se / (double)n));
}

/// Exponential moving average trace of a metric series.
inline std::vector<double> ema_series(const std::vector<double>& xs, int window) {
    std::vector<double> out;
    out.reserve(xs.size());
    const double a = 2.0 / ((double)window + 1.0);
    double e = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        e = i == 0 ? xs[0] : a * xs[i] + (1.0 - a) * e;
        out.push_back(e);
    }
    return out;
}

inline double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / (double)xs.size();
}

inline double stddev_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / (double)(xs.size() - 1));
}

}  // namespace wdsrkit

#endif  // WDSRKIT_METRICS_HPP_
