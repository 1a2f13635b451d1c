// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_NORM_HPP_
#define WDSRKIT_NORM_HPP_

#include <cmath>
#include <memory>
#include <vector>

#include "wdsrkit/tensor.hpp"

namespace wdsrkit {

/// Effective kernel of a weight-normalized convolution: per output channel c,
///   w_c = (g_c / ||v_c||) * v_c
/// with the norm taken over all Cin*Kh*Kw elements of v_c. Differentiable
/// w.r.t. both v and g.
template <typename T>
TensorT<T> weight_norm_effective(const TensorT<T>& v, const TensorT<T>& g) {
    if (v.ndim() != 4) throw ShapeError("weight_norm_effective: v must be (Cout,Cin,Kh,Kw), got " + shape_str(v.shape()));
    const int cout = v.dim(0);
    const int64_t fan = v.numel() / cout;
    if (g.numel() != cout)
        throw ShapeError("weight_norm_effective: g has " + std::to_string(g.numel()) +
                         " elements, expected " + std::to_string(cout));

    auto norms = std::make_shared<std::vector<T>>(cout);
    std::vector<T> w(v.numel());
    const T* vd = v.data().data();
    const T* gd = g.data().data();
    for (int c = 0; c < cout; ++c) {
        double sq = 0.0;
        const T* vc = vd + (int64_t)c * fan;
        for (int64_t i = 0; i < fan; ++i) sq += (double)vc[i] * (double)vc[i];
        const T n = (T)std::sqrt(sq);
        if (!(n > T(0))) throw NumericError("weight_norm_effective: zero-norm filter in channel " + std::to_string(c));
        (*norms)[c] = n;
        const T s = gd[c] / n;
        T* wc = w.data() + (int64_t)c * fan;
        for (int64_t i = 0; i < fan; ++i) wc[i] = s * vc[i];
    }

    auto vn = v.node();
    auto gn = g.node();
    return detail::make_op<T>("weight_norm", v.shape(), std::move(w), {v, g},
                              [vn, gn, norms, cout, fan](detail::NodeT<T>& node) {
                                  const T* dw = node.grad.data();
                                  const T* vd2 = vn->data.data();
                                  const T* gd2 = gn->data.data();
                                  if (gn->requires_grad) gn->accum_grad_init();
                                  if (vn->requires_grad) vn->accum_grad_init();
                                  for (int c = 0; c < cout; ++c) {
                                      const T n = (*norms)[c];
                                      const T* vc = vd2 + (int64_t)c * fan;
                                      const T* dwc = dw + (int64_t)c * fan;
                                      // dot = dw_c . v̂_c
                                      double dot = 0.0;
                                      for (int64_t i = 0; i < fan; ++i) dot += (double)dwc[i] * ((double)vc[i] / n);
                                      if (gn->requires_grad) gn->grad[c] += (T)dot;
                                      if (vn->requires_grad) {
                                          const T s = gd2[c] / n;
                                          T* dvc = vn->grad.data() + (int64_t)c * fan;
                                          for (int64_t i = 0; i < fan; ++i)
                                              dvc[i] += s * (dwc[i] - (T)dot * (vc[i] / n));
                                      }
                                  }
                              });
}

enum class BNMode { train, infer };

/// Per-channel affine batch normalization state. gamma/beta are trainable;
/// running_mean/running_var are plain moving-average buffers updated only by
/// batch_norm_train and consumed by batch_norm_infer.
template <typename T>
struct BatchNormStateT {
    TensorT<T> gamma;
    TensorT<T> beta;
    std::vector<T> running_mean;
    std::vector<T> running_var;
    T momentum = (T)0.1;
    T epsilon = (T)1e-5;
    BNMode mode = BNMode::train;
    bool initialized = false;  // true once a train-mode batch updated the stats

    explicit BatchNormStateT(int channels)
        : gamma(TensorT<T>::filled({channels}, T(1), true)),
          beta(TensorT<T>::zeros({channels}, true)),
          running_mean((size_t)channels, T(0)),
          running_var((size_t)channels, T(1)) {}

    int channels() const { return (int)running_mean.size(); }
};

using BatchNormState = BatchNormStateT<float>;

namespace detail {

template <typename T>
void check_bn_input(const TensorT<T>& x, const BatchNormStateT<T>& s, const char* who) {
    if (x.ndim() != 4) throw ShapeError(std::string(who) + ": input must be NCHW, got " + shape_str(x.shape()));
    if (x.dim(1) != s.channels())
        throw ShapeError(std::string(who) + ": input has " + std::to_string(x.dim(1)) +
                         " channels, state has " + std::to_string(s.channels()));
}

}  // namespace detail

/// Train-mode BN: normalize by biased mini-batch statistics over (N,H,W),
/// scale/shift by gamma/beta, and fold the batch statistics into the running
/// moving averages: E <- (1-m)*E + m*E_B (same for Var).
template <typename T>
TensorT<T> batch_norm_train(const TensorT<T>& x, BatchNormStateT<T>& s) {
    detail::check_bn_input(x, s, "batch_norm_train");
    if (s.mode != BNMode::train) throw ConfigError("batch_norm_train called on a state in infer mode");
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int64_t plane = (int64_t)h * w;
    const int64_t m = (int64_t)n * plane;
    if (m < 2) throw ShapeError("batch_norm_train: needs N*H*W >= 2 per channel, got " + std::to_string(m));

    const T* xd = x.data().data();
    const T* gd = s.gamma.data().data();
    const T* bd = s.beta.data().data();
    std::vector<T> mean(c), inv_std_v(c);
    auto xhat = std::make_shared<std::vector<T>>(x.numel());
    std::vector<T> y(x.numel());
    for (int ch = 0; ch < c; ++ch) {
        double sum = 0.0;
        for (int b = 0; b < n; ++b) {
            const T* p = xd + ((int64_t)b * c + ch) * plane;
            for (int64_t i = 0; i < plane; ++i) sum += p[i];
        }
        const double mu = sum / (double)m;
        double sq = 0.0;
        for (int b = 0; b < n; ++b) {
            const T* p = xd + ((int64_t)b * c + ch) * plane;
            for (int64_t i = 0; i < plane; ++i) {
                const double d = (double)p[i] - mu;
                sq += d * d;
            }
        }
        const double var = sq / (double)m;  // biased
        const double istd = 1.0 / std::sqrt(var + (double)s.epsilon);
        mean[ch] = (T)mu;
        inv_std_v[ch] = (T)istd;
        for (int b = 0; b < n; ++b) {
            const T* p = xd + ((int64_t)b * c + ch) * plane;
            T* xh = xhat->data() + ((int64_t)b * c + ch) * plane;
            T* yp = y.data() + ((int64_t)b * c + ch) * plane;
            for (int64_t i = 0; i < plane; ++i) {
                const T v = (T)(((double)p[i] - mu) * istd);
                xh[i] = v;
                yp[i] = gd[ch] * v + bd[ch];
            }
        }
        s.running_mean[ch] = (T(1) - s.momentum) * s.running_mean[ch] + s.momentum * (T)mu;
        s.running_var[ch] = (T(1) - s.momentum) * s.running_var[ch] + s.momentum * (T)var;
    }
    s.initialized = true;

    auto xn = x.node();
    auto gn = s.gamma.node();
    auto bn = s.beta.node();
    auto inv_std = std::make_shared<std::vector<T>>(std::move(inv_std_v));
    auto gamma_saved = std::make_shared<std::vector<T>>(s.gamma.data());
    return detail::make_op<T>("batch_norm_train", x.shape(), std::move(y), {x, s.gamma, s.beta},
                              [xn, gn, bn, xhat, inv_std, gamma_saved, n, c, plane, m](detail::NodeT<T>& node) {
                                  const T* dy = node.grad.data();
                                  if (gn->requires_grad) gn->accum_grad_init();
                                  if (bn->requires_grad) bn->accum_grad_init();
                                  if (xn->requires_grad) xn->accum_grad_init();
                                  for (int ch = 0; ch < c; ++ch) {
                                      double sdy = 0.0, sdyx = 0.0;
                                      for (int b = 0; b < n; ++b) {
                                          const int64_t off = ((int64_t)b * c + ch) * plane;
                                          const T* d = dy + off;
                                          const T* xh = xhat->data() + off;
                                          for (int64_t i = 0; i < plane; ++i) {
                                              sdy += d[i];
                                              sdyx += (double)d[i] * (double)xh[i];
                                          }
                                      }
                                      if (bn->requires_grad) bn->grad[ch] += (T)sdy;
                                      if (gn->requires_grad) gn->grad[ch] += (T)sdyx;
                                      if (xn->requires_grad) {
                                          const double k = (*gamma_saved)[ch] * (double)(*inv_std)[ch];
                                          const double mdy = sdy / (double)m, mdyx = sdyx / (double)m;
                                          for (int b = 0; b < n; ++b) {
                                              const int64_t off = ((int64_t)b * c + ch) * plane;
                                              const T* d = dy + off;
                                              const T* xh = xhat->data() + off;
                                              T* dx = xn->grad.data() + off;
                                              for (int64_t i = 0; i < plane; ++i)
                                                  dx[i] += (T)(k * ((double)d[i] - mdy - (double)xh[i] * mdyx));
                                          }
                                      }
                                  }
                              });
}

/// Infer-mode BN: normalize with the stored running statistics. Pure: no
/// state mutation, output depends only on x and the stored stats.
template <typename T>
TensorT<T> batch_norm_infer(const TensorT<T>& x, const BatchNormStateT<T>& s) {
    detail::check_bn_input(x, s, "batch_norm_infer");
    if (s.mode != BNMode::infer) throw ConfigError("batch_norm_infer called on a state in train mode");
    if (!s.initialized) throw ConfigError("batch_norm_infer: running statistics never initialized");
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int64_t plane = (int64_t)h * w;

    auto istd = std::make_shared<std::vector<T>>(c);
    auto mu = std::make_shared<std::vector<T>>(s.running_mean);
    std::vector<T> scale(c), shift(c);
    const T* gd = s.gamma.data().data();
    const T* bd = s.beta.data().data();
    for (int ch = 0; ch < c; ++ch) {
        (*istd)[ch] = (T)(1.0 / std::sqrt((double)s.running_var[ch] + (double)s.epsilon));
        scale[ch] = gd[ch] * (*istd)[ch];
        shift[ch] = bd[ch] - s.running_mean[ch] * scale[ch];
    }
    const T* xd = x.data().data();
    std::vector<T> y(x.numel());
    for (int b = 0; b < n; ++b)
        for (int ch = 0; ch < c; ++ch) {
            const int64_t off = ((int64_t)b * c + ch) * plane;
            for (int64_t i = 0; i < plane; ++i) y[off + i] = scale[ch] * xd[off + i] + shift[ch];
        }

    auto xn = x.node();
    auto gn = s.gamma.node();
    auto bn = s.beta.node();
    auto sc = std::make_shared<std::vector<T>>(std::move(scale));
    return detail::make_op<T>("batch_norm_infer", x.shape(), std::move(y), {x, s.gamma, s.beta},
                              [xn, gn, bn, sc, istd, mu, n, c, plane](detail::NodeT<T>& node) {
                                  const T* dy = node.grad.data();
                                  const T* xd2 = xn->data.data();
                                  if (xn->requires_grad) xn->accum_grad_init();
                                  if (gn->requires_grad) gn->accum_grad_init();
                                  if (bn->requires_grad) bn->accum_grad_init();
                                  for (int ch = 0; ch < c; ++ch) {
                                      double sdy = 0.0, sdyx = 0.0;
                                      for (int b = 0; b < n; ++b) {
                                          const int64_t off = ((int64_t)b * c + ch) * plane;
                                          if (xn->requires_grad) {
                                              T* dx = xn->grad.data() + off;
                                              for (int64_t i = 0; i < plane; ++i) dx[i] += (*sc)[ch] * dy[off + i];
                                          }
                                          if (gn->requires_grad || bn->requires_grad)
                                              for (int64_t i = 0; i < plane; ++i) {
                                                  const double xh = ((double)xd2[off + i] - (*mu)[ch]) * (*istd)[ch];
                                                  sdy += dy[off + i];
                                                  sdyx += (double)dy[off + i] * xh;
                                              }
                                      }
                                      if (gn->requires_grad) gn->grad[ch] += (T)sdyx;
                                      if (bn->requires_grad) bn->grad[ch] += (T)sdy;
                                  }
                              });
}

}  // namespace wdsrkit

#endif  // WDSRKIT_NORM_HPP_
