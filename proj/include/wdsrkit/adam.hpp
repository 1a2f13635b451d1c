// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_ADAM_HPP_
#define WDSRKIT_ADAM_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "wdsrkit/layers.hpp"

namespace wdsrkit {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const {
        if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
            throw ConfigError("adam betas must lie in (0,1)");
        if (!(eps > 0.0)) throw ConfigError("adam epsilon must be > 0");
    }
};

/// Bias-corrected Adam. Moments are kept in double so the update math is
/// 64-bit throughout; parameters round to their storage type on write.
template <typename T>
struct AdamStateT {
    AdamConfig cfg;
    int64_t t = 0;
    std::vector<std::vector<double>> m, v;

    explicit AdamStateT(const AdamConfig& c = {}) : cfg(c) { cfg.validate(); }

    void attach(const std::vector<NamedParamT<T>>& params) {
        m.assign(params.size(), {});
        v.assign(params.size(), {});
        for (size_t i = 0; i < params.size(); ++i) {
            m[i].assign((size_t)params[i].tensor.numel(), 0.0);
            v[i].assign((size_t)params[i].tensor.numel(), 0.0);
        }
        t = 0;
    }

    /// One optimizer step over all parameters. A non-finite gradient anywhere
    /// aborts before any parameter or moment is touched.
    void step(std::vector<NamedParamT<T>>& params, double lr) {
        if (m.size() != params.size()) throw ConfigError("adam_step: state not attached to this parameter set");
        for (const auto& p : params) {
            if (!p.tensor.has_grad()) continue;
            for (T g : p.tensor.grad())
                if (!std::isfinite((double)g))
                    throw NumericError("adam_step: non-finite gradient in '" + p.name + "' at step " +
                                       std::to_string(t + 1));
        }
        ++t;
        const double bc1 = 1.0 - std::pow(cfg.beta1, (double)t);
        const double bc2 = 1.0 - std::pow(cfg.beta2, (double)t);
        for (size_t i = 0; i < params.size(); ++i) {
            auto& p = params[i];
            if (!p.tensor.has_grad()) continue;
            const auto& grad = p.tensor.grad();
            auto& data = p.tensor.data();
            for (size_t j = 0; j < grad.size(); ++j) {
                const double g = (double)grad[j];
                m[i][j] = cfg.beta1 * m[i][j] + (1.0 - cfg.beta1) * g;
                v[i][j] = cfg.beta2 * v[i][j] + (1.0 - cfg.beta2) * g * g;
                const double mhat = m[i][j] / bc1;
                const double vhat = v[i][j] / bc2;
                data[j] = (T)((double)data[j] - lr * mhat / (std::sqrt(vhat) + cfg.eps));
            }
        }
    }
};

using AdamState = AdamStateT<float>;

}  // namespace wdsrkit

#endif  // WDSRKIT_ADAM_HPP_
