// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_LAYERS_HPP_
#define WDSRKIT_LAYERS_HPP_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wdsrkit/conv.hpp"
#include "wdsrkit/norm.hpp"

namespace wdsrkit {

enum class Norm { plain, weight, batch };

inline const char* norm_name(Norm n) {
    switch (n) {
        case Norm::plain: return "plain";
        case Norm::weight: return "weight-norm";
        case Norm::batch: return "batch-norm";
    }
    return "?";
}

inline Norm parse_norm(const std::string& s) {
    if (s == "plain" || s == "none") return Norm::plain;
    if (s == "weight-norm" || s == "wn") return Norm::weight;
    if (s == "batch-norm" || s == "bn") return Norm::batch;
    throw ConfigError("unknown normalization '" + s + "' (plain | weight-norm | batch-norm)");
}

template <typename T>
struct NamedParamT {
    std::string name;
    TensorT<T> tensor;
};

/// Named non-trainable buffer (BN running statistics and the init flag),
/// exposed as raw storage for checkpointing.
template <typename T>
struct NamedBufferT {
    std::string name;
    std::vector<T>* data;
};

/// One convolution with its weights in one of three parameterizations:
/// plain kernel, weight-normalized {v, g}, or plain kernel followed by
/// batch normalization of the output.
template <typename T>
struct ConvLayerT {
    int cin = 0, cout = 0, k = 3;
    Norm norm = Norm::plain;
    TensorT<T> weight;  // kernel, or the direction tensor v under weight norm
    TensorT<T> g;       // per-channel magnitude, weight norm only
    TensorT<T> bias;
    std::shared_ptr<BatchNormStateT<T>> bn;  // batch norm only
    std::vector<T> bn_init_flag;             // 1-element mirror of bn->initialized for checkpoints

    static ConvLayerT make(int cin, int cout, int k, Norm norm, Rng& rng) {
        ConvLayerT l;
        l.cin = cin;
        l.cout = cout;
        l.k = k;
        l.norm = norm;
        l.weight = conv_kernel_init<T>(cout, cin, k, rng);
        l.weight.set_requires_grad(true);
        l.bias = TensorT<T>::zeros({cout}, true);
        if (norm == Norm::weight) {
            // g_c = ||v_c||, so the initial effective kernel equals the plain init
            std::vector<T> gv(cout);
            const int64_t fan = (int64_t)cin * k * k;
            for (int c = 0; c < cout; ++c) {
                double sq = 0.0;
                const T* vc = l.weight.data().data() + c * fan;
                for (int64_t i = 0; i < fan; ++i) sq += (double)vc[i] * (double)vc[i];
                gv[c] = (T)std::sqrt(sq);
            }
            l.g = TensorT<T>::from({cout}, gv, true);
        } else if (norm == Norm::batch) {
            l.bn = std::make_shared<BatchNormStateT<T>>(cout);
            l.bn_init_flag.assign(1, T(0));
        }
        return l;
    }

    TensorT<T> forward(const TensorT<T>& x, bool training) {
        TensorT<T> w = (norm == Norm::weight) ? weight_norm_effective(weight, g) : weight;
        TensorT<T> y = conv2d(x, w, bias);
        if (norm == Norm::batch) {
            bn->mode = training ? BNMode::train : BNMode::infer;
            y = training ? batch_norm_train(y, *bn) : batch_norm_infer(y, *bn);
            bn_init_flag[0] = bn->initialized ? T(1) : T(0);
        }
        return y;
    }

    int64_t weight_count() const { return (int64_t)cout * cin * k * k; }

    int64_t param_count() const {
        int64_t n = weight_count() + cout;                   // kernel + bias
        if (norm == Norm::weight) n += cout;                 // g
        if (norm == Norm::batch) n += 2 * (int64_t)cout;     // gamma + beta
        return n;
    }

    void collect_params(const std::string& prefix, std::vector<NamedParamT<T>>& out) {
        out.push_back({prefix + (norm == Norm::weight ? ".v" : ".weight"), weight});
        if (norm == Norm::weight) out.push_back({prefix + ".g", g});
        out.push_back({prefix + ".bias", bias});
        if (norm == Norm::batch) {
            out.push_back({prefix + ".bn.gamma", bn->gamma});
            out.push_back({prefix + ".bn.beta", bn->beta});
        }
    }

    void collect_buffers(const std::string& prefix, std::vector<NamedBufferT<T>>& out) {
        if (norm == Norm::batch) {
            out.push_back({prefix + ".bn.running_mean", &bn->running_mean});
            out.push_back({prefix + ".bn.running_var", &bn->running_var});
            out.push_back({prefix + ".bn.initialized", &bn_init_flag});
        }
    }

    /// Re-derive non-tensor state after a checkpoint load.
    void after_load() {
        if (norm == Norm::batch) bn->initialized = !bn_init_flag.empty() && bn_init_flag[0] != T(0);
    }
};

using ConvLayer = ConvLayerT<float>;

}  // namespace wdsrkit

#endif  // WDSRKIT_LAYERS_HPP_
