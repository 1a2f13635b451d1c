// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_BLOCKS_HPP_
#define WDSRKIT_BLOCKS_HPP_

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "wdsrkit/layers.hpp"

namespace wdsrkit {

enum class Family { vanilla, wdsr_a, wdsr_b };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::vanilla: return "vanilla";
        case Family::wdsr_a: return "wdsr-a";
        case Family::wdsr_b: return "wdsr-b";
    }
    return "?";
}

inline Family parse_family(const std::string& s) {
    if (s == "vanilla") return Family::vanilla;
    if (s == "wdsr-a") return Family::wdsr_a;
    if (s == "wdsr-b") return Family::wdsr_b;
    throw ConfigError("unknown block family '" + s + "' (vanilla | wdsr-a | wdsr-b)");
}

struct Widths {
    int w1;  // slimmed identity-pathway width
    int w2;  // width before activation, r * w1
};

/// Slim the identity pathway by sqrt(r) and widen before the activation so
/// the two-conv weight product stays near the baseline's w1^2:
///   w1_hat = round(w1_baseline / sqrt(r)),  w2_hat = r * w1_hat.
inline Widths match_widths(int w1_baseline, int r) {
    if (w1_baseline < 1) throw ConfigError("match_widths: baseline width must be >= 1");
    if (r < 1) throw ConfigError("match_widths: expansion factor must be >= 1");
    const int w1 = (int)std::lround((double)w1_baseline / std::sqrt((double)r));
    if (w1 < 1)
        throw ConfigError("match_widths: baseline " + std::to_string(w1_baseline) + " with r=" +
                          std::to_string(r) + " slims below one channel");
    return {w1, r * w1};
}

/// Width of the middle 1x1 in the linear low-rank pair, chosen so the block's
/// weight count meets the vanilla budget 2*k^2*w1_baseline^2:
///   w1*(r*w1) + (r*w1)*w_mid + k^2*w_mid*w1 = 2*k^2*w1_baseline^2
inline int solve_wdsr_b_mid(int w1, int r, int k, int w1_baseline) {
    const int64_t target = 2LL * k * k * w1_baseline * w1_baseline;
    const int64_t expand = (int64_t)w1 * r * w1;
    const int64_t denom = (int64_t)r * w1 + (int64_t)k * k * w1;
    const int64_t w_mid = (target - expand) / denom;
    if (w_mid < 1)
        throw ConfigError("solve_wdsr_b_mid: no positive middle width meets the budget (w1=" +
                          std::to_string(w1) + ", r=" + std::to_string(r) + ", baseline=" +
                          std::to_string(w1_baseline) + ")");
    return (int)w_mid;
}

struct BlockSpec {
    Family family = Family::vanilla;
    int w1 = 64;   // identity-pathway width (already slimmed for wdsr families)
    int r = 1;     // expansion factor
    int k = 3;     // spatial kernel of the main convolution
    Norm norm = Norm::plain;
    double residual_scale = 1.0;
    int w_mid = 0;  // wdsr-b middle width; fill via solve_wdsr_b_mid
};

struct ConvDims {
    int cin, cout, k;
};

/// Convolution inventory of one block. The activation sits after the first
/// conv in every family, on the widest tensor of the block.
inline std::vector<ConvDims> plan_block(const BlockSpec& s) {
    if (s.w1 < 1) throw ConfigError("block width must be >= 1");
    if (s.residual_scale <= 0.0) throw ConfigError("residual_scale must be > 0");
    switch (s.family) {
        case Family::vanilla:
            if (s.r != 1) throw ConfigError("vanilla block requires expansion r=1, got " + std::to_string(s.r));
            return {{s.w1, s.w1, s.k}, {s.w1, s.w1, s.k}};
        case Family::wdsr_a: {
            if (s.r < 1) throw ConfigError("wdsr-a block requires r >= 1");
            if (s.r > 4) std::cerr << "wdsrkit: warning: wdsr-a expansion r=" << s.r << " exceeds the advisable range [1,4]\n";
            const int w2 = s.r * s.w1;
            return {{s.w1, w2, s.k}, {w2, s.w1, s.k}};
        }
        case Family::wdsr_b: {
            if (s.r < 1 || s.r > 9) throw ConfigError("wdsr-b block requires r in [1,9], got " + std::to_string(s.r));
            if (s.w_mid < 1) throw ConfigError("wdsr-b block needs a resolved middle width (solve_wdsr_b_mid)");
            const int w2 = s.r * s.w1;
            return {{s.w1, w2, 1}, {w2, s.w_mid, 1}, {s.w_mid, s.w1, s.k}};
        }
    }
    throw ConfigError("unknown block family");
}

inline int64_t block_weight_count(const BlockSpec& s) {
    int64_t n = 0;
    for (const auto& d : plan_block(s)) n += (int64_t)d.cin * d.cout * d.k * d.k;
    return n;
}

/// Residual block: convs in sequence with one ReLU after the first conv,
/// residual-scaled and added to the identity pathway.
template <typename T>
struct ResidualBlockT {
    BlockSpec spec;
    std::vector<ConvLayerT<T>> convs;

    TensorT<T> forward(const TensorT<T>& x, bool training) {
        TensorT<T> h = convs[0].forward(x, training);
        h = relu(h);
        for (size_t i = 1; i < convs.size(); ++i) h = convs[i].forward(h, training);
        if (spec.residual_scale != 1.0) h = scale(h, (T)spec.residual_scale);
        return x + h;
    }

    int64_t weight_count() const {
        int64_t n = 0;
        for (const auto& c : convs) n += c.weight_count();
        return n;
    }

    int64_t param_count() const {
        int64_t n = 0;
        for (const auto& c : convs) n += c.param_count();
        return n;
    }

    void collect_params(const std::string& prefix, std::vector<NamedParamT<T>>& out) {
        for (size_t i = 0; i < convs.size(); ++i) convs[i].collect_params(prefix + ".conv" + std::to_string(i), out);
    }
    void collect_buffers(const std::string& prefix, std::vector<NamedBufferT<T>>& out) {
        for (size_t i = 0; i < convs.size(); ++i) convs[i].collect_buffers(prefix + ".conv" + std::to_string(i), out);
    }
    void after_load() {
        for (auto& c : convs) c.after_load();
    }
};

template <typename T>
ResidualBlockT<T> build_block(const BlockSpec& s, Rng& rng) {
    ResidualBlockT<T> b;
    b.spec = s;
    for (const auto& d : plan_block(s)) b.convs.push_back(ConvLayerT<T>::make(d.cin, d.cout, d.k, s.norm, rng));
    return b;
}

using ResidualBlock = ResidualBlockT<float>;

}  // namespace wdsrkit

#endif  // WDSRKIT_BLOCKS_HPP_
