// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_NETWORK_HPP_
#define WDSRKIT_NETWORK_HPP_

#include <array>
#include <string>
#include <vector>

#include "wdsrkit/blocks.hpp"
#include "wdsrkit/pixel_shuffle.hpp"

namespace wdsrkit {

enum class Topology { wdsr, edsr_baseline };

inline const char* topology_name(Topology t) { return t == Topology::wdsr ? "wdsr" : "edsr-baseline"; }

inline Topology parse_topology(const std::string& s) {
    if (s == "wdsr") return Topology::wdsr;
    if (s == "edsr-baseline") return Topology::edsr_baseline;
    throw ConfigError("unknown topology '" + s + "' (wdsr | edsr-baseline)");
}

struct NetSpec {
    Topology topology = Topology::wdsr;
    int scale = 2;
    int n_blocks = 1;
    BlockSpec block;  // block.w1 is the body width
    std::array<float, 3> rgb_mean{0.f, 0.f, 0.f};

    int w1() const { return block.w1; }

    void validate() const {
        if (scale < 2 || scale > 4) throw ConfigError("scale must be 2, 3 or 4, got " + std::to_string(scale));
        if (n_blocks < 1) throw ConfigError("n_blocks must be >= 1");
        if (topology == Topology::edsr_baseline && block.family != Family::vanilla)
            throw ConfigError("edsr-baseline topology uses vanilla blocks, got family " +
                              std::string(family_name(block.family)));
        plan_block(block);  // surfaces family/width errors early
    }
};

/// One convolution site in a network, with the spatial scale (relative to the
/// LR input) it executes at. Drives both model construction and the budget
/// arithmetic so the two cannot diverge.
struct LayerPlan {
    std::string name;
    int cin, cout, k;
    int spatial_scale;  // conv input is (spatial_scale*H) x (spatial_scale*W)
    Norm norm;
};

namespace detail {

/// Non-block convs stay un-normalized under batch norm (the statistics
/// comparison targets block interiors); under weight norm every conv is
/// reparameterized.
inline Norm outer_norm(Norm block_norm) { return block_norm == Norm::weight ? Norm::weight : Norm::plain; }

inline std::vector<int> upsample_stages(int scale) {
    if (scale == 4) return {2, 2};
    return {scale};
}

}  // namespace detail

inline std::vector<LayerPlan> plan_net(const NetSpec& spec) {
    spec.validate();
    const int w1 = spec.w1();
    const int s2 = spec.scale * spec.scale;
    const Norm outer = detail::outer_norm(spec.block.norm);
    std::vector<LayerPlan> out;
    auto block_convs = plan_block(spec.block);
    if (spec.topology == Topology::wdsr) {
        out.push_back({"head", 3, w1, 3, 1, outer});
        for (int b = 0; b < spec.n_blocks; ++b)
            for (size_t i = 0; i < block_convs.size(); ++i) {
                const auto& d = block_convs[i];
                out.push_back({"block" + std::to_string(b) + ".conv" + std::to_string(i), d.cin, d.cout, d.k, 1,
                               spec.block.norm});
            }
        out.push_back({"body_end", w1, 3 * s2, 3, 1, outer});
        out.push_back({"skip", 3, 3 * s2, 5, 1, outer});
    } else {
        out.push_back({"head", 3, w1, 3, 1, outer});
        for (int b = 0; b < spec.n_blocks; ++b)
            for (size_t i = 0; i < block_convs.size(); ++i) {
                const auto& d = block_convs[i];
                out.push_back({"block" + std::to_string(b) + ".conv" + std::to_string(i), d.cin, d.cout, d.k, 1,
                               spec.block.norm});
            }
        out.push_back({"body_end", w1, w1, 3, 1, outer});
        int at = 1;
        const auto stages = detail::upsample_stages(spec.scale);
        for (size_t i = 0; i < stages.size(); ++i) {
            out.push_back({"upsample" + std::to_string(i), w1, w1 * stages[i] * stages[i], 3, at, outer});
            at *= stages[i];
        }
        out.push_back({"tail", w1, 3, 3, at, outer});
    }
    return out;
}

/// A full SR network. Both topologies subtract rgb_mean from the LR input
/// and add it back at the HR output.
template <typename T>
struct ModelT {
    NetSpec spec;
    ConvLayerT<T> head;
    std::vector<ResidualBlockT<T>> blocks;
    ConvLayerT<T> body_end;
    ConvLayerT<T> skip;                     // wdsr only: 5x5 global residual conv
    std::vector<ConvLayerT<T>> upsample;    // edsr-baseline only
    std::vector<int> upsample_s;            // per-stage shuffle factor
    ConvLayerT<T> tail;                     // edsr-baseline only

    TensorT<T> forward(const TensorT<T>& lr, bool training) {
        if (lr.ndim() != 4 || lr.dim(1) != 3)
            throw ShapeError("model input must be (N,3,H,W), got " + shape_str(lr.shape()));
        std::vector<T> m(3), neg(3);
        for (int c = 0; c < 3; ++c) {
            m[c] = (T)spec.rgb_mean[(size_t)c];
            neg[c] = -m[c];
        }
        auto mean = TensorT<T>::from({3}, m);
        auto neg_mean = TensorT<T>::from({3}, neg);
        TensorT<T> x = add_channel(lr, neg_mean);
        if (spec.topology == Topology::wdsr) {
            TensorT<T> h = head.forward(x, training);
            for (auto& b : blocks) h = b.forward(h, training);
            h = pixel_shuffle(body_end.forward(h, training), spec.scale);
            TensorT<T> s = pixel_shuffle(skip.forward(x, training), spec.scale);
            return add_channel(h + s, mean);
        }
        TensorT<T> h0 = head.forward(x, training);
        TensorT<T> h = h0;
        for (auto& b : blocks) h = b.forward(h, training);
        h = body_end.forward(h, training) + h0;
        for (size_t i = 0; i < upsample.size(); ++i)
            h = pixel_shuffle(upsample[i].forward(h, training), upsample_s[i]);
        return add_channel(tail.forward(h, training), mean);
    }

    int64_t param_count() {
        int64_t n = 0;
        std::vector<NamedParamT<T>> ps;
        collect_params(ps);
        for (const auto& p : ps) n += p.tensor.numel();
        return n;
    }

    void collect_params(std::vector<NamedParamT<T>>& out) {
        head.collect_params("head", out);
        for (size_t b = 0; b < blocks.size(); ++b) blocks[b].collect_params("block" + std::to_string(b), out);
        body_end.collect_params("body_end", out);
        if (spec.topology == Topology::wdsr) {
            skip.collect_params("skip", out);
        } else {
            for (size_t i = 0; i < upsample.size(); ++i) upsample[i].collect_params("upsample" + std::to_string(i), out);
            tail.collect_params("tail", out);
        }
    }

    void collect_buffers(std::vector<NamedBufferT<T>>& out) {
        head.collect_buffers("head", out);
        for (size_t b = 0; b < blocks.size(); ++b) blocks[b].collect_buffers("block" + std::to_string(b), out);
        body_end.collect_buffers("body_end", out);
        if (spec.topology == Topology::wdsr) {
            skip.collect_buffers("skip", out);
        } else {
            for (size_t i = 0; i < upsample.size(); ++i) upsample[i].collect_buffers("upsample" + std::to_string(i), out);
            tail.collect_buffers("tail", out);
        }
    }

    void after_load() {
        head.after_load();
        for (auto& b : blocks) b.after_load();
        body_end.after_load();
        skip.after_load();
        for (auto& u : upsample) u.after_load();
        tail.after_load();
    }

    std::vector<ConvLayerT<T>*> conv_layers() {
        std::vector<ConvLayerT<T>*> out{&head};
        for (auto& b : blocks)
            for (auto& c : b.convs) out.push_back(&c);
        out.push_back(&body_end);
        if (spec.topology == Topology::wdsr) {
            out.push_back(&skip);
        } else {
            for (auto& u : upsample) out.push_back(&u);
            out.push_back(&tail);
        }
        return out;
    }
};

template <typename T>
ModelT<T> build_model(const NetSpec& spec, Rng& rng) {
    spec.validate();
    const int w1 = spec.w1();
    const int s2 = spec.scale * spec.scale;
    const Norm outer = detail::outer_norm(spec.block.norm);
    ModelT<T> m;
    m.spec = spec;
    m.head = ConvLayerT<T>::make(3, w1, 3, outer, rng);
    for (int b = 0; b < spec.n_blocks; ++b) m.blocks.push_back(build_block<T>(spec.block, rng));
    if (spec.topology == Topology::wdsr) {
        m.body_end = ConvLayerT<T>::make(w1, 3 * s2, 3, outer, rng);
        m.skip = ConvLayerT<T>::make(3, 3 * s2, 5, outer, rng);
    } else {
        m.body_end = ConvLayerT<T>::make(w1, w1, 3, outer, rng);
        for (int s : detail::upsample_stages(spec.scale)) {
            m.upsample.push_back(ConvLayerT<T>::make(w1, w1 * s * s, 3, outer, rng));
            m.upsample_s.push_back(s);
        }
        m.tail = ConvLayerT<T>::make(w1, 3, 3, outer, rng);
    }
    return m;
}

using Model = ModelT<float>;

/// Emit a stderr note when the slimmed pathway width drops below the HR
/// representation floor of 3*S^2 channels.
inline void warn_narrow_pathway(const NetSpec& spec) {
    const int floor_w = 3 * spec.scale * spec.scale;
    if (spec.topology == Topology::wdsr && spec.w1() < floor_w)
        std::cerr << "wdsrkit: warning: pathway width " << spec.w1() << " is below the " << floor_w
                  << "-channel HR representation floor for scale " << spec.scale << "\n";
}

}  // namespace wdsrkit

#endif  // WDSRKIT_NETWORK_HPP_
