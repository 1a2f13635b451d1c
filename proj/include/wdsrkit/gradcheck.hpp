// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_GRADCHECK_HPP_
#define WDSRKIT_GRADCHECK_HPP_

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "wdsrkit/metrics.hpp"
#include "wdsrkit/network.hpp"

namespace wdsrkit {

struct GradCheck {
    std::string name;
    double max_rel_err = 0.0;
    int64_t n_checked = 0;
    bool pass = false;
};

/// Compares analytic gradients against 64-bit central finite differences.
/// `make_loss` must rebuild the scalar loss graph from the parameters'
/// current data every call. Relative error uses max(|a|, |n|, 1e-3) as the
/// denominator so near-zero gradient pairs are compared absolutely.
inline GradCheck check_gradients(const std::string& name, std::vector<TensorT<double>> params,
                                 const std::function<TensorT<double>()>& make_loss, double tol = 1e-3,
                                 double step = 1e-5) {
    std::vector<std::vector<double>> analytic;
    {
        for (auto& p : params) p.clear_grad();
        TensorT<double> loss = make_loss();
        backward(loss);
        for (const auto& p : params) analytic.push_back(p.has_grad() ? p.grad() : std::vector<double>(p.numel(), 0.0));
    }

    GradCheck r;
    r.name = name;
    NoGradGuard ng;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        auto& data = params[pi].data();
        for (size_t j = 0; j < data.size(); ++j) {
            const double x = data[j];
            const double h = step * std::max(1.0, std::abs(x));
            data[j] = x + h;
            const double lp = make_loss().item();
            data[j] = x - h;
            const double lm = make_loss().item();
            data[j] = x;
            const double numeric = (lp - lm) / (2.0 * h);
            const double a = analytic[pi][j];
            const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
            if (err > r.max_rel_err) r.max_rel_err = err;
            ++r.n_checked;
        }
    }
    r.pass = r.max_rel_err <= tol;
    return r;
}

namespace detail {

/// Values in +-[0.25, 1.25]: far enough from the ReLU and L1 kinks that a
/// 1e-5-scaled central difference never crosses them.
inline TensorT<double> away_from_zero(const Shape& shape, Rng& rng, bool requires_grad = true) {
    std::uniform_real_distribution<double> mag(0.25, 1.25);
    std::vector<double> v((size_t)numel_of(shape));
    for (auto& x : v) x = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
    auto t = TensorT<double>::from(shape, std::move(v));
    t.set_requires_grad(requires_grad);
    return t;
}

/// Scalar readout with a fixed random cotangent, so every output element
/// feeds the loss with a distinct weight.
inline TensorT<double> readout(const TensorT<double>& y, const TensorT<double>& cot) { return sum(mul(y, cot)); }

}  // namespace detail

/// Finite-difference coverage of every differentiable op and all three block
/// families, plus both full topologies, at tiny sizes.
inline std::vector<GradCheck> gradcheck_suite(std::ostream* report = nullptr) {
    std::vector<GradCheck> out;
    Rng rng(20260814);
    auto emit = [&](GradCheck c) {
        if (report)
            *report << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  max_rel_err=" << c.max_rel_err
                    << "  elements=" << c.n_checked << "\n";
        out.push_back(std::move(c));
    };
    using detail::away_from_zero;
    using detail::readout;

    {
        auto a = away_from_zero({2, 3, 4, 4}, rng), b = away_from_zero({2, 3, 4, 4}, rng);
        auto cot = away_from_zero({2, 3, 4, 4}, rng, false);
        emit(check_gradients("add", {a, b}, [&] { return readout(a + b, cot); }));
        emit(check_gradients("sub", {a, b}, [&] { return readout(a - b, cot); }));
        emit(check_gradients("mul", {a, b}, [&] { return readout(a * b, cot); }));
        emit(check_gradients("scale", {a}, [&] { return readout(scale(a, 1.7), cot); }));
        emit(check_gradients("add_scalar", {a}, [&] { return readout(add_scalar(a, 0.37), cot); }));
        emit(check_gradients("relu", {a}, [&] { return readout(relu(a), cot); }));
        emit(check_gradients("sum", {a}, [&] { return scale(sum(a), 0.83); }));
    }
    {
        auto x = away_from_zero({2, 4, 3, 3}, rng);
        auto b = away_from_zero({4}, rng);
        auto cot = away_from_zero({2, 4, 3, 3}, rng, false);
        emit(check_gradients("add_channel", {x, b}, [&] { return readout(add_channel(x, b), cot); }));
    }

    auto conv_case = [&](const char* name, Shape xs, int cout, int k) {
        auto x = away_from_zero(xs, rng);
        auto w = away_from_zero({cout, xs[1], k, k}, rng);
        auto b = away_from_zero({cout}, rng);
        auto cot = away_from_zero({xs[0], cout, xs[2], xs[3]}, rng, false);
        emit(check_gradients(name, {x, w, b}, [&] { return readout(conv2d(x, w, b), cot); }));
    };
    conv_case("conv2d_3x3", {2, 3, 5, 5}, 4, 3);
    conv_case("conv2d_1x1", {2, 5, 4, 4}, 3, 1);
    conv_case("conv2d_5x5", {1, 2, 6, 6}, 2, 5);

    {
        auto x = away_from_zero({2, 8, 3, 3}, rng);
        auto cot = away_from_zero({2, 2, 6, 6}, rng, false);
        emit(check_gradients("pixel_shuffle", {x}, [&] { return readout(pixel_shuffle(x, 2), cot); }));
    }
    {
        auto x = away_from_zero({2, 2, 6, 6}, rng);
        auto cot = away_from_zero({2, 8, 3, 3}, rng, false);
        emit(check_gradients("pixel_unshuffle", {x}, [&] { return readout(pixel_unshuffle(x, 2), cot); }));
    }

    {
        auto v = away_from_zero({4, 3, 3, 3}, rng);
        auto g = away_from_zero({4}, rng);
        auto x = away_from_zero({1, 3, 4, 4}, rng, false);
        auto b = TensorT<double>::zeros({4});
        auto cot = away_from_zero({1, 4, 4, 4}, rng, false);
        emit(check_gradients("weight_norm_effective", {v, g},
                             [&] { return readout(conv2d(x, weight_norm_effective(v, g), b), cot); }));
    }

    {
        auto x = away_from_zero({4, 3, 4, 4}, rng);
        BatchNormStateT<double> s(3);
        s.gamma = away_from_zero({3}, rng);
        s.beta = away_from_zero({3}, rng);
        auto cot = away_from_zero({4, 3, 4, 4}, rng, false);
        emit(check_gradients("batch_norm_train", {x, s.gamma, s.beta},
                             [&] { return readout(batch_norm_train(x, s), cot); }));
        {
            NoGradGuard ng;
            batch_norm_train(x, s);  // populate running statistics
        }
        s.mode = BNMode::infer;
        emit(check_gradients("batch_norm_infer", {x, s.gamma, s.beta},
                             [&] { return readout(batch_norm_infer(x, s), cot); }));
    }

    {
        auto base = away_from_zero({2, 3, 4, 4}, rng);
        auto offset = away_from_zero({2, 3, 4, 4}, rng, false);
        std::vector<double> pv(base.data());
        for (size_t i = 0; i < pv.size(); ++i) pv[i] += offset.data()[i] > 0 ? 0.4 : -0.4;
        auto pred = TensorT<double>::from(base.shape(), std::move(pv));
        pred.set_requires_grad(true);
        emit(check_gradients("l1_loss", {pred, base}, [&] { return l1_loss(pred, base); }));
    }

    auto block_case = [&](const std::string& name, const BlockSpec& spec, int h, int w) {
        auto block = build_block<double>(spec, rng);
        auto x = away_from_zero({2, spec.w1, h, w}, rng);
        auto cot = away_from_zero({2, spec.w1, h, w}, rng, false);
        std::vector<NamedParamT<double>> named;
        block.collect_params("b", named);
        std::vector<TensorT<double>> params{x};
        for (auto& p : named) params.push_back(p.tensor);
        emit(check_gradients(name, params, [&] { return readout(block.forward(x, true), cot); }));
    };
    block_case("block_vanilla", {Family::vanilla, 4, 1, 3, Norm::plain, 1.0, 0}, 4, 4);
    block_case("block_wdsr_a", {Family::wdsr_a, 4, 2, 3, Norm::plain, 1.0, 0}, 4, 4);
    block_case("block_wdsr_b", {Family::wdsr_b, 4, 2, 3, Norm::plain, 1.0, solve_wdsr_b_mid(4, 2, 3, 4)}, 4, 4);
    block_case("block_wdsr_a_weight_norm", {Family::wdsr_a, 4, 2, 3, Norm::weight, 1.0, 0}, 4, 4);
    block_case("block_wdsr_a_batch_norm", {Family::wdsr_a, 4, 2, 3, Norm::batch, 1.0, 0}, 4, 4);

    auto net_case = [&](const std::string& name, Topology topo, Norm norm) {
        NetSpec spec;
        spec.topology = topo;
        spec.scale = 2;
        spec.n_blocks = 1;
        spec.block = topo == Topology::wdsr ? BlockSpec{Family::wdsr_a, 4, 2, 3, norm, 1.0, 0}
                                            : BlockSpec{Family::vanilla, 4, 1, 3, norm, 1.0, 0};
        spec.rgb_mean = {0.4f, 0.5f, 0.6f};
        auto model = build_model<double>(spec, rng);
        auto x = away_from_zero({1, 3, 8, 8}, rng);
        auto cot = away_from_zero({1, 3, 16, 16}, rng, false);
        std::vector<NamedParamT<double>> named;
        model.collect_params(named);
        std::vector<TensorT<double>> params{x};
        for (auto& p : named) params.push_back(p.tensor);
        emit(check_gradients(name, params, [&] { return readout(model.forward(x, true), cot); }));
    };
    net_case("net_wdsr_plain", Topology::wdsr, Norm::plain);
    net_case("net_wdsr_weight_norm", Topology::wdsr, Norm::weight);
    net_case("net_wdsr_batch_norm", Topology::wdsr, Norm::batch);
    net_case("net_edsr_baseline", Topology::edsr_baseline, Norm::plain);

    return out;
}

}  // namespace wdsrkit

#endif  // WDSRKIT_GRADCHECK_HPP_
