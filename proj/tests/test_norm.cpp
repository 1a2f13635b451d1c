// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wdsrkit/norm.hpp"

using namespace wdsrkit;

namespace {

// Statistics oracle shared by the BN tests: plain two-pass mean and biased
// variance over one channel of an NCHW batch, in double.
struct ChannelStats {
    double mean = 0, var = 0;
};

ChannelStats channel_stats(const Tensor& x, int ch) {
    const int n = x.dim(0), c = x.dim(1);
    const int64_t plane = (int64_t)x.dim(2) * x.dim(3);
    const int64_t m = n * plane;
    double sum = 0;
    for (int b = 0; b < n; ++b)
        for (int64_t i = 0; i < plane; ++i) sum += x.data()[(size_t)(((int64_t)b * c + ch) * plane + i)];
    ChannelStats s;
    s.mean = sum / (double)m;
    double sq = 0;
    for (int b = 0; b < n; ++b)
        for (int64_t i = 0; i < plane; ++i) {
            const double d = x.data()[(size_t)(((int64_t)b * c + ch) * plane + i)] - s.mean;
            sq += d * d;
        }
    s.var = sq / (double)m;
    return s;
}

}  // namespace

TEST_CASE("weight norm rescales each filter to magnitude g", "[norm]") {
    auto v = Tensor::from({1, 2, 1, 1}, {3.0f, 4.0f});
    auto g = Tensor::from({1}, {10.0f});
    auto w = weight_norm_effective(v, g);
    REQUIRE(w.data()[0] == Catch::Approx(6.0f));
    REQUIRE(w.data()[1] == Catch::Approx(8.0f));
}

TEST_CASE("weight norm with g = ||v|| reproduces v", "[norm]") {
    Rng rng(21);
    auto v = Tensor::uniform({4, 3, 3, 3}, -1.0f, 1.0f, rng);
    std::vector<float> gv(4);
    const int64_t fan = 27;
    for (int c = 0; c < 4; ++c) {
        double sq = 0;
        for (int64_t i = 0; i < fan; ++i) {
            const double x = v.data()[(size_t)(c * fan + i)];
            sq += x * x;
        }
        gv[(size_t)c] = (float)std::sqrt(sq);
    }
    auto w = weight_norm_effective(v, Tensor::from({4}, gv));
    for (size_t i = 0; i < w.data().size(); ++i)
        REQUIRE(w.data()[i] == Catch::Approx(v.data()[i]).margin(1e-6));
}

TEST_CASE("weight norm invariant: effective filter norms equal g", "[norm]") {
    Rng rng(22);
    auto v = Tensor::uniform({8, 4, 3, 3}, -2.0f, 2.0f, rng);
    auto g = Tensor::uniform({8}, 0.5f, 3.0f, rng);
    auto w = weight_norm_effective(v, g);
    const int64_t fan = 36;
    for (int c = 0; c < 8; ++c) {
        double sq = 0;
        for (int64_t i = 0; i < fan; ++i) {
            const double x = w.data()[(size_t)(c * fan + i)];
            sq += x * x;
        }
        REQUIRE(std::abs(std::sqrt(sq) - g.data()[(size_t)c]) <= 1e-5);
    }
}

TEST_CASE("weight norm rejects a zero-norm filter", "[norm]") {
    auto v = Tensor::zeros({2, 1, 3, 3});
    auto g = Tensor::filled({2}, 1.0f);
    REQUIRE_THROWS_AS(weight_norm_effective(v, g), NumericError);
}

TEST_CASE("weight norm gradient is orthogonal to the direction", "[norm]") {
    // With fan-in 1 the effective weight g*sign(v) does not depend on |v|,
    // so dL/dv must vanish while dL/dg is sign(v).
    auto v = Tensor::from({1, 1, 1, 1}, {2.0f}, true);
    auto g = Tensor::from({1}, {3.0f}, true);
    backward(sum(weight_norm_effective(v, g)));
    REQUIRE(v.grad()[0] == Catch::Approx(0.0f).margin(1e-7));
    REQUIRE(g.grad()[0] == Catch::Approx(1.0f));
}

TEST_CASE("train-mode BN standardizes each channel", "[norm]") {
    Rng rng(23);
    auto x = Tensor::uniform({4, 3, 6, 6}, -5.0f, 3.0f, rng);
    BatchNormState s(3);
    auto y = Tensor(batch_norm_train(x, s));
    for (int ch = 0; ch < 3; ++ch) {
        auto st = channel_stats(y, ch);
        REQUIRE(st.mean == Catch::Approx(0.0).margin(1e-5));
        REQUIRE(st.var == Catch::Approx(1.0).epsilon(1e-3));  // epsilon shrinks it slightly
    }
}

TEST_CASE("BN uses biased batch variance and the stated EMA update", "[norm]") {
    Rng rng(24);
    auto x = Tensor::uniform({2, 2, 4, 4}, 0.0f, 8.0f, rng);
    BatchNormState s(2);
    batch_norm_train(x, s);
    REQUIRE(s.initialized);
    for (int ch = 0; ch < 2; ++ch) {
        auto st = channel_stats(x, ch);
        // Fresh storage starts at mean 0, var 1; one update folds in 0.1 of
        // the batch statistic.
        REQUIRE(s.running_mean[(size_t)ch] == Catch::Approx(0.9 * 0.0 + 0.1 * st.mean).margin(1e-4));
        REQUIRE(s.running_var[(size_t)ch] == Catch::Approx(0.9 * 1.0 + 0.1 * st.var).margin(1e-4));
    }
    // Second update compounds.
    auto prev_m = s.running_mean;
    auto prev_v = s.running_var;
    Rng rng2(25);
    auto x2 = Tensor::uniform({2, 2, 4, 4}, -3.0f, 1.0f, rng2);
    batch_norm_train(x2, s);
    for (int ch = 0; ch < 2; ++ch) {
        auto st = channel_stats(x2, ch);
        REQUIRE(s.running_mean[(size_t)ch] ==
                Catch::Approx(0.9 * prev_m[(size_t)ch] + 0.1 * st.mean).margin(1e-4));
        REQUIRE(s.running_var[(size_t)ch] ==
                Catch::Approx(0.9 * prev_v[(size_t)ch] + 0.1 * st.var).margin(1e-4));
    }
}

TEST_CASE("BN train demands at least two samples per channel", "[norm]") {
    BatchNormState s(3);
    REQUIRE_THROWS_AS(batch_norm_train(Tensor::zeros({1, 3, 1, 1}), s), ShapeError);
}

TEST_CASE("BN rejects mode misuse and uninitialized inference", "[norm]") {
    BatchNormState s(2);
    auto x = Tensor::zeros({2, 2, 2, 2});
    s.mode = BNMode::infer;
    REQUIRE_THROWS_AS(batch_norm_train(x, s), ConfigError);
    REQUIRE_THROWS_AS(batch_norm_infer(x, s), ConfigError);  // never initialized
    s.mode = BNMode::train;
    REQUIRE_THROWS_AS(batch_norm_infer(x, s), ConfigError);
    REQUIRE_THROWS_AS(batch_norm_train(Tensor::zeros({2, 3, 2, 2}), s), ShapeError);
}

TEST_CASE("infer-mode BN is pure and repeatable", "[norm]") {
    Rng rng(26);
    BatchNormState s(2);
    batch_norm_train(Tensor::uniform({2, 2, 4, 4}, -1.0f, 1.0f, rng), s);
    s.mode = BNMode::infer;
    auto mean_before = s.running_mean;
    auto var_before = s.running_var;
    auto x = Tensor::uniform({1, 2, 3, 3}, -1.0f, 1.0f, rng);
    auto y1 = Tensor(batch_norm_infer(x, s));
    auto y2 = Tensor(batch_norm_infer(x, s));
    REQUIRE(y1.data() == y2.data());  // bit-identical
    REQUIRE(s.running_mean == mean_before);
    REQUIRE(s.running_var == var_before);
    // And the map is the expected affine transform of the running stats.
    for (int ch = 0; ch < 2; ++ch) {
        const double istd = 1.0 / std::sqrt((double)var_before[(size_t)ch] + 1e-5);
        for (int i = 0; i < 9; ++i) {
            const size_t off = (size_t)(ch * 9 + i);
            const double expect = ((double)x.data()[off] - mean_before[(size_t)ch]) * istd;
            REQUIRE(y1.data()[off] == Catch::Approx(expect).margin(1e-5));
        }
    }
}

TEST_CASE("running stats converge on an iid stream and align train with infer", "[norm]") {
    // Channel 0 ~ U(-1,3): mean 1, var 4/3. Channel 1 ~ U(-1,1): mean 0, var 1/3.
    Rng rng(27);
    BatchNormState s(2);
    auto draw = [&rng] {
        auto x = Tensor::uniform({4, 2, 16, 16}, -1.0f, 1.0f, rng);
        const int64_t plane = 256;
        for (int b = 0; b < 4; ++b)
            for (int64_t i = 0; i < plane; ++i) {
                auto& v = x.data()[(size_t)((int64_t)b * 2 * plane + i)];
                v = 2.0f * v + 1.0f;
            }
        return x;
    };
    for (int it = 0; it < 200; ++it) batch_norm_train(draw(), s);
    REQUIRE(s.running_mean[0] == Catch::Approx(1.0).margin(0.1));
    REQUIRE(s.running_var[0] == Catch::Approx(4.0 / 3.0).epsilon(0.1));
    REQUIRE(s.running_mean[1] == Catch::Approx(0.0).margin(0.1));
    REQUIRE(s.running_var[1] == Catch::Approx(1.0 / 3.0).epsilon(0.1));

    auto x = draw();
    auto y_train = Tensor(batch_norm_train(x, s));
    s.mode = BNMode::infer;
    auto y_infer = Tensor(batch_norm_infer(x, s));
    double mad = 0;
    for (size_t i = 0; i < y_train.data().size(); ++i)
        mad += std::abs((double)y_train.data()[i] - (double)y_infer.data()[i]);
    mad /= (double)y_train.data().size();
    REQUIRE(mad < 0.1);  // same map up to batch-vs-running statistical noise
}

TEST_CASE("gamma and beta apply after standardization", "[norm]") {
    Rng rng(28);
    auto x = Tensor::uniform({2, 1, 8, 8}, -4.0f, 4.0f, rng);
    BatchNormState s(1);
    s.gamma.data()[0] = 2.0f;
    s.beta.data()[0] = 3.0f;
    auto y = Tensor(batch_norm_train(x, s));
    auto st = channel_stats(y, 0);
    REQUIRE(st.mean == Catch::Approx(3.0).margin(1e-4));
    REQUIRE(std::sqrt(st.var) == Catch::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("BN backward reduces per channel for gamma and beta", "[norm]") {
    Rng rng(29);
    auto x = Tensor::uniform({2, 2, 3, 3}, -1.0f, 1.0f, rng);
    x.set_requires_grad();
    BatchNormState s(2);
    auto y = batch_norm_train(x, s);
    backward(sum(y));
    // sum(y) differentiates to: dbeta = m per channel, dgamma = sum(xhat) ~ 0,
    // dx ~ 0 (shifting any input cannot change a standardized batch's sum).
    const float m = 2 * 3 * 3;
    REQUIRE(s.beta.grad()[0] == Catch::Approx(m));
    REQUIRE(s.beta.grad()[1] == Catch::Approx(m));
    REQUIRE(s.gamma.grad()[0] == Catch::Approx(0.0f).margin(1e-4));
    for (float gx : x.grad()) REQUIRE(gx == Catch::Approx(0.0f).margin(1e-4));
}
