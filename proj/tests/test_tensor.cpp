// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <string_view>

#include "wdsrkit/tensor.hpp"

using namespace wdsrkit;

namespace {
Tensor leaf(Shape shape, std::vector<float> v) {
    auto t = Tensor::from(std::move(shape), std::move(v));
    t.set_requires_grad();
    return t;
}
}  // namespace

TEST_CASE("scalar chain rule", "[tensor]") {
    auto x = leaf({1}, {3.0f});
    auto y = add(mul(x, x), scale(x, 2.0f));  // x^2 + 2x
    backward(sum(y));
    REQUIRE(y.item() == Catch::Approx(15.0f));
    REQUIRE(x.grad()[0] == Catch::Approx(8.0f));  // 2x + 2
}

TEST_CASE("gradient accumulates when a tensor is used twice", "[tensor]") {
    auto x = leaf({2}, {1.0f, -2.0f});
    auto y = add(x, x);
    backward(sum(y));
    REQUIRE(x.grad()[0] == Catch::Approx(2.0f));
    REQUIRE(x.grad()[1] == Catch::Approx(2.0f));
}

TEST_CASE("backward demands a scalar", "[tensor]") {
    auto x = leaf({2}, {1.0f, 2.0f});
    auto y = scale(x, 2.0f);
    REQUIRE_THROWS_AS(backward(y), ShapeError);
}

TEST_CASE("backward twice on the same loss is an error", "[tensor]") {
    auto x = leaf({1}, {1.0f});
    auto loss = sum(scale(x, 3.0f));
    backward(loss);
    REQUIRE_THROWS_AS(backward(loss), Error);
}

TEST_CASE("backward on a scalar leaf seeds its own gradient", "[tensor]") {
    auto x = leaf({1}, {5.0f});
    backward(x);
    REQUIRE(x.grad()[0] == 1.0f);
}

TEST_CASE("NoGradGuard suppresses graph recording", "[tensor]") {
    auto x = leaf({2}, {1.0f, 2.0f});
    NoGradGuard ng;
    auto y = relu(x);
    REQUIRE_FALSE(y.requires_grad());
    REQUIRE_THROWS_AS(backward(sum(y)), Error);
}

TEST_CASE("ops on non-requires-grad inputs record nothing", "[tensor]") {
    auto x = Tensor::from({2}, {1.0f, 2.0f});
    auto y = scale(x, 2.0f);
    REQUIRE_FALSE(y.requires_grad());
    REQUIRE_THROWS_AS(backward(sum(y)), Error);
}

TEST_CASE("relu forward and subgradient at zero", "[tensor]") {
    auto x = leaf({4}, {-1.0f, 0.0f, 0.5f, 2.0f});
    auto y = relu(x);
    backward(sum(y));
    REQUIRE(y.data() == std::vector<float>{0.0f, 0.0f, 0.5f, 2.0f});
    REQUIRE(x.grad() == std::vector<float>{0.0f, 0.0f, 1.0f, 1.0f});
}

TEST_CASE("add_channel broadcasts a per-channel vector over NCHW", "[tensor]") {
    auto x = Tensor::zeros({1, 2, 2, 2});
    x.set_requires_grad();
    auto b = leaf({2}, {1.0f, -3.0f});
    auto y = add_channel(x, b);
    for (int i = 0; i < 4; ++i) {
        REQUIRE(y.data()[(size_t)i] == 1.0f);
        REQUIRE(y.data()[(size_t)(4 + i)] == -3.0f);
    }
    backward(sum(y));
    REQUIRE(b.grad() == std::vector<float>{4.0f, 4.0f});  // N*H*W elements each
    REQUIRE(x.grad() == std::vector<float>(8, 1.0f));
}

TEST_CASE("elementwise shape mismatches throw", "[tensor]") {
    auto a = Tensor::zeros({2, 3});
    auto b = Tensor::zeros({3, 2});
    REQUIRE_THROWS_AS(add(a, b), ShapeError);
    REQUIRE_THROWS_AS(mul(a, b), ShapeError);
    REQUIRE_THROWS_AS(sub(a, b), ShapeError);
}

TEST_CASE("sum uses a stable accumulator", "[tensor]") {
    std::vector<float> v(100000, 0.1f);
    auto x = Tensor::from({100000}, std::move(v));
    REQUIRE(sum(x).item() == Catch::Approx(10000.0).epsilon(1e-5));
}

TEST_CASE("tensor data length must match shape", "[tensor]") {
    REQUIRE_THROWS_AS(Tensor::from({2, 2}, {1.0f, 2.0f, 3.0f}), ShapeError);
}

TEST_CASE("audit_graph reports an op census with shapes", "[tensor]") {
    auto x = Tensor::from({1, 4, 2, 2}, std::vector<float>(16, 0.5f));
    x.set_requires_grad();
    auto y = relu(scale(x, 2.0f));
    auto nodes = audit_graph(y);
    int relus = 0, scales = 0;
    for (const auto& n : nodes) {
        if (std::string_view(n.op) == "relu") {
            ++relus;
            REQUIRE(n.shape == Shape{1, 4, 2, 2});
            REQUIRE(n.operand_shapes.size() == 1);
        }
        if (std::string_view(n.op) == "scale") ++scales;
    }
    REQUIRE(relus == 1);
    REQUIRE(scales == 1);
}

TEST_CASE("item on a non-scalar throws", "[tensor]") {
    auto x = Tensor::zeros({2});
    REQUIRE_THROWS_AS(x.item(), ShapeError);
}

TEST_CASE("detach cuts the graph", "[tensor]") {
    auto x = leaf({1}, {2.0f});
    auto y = scale(x, 3.0f).detach();
    REQUIRE_FALSE(y.requires_grad());
    auto z = scale(y, 1.0f);
    REQUIRE_THROWS_AS(backward(sum(z)), Error);
}

TEST_CASE("clear_grad resets accumulation between steps", "[tensor]") {
    auto x = leaf({1}, {1.0f});
    backward(sum(scale(x, 2.0f)));
    REQUIRE(x.grad()[0] == 2.0f);
    x.clear_grad();
    REQUIRE_FALSE(x.has_grad());
    backward(sum(scale(x, 5.0f)));
    REQUIRE(x.grad()[0] == 5.0f);
}

TEST_CASE("double instantiation coexists with float", "[tensor]") {
    auto x = TensorT<double>::from({2}, {1.5, -0.5});
    x.set_requires_grad();
    auto y = sum(mul(x, x));
    backward(y);
    REQUIRE(y.item() == Catch::Approx(2.5));
    REQUIRE(x.grad()[0] == Catch::Approx(3.0));
    REQUIRE(x.grad()[1] == Catch::Approx(-1.0));
}
