// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_TENSOR_HPP_
#define WDSRKIT_TENSOR_HPP_

#include <functional>
#include <memory>
#include <unordered_set>
#include <utility>

#include "wdsrkit/common.hpp"

namespace wdsrkit {

using Shape = std::vector<int>;

inline int64_t numel_of(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

namespace detail {

/// One node of the dynamically recorded computation graph. Leaves have no
/// op; recorded ops keep their operands alive through `parents` and undo
/// themselves through `backward_fn`, which accumulates into operand grads.
template <typename T>
struct NodeT {
    Shape shape;
    std::vector<T> data;
    bool requires_grad = false;
    std::vector<T> grad;  // empty until first accumulation

    const char* op = nullptr;  // null for leaves
    std::vector<std::shared_ptr<NodeT>> parents;
    std::function<void(NodeT&)> backward_fn;
    bool backward_done = false;

    void accum_grad_init() {
        if (grad.empty()) grad.assign(data.size(), T(0));
    }
};

inline thread_local int no_grad_depth = 0;

}  // namespace detail

inline bool grad_enabled() { return detail::no_grad_depth == 0; }

/// Disables tape recording for its scope (inference / evaluation paths).
struct NoGradGuard {
    NoGradGuard() { ++detail::no_grad_depth; }
    ~NoGradGuard() { --detail::no_grad_depth; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
};

/// Dense row-major tensor of T with NCHW activation layout and
/// (Cout,Cin,Kh,Kw) kernel layout. Cheap shared handle; immutable after
/// creation except for gradient accumulation.
template <typename T>
class TensorT {
  public:
    using Node = detail::NodeT<T>;

    TensorT() = default;
    explicit TensorT(std::shared_ptr<Node> n) : node_(std::move(n)) {}

    static TensorT zeros(Shape shape, bool requires_grad = false) {
        return filled(std::move(shape), T(0), requires_grad);
    }

    static TensorT filled(Shape shape, T value, bool requires_grad = false) {
        auto n = std::make_shared<Node>();
        n->data.assign((size_t)numel_of(shape), value);
        n->shape = std::move(shape);
        n->requires_grad = requires_grad;
        return TensorT(std::move(n));
    }

    static TensorT from(Shape shape, std::vector<T> values, bool requires_grad = false) {
        if ((int64_t)values.size() != numel_of(shape))
            throw ShapeError("tensor data length " + std::to_string(values.size()) +
                             " does not match shape " + shape_str(shape));
        auto n = std::make_shared<Node>();
        n->shape = std::move(shape);
        n->data = std::move(values);
        n->requires_grad = requires_grad;
        return TensorT(std::move(n));
    }

    static TensorT uniform(Shape shape, T lo, T hi, Rng& rng, bool requires_grad = false) {
        auto n = std::make_shared<Node>();
        n->data.resize((size_t)numel_of(shape));
        std::uniform_real_distribution<double> dist((double)lo, (double)hi);
        for (T& x : n->data) x = (T)dist(rng);
        n->shape = std::move(shape);
        n->requires_grad = requires_grad;
        return TensorT(std::move(n));
    }

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    int dim(int i) const { return node_->shape[(size_t)i]; }
    int ndim() const { return (int)node_->shape.size(); }
    int64_t numel() const { return (int64_t)node_->data.size(); }

    std::vector<T>& data() { return node_->data; }
    const std::vector<T>& data() const { return node_->data; }

    T at(std::initializer_list<int> idx) const {
        int64_t off = 0;
        auto it = idx.begin();
        for (size_t d = 0; d < node_->shape.size(); ++d, ++it)
            off = off * node_->shape[d] + *it;
        return node_->data[(size_t)off];
    }
    T item() const {
        if (numel() != 1) throw ShapeError("item() on non-scalar tensor " + shape_str(shape()));
        return node_->data[0];
    }

    TensorT& set_requires_grad(bool rg = true) {
        node_->requires_grad = rg;
        return *this;
    }
    bool requires_grad() const { return node_->requires_grad; }

    bool has_grad() const { return !node_->grad.empty(); }
    const std::vector<T>& grad() const {
        if (node_->grad.empty()) throw Error("tensor has no gradient (backward not run?)");
        return node_->grad;
    }
    void clear_grad() { node_->grad.clear(); }

    /// Value copy detached from the graph.
    TensorT detach() const {
        auto n = std::make_shared<Node>();
        n->shape = node_->shape;
        n->data = node_->data;
        return TensorT(std::move(n));
    }

    const char* op() const { return node_->op; }
    const std::shared_ptr<Node>& node() const { return node_; }

  private:
    std::shared_ptr<Node> node_;
};

using Tensor = TensorT<float>;

namespace detail {

/// Records a new op node. `backward` receives the result node and must
/// accumulate into the grads of parents that require them.
template <typename T, typename F>
TensorT<T> make_op(const char* name, Shape out_shape, std::vector<T>&& out_data,
                   std::vector<TensorT<T>> inputs, F&& backward) {
    auto n = std::make_shared<NodeT<T>>();
    n->shape = std::move(out_shape);
    n->data = std::move(out_data);
    bool rg = false;
    if (grad_enabled()) {
        for (const auto& in : inputs) rg = rg || in.requires_grad();
    }
    if (rg) {
        n->requires_grad = true;
        n->op = name;
        n->parents.reserve(inputs.size());
        for (auto& in : inputs) n->parents.push_back(in.node());
        n->backward_fn = std::forward<F>(backward);
    }
    return TensorT<T>(std::move(n));
}

}  // namespace detail

/// Runs reverse-mode accumulation from a scalar loss. Every reachable leaf
/// with requires_grad ends up holding d(loss)/d(leaf); gradients from
/// multiple consumers sum. A second call on the same loss is an error.
template <typename T>
void backward(const TensorT<T>& loss) {
    auto root = loss.node();
    if (numel_of(root->shape) != 1)
        throw ShapeError("backward: loss must be scalar, got " + shape_str(root->shape));
    if (!root->op && !root->requires_grad)
        throw Error("backward: tensor is detached from any graph");
    if (root->backward_done)
        throw Error("backward: already called on this loss; rebuild the graph first");

    using Node = detail::NodeT<T>;
    // Iterative post-order DFS: children (parents in tape terms) first.
    std::vector<Node*> topo;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, size_t>> stack;
    stack.emplace_back(root.get(), 0);
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            topo.push_back(node);
            stack.pop_back();
        }
    }

    root->accum_grad_init();
    root->grad[0] = T(1);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        Node* n = *it;
        if (n->op && n->requires_grad && !n->grad.empty()) n->backward_fn(*n);
    }
    root->backward_done = true;
}

// ---------------------------------------------------------------------------
// Elementwise ops
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void check_same_shape(const char* op, const TensorT<T>& a, const TensorT<T>& b) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

// True when b broadcasts over a as a per-channel (C) vector.
template <typename T>
bool channel_broadcastable(const TensorT<T>& a, const TensorT<T>& b) {
    return a.ndim() == 4 && b.ndim() == 1 && b.dim(0) == a.dim(1);
}

}  // namespace detail

/// x (N,C,H,W) plus per-channel vector b (C). Backward sum-reduces the
/// broadcast axes into b's grad.
template <typename T>
TensorT<T> add_channel(const TensorT<T>& x, const TensorT<T>& b) {
    if (!detail::channel_broadcastable(x, b))
        throw ShapeError("add: cannot broadcast " + shape_str(b.shape()) + " over " +
                         shape_str(x.shape()));
    const int N = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
    std::vector<T> out(x.data());
    const auto& bv = b.data();
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            T* o = out.data() + ((int64_t)n * C + c) * HW;
            const T bc = bv[(size_t)c];
            for (int i = 0; i < HW; ++i) o[i] += bc;
        }
    auto xn = x.node(), bn = b.node();
    return detail::make_op<T>("add_channel", x.shape(), std::move(out), {x, b},
                              [xn, bn, N, C, HW](detail::NodeT<T>& node) {
                                  const auto& dy = node.grad;
                                  if (xn->requires_grad) {
                                      xn->accum_grad_init();
                                      for (size_t i = 0; i < dy.size(); ++i) xn->grad[i] += dy[i];
                                  }
                                  if (bn->requires_grad) {
                                      bn->accum_grad_init();
                                      for (int n = 0; n < N; ++n)
                                          for (int c = 0; c < C; ++c) {
                                              const T* g = dy.data() + ((int64_t)n * C + c) * HW;
                                              double s = 0;
                                              for (int i = 0; i < HW; ++i) s += (double)g[i];
                                              bn->grad[(size_t)c] += (T)s;
                                          }
                                  }
                              });
}

template <typename T>
TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b) {
    if (detail::channel_broadcastable(a, b)) return add_channel(a, b);
    detail::check_same_shape("add", a, b);
    std::vector<T> out(a.data());
    const auto& bd = b.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] += bd[i];
    auto an = a.node(), bn = b.node();
    return detail::make_op<T>("add", a.shape(), std::move(out), {a, b},
                              [an, bn](detail::NodeT<T>& node) {
                                  const auto& dy = node.grad;
                                  for (auto& p : {an, bn})
                                      if (p->requires_grad) {
                                          p->accum_grad_init();
                                          for (size_t i = 0; i < dy.size(); ++i) p->grad[i] += dy[i];
                                      }
                              });
}

template <typename T>
TensorT<T> sub(const TensorT<T>& a, const TensorT<T>& b) {
    detail::check_same_shape("sub", a, b);
    std::vector<T> out(a.data());
    const auto& bd = b.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] -= bd[i];
    auto an = a.node(), bn = b.node();
    return detail::make_op<T>("sub", a.shape(), std::move(out), {a, b},
                              [an, bn](detail::NodeT<T>& node) {
                                  const auto& dy = node.grad;
                                  if (an->requires_grad) {
                                      an->accum_grad_init();
                                      for (size_t i = 0; i < dy.size(); ++i) an->grad[i] += dy[i];
                                  }
                                  if (bn->requires_grad) {
                                      bn->accum_grad_init();
                                      for (size_t i = 0; i < dy.size(); ++i) bn->grad[i] -= dy[i];
                                  }
                              });
}

template <typename T>
TensorT<T> mul(const TensorT<T>& a, const TensorT<T>& b) {
    detail::check_same_shape("mul", a, b);
    std::vector<T> out(a.data());
    const auto& bd = b.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] *= bd[i];
    auto an = a.node(), bn = b.node();
    return detail::make_op<T>("mul", a.shape(), std::move(out), {a, b},
                              [an, bn](detail::NodeT<T>& node) {
                                  const auto& dy = node.grad;
                                  if (an->requires_grad) {
                                      an->accum_grad_init();
                                      for (size_t i = 0; i < dy.size(); ++i)
                                          an->grad[i] += dy[i] * bn->data[i];
                                  }
                                  if (bn->requires_grad) {
                                      bn->accum_grad_init();
                                      for (size_t i = 0; i < dy.size(); ++i)
                                          bn->grad[i] += dy[i] * an->data[i];
                                  }
                              });
}

template <typename T>
TensorT<T> scale(const TensorT<T>& x, T s) {
    std::vector<T> out(x.data());
    for (T& v : out) v *= s;
    auto xn = x.node();
    return detail::make_op<T>("scale", x.shape(), std::move(out), {x},
                              [xn, s](detail::NodeT<T>& node) {
                                  if (!xn->requires_grad) return;
                                  xn->accum_grad_init();
                                  const auto& dy = node.grad;
                                  for (size_t i = 0; i < dy.size(); ++i) xn->grad[i] += s * dy[i];
                              });
}

template <typename T>
TensorT<T> add_scalar(const TensorT<T>& x, T s) {
    std::vector<T> out(x.data());
    for (T& v : out) v += s;
    auto xn = x.node();
    return detail::make_op<T>("add_scalar", x.shape(), std::move(out), {x},
                              [xn](detail::NodeT<T>& node) {
                                  if (!xn->requires_grad) return;
                                  xn->accum_grad_init();
                                  const auto& dy = node.grad;
                                  for (size_t i = 0; i < dy.size(); ++i) xn->grad[i] += dy[i];
                              });
}

/// max(x, 0). Subgradient at exactly 0 is 0.
template <typename T>
TensorT<T> relu(const TensorT<T>& x) {
    std::vector<T> out(x.data());
    for (T& v : out) v = v > T(0) ? v : T(0);
    auto xn = x.node();
    return detail::make_op<T>("relu", x.shape(), std::move(out), {x},
                              [xn](detail::NodeT<T>& node) {
                                  if (!xn->requires_grad) return;
                                  xn->accum_grad_init();
                                  const auto& dy = node.grad;
                                  const auto& xd = xn->data;
                                  for (size_t i = 0; i < dy.size(); ++i)
                                      if (xd[i] > T(0)) xn->grad[i] += dy[i];
                              });
}

/// Sum over all elements, accumulated in double. Result shape (1).
template <typename T>
TensorT<T> sum(const TensorT<T>& x) {
    double s = 0;
    for (T v : x.data()) s += (double)v;
    auto xn = x.node();
    return detail::make_op<T>("sum", Shape{1}, std::vector<T>{(T)s}, {x},
                              [xn](detail::NodeT<T>& node) {
                                  if (!xn->requires_grad) return;
                                  xn->accum_grad_init();
                                  const T g = node.grad[0];
                                  for (auto& v : xn->grad) v += g;
                              });
}

template <typename T>
TensorT<T> operator+(const TensorT<T>& a, const TensorT<T>& b) { return add(a, b); }
template <typename T>
TensorT<T> operator-(const TensorT<T>& a, const TensorT<T>& b) { return sub(a, b); }
template <typename T>
TensorT<T> operator*(const TensorT<T>& a, const TensorT<T>& b) { return mul(a, b); }
template <typename T>
TensorT<T> operator*(T s, const TensorT<T>& x) { return scale(x, s); }
template <typename T>
TensorT<T> operator*(const TensorT<T>& x, T s) { return scale(x, s); }

// ---------------------------------------------------------------------------
// Graph inspection (op census, resolution audits)
// ---------------------------------------------------------------------------

struct GraphNodeInfo {
    const char* op;
    Shape shape;
    std::vector<Shape> operand_shapes;
};

/// Collects every recorded op reachable from `out`, operands before
/// consumers. Leaves are not reported.
template <typename T>
std::vector<GraphNodeInfo> audit_graph(const TensorT<T>& out) {
    using Node = detail::NodeT<T>;
    std::vector<GraphNodeInfo> info;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, size_t>> stack;
    stack.emplace_back(out.node().get(), 0);
    visited.insert(out.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            if (node->op) {
                GraphNodeInfo gi{node->op, node->shape, {}};
                for (auto& p : node->parents) gi.operand_shapes.push_back(p->shape);
                info.push_back(std::move(gi));
            }
            stack.pop_back();
        }
    }
    return info;
}

}  // namespace wdsrkit

#endif  // WDSRKIT_TENSOR_HPP_
