// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_BUDGET_HPP_
#define WDSRKIT_BUDGET_HPP_

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "wdsrkit/network.hpp"

namespace wdsrkit {

struct LayerCost {
    std::string name;
    int cin, cout, k;
    int spatial_scale;
    int64_t weights;
    int64_t bias;
    int64_t norm_params;  // g under weight norm; gamma+beta under batch norm
    int64_t mult_adds;    // weights * output pixels at the layer's resolution
};

struct BudgetReport {
    int in_h = 0, in_w = 0;
    std::vector<LayerCost> layers;
    int64_t total_weights = 0, total_bias = 0, total_norm = 0, total_mult_adds = 0;
    int64_t block_weights = 0;           // one block's weight count
    int64_t baseline_block_weights = 0;  // 2*k^2*w1_baseline^2, when a baseline is declared
    double parity_pct = 0.0;             // |block - baseline| / baseline * 100
    bool has_parity = false;

    int64_t total_params() const { return total_weights + total_bias + total_norm; }
};

inline BudgetReport budget_report(const NetSpec& spec, int in_h, int in_w, int w1_baseline = 0) {
    if (in_h < 1 || in_w < 1) throw ConfigError("budget input size must be at least 1x1");
    BudgetReport r;
    r.in_h = in_h;
    r.in_w = in_w;
    for (const auto& lp : plan_net(spec)) {
        LayerCost c;
        c.name = lp.name;
        c.cin = lp.cin;
        c.cout = lp.cout;
        c.k = lp.k;
        c.spatial_scale = lp.spatial_scale;
        c.weights = (int64_t)lp.cin * lp.cout * lp.k * lp.k;
        c.bias = lp.cout;
        c.norm_params = lp.norm == Norm::weight ? lp.cout : lp.norm == Norm::batch ? 2LL * lp.cout : 0;
        c.mult_adds = c.weights * ((int64_t)in_h * lp.spatial_scale) * ((int64_t)in_w * lp.spatial_scale);
        r.total_weights += c.weights;
        r.total_bias += c.bias;
        r.total_norm += c.norm_params;
        r.total_mult_adds += c.mult_adds;
        r.layers.push_back(std::move(c));
    }
    r.block_weights = block_weight_count(spec.block);
    if (w1_baseline > 0 && spec.block.family != Family::vanilla) {
        const int k = spec.block.k;
        r.baseline_block_weights = 2LL * k * k * w1_baseline * w1_baseline;
        r.parity_pct = 100.0 * std::abs((double)r.block_weights - (double)r.baseline_block_weights) /
                       (double)r.baseline_block_weights;
        r.has_parity = true;
    }
    return r;
}

inline void print_budget(std::ostream& os, const BudgetReport& r) {
    os << std::left << std::setw(18) << "layer" << std::right << std::setw(6) << "cin" << std::setw(6) << "cout"
       << std::setw(4) << "k" << std::setw(7) << "scale" << std::setw(12) << "weights" << std::setw(8) << "bias"
       << std::setw(8) << "norm" << std::setw(16) << "mult-adds" << "\n";
    for (const auto& c : r.layers)
        os << std::left << std::setw(18) << c.name << std::right << std::setw(6) << c.cin << std::setw(6) << c.cout
           << std::setw(4) << c.k << std::setw(6) << c.spatial_scale << "x" << std::setw(12) << c.weights
           << std::setw(8) << c.bias << std::setw(8) << c.norm_params << std::setw(16) << c.mult_adds << "\n";
    os << "input " << r.in_h << "x" << r.in_w << "  total weights " << r.total_weights << "  bias " << r.total_bias
       << "  norm " << r.total_norm << "  params " << r.total_params() << "  mult-adds " << r.total_mult_adds
       << "\n";
    if (r.has_parity)
        os << "block weights " << r.block_weights << " vs matched-baseline block " << r.baseline_block_weights
           << "  parity " << std::fixed << std::setprecision(2) << r.parity_pct << "%\n";
}

}  // namespace wdsrkit

#endif  // WDSRKIT_BUDGET_HPP_
