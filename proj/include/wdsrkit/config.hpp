// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_CONFIG_HPP_
#define WDSRKIT_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "wdsrkit/adam.hpp"
#include "wdsrkit/network.hpp"

namespace wdsrkit {

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
    }
}

inline int64_t to_i64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int64_t x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
    }
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    }
}

}  // namespace detail

/// Plain-text key=value run configuration. Unknown keys error so typos never
/// pass silently; the echoed form re-parses to an equal config.
struct RunConfig {
    std::string net_topology = "wdsr";
    int net_scale = 2;
    int net_blocks = 1;
    std::string net_family = "wdsr-a";
    int net_width = 0;           // identity-pathway width; 0 derives it from baseline_width
    int net_baseline_width = 0;  // budget-class width; 0 means none declared
    int net_expansion = 1;
    int net_kernel = 3;
    std::string net_normalization = "plain";
    double net_residual_scale = 1.0;

    double train_lr = 0.0;  // 0 = pick by normalization: 1e-3 weight-norm, 1e-4 otherwise
    int64_t train_lr_halving_period = 200000;
    int train_batch_size = 16;
    int train_patch_size = 96;  // HR-side square patch
    int64_t train_steps = 5000;
    uint64_t train_seed = 1;
    int64_t train_val_interval = 1000;
    int64_t train_checkpoint_interval = 0;  // 0 = final checkpoint only
    double train_adam_beta1 = 0.9;
    double train_adam_beta2 = 0.999;
    double train_adam_eps = 1e-8;
    double train_bn_momentum = 0.1;
    double train_bn_eps = 1e-5;

    std::string data_dir;
    int data_val_count = 0;  // validation images split off by prepare; 0 = one tenth, at least 1

    int eval_shave = 0;  // border pixels excluded from PSNR; 0 = score everything

    std::string budget_input = "48x48";

    bool operator==(const RunConfig&) const = default;

    void set(const std::string& key, const std::string& value) {
        using detail::to_double;
        using detail::to_i64;
        using detail::to_int;
        if (key == "net.topology") net_topology = value;
        else if (key == "net.scale") net_scale = to_int(key, value);
        else if (key == "net.blocks") net_blocks = to_int(key, value);
        else if (key == "net.family") net_family = value;
        else if (key == "net.width") net_width = to_int(key, value);
        else if (key == "net.baseline_width") net_baseline_width = to_int(key, value);
        else if (key == "net.expansion") net_expansion = to_int(key, value);
        else if (key == "net.kernel") net_kernel = to_int(key, value);
        else if (key == "net.normalization") net_normalization = value;
        else if (key == "net.residual_scale") net_residual_scale = to_double(key, value);
        else if (key == "train.lr") train_lr = to_double(key, value);
        else if (key == "train.lr_halving_period") train_lr_halving_period = to_i64(key, value);
        else if (key == "train.batch_size") train_batch_size = to_int(key, value);
        else if (key == "train.patch_size") train_patch_size = to_int(key, value);
        else if (key == "train.steps") train_steps = to_i64(key, value);
        else if (key == "train.seed") train_seed = (uint64_t)to_i64(key, value);
        else if (key == "train.val_interval") train_val_interval = to_i64(key, value);
        else if (key == "train.checkpoint_interval") train_checkpoint_interval = to_i64(key, value);
        else if (key == "train.adam_beta1") train_adam_beta1 = to_double(key, value);
        else if (key == "train.adam_beta2") train_adam_beta2 = to_double(key, value);
        else if (key == "train.adam_eps") train_adam_eps = to_double(key, value);
        else if (key == "train.bn_momentum") train_bn_momentum = to_double(key, value);
        else if (key == "train.bn_eps") train_bn_eps = to_double(key, value);
        else if (key == "data.dir") data_dir = value;
        else if (key == "data.val_count") data_val_count = to_int(key, value);
        else if (key == "eval.shave") eval_shave = to_int(key, value);
        else if (key == "budget.input") budget_input = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }

    void apply_line(const std::string& raw, const std::string& where) {
        std::string line = raw;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) return;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + line + "'");
        set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }

    void load_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open config file '" + path + "'");
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) apply_line(line, path + ":" + std::to_string(++lineno));
    }

    std::string echo() const {
        std::ostringstream os;
        os.precision(17);
        os << "net.topology=" << net_topology << "\n";
        os << "net.scale=" << net_scale << "\n";
        os << "net.blocks=" << net_blocks << "\n";
        os << "net.family=" << net_family << "\n";
        os << "net.width=" << net_width << "\n";
        os << "net.baseline_width=" << net_baseline_width << "\n";
        os << "net.expansion=" << net_expansion << "\n";
        os << "net.kernel=" << net_kernel << "\n";
        os << "net.normalization=" << net_normalization << "\n";
        os << "net.residual_scale=" << net_residual_scale << "\n";
        os << "train.lr=" << train_lr << "\n";
        os << "train.lr_halving_period=" << train_lr_halving_period << "\n";
        os << "train.batch_size=" << train_batch_size << "\n";
        os << "train.patch_size=" << train_patch_size << "\n";
        os << "train.steps=" << train_steps << "\n";
        os << "train.seed=" << train_seed << "\n";
        os << "train.val_interval=" << train_val_interval << "\n";
        os << "train.checkpoint_interval=" << train_checkpoint_interval << "\n";
        os << "train.adam_beta1=" << train_adam_beta1 << "\n";
        os << "train.adam_beta2=" << train_adam_beta2 << "\n";
        os << "train.adam_eps=" << train_adam_eps << "\n";
        os << "train.bn_momentum=" << train_bn_momentum << "\n";
        os << "train.bn_eps=" << train_bn_eps << "\n";
        os << "data.dir=" << data_dir << "\n";
        os << "data.val_count=" << data_val_count << "\n";
        os << "eval.shave=" << eval_shave << "\n";
        os << "budget.input=" << budget_input << "\n";
        return os.str();
    }

    double resolved_lr() const {
        if (train_lr > 0.0) return train_lr;
        return parse_norm(net_normalization) == Norm::weight ? 1e-3 : 1e-4;
    }

    /// Resolves widths and builds the network description. rgb_mean stays
    /// zero here; training fills it from the dataset manifest.
    NetSpec to_net_spec() const {
        NetSpec s;
        s.topology = parse_topology(net_topology);
        s.scale = net_scale;
        s.n_blocks = net_blocks;
        s.block.family = parse_family(net_family);
        s.block.r = net_expansion;
        s.block.k = net_kernel;
        s.block.norm = parse_norm(net_normalization);
        s.block.residual_scale = net_residual_scale;
        switch (s.block.family) {
            case Family::vanilla:
                s.block.w1 = net_width > 0 ? net_width : net_baseline_width;
                if (s.block.w1 < 1) throw ConfigError("vanilla family needs net.width (or net.baseline_width)");
                break;
            case Family::wdsr_a:
                if (net_width > 0) s.block.w1 = net_width;
                else if (net_baseline_width > 0) s.block.w1 = match_widths(net_baseline_width, s.block.r).w1;
                else throw ConfigError("wdsr-a family needs net.width or net.baseline_width");
                break;
            case Family::wdsr_b: {
                if (net_baseline_width < 1)
                    throw ConfigError("wdsr-b family needs net.baseline_width for its budget solver");
                s.block.w1 = net_width > 0 ? net_width : (int)std::lround((double)net_baseline_width / 2.0);
                s.block.w_mid = solve_wdsr_b_mid(s.block.w1, s.block.r, s.block.k, net_baseline_width);
                break;
            }
        }
        s.validate();
        return s;
    }

    std::pair<int, int> budget_input_dims() const {
        const size_t x = budget_input.find('x');
        if (x == std::string::npos)
            throw ConfigError("budget.input must look like 48x48, got '" + budget_input + "'");
        return {detail::to_int("budget.input", budget_input.substr(0, x)),
                detail::to_int("budget.input", budget_input.substr(x + 1))};
    }
};

}  // namespace wdsrkit

#endif  // WDSRKIT_CONFIG_HPP_
