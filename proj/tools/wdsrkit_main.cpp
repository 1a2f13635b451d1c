// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface: prepare | budget | train | eval | gradcheck.
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure, 1 anything else.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "wdsrkit/wdsrkit.hpp"

namespace fs = std::filesystem;
using namespace wdsrkit;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write '" + path + "'");
    os << text;
}

std::string manifest_path_of(const RunConfig& cfg) {
    if (cfg.data_dir.empty()) throw ConfigError("data.dir must point at a prepared dataset directory");
    return (fs::path(cfg.data_dir) / "manifest.txt").string();
}

int cmd_prepare(const RunConfig& cfg, const std::string& hr_dir, const std::string& out_dir) {
    if (out_dir.empty()) throw ConfigError("prepare needs --out DIR");
    DatasetManifest m = prepare_dataset(hr_dir, out_dir, cfg.net_scale, cfg.data_val_count);
    write_text((fs::path(out_dir) / "config.txt").string(), cfg.echo());
    for (const auto& w : m.warnings) std::cerr << "wdsrkit: warning: " << w << "\n";
    std::cout << "prepared " << m.records.size() << " image pairs (" << m.train_count() << " train, "
              << m.val_count() << " val) at scale " << m.scale << "\n";
    std::cout << "rgb_mean " << m.rgb_mean[0] << " " << m.rgb_mean[1] << " " << m.rgb_mean[2] << "\n";
    std::cout << "manifest " << (fs::path(out_dir) / "manifest.txt").string() << "\n";
    return 0;
}

int cmd_budget(const RunConfig& cfg) {
    NetSpec spec = cfg.to_net_spec();
    warn_narrow_pathway(spec);
    const auto [w, h] = cfg.budget_input_dims();
    print_budget(std::cout, budget_report(spec, h, w, cfg.net_baseline_width));
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& out_dir) {
    if (out_dir.empty()) throw ConfigError("train needs --out DIR");
    LoadedDataset ds = load_dataset(manifest_path_of(cfg));
    NetSpec spec = cfg.to_net_spec();
    spec.rgb_mean = ds.rgb_mean;
    warn_narrow_pathway(spec);
    Rng rng((Rng::result_type)cfg.train_seed);
    Model model = build_model<float>(spec, rng);
    TrainConfig tc = train_config_from(cfg);

    fs::create_directories(out_dir);
    write_text((fs::path(out_dir) / "config.txt").string(), cfg.echo());
    std::cout << "training " << topology_name(spec.topology) << " (" << family_name(spec.block.family) << ", "
              << norm_name(spec.block.norm) << ", " << spec.n_blocks << " blocks, width " << spec.w1() << ", r "
              << spec.block.r << ", x" << spec.scale << "), " << model.param_count() << " parameters, lr " << tc.lr0
              << ", " << tc.max_steps << " steps\n";

    TrainResult res = train_model(model, ds, tc, out_dir);
    if (res.diverged) {
        std::cerr << "training aborted: " << res.abort_reason << "\n";
        std::cerr << "last-good checkpoint: " << res.checkpoint_path << "\n";
        return 4;
    }
    std::cout << "done: " << res.steps_done << " steps, final L1 EMA " << res.final_l1_ema;
    if (!res.val_psnr.empty()) std::cout << ", final val PSNR " << res.val_psnr.back().second << " dB";
    std::cout << "\ncheckpoint " << res.checkpoint_path << "\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& ckpt_path, std::string manifest_path) {
    if (manifest_path.empty()) manifest_path = manifest_path_of(cfg);
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    Model model = model_from_checkpoint(ckpt);
    DatasetManifest m = load_manifest(manifest_path);
    if (model.spec.scale != m.scale)
        throw ConfigError("checkpoint scale " + std::to_string(model.spec.scale) + " vs dataset scale " +
                          std::to_string(m.scale));

    std::vector<const ManifestRecord*> records;
    for (const auto& r : m.records)
        if (r.is_val) records.push_back(&r);
    if (records.empty())
        for (const auto& r : m.records) records.push_back(&r);

    std::cout << std::left << std::setw(28) << "image" << std::right << std::setw(12) << "model_db" << std::setw(12)
              << "bicubic_db" << "\n";
    std::vector<double> model_scores, bicubic_scores;
    for (const auto* r : records) {
        SamplePair p;
        p.hr = read_png((fs::path(m.dir) / r->hr_path).string());
        p.lr = read_png((fs::path(m.dir) / r->lr_path).string());
        EvalResult ev = evaluate_pairs(model, {p}, m.scale, cfg.eval_shave);
        model_scores.push_back(ev.model_mean);
        bicubic_scores.push_back(ev.bicubic_mean);
        std::cout << std::left << std::setw(28) << fs::path(r->hr_path).filename().string() << std::right
                  << std::setw(12) << std::fixed << std::setprecision(3) << ev.model_mean << std::setw(12)
                  << ev.bicubic_mean << "\n";
    }
    std::cout << std::left << std::setw(28) << "mean" << std::right << std::setw(12) << mean_of(model_scores)
              << std::setw(12) << mean_of(bicubic_scores) << "\n";
    return 0;
}

int cmd_gradcheck() {
    auto results = gradcheck_suite(&std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    if (failed) {
        std::cerr << failed << " of " << results.size() << " gradient checks failed\n";
        return 4;
    }
    std::cout << "all " << results.size() << " gradient checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wdsrkit: wide-activation super-resolution training and analysis"};
    app.require_subcommand(1);
    app.fallthrough();  // global --config/--set/--out may follow the subcommand

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    int64_t seed = -1;
    app.add_option("--config", config_path, "configuration file (key=value lines)");
    app.add_option("--set", overrides, "override a config key, e.g. --set net.scale=3");
    app.add_option("--seed", seed, "override train.seed");
    app.add_option("--out", out_dir, "output directory");

    auto* prepare = app.add_subcommand("prepare", "crop HR images, write bicubic LR pairs and a manifest");
    std::string hr_dir;
    prepare->add_option("hr_dir", hr_dir, "directory of HR PNG images")->required();

    auto* budget = app.add_subcommand("budget", "per-layer parameter and Mult-Add report");
    auto* train = app.add_subcommand("train", "run the training loop");

    auto* eval = app.add_subcommand("eval", "PSNR table for a checkpoint");
    std::string ckpt_path, manifest_path;
    eval->add_option("checkpoint", ckpt_path, "checkpoint file")->required();
    eval->add_option("manifest", manifest_path, "dataset manifest (default: data.dir/manifest.txt)");

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every backward rule");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const auto& kv : overrides) cfg.apply_line(kv, "--set");
        if (seed >= 0) cfg.train_seed = (uint64_t)seed;

        if (prepare->parsed()) return cmd_prepare(cfg, hr_dir, out_dir);
        if (budget->parsed()) return cmd_budget(cfg);
        if (train->parsed()) return cmd_train(cfg, out_dir);
        if (eval->parsed()) return cmd_eval(cfg, ckpt_path, manifest_path);
        if (gradcheck->parsed()) return cmd_gradcheck();
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "wdsrkit: config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "wdsrkit: data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "wdsrkit: numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "wdsrkit: error: " << e.what() << "\n";
        return 1;
    }
}
