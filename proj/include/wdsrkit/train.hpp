// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_TRAIN_HPP_
#define WDSRKIT_TRAIN_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "wdsrkit/adam.hpp"
#include "wdsrkit/checkpoint.hpp"
#include "wdsrkit/config.hpp"
#include "wdsrkit/dataset.hpp"
#include "wdsrkit/metrics.hpp"
#include "wdsrkit/network.hpp"

namespace wdsrkit {

struct TrainConfig {
    double lr0 = 1e-4;
    int64_t lr_halving_period = 200000;
    int batch_size = 16;
    int patch_size = 96;  // HR-side square patch
    int64_t max_steps = 5000;
    uint64_t seed = 1;
    int64_t val_interval = 1000;
    int64_t checkpoint_interval = 0;  // 0 = final checkpoint only
    AdamConfig adam;
    double bn_momentum = 0.1;
    double bn_eps = 1e-5;

    void validate(int scale) const {
        adam.validate();
        if (lr0 <= 0.0) throw ConfigError("learning rate must be > 0");
        if (lr_halving_period < 1) throw ConfigError("lr halving period must be >= 1");
        if (batch_size < 1) throw ConfigError("batch size must be >= 1");
        if (max_steps < 1) throw ConfigError("step count must be >= 1");
        if (val_interval < 1) throw ConfigError("validation interval must be >= 1");
        if (patch_size < scale || patch_size % scale != 0)
            throw ConfigError("patch size " + std::to_string(patch_size) + " must be a positive multiple of scale " +
                              std::to_string(scale));
        if (!(bn_momentum > 0.0 && bn_momentum < 1.0)) throw ConfigError("bn momentum must lie in (0,1)");
        if (!(bn_eps > 0.0)) throw ConfigError("bn epsilon must be > 0");
    }
};

inline double lr_schedule(double lr0, int64_t halving_period, int64_t step) {
    return lr0 * std::pow(0.5, (double)(step / halving_period));
}

inline TrainConfig train_config_from(const RunConfig& c) {
    TrainConfig t;
    t.lr0 = c.resolved_lr();
    t.lr_halving_period = c.train_lr_halving_period;
    t.batch_size = c.train_batch_size;
    t.patch_size = c.train_patch_size;
    t.max_steps = c.train_steps;
    t.seed = c.train_seed;
    t.val_interval = c.train_val_interval;
    t.checkpoint_interval = c.train_checkpoint_interval;
    t.adam = {c.train_adam_beta1, c.train_adam_beta2, c.train_adam_eps};
    t.bn_momentum = c.train_bn_momentum;
    t.bn_eps = c.train_bn_eps;
    return t;
}

// --- dihedral augmentation -------------------------------------------------

inline ImageBuf flip_h(const ImageBuf& img) {
    ImageBuf out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
    return out;
}

inline ImageBuf rot90_ccw(const ImageBuf& img) {
    ImageBuf out(img.height, img.width);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(img.width - 1 - y, x, c);
    return out;
}

/// Transform t in [0,8): horizontal flip when t>=4, then (t%4) quarter-turn
/// rotations counterclockwise.
inline ImageBuf dihedral_apply(const ImageBuf& img, int t) {
    if (t < 0 || t > 7) throw ConfigError("dihedral transform index must lie in [0,8)");
    ImageBuf out = (t & 4) ? flip_h(img) : img;
    for (int k = t & 3; k > 0; --k) out = rot90_ccw(out);
    return out;
}

inline int dihedral_inverse(int t) {
    if (t < 0 || t > 7) throw ConfigError("dihedral transform index must lie in [0,8)");
    if (t & 4) return t;  // flip followed by rotation is an involution
    return (4 - (t & 3)) % 4;
}

// --- image <-> tensor ------------------------------------------------------

inline TensorT<float> images_to_tensor(const std::vector<ImageBuf>& imgs) {
    if (imgs.empty()) throw ShapeError("images_to_tensor: empty batch");
    const int n = (int)imgs.size(), h = imgs[0].height, w = imgs[0].width;
    std::vector<float> data((size_t)n * 3 * h * w);
    for (int i = 0; i < n; ++i) {
        const auto& im = imgs[(size_t)i];
        if (im.width != w || im.height != h) throw ShapeError("images_to_tensor: mixed sizes in batch");
        for (int c = 0; c < 3; ++c) {
            float* dst = data.data() + (((size_t)i * 3 + c) * h) * w;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) dst[(size_t)y * w + x] = (float)im.at(x, y, c);
        }
    }
    return TensorT<float>::from({n, 3, h, w}, std::move(data));
}

inline TensorT<float> image_to_tensor(const ImageBuf& img) { return images_to_tensor({img}); }

inline ImageBuf tensor_to_image(const TensorT<float>& t) {
    if (t.ndim() != 4 || t.dim(0) != 1 || t.dim(1) != 3)
        throw ShapeError("tensor_to_image: expected (1,3,H,W), got " + shape_str(t.shape()));
    const int h = t.dim(2), w = t.dim(3);
    ImageBuf out(w, h);
    const float* d = t.data().data();
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const float v = d[((size_t)c * h + y) * w + x];
                out.at(x, y, c) = (uint8_t)std::lround(std::clamp(v, 0.f, 255.f));
            }
    return out;
}

// --- patch sampling --------------------------------------------------------

/// Uniform image choice, uniform LR top-left corner, HR corner aligned at
/// scale times the LR corner, one shared dihedral transform per pair.
class PatchSampler {
  public:
    PatchSampler(const LoadedDataset& ds, int hr_patch) : ds_(ds), hr_patch_(hr_patch) {
        lr_patch_ = hr_patch / ds.scale;
        if (lr_patch_ * ds.scale != hr_patch) throw ConfigError("patch size must be a multiple of the scale");
        for (const auto& p : ds_.train)
            if (p.lr.width < lr_patch_ || p.lr.height < lr_patch_)
                throw DataError("training image " + std::to_string(p.lr.width) + "x" + std::to_string(p.lr.height) +
                                " (LR) is smaller than the " + std::to_string(lr_patch_) + "-pixel LR patch");
    }

    SamplePair sample(Rng& rng) {
        const auto& p = ds_.train[std::uniform_int_distribution<size_t>(0, ds_.train.size() - 1)(rng)];
        const int lx = std::uniform_int_distribution<int>(0, p.lr.width - lr_patch_)(rng);
        const int ly = std::uniform_int_distribution<int>(0, p.lr.height - lr_patch_)(rng);
        const int s = ds_.scale;
        ImageBuf lr = crop_image(p.lr, lx, ly, lr_patch_, lr_patch_);
        ImageBuf hr = crop_image(p.hr, lx * s, ly * s, hr_patch_, hr_patch_);
        const int t = (int)(rng() % 8);
        return {dihedral_apply(hr, t), dihedral_apply(lr, t)};
    }

    int lr_patch() const { return lr_patch_; }

  private:
    const LoadedDataset& ds_;
    int hr_patch_;
    int lr_patch_;
};

// --- metric log ------------------------------------------------------------

/// Append-only CSV sink: step,lr,train_l1,val_psnr with val_psnr filled only
/// on evaluation rows.
class MetricLog {
  public:
    explicit MetricLog(const std::string& path) : os_(path, std::ios::trunc) {
        if (!os_) throw DataError("cannot write metric log '" + path + "'");
        os_ << "step,lr,train_l1,val_psnr\n";
    }

    void log_train(int64_t step, double lr, double l1) {
        os_ << step << "," << lr << "," << l1 << ",\n";
    }

    void log_val(int64_t step, double lr, double l1, double psnr) {
        os_ << step << "," << lr << "," << l1 << "," << psnr << "\n";
        os_.flush();
    }

  private:
    std::ofstream os_;
};

// --- evaluation ------------------------------------------------------------

struct EvalResult {
    std::vector<double> model_psnr;    // per validation image
    std::vector<double> bicubic_psnr;  // bicubic upsampling baseline on the same images
    double model_mean = 0.0;
    double bicubic_mean = 0.0;
};

namespace detail {

inline ImageBuf shave_border(const ImageBuf& img, int shave) {
    if (shave <= 0) return img;
    if (img.width <= 2 * shave || img.height <= 2 * shave)
        throw ConfigError("shave of " + std::to_string(shave) + " px leaves nothing of a " +
                          std::to_string(img.width) + "x" + std::to_string(img.height) + " image");
    return crop_image(img, shave, shave, img.width - 2 * shave, img.height - 2 * shave);
}

}  // namespace detail

/// Full-image validation PSNR (model and bicubic baseline) over a list of
/// HR/LR pairs. Inference mode: no gradients, no BN statistics updates.
inline EvalResult evaluate_pairs(ModelT<float>& model, const std::vector<SamplePair>& pairs, int scale,
                                 int shave = 0) {
    if (pairs.empty()) throw DataError("evaluate: no validation images");
    EvalResult r;
    NoGradGuard ng;
    for (const auto& p : pairs) {
        TensorT<float> out = model.forward(image_to_tensor(p.lr), false);
        ImageBuf pred = tensor_to_image(out);
        ImageBuf up = bicubic_upsample(p.lr, scale);
        ImageBuf hr = detail::shave_border(p.hr, shave);
        pred = detail::shave_border(pred, shave);
        up = detail::shave_border(up, shave);
        r.model_psnr.push_back(psnr_rgb_u8(pred.rgb.data(), hr.rgb.data(), hr.samples()));
        r.bicubic_psnr.push_back(psnr_rgb_u8(up.rgb.data(), hr.rgb.data(), hr.samples()));
    }
    r.model_mean = mean_of(r.model_psnr);
    r.bicubic_mean = mean_of(r.bicubic_psnr);
    return r;
}

// --- training loop ---------------------------------------------------------

struct TrainResult {
    bool diverged = false;
    std::string abort_reason;
    int64_t steps_done = 0;
    std::vector<double> train_l1;                      // one entry per completed forward
    std::vector<std::pair<int64_t, double>> val_psnr;  // (step, mean PSNR)
    double final_l1_ema = std::numeric_limits<double>::quiet_NaN();
    std::string checkpoint_path;
};

/// The training protocol: sample a batch of HR patches with aligned LR
/// patches, augment, forward, L1, backward, Adam, halving lr schedule.
/// A non-finite loss or gradient aborts with the last-good checkpoint.
inline TrainResult train_model(ModelT<float>& model, const LoadedDataset& ds, const TrainConfig& cfg,
                               const std::string& out_dir) {
    namespace fs = std::filesystem;
    cfg.validate(ds.scale);
    if (model.spec.scale != ds.scale)
        throw ConfigError("model scale " + std::to_string(model.spec.scale) + " vs dataset scale " +
                          std::to_string(ds.scale));
    fs::create_directories(out_dir);

    for (auto* c : model.conv_layers())
        if (c->bn) {
            c->bn->momentum = (float)cfg.bn_momentum;
            c->bn->epsilon = (float)cfg.bn_eps;
        }

    std::vector<NamedParamT<float>> params;
    model.collect_params(params);
    AdamStateT<float> adam(cfg.adam);
    adam.attach(params);

    Rng rng((Rng::result_type)cfg.seed);
    PatchSampler sampler(ds, cfg.patch_size);
    MetricLog log((fs::path(out_dir) / "metrics.csv").string());

    TrainResult res;
    Checkpoint last_good = snapshot_model(model, 0);

    auto run_validation = [&](int64_t step, double lr, double l1) {
        EvalResult ev = evaluate_pairs(model, ds.val.empty() ? ds.train : ds.val, ds.scale);
        res.val_psnr.push_back({step, ev.model_mean});
        log.log_val(step, lr, l1, ev.model_mean);
    };

    for (int64_t step = 1; step <= cfg.max_steps; ++step) {
        const double lr = lr_schedule(cfg.lr0, cfg.lr_halving_period, step - 1);

        std::vector<ImageBuf> hr_batch, lr_batch;
        hr_batch.reserve((size_t)cfg.batch_size);
        lr_batch.reserve((size_t)cfg.batch_size);
        for (int b = 0; b < cfg.batch_size; ++b) {
            SamplePair p = sampler.sample(rng);
            hr_batch.push_back(std::move(p.hr));
            lr_batch.push_back(std::move(p.lr));
        }
        TensorT<float> input = images_to_tensor(lr_batch);
        TensorT<float> target = images_to_tensor(hr_batch);

        TensorT<float> pred = model.forward(input, true);
        TensorT<float> loss = l1_loss(pred, target);
        const double l1 = (double)loss.item();

        if (!std::isfinite(l1)) {
            res.diverged = true;
            res.abort_reason = "non-finite training loss at step " + std::to_string(step);
            restore_model(model, last_good);
            res.checkpoint_path = (fs::path(out_dir) / "checkpoint_lastgood.ckpt").string();
            save_checkpoint(res.checkpoint_path, last_good);
            log.log_train(step, lr, l1);
            break;
        }
        res.train_l1.push_back(l1);
        res.steps_done = step;
        last_good = snapshot_model(model, (uint64_t)step);

        for (auto& p : params) p.tensor.clear_grad();
        backward(loss);
        try {
            adam.step(params, lr);
        } catch (const NumericError& e) {
            res.diverged = true;
            res.abort_reason = e.what();
            restore_model(model, last_good);
            res.checkpoint_path = (fs::path(out_dir) / "checkpoint_lastgood.ckpt").string();
            save_checkpoint(res.checkpoint_path, last_good);
            log.log_train(step, lr, l1);
            break;
        }

        const bool eval_now = step % cfg.val_interval == 0 || step == cfg.max_steps;
        if (eval_now) run_validation(step, lr, l1);
        else log.log_train(step, lr, l1);

        if (cfg.checkpoint_interval > 0 && step % cfg.checkpoint_interval == 0 && step != cfg.max_steps)
            save_checkpoint((fs::path(out_dir) / ("checkpoint_" + std::to_string(step) + ".ckpt")).string(),
                            snapshot_model(model, (uint64_t)step));
    }

    if (!res.diverged) {
        res.checkpoint_path = (fs::path(out_dir) / "checkpoint_final.ckpt").string();
        save_checkpoint(res.checkpoint_path, snapshot_model(model, (uint64_t)res.steps_done));
    }
    if (!res.train_l1.empty()) res.final_l1_ema = ema_series(res.train_l1, 50).back();
    return res;
}

}  // namespace wdsrkit

#endif  // WDSRKIT_TRAIN_HPP_
