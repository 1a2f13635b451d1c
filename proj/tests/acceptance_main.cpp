// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0
//
// Release acceptance gate. Runs the eight release criteria end to end,
// prints exactly one PASS/FAIL line per criterion, and exits with the
// number of failed criteria. The heavy criteria (5 and 6) train real
// models on a synthetic corpus, so a full run takes tens of minutes.
//
// Usage: wdsrkit_acceptance <wdsrkit_cli binary> <work dir>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "support/synth.hpp"
#include "wdsrkit/wdsrkit.hpp"

namespace fs = std::filesystem;
using namespace wdsrkit;

namespace {

// Pinned tolerances and run parameters. The desk-scale margins were
// calibrated on a pilot run of the same seeds.
constexpr double kGradTol = 1e-3;        // max rel err vs central differences
constexpr double kGradTimeLimit = 60.0;  // seconds
constexpr double kParityTolPct = 2.0;    // block weight-count parity
constexpr double kTotalsTolPct = 15.0;   // published-total reproduction
constexpr double kWnTol = 1e-5;          // ||w_c|| vs g_c relative error
constexpr double kConvTol = 1e-5;        // conv vs naive oracle, absolute
constexpr double kCkptTol = 1e-6;        // checkpoint roundtrip, relative
constexpr double kPsnrMargin = 0.3;      // dB over bicubic on held-out images
constexpr double kTrainTimeLimit = 1800.0;  // seconds, criterion 5
constexpr double kSweepTimeLimit = 3600.0;  // seconds, criterion 6 (3 runs)

// Desk-scale configuration: tiny WDSR-A, 3 blocks, pathway width 16, r=4.
constexpr int kBlocks = 3;
constexpr int kWidth = 16;
constexpr int kExpand = 4;
constexpr int kScale = 2;
constexpr int kImages = 20;
constexpr int kImageSize = 192;
constexpr int kValImages = 4;
constexpr int kBatch = 8;
constexpr int kPatch = 48;  // HR side
constexpr int64_t kSteps = 5000;
constexpr int64_t kValInterval = 250;
constexpr uint64_t kSeed = 20260814;

struct Context {
    std::string cli;
    fs::path work;
    std::optional<LoadedDataset> ds;
    std::optional<TrainResult> wn_run;
    double wn_seconds = 0.0;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

TensorT<float> signed_uniform(const Shape& shape, float lo_mag, float hi_mag, Rng& rng) {
    std::uniform_real_distribution<float> mag(lo_mag, hi_mag);
    std::vector<float> v((size_t)numel_of(shape));
    for (auto& x : v) x = (rng() & 1 ? 1.f : -1.f) * mag(rng);
    return TensorT<float>::from(shape, std::move(v));
}

NetSpec tiny_spec(Norm norm) {
    NetSpec s;
    s.topology = Topology::wdsr;
    s.scale = kScale;
    s.n_blocks = kBlocks;
    s.block = {Family::wdsr_a, kWidth, kExpand, 3, norm, 1.0, 0};
    return s;
}

// ---------------------------------------------------------------------------
// Criterion 1: every backward rule agrees with 64-bit central differences,
// both through the library call and through the CLI entry point.
std::string criterion_gradients(Context& ctx) {
    const double t0 = now_seconds();
    const int rc = run_cli(ctx.cli, "gradcheck", ctx.work / "gradcheck.log");
    auto checks = gradcheck_suite(nullptr);
    double max_err = 0.0;
    int failed = 0;
    for (const auto& c : checks) {
        max_err = std::max(max_err, c.max_rel_err);
        failed += c.pass ? 0 : 1;
    }
    const double secs = now_seconds() - t0;
    if (rc != 0) throw std::runtime_error("cli gradcheck exited with code " + std::to_string(rc));
    if (failed) throw std::runtime_error(std::to_string(failed) + " gradient checks failed");
    if (max_err > kGradTol) throw std::runtime_error(fmt("max rel err %.3g exceeds %.0e", max_err, kGradTol));
    if (secs > kGradTimeLimit) throw std::runtime_error(fmt("took %.1fs, limit %.0fs", secs, kGradTimeLimit));
    return fmt("%zu checks, max rel err %.2e (tol %.0e), %.1fs", checks.size(), max_err, kGradTol);
}

// ---------------------------------------------------------------------------
// Criterion 2: width-matched blocks stay within 2% of the 64-wide vanilla
// block's weight count, and whole-network totals land near the published
// 0.26M / 0.08M figures.
std::string criterion_budget(Context& ctx) {
    const int base = 64;
    auto block_parity = [&](Family fam, int r) {
        NetSpec s;
        s.topology = Topology::wdsr;
        s.scale = 2;
        s.n_blocks = 1;
        if (fam == Family::wdsr_a) {
            const Widths w = match_widths(base, r);
            s.block = {fam, w.w1, r, 3, Norm::plain, 1.0, 0};
        } else {
            const int w1 = (int)std::lround(base / 2.0);
            s.block = {fam, w1, r, 3, Norm::plain, 1.0, solve_wdsr_b_mid(w1, r, 3, base)};
        }
        BudgetReport rep = budget_report(s, 48, 48, base);
        if (!rep.has_parity) throw std::runtime_error("budget report lost the baseline");
        if (rep.parity_pct > kParityTolPct)
            throw std::runtime_error(fmt("%s r=%d parity %.2f%% exceeds %.0f%%", family_name(fam), r,
                                         rep.parity_pct, kParityTolPct));
        return rep.parity_pct;
    };
    const double a2 = block_parity(Family::wdsr_a, 2);
    const double a4 = block_parity(Family::wdsr_a, 4);
    const double b4 = block_parity(Family::wdsr_b, 4);
    const double b6 = block_parity(Family::wdsr_b, 6);
    const double b9 = block_parity(Family::wdsr_b, 9);

    auto total_of = [](NetSpec s) { return budget_report(s, 48, 48).total_params(); };
    auto check_total = [&](int64_t got, double published, const char* what) {
        const double off = 100.0 * std::abs((double)got - published) / published;
        if (off > kTotalsTolPct)
            throw std::runtime_error(fmt("%s total %lld is %.1f%% from %.0f", what, (long long)got, off, published));
        return got;
    };
    NetSpec edsr;
    edsr.topology = Topology::edsr_baseline;
    edsr.scale = 2;
    edsr.n_blocks = 1;
    edsr.block = {Family::vanilla, 64, 1, 3, Norm::plain, 1.0, 0};
    NetSpec wa = tiny_spec(Norm::plain);
    wa.n_blocks = 1;
    wa.block.w1 = match_widths(base, 4).w1;
    NetSpec wb = wa;
    wb.block = {Family::wdsr_b, 32, 6, 3, Norm::plain, 1.0, solve_wdsr_b_mid(32, 6, 3, base)};
    const int64_t te = check_total(total_of(edsr), 0.26e6, "edsr-baseline");
    const int64_t ta = check_total(total_of(wa), 0.08e6, "wdsr-a");
    const int64_t tb = check_total(total_of(wb), 0.08e6, "wdsr-b");

    const fs::path log = ctx.work / "budget.log";
    const int rc = run_cli(ctx.cli,
                           "budget --set net.family=wdsr-a --set net.baseline_width=64 --set net.expansion=4", log);
    if (rc != 0) throw std::runtime_error("cli budget exited with code " + std::to_string(rc));
    if (slurp(log).find("parity") == std::string::npos) throw std::runtime_error("cli budget printed no parity line");

    return fmt("parity A r2/r4 %.2f/%.2f%%, B r4/r6/r9 %.2f/%.2f/%.2f%%; totals %lld/%lld/%lld", a2, a4, b4, b6,
               b9, (long long)te, (long long)ta, (long long)tb);
}

// ---------------------------------------------------------------------------
// Criterion 3: the reparameterized kernel's per-channel norm equals its gain
// on 1000 random parameterizations.
std::string criterion_weight_norm(Context&) {
    Rng rng(7);
    NoGradGuard ng;
    double max_rel = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int cout = 1 + (int)(rng() % 8), cin = 1 + (int)(rng() % 8);
        const int k = 1 + 2 * (int)(rng() % 3);
        auto v = signed_uniform({cout, cin, k, k}, 0.25f, 1.25f, rng);
        auto g = signed_uniform({cout}, 0.5f, 2.0f, rng);
        auto w = weight_norm_effective(v, g);
        const auto& wd = w.data();
        const int64_t per = (int64_t)cin * k * k;
        for (int c = 0; c < cout; ++c) {
            double ss = 0.0;
            for (int64_t j = 0; j < per; ++j) {
                const double x = wd[(size_t)(c * per + j)];
                ss += x * x;
            }
            const double norm = std::sqrt(ss);
            const double gc = std::abs((double)g.data()[(size_t)c]);
            max_rel = std::max(max_rel, std::abs(norm - gc) / gc);
        }
    }
    if (max_rel > kWnTol) throw std::runtime_error(fmt("max ||w_c||-vs-g_c rel err %.3g exceeds %.0e", max_rel, kWnTol));
    return fmt("1000 parameterizations, max rel err %.2e (tol %.0e)", max_rel, kWnTol);
}

// ---------------------------------------------------------------------------
// Criterion 4: pixel shuffle and unshuffle invert each other bitwise, and
// conv2d matches a naive 6-loop double-precision oracle.
std::string criterion_shuffle_conv(Context&) {
    Rng rng(11);
    NoGradGuard ng;
    int bijections = 0;
    for (int i = 0; i < 60; ++i) {
        const int s = 2 + (int)(rng() % 3);
        const int n = 1 + (int)(rng() % 2), c = 1 + (int)(rng() % 4);
        const int h = 1 + (int)(rng() % 5), w = 1 + (int)(rng() % 5);
        auto x = TensorT<float>::uniform({n, c * s * s, h, w}, -1.f, 1.f, rng);
        if (pixel_unshuffle(pixel_shuffle(x, s), s).data() != x.data())
            throw std::runtime_error("unshuffle(shuffle(x)) != x");
        auto y = TensorT<float>::uniform({n, c, h * s, w * s}, -1.f, 1.f, rng);
        if (pixel_shuffle(pixel_unshuffle(y, s), s).data() != y.data())
            throw std::runtime_error("shuffle(unshuffle(y)) != y");
        ++bijections;
    }

    // The oracle deliberately shares nothing with conv2d: six explicit loops
    // over a double accumulator.
    auto naive = [](const TensorT<float>& x, const TensorT<float>& wgt, const TensorT<float>& b) {
        const int n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
        const int cout = wgt.dim(0), k = wgt.dim(2), pad = (k - 1) / 2;
        std::vector<double> out((size_t)n * cout * h * w);
        for (int im = 0; im < n; ++im)
            for (int co = 0; co < cout; ++co)
                for (int oy = 0; oy < h; ++oy)
                    for (int ox = 0; ox < w; ++ox) {
                        double acc = b.data()[(size_t)co];
                        for (int ci = 0; ci < cin; ++ci)
                            for (int t = 0; t < k * k; ++t) {
                                const int iy = oy + t / k - pad, ix = ox + t % k - pad;
                                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                                acc += (double)x.at({im, ci, iy, ix}) * (double)wgt.at({co, ci, t / k, t % k});
                            }
                        out[(((size_t)im * cout + co) * h + oy) * w + ox] = acc;
                    }
        return out;
    };
    double max_abs = 0.0;
    int convs = 0;
    for (int i = 0; i < 24; ++i) {
        const int k = 1 + 2 * (int)(rng() % 3);
        const int n = 1 + (int)(rng() % 2), cin = 1 + (int)(rng() % 5), cout = 1 + (int)(rng() % 5);
        const int h = k + (int)(rng() % 6), w = k + (int)(rng() % 6);
        auto x = TensorT<float>::uniform({n, cin, h, w}, -0.5f, 0.5f, rng);
        auto wg = TensorT<float>::uniform({cout, cin, k, k}, -0.5f, 0.5f, rng);
        auto b = TensorT<float>::uniform({cout}, -0.5f, 0.5f, rng);
        auto y = conv2d(x, wg, b);
        const auto ref = naive(x, wg, b);
        for (size_t j = 0; j < ref.size(); ++j)
            max_abs = std::max(max_abs, std::abs((double)y.data()[j] - ref[j]));
        ++convs;
    }
    if (max_abs > kConvTol) throw std::runtime_error(fmt("conv max abs err %.3g exceeds %.0e", max_abs, kConvTol));
    return fmt("%d bijection cases bitwise, %d conv cases max abs err %.2e (tol %.0e)", bijections, convs, max_abs,
               kConvTol);
}

// ---------------------------------------------------------------------------
// Criterion 5: the tiny weight-normalized model trains on a 20-image
// synthetic corpus, its L1 EMA falls, and it beats bicubic on the held-out
// split by the pinned margin.
std::string criterion_training(Context& ctx) {
    const double t0 = now_seconds();
    const fs::path hr_dir = ctx.work / "corpus_hr";
    const fs::path data_dir = ctx.work / "data";
    testsupport::synth_corpus(hr_dir.string(), kImages, kImageSize, kImageSize, 4242);
    prepare_dataset(hr_dir.string(), data_dir.string(), kScale, kValImages);
    ctx.ds = load_dataset((data_dir / "manifest.txt").string());

    NetSpec spec = tiny_spec(Norm::weight);
    spec.rgb_mean = ctx.ds->rgb_mean;
    Rng rng((Rng::result_type)kSeed);
    Model model = build_model<float>(spec, rng);

    TrainConfig tc;
    tc.lr0 = 1e-3;  // weight-normalized default
    tc.batch_size = kBatch;
    tc.patch_size = kPatch;
    tc.max_steps = kSteps;
    tc.val_interval = kValInterval;
    tc.seed = kSeed;
    TrainResult res = train_model(model, *ctx.ds, tc, (ctx.work / "run_weight_norm").string());
    ctx.wn_seconds = now_seconds() - t0;
    if (res.diverged) throw std::runtime_error("training diverged: " + res.abort_reason);

    const auto ema = ema_series(res.train_l1, 50);
    const size_t early = std::min<size_t>(499, ema.size() - 1);
    if (!(ema.back() < 0.95 * ema[early]))
        throw std::runtime_error(fmt("L1 EMA did not decrease: %.4f at step %zu vs %.4f at end", ema[early],
                                     early + 1, ema.back()));

    EvalResult ev = evaluate_pairs(model, ctx.ds->val, ctx.ds->scale);
    ctx.wn_run = std::move(res);
    if (!(ev.model_mean >= ev.bicubic_mean + kPsnrMargin))
        throw std::runtime_error(fmt("held-out PSNR %.3f dB vs bicubic %.3f dB misses the +%.1f dB margin",
                                     ev.model_mean, ev.bicubic_mean, kPsnrMargin));
    if (ctx.wn_seconds > kTrainTimeLimit)
        throw std::runtime_error(fmt("run took %.0fs, limit %.0fs", ctx.wn_seconds, kTrainTimeLimit));
    return fmt("L1 EMA %.3f -> %.3f, val %.2f dB vs bicubic %.2f dB (+%.2f), %.0fs", ema[early], ema.back(),
               ev.model_mean, ev.bicubic_mean, ev.model_mean - ev.bicubic_mean, ctx.wn_seconds);
}

// ---------------------------------------------------------------------------
// Criterion 6: with identical seeds, weight norm converges at lr 1e-3 while
// the plain model diverges or lands at a higher final L1, and the
// batch-norm model's validation PSNR is noisier over the final third.
std::string criterion_norm_sweep(Context& ctx) {
    if (!ctx.ds || !ctx.wn_run) throw std::runtime_error("weight-norm reference run unavailable");
    const double t0 = now_seconds();

    TrainConfig tc;
    tc.lr0 = 1e-3;
    tc.batch_size = kBatch;
    tc.patch_size = kPatch;
    tc.max_steps = kSteps;
    tc.val_interval = kValInterval;
    tc.seed = kSeed;

    NetSpec plain_spec = tiny_spec(Norm::plain);
    plain_spec.rgb_mean = ctx.ds->rgb_mean;
    Rng r1((Rng::result_type)kSeed);
    Model plain = build_model<float>(plain_spec, r1);
    TrainResult pr = train_model(plain, *ctx.ds, tc, (ctx.work / "run_plain").string());

    NetSpec bn_spec = tiny_spec(Norm::batch);
    bn_spec.rgb_mean = ctx.ds->rgb_mean;
    Rng r2((Rng::result_type)kSeed);
    Model bn = build_model<float>(bn_spec, r2);
    TrainConfig tb = tc;
    tb.lr0 = 1e-4;  // reference rate for models without weight normalization
    TrainResult br = train_model(bn, *ctx.ds, tb, (ctx.work / "run_batch_norm").string());
    const double sweep_secs = ctx.wn_seconds + (now_seconds() - t0);

    const TrainResult& wn = *ctx.wn_run;
    const bool plain_worse = pr.diverged || !(pr.final_l1_ema <= wn.final_l1_ema);

    auto tail_std = [](const std::vector<std::pair<int64_t, double>>& v) {
        std::vector<double> tail;
        for (const auto& [step, psnr] : v)
            if (step > 2 * kSteps / 3) tail.push_back(psnr);
        if (tail.size() < 2) throw std::runtime_error("too few validation points in the final third");
        return stddev_of(tail);
    };
    if (br.diverged) throw std::runtime_error("batch-norm run diverged: " + br.abort_reason);
    const double wn_std = tail_std(wn.val_psnr), bn_std = tail_std(br.val_psnr);
    const bool bn_noisier = bn_std > wn_std;

    const std::string plain_note =
        pr.diverged ? "plain@1e-3 diverged"
                    : fmt("plain@1e-3 final L1 EMA %.3f vs WN %.3f", pr.final_l1_ema, wn.final_l1_ema);
    const std::string detail = fmt("%s (%s); val-PSNR std BN %.4f vs WN %.4f (%s); sweep %.0fs",
                                   plain_note.c_str(), plain_worse ? "ok" : "probe inverts", bn_std, wn_std,
                                   bn_noisier ? "ok" : "BN steadier", sweep_secs);
    if (!plain_worse || !bn_noisier || sweep_secs > kSweepTimeLimit) throw std::runtime_error(detail);
    return detail;
}

// ---------------------------------------------------------------------------
// Criterion 7: a graph audit proves every convolution in the wdsr topology
// runs at LR resolution, and wall-clock inference beats the edsr-baseline
// at equal blocks and width.
std::string criterion_resolution(Context&) {
    NetSpec spec = tiny_spec(Norm::plain);
    Rng rng(5);
    Model audit_model = build_model<float>(spec, rng);
    const int lh = 12, lw = 16;
    auto x = TensorT<float>::uniform({1, 3, lh, lw}, -1.f, 1.f, rng);
    auto y = audit_model.forward(x, true);
    int convs = 0;
    for (const auto& n : audit_graph(y)) {
        if (std::string_view(n.op) != "conv2d") continue;
        ++convs;
        const Shape& in = n.operand_shapes.at(0);
        if (in.at(2) != lh || in.at(3) != lw)
            throw std::runtime_error("convolution input " + shape_str(in) + " is not LR " + shape_str({1, 3, lh, lw}));
    }
    const int expected = 1 + 2 * kBlocks + 1 + 1;  // head, block pairs, body end, skip
    if (convs != expected)
        throw std::runtime_error(fmt("audited %d convolutions, expected %d", convs, expected));

    auto speed_spec = [](Topology topo) {
        NetSpec s;
        s.topology = topo;
        s.scale = 2;
        s.n_blocks = 8;
        s.block = {Family::vanilla, 32, 1, 3, Norm::plain, 1.0, 0};
        return s;
    };
    Rng r1(9), r2(9);
    Model wdsr = build_model<float>(speed_spec(Topology::wdsr), r1);
    Model edsr = build_model<float>(speed_spec(Topology::edsr_baseline), r2);
    auto input = TensorT<float>::uniform({1, 3, 96, 96}, 0.f, 255.f, r1);
    NoGradGuard ng;
    auto median_forward = [&](Model& m) {
        m.forward(input, false);  // warm up
        std::vector<double> t;
        for (int i = 0; i < 3; ++i) {
            const double s0 = now_seconds();
            m.forward(input, false);
            t.push_back(now_seconds() - s0);
        }
        std::sort(t.begin(), t.end());
        return t[t.size() / 2];
    };
    const double tw = median_forward(wdsr), te = median_forward(edsr);
    if (!(tw < te)) throw std::runtime_error(fmt("wdsr %.3fs not faster than edsr-baseline %.3fs", tw, te));
    return fmt("%d convolutions at LR; inference %.3fs vs %.3fs (%.0f%% faster)", convs, tw, te,
               100.0 * (te - tw) / te);
}

// ---------------------------------------------------------------------------
// Criterion 8: save/load roundtrips reproduce inference outputs for all
// three normalization modes.
std::string criterion_checkpoint(Context& ctx) {
    double max_rel = 0.0;
    for (Norm norm : {Norm::plain, Norm::weight, Norm::batch}) {
        NetSpec spec;
        spec.topology = Topology::wdsr;
        spec.scale = 2;
        spec.n_blocks = 2;
        spec.block = {Family::wdsr_a, 8, 2, 3, norm, 1.0, 0};
        spec.rgb_mean = {90.f, 100.f, 110.f};
        Rng rng(123);
        Model model = build_model<float>(spec, rng);
        NoGradGuard ng;
        if (norm == Norm::batch)
            for (int i = 0; i < 3; ++i)
                model.forward(TensorT<float>::uniform({2, 3, 10, 10}, 0.f, 255.f, rng), true);

        auto x = TensorT<float>::uniform({1, 3, 11, 13}, 0.f, 255.f, rng);
        auto before = model.forward(x, false);
        const fs::path path = ctx.work / (std::string("roundtrip_") + norm_name(norm) + ".ckpt");
        save_checkpoint(path.string(), snapshot_model(model, 7));
        Checkpoint ckpt = load_checkpoint(path.string());
        Model restored = model_from_checkpoint(ckpt);
        auto after = restored.forward(x, false);
        for (size_t i = 0; i < before.data().size(); ++i) {
            const double a = before.data()[i], b = after.data()[i];
            max_rel = std::max(max_rel, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}));
        }
    }
    if (max_rel > kCkptTol)
        throw std::runtime_error(fmt("roundtrip rel err %.3g exceeds %.0e", max_rel, kCkptTol));
    return fmt("plain/weight/batch outputs within %.2e (tol %.0e)", max_rel, kCkptTol);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s <wdsrkit_cli binary> <work dir>\n", argv[0]);
        return 2;
    }
    Context ctx;
    ctx.cli = argv[1];
    ctx.work = argv[2];
    fs::create_directories(ctx.work);

    struct Entry {
        const char* label;
        std::function<std::string(Context&)> body;
    };
    const std::vector<Entry> criteria = {
        {"gradient correctness", criterion_gradients},
        {"budget parity", criterion_budget},
        {"weight-norm invariant", criterion_weight_norm},
        {"shuffle bijection + conv oracle", criterion_shuffle_conv},
        {"desk-scale training", criterion_training},
        {"normalization sweep", criterion_norm_sweep},
        {"resolution discipline", criterion_resolution},
        {"checkpoint roundtrip", criterion_checkpoint},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool pass = false;
        try {
            detail = criteria[i].body(ctx);
            pass = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        failures += pass ? 0 : 1;
        std::printf("%s  %zu. %-33s %s\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].label, detail.c_str());
        std::fflush(stdout);
    }
    if (failures) std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    else std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    return failures;
}
