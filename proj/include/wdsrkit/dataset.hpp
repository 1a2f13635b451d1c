// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_DATASET_HPP_
#define WDSRKIT_DATASET_HPP_

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wdsrkit/bicubic.hpp"
#include "wdsrkit/image.hpp"

namespace wdsrkit {

struct ManifestRecord {
    std::string hr_path;  // relative to the manifest directory
    std::string lr_path;
    int scale = 0;
    bool is_val = false;
};

struct DatasetManifest {
    int scale = 0;
    std::array<float, 3> rgb_mean{0.f, 0.f, 0.f};
    std::vector<ManifestRecord> records;
    std::vector<std::string> warnings;
    std::string dir;  // directory the relative paths resolve against

    int train_count() const {
        int n = 0;
        for (const auto& r : records) n += r.is_val ? 0 : 1;
        return n;
    }
    int val_count() const { return (int)records.size() - train_count(); }
};

inline void save_manifest(const std::string& path, const DatasetManifest& m) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write manifest '" + path + "'");
    os << "# wdsrkit dataset manifest v1\n";
    os << "# scale: " << m.scale << "\n";
    os << "# rgb_mean: " << m.rgb_mean[0] << " " << m.rgb_mean[1] << " " << m.rgb_mean[2] << "\n";
    os << "# bicubic: separable a=-0.5, half-pixel centers, clamp edges, no antialias\n";
    for (const auto& w : m.warnings) os << "# warning: " << w << "\n";
    os << "# split: train\n";
    for (const auto& r : m.records)
        if (!r.is_val) os << r.hr_path << "\t" << r.lr_path << "\t" << r.scale << "\n";
    os << "# split: val\n";
    for (const auto& r : m.records)
        if (r.is_val) os << r.hr_path << "\t" << r.lr_path << "\t" << r.scale << "\n";
    if (!os) throw DataError("failed writing manifest '" + path + "'");
}

/// Parses a manifest and validates referential integrity: every path exists
/// and each LR's dimensions equal floor(HR / S).
inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open manifest '" + path + "'");
    DatasetManifest m;
    m.dir = std::filesystem::path(path).parent_path().string();
    std::string line;
    bool in_val = false;
    bool version_seen = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string h = line.substr(1);
            while (!h.empty() && h.front() == ' ') h.erase(h.begin());
            if (h.rfind("wdsrkit dataset manifest", 0) == 0) {
                if (h != "wdsrkit dataset manifest v1") throw DataError("unsupported manifest version: " + h);
                version_seen = true;
            } else if (h.rfind("scale:", 0) == 0) {
                m.scale = std::stoi(h.substr(6));
            } else if (h.rfind("rgb_mean:", 0) == 0) {
                std::istringstream ss(h.substr(9));
                if (!(ss >> m.rgb_mean[0] >> m.rgb_mean[1] >> m.rgb_mean[2]))
                    throw DataError("manifest line " + std::to_string(lineno) + ": malformed rgb_mean");
            } else if (h.rfind("split:", 0) == 0) {
                std::string tag = h.substr(6);
                while (!tag.empty() && tag.front() == ' ') tag.erase(tag.begin());
                if (tag == "train") in_val = false;
                else if (tag == "val") in_val = true;
                else throw DataError("manifest line " + std::to_string(lineno) + ": unknown split '" + tag + "'");
            } else if (h.rfind("warning:", 0) == 0) {
                m.warnings.push_back(h.substr(8));
            }
            // other comment lines are documentation; ignored
            continue;
        }
        std::istringstream ss(line);
        ManifestRecord r;
        std::string scale_s;
        if (!std::getline(ss, r.hr_path, '\t') || !std::getline(ss, r.lr_path, '\t') || !std::getline(ss, scale_s))
            throw DataError("manifest line " + std::to_string(lineno) + ": expected hr<TAB>lr<TAB>scale");
        r.scale = std::stoi(scale_s);
        r.is_val = in_val;
        m.records.push_back(std::move(r));
    }
    if (!version_seen) throw DataError("'" + path + "' is not a wdsrkit manifest");
    if (m.scale < 1) throw DataError("manifest '" + path + "': missing or invalid scale header");
    if (m.records.empty()) throw DataError("manifest '" + path + "': no records");

    for (const auto& r : m.records) {
        const auto hp = (std::filesystem::path(m.dir) / r.hr_path).string();
        const auto lp = (std::filesystem::path(m.dir) / r.lr_path).string();
        const auto [hw, hh] = png_dims(hp);
        const auto [lw, lh] = png_dims(lp);
        if (r.scale != m.scale)
            throw DataError("manifest record '" + r.hr_path + "': scale " + std::to_string(r.scale) +
                            " differs from manifest scale " + std::to_string(m.scale));
        if (lw != hw / r.scale || lh != hh / r.scale)
            throw DataError("manifest record '" + r.hr_path + "': LR " + std::to_string(lw) + "x" +
                            std::to_string(lh) + " is not 1/" + std::to_string(r.scale) + " of HR " +
                            std::to_string(hw) + "x" + std::to_string(hh));
    }
    return m;
}

/// Crops every HR image in hr_dir to an S-multiple, writes the cropped HR
/// and its bicubic LR under out_dir/hr and out_dir/lr, computes the training
/// split's mean RGB, and writes out_dir/manifest.txt. The alphabetically
/// last val_count images form the validation split; val_count <= 0 takes one
/// tenth of the corpus, at least one image.
inline DatasetManifest prepare_dataset(const std::string& hr_dir, const std::string& out_dir, int scale,
                                       int val_count = 0) {
    namespace fs = std::filesystem;
    if (scale < 2 || scale > 4) throw ConfigError("prepare_dataset: scale must be 2, 3 or 4");
    if (!fs::is_directory(hr_dir)) throw DataError("prepare_dataset: '" + hr_dir + "' is not a directory");

    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(hr_dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return (char)std::tolower(c); });
        if (ext == ".png") names.push_back(e.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) throw DataError("prepare_dataset: no images found in '" + hr_dir + "'");

    fs::create_directories(fs::path(out_dir) / "hr");
    fs::create_directories(fs::path(out_dir) / "lr");

    DatasetManifest m;
    m.scale = scale;
    m.dir = out_dir;

    struct Prepared {
        std::string name;
        ImageBuf hr;
        ImageBuf lr;
    };
    std::vector<Prepared> ok;
    for (const auto& name : names) {
        const std::string src = (fs::path(hr_dir) / name).string();
        try {
            ImageBuf hr = read_png(src);
            const int cw = (hr.width / scale) * scale;
            const int ch = (hr.height / scale) * scale;
            if (cw < scale || ch < scale) throw DataError("image smaller than scale factor");
            if (cw != hr.width || ch != hr.height) hr = crop_image(hr, cw, ch);
            ImageBuf lr = bicubic_downsample(hr, scale);
            ok.push_back({name, std::move(hr), std::move(lr)});
        } catch (const DataError& e) {
            m.warnings.push_back("skipped " + name + ": " + e.what());
        }
    }
    if (ok.empty()) throw DataError("prepare_dataset: every image in '" + hr_dir + "' was skipped");
    if (val_count <= 0) val_count = std::max(1, (int)ok.size() / 10);
    if (val_count >= (int)ok.size())
        throw ConfigError("prepare_dataset: validation split must keep at least one image on each side (have " +
                          std::to_string(ok.size()) + " usable images, asked for " + std::to_string(val_count) +
                          " validation)");

    double sum[3] = {0.0, 0.0, 0.0};
    int64_t count = 0;
    const size_t n_train = ok.size() - (size_t)val_count;
    for (size_t i = 0; i < ok.size(); ++i) {
        auto& p = ok[i];
        const std::string hr_rel = (fs::path("hr") / p.name).string();
        const std::string lr_rel = (fs::path("lr") / p.name).string();
        write_png((fs::path(out_dir) / hr_rel).string(), p.hr);
        write_png((fs::path(out_dir) / lr_rel).string(), p.lr);
        if (i < n_train) {
            for (int y = 0; y < p.hr.height; ++y)
                for (int x = 0; x < p.hr.width; ++x)
                    for (int c = 0; c < 3; ++c) sum[c] += p.hr.at(x, y, c);
            count += (int64_t)p.hr.width * p.hr.height;
        }
        m.records.push_back({hr_rel, lr_rel, scale, i >= n_train});
    }
    for (int c = 0; c < 3; ++c) m.rgb_mean[(size_t)c] = (float)(sum[c] / (double)count);

    save_manifest((fs::path(out_dir) / "manifest.txt").string(), m);
    return m;
}

struct SamplePair {
    ImageBuf hr;
    ImageBuf lr;
};

struct LoadedDataset {
    int scale = 0;
    std::array<float, 3> rgb_mean{0.f, 0.f, 0.f};
    std::vector<SamplePair> train;
    std::vector<SamplePair> val;
};

inline LoadedDataset load_dataset(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    const DatasetManifest m = load_manifest(manifest_path);
    LoadedDataset d;
    d.scale = m.scale;
    d.rgb_mean = m.rgb_mean;
    for (const auto& r : m.records) {
        SamplePair p;
        p.hr = read_png((fs::path(m.dir) / r.hr_path).string());
        p.lr = read_png((fs::path(m.dir) / r.lr_path).string());
        (r.is_val ? d.val : d.train).push_back(std::move(p));
    }
    if (d.train.empty()) throw DataError("dataset has no training images");
    return d;
}

}  // namespace wdsrkit

#endif  // WDSRKIT_DATASET_HPP_
