// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_CHECKPOINT_HPP_
#define WDSRKIT_CHECKPOINT_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wdsrkit/network.hpp"

namespace wdsrkit {

// On-disk layout (all integers and floats little-endian):
//   8-byte magic "WDSRCKPT", u32 version,
//   u64 training step,
//   u32 length + network description text (key=value lines),
//   u32 tensor count, then per tensor:
//     u32 name length + name, u32 ndim, u32 dims..., f32 data.
static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");

inline constexpr char kCkptMagic[8] = {'W', 'D', 'S', 'R', 'C', 'K', 'P', 'T'};
inline constexpr uint32_t kCkptVersion = 1;

struct CheckpointTensor {
    Shape shape;
    std::vector<float> data;
};

struct Checkpoint {
    uint64_t step = 0;
    NetSpec spec;
    std::vector<std::pair<std::string, CheckpointTensor>> tensors;
};

inline std::string net_spec_to_text(const NetSpec& s) {
    std::ostringstream os;
    os.precision(17);
    os << "topology=" << topology_name(s.topology) << "\n";
    os << "scale=" << s.scale << "\n";
    os << "blocks=" << s.n_blocks << "\n";
    os << "family=" << family_name(s.block.family) << "\n";
    os << "width=" << s.block.w1 << "\n";
    os << "expansion=" << s.block.r << "\n";
    os << "kernel=" << s.block.k << "\n";
    os << "normalization=" << norm_name(s.block.norm) << "\n";
    os << "residual_scale=" << s.block.residual_scale << "\n";
    os << "w_mid=" << s.block.w_mid << "\n";
    os.precision(9);
    os << "rgb_mean=" << s.rgb_mean[0] << " " << s.rgb_mean[1] << " " << s.rgb_mean[2] << "\n";
    return os.str();
}

inline NetSpec net_spec_from_text(const std::string& text) {
    NetSpec s;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw DataError("checkpoint: malformed network description line '" + line + "'");
        const std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "topology") s.topology = parse_topology(v);
        else if (k == "scale") s.scale = std::stoi(v);
        else if (k == "blocks") s.n_blocks = std::stoi(v);
        else if (k == "family") s.block.family = parse_family(v);
        else if (k == "width") s.block.w1 = std::stoi(v);
        else if (k == "expansion") s.block.r = std::stoi(v);
        else if (k == "kernel") s.block.k = std::stoi(v);
        else if (k == "normalization") s.block.norm = parse_norm(v);
        else if (k == "residual_scale") s.block.residual_scale = std::stod(v);
        else if (k == "w_mid") s.block.w_mid = std::stoi(v);
        else if (k == "rgb_mean") {
            std::istringstream ms(v);
            if (!(ms >> s.rgb_mean[0] >> s.rgb_mean[1] >> s.rgb_mean[2]))
                throw DataError("checkpoint: malformed rgb_mean '" + v + "'");
        } else {
            throw DataError("checkpoint: unknown network description key '" + k + "'");
        }
    }
    s.validate();
    return s;
}

namespace detail {

inline void wr(std::ostream& os, const void* p, size_t n) { os.write((const char*)p, (std::streamsize)n); }
inline void wr_u32(std::ostream& os, uint32_t v) { wr(os, &v, 4); }
inline void wr_u64(std::ostream& os, uint64_t v) { wr(os, &v, 8); }

inline void rd(std::istream& is, void* p, size_t n) {
    is.read((char*)p, (std::streamsize)n);
    if ((size_t)is.gcount() != n) throw DataError("checkpoint: truncated file");
}
inline uint32_t rd_u32(std::istream& is) {
    uint32_t v;
    rd(is, &v, 4);
    return v;
}
inline uint64_t rd_u64(std::istream& is) {
    uint64_t v;
    rd(is, &v, 8);
    return v;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write checkpoint '" + path + "'");
    detail::wr(os, kCkptMagic, 8);
    detail::wr_u32(os, kCkptVersion);
    detail::wr_u64(os, c.step);
    const std::string spec = net_spec_to_text(c.spec);
    detail::wr_u32(os, (uint32_t)spec.size());
    detail::wr(os, spec.data(), spec.size());
    detail::wr_u32(os, (uint32_t)c.tensors.size());
    for (const auto& [name, t] : c.tensors) {
        detail::wr_u32(os, (uint32_t)name.size());
        detail::wr(os, name.data(), name.size());
        detail::wr_u32(os, (uint32_t)t.shape.size());
        for (int d : t.shape) detail::wr_u32(os, (uint32_t)d);
        detail::wr(os, t.data.data(), t.data.size() * 4);
    }
    if (!os) throw DataError("failed writing checkpoint '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint '" + path + "'");
    char magic[8];
    detail::rd(is, magic, 8);
    if (std::memcmp(magic, kCkptMagic, 8) != 0) throw DataError("'" + path + "' is not a wdsrkit checkpoint");
    const uint32_t version = detail::rd_u32(is);
    if (version != kCkptVersion)
        throw DataError("checkpoint '" + path + "' has format version " + std::to_string(version) + ", expected " +
                        std::to_string(kCkptVersion));
    Checkpoint c;
    c.step = detail::rd_u64(is);
    const uint32_t spec_len = detail::rd_u32(is);
    if (spec_len > (1u << 20)) throw DataError("checkpoint: implausible description length");
    std::string spec(spec_len, '\0');
    detail::rd(is, spec.data(), spec_len);
    c.spec = net_spec_from_text(spec);
    const uint32_t n = detail::rd_u32(is);
    c.tensors.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        const uint32_t name_len = detail::rd_u32(is);
        if (name_len > (1u << 16)) throw DataError("checkpoint: implausible tensor name length");
        std::string name(name_len, '\0');
        detail::rd(is, name.data(), name_len);
        const uint32_t ndim = detail::rd_u32(is);
        if (ndim > 8) throw DataError("checkpoint: implausible tensor rank");
        CheckpointTensor t;
        int64_t numel = 1;
        for (uint32_t d = 0; d < ndim; ++d) {
            const uint32_t dim = detail::rd_u32(is);
            if (dim == 0 || dim > (1u << 28)) throw DataError("checkpoint: implausible dimension");
            t.shape.push_back((int)dim);
            numel *= dim;
        }
        if (numel > (int64_t)1 << 32) throw DataError("checkpoint: implausible tensor size");
        t.data.resize((size_t)numel);
        detail::rd(is, t.data.data(), t.data.size() * 4);
        for (const auto& prev : c.tensors)
            if (prev.first == name) throw DataError("checkpoint: duplicate tensor name '" + name + "'");
        c.tensors.emplace_back(std::move(name), std::move(t));
    }
    return c;
}

/// Snapshot a model's parameters and buffers.
inline Checkpoint snapshot_model(ModelT<float>& model, uint64_t step) {
    Checkpoint c;
    c.step = step;
    c.spec = model.spec;
    std::vector<NamedParamT<float>> params;
    model.collect_params(params);
    for (auto& p : params) c.tensors.push_back({p.name, {p.tensor.shape(), p.tensor.data()}});
    std::vector<NamedBufferT<float>> bufs;
    model.collect_buffers(bufs);
    for (auto& b : bufs) c.tensors.push_back({b.name, {Shape{(int)b.data->size()}, *b.data}});
    return c;
}

/// Write every tensor in the checkpoint back into a model built from the
/// same description. Name or shape disagreement is a data error.
inline void restore_model(ModelT<float>& model, const Checkpoint& c) {
    model.spec.rgb_mean = c.spec.rgb_mean;
    std::vector<NamedParamT<float>> params;
    model.collect_params(params);
    std::vector<NamedBufferT<float>> bufs;
    model.collect_buffers(bufs);
    size_t used = 0;
    for (const auto& [name, t] : c.tensors) {
        bool found = false;
        for (auto& p : params)
            if (p.name == name) {
                if (p.tensor.shape() != t.shape)
                    throw DataError("checkpoint tensor '" + name + "' has shape " + shape_str(t.shape) +
                                    ", model expects " + shape_str(p.tensor.shape()));
                p.tensor.data() = t.data;
                found = true;
                break;
            }
        if (!found)
            for (auto& b : bufs)
                if (b.name == name) {
                    if (b.data->size() != t.data.size())
                        throw DataError("checkpoint buffer '" + name + "' has " + std::to_string(t.data.size()) +
                                        " values, model expects " + std::to_string(b.data->size()));
                    *b.data = t.data;
                    found = true;
                    break;
                }
        if (!found) throw DataError("checkpoint tensor '" + name + "' does not exist in the model");
        ++used;
    }
    if (used != params.size() + bufs.size())
        throw DataError("checkpoint is missing " + std::to_string(params.size() + bufs.size() - used) +
                        " model tensor(s)");
    model.after_load();
}

inline ModelT<float> model_from_checkpoint(const Checkpoint& c) {
    Rng rng(0);
    ModelT<float> m = build_model<float>(c.spec, rng);
    restore_model(m, c);
    return m;
}

}  // namespace wdsrkit

#endif  // WDSRKIT_CHECKPOINT_HPP_
