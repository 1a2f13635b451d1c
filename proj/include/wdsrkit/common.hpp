// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_COMMON_HPP_
#define WDSRKIT_COMMON_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wdsrkit {

/// Base error type. Subclasses map to distinct CLI exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Invalid configuration, architecture constraint or bad argument combination.
struct ConfigError : Error {
    using Error::Error;
};
/// Dataset, image or checkpoint problems (missing/corrupt files, bad dims).
struct DataError : Error {
    using Error::Error;
};
/// Non-finite values, zero norms and other numerical failures.
struct NumericError : Error {
    using Error::Error;
};
/// Tensor dimension mismatches.
struct ShapeError : Error {
    using Error::Error;
};

using Rng = std::mt19937;

inline std::string shape_str(const std::vector<int>& s) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

/// Worker thread count. WDSRKIT_THREADS caps it; 0 or 1 means the
/// single-threaded deterministic mode. Unset picks a small default.
inline int thread_count() {
    static const int n = [] {
        if (const char* env = std::getenv("WDSRKIT_THREADS")) {
            long v = std::strtol(env, nullptr, 10);
            if (v <= 0) return 1;
            return (int)std::min<long>(v, 64);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return (int)std::clamp<unsigned>(hw, 1u, 8u);
    }();
    return n;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). The partition is a
/// pure function of n and the thread count, and chunks never overlap, so any
/// kernel that writes each output element exactly once stays deterministic.
template <typename F>
void parallel_for(int64_t n, F&& fn, int64_t min_grain = 4096) {
    int nt = thread_count();
    if (n <= 0) return;
    if (nt <= 1 || n < 2 * min_grain) {
        fn((int64_t)0, n);
        return;
    }
    int chunks = (int)std::min<int64_t>(nt, (n + min_grain - 1) / min_grain);
    int64_t per = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (int c = 0; c < chunks; ++c) {
        int64_t b = c * per, e = std::min<int64_t>(n, b + per);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

template <typename T>
bool all_finite(const std::vector<T>& v) {
    for (T x : v)
        if (!std::isfinite((double)x)) return false;
    return true;
}

}  // namespace wdsrkit

#endif  // WDSRKIT_COMMON_HPP_
