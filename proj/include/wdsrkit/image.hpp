// Copyright 2026 the wdsrkit authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WDSRKIT_IMAGE_HPP_
#define WDSRKIT_IMAGE_HPP_

#include <png.h>

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "wdsrkit/common.hpp"

namespace wdsrkit {

/// 8-bit RGB image, row-major, 3 samples per pixel.
struct ImageBuf {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;

    ImageBuf() = default;
    ImageBuf(int w, int h) : width(w), height(h), rgb((size_t)w * h * 3, 0) {
        if (w < 1 || h < 1) throw ShapeError("ImageBuf: dimensions must be >= 1");
    }

    size_t idx(int x, int y, int c) const { return ((size_t)y * width + x) * 3 + c; }
    uint8_t& at(int x, int y, int c) { return rgb[idx(x, y, c)]; }
    uint8_t at(int x, int y, int c) const { return rgb[idx(x, y, c)]; }
    int64_t samples() const { return (int64_t)width * height * 3; }
};

inline ImageBuf read_png(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw DataError("cannot read PNG '" + path + "': " + image.message);
    image.format = PNG_FORMAT_RGB;
    ImageBuf out((int)image.width, (int)image.height);
    if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DataError("cannot decode PNG '" + path + "': " + msg);
    }
    return out;
}

/// Reads only the PNG header. Cheap existence + dimension probe.
inline std::pair<int, int> png_dims(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw DataError("cannot read PNG '" + path + "': " + image.message);
    std::pair<int, int> wh{(int)image.width, (int)image.height};
    png_image_free(&image);
    return wh;
}

inline void write_png(const std::string& path, const ImageBuf& img) {
    if (img.width < 1 || img.height < 1) throw DataError("write_png: empty image");
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.format = PNG_FORMAT_RGB;
    image.width = (png_uint_32)img.width;
    image.height = (png_uint_32)img.height;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.rgb.data(), 0, nullptr))
        throw DataError("cannot write PNG '" + path + "': " + std::string(image.message));
}

/// Top-left crop.
inline ImageBuf crop_image(const ImageBuf& img, int w, int h) {
    if (w < 1 || h < 1 || w > img.width || h > img.height)
        throw ShapeError("crop_image: invalid crop " + std::to_string(w) + "x" + std::to_string(h));
    ImageBuf out(w, h);
    for (int y = 0; y < h; ++y)
        std::memcpy(&out.rgb[out.idx(0, y, 0)], &img.rgb[img.idx(0, y, 0)], (size_t)w * 3);
    return out;
}

inline ImageBuf crop_image(const ImageBuf& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > img.width || y0 + h > img.height)
        throw ShapeError("crop_image: window out of bounds");
    ImageBuf out(w, h);
    for (int y = 0; y < h; ++y)
        std::memcpy(&out.rgb[out.idx(0, y, 0)], &img.rgb[img.idx(x0, y0 + y, 0)], (size_t)w * 3);
    return out;
}

}  // namespace wdsrkit

#endif  // WDSRKIT_IMAGE_HPP_
