#pragma once

#include <cstdint>
#include <vector>

#include "docsource/errors.hpp"

namespace docsource {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // row-major RGB triples, 3*width*height

    std::uint8_t& at(int y, int x, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
    std::uint8_t at(int y, int x, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // row-major, width*height

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(std::size_t(w) * h, fill) {}

    std::uint8_t& at(int y, int x) { return data[std::size_t(y) * width + x]; }
    std::uint8_t at(int y, int x) const { return data[std::size_t(y) * width + x]; }
};

struct BitMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // 1 = ink pixel

    BitMask() = default;
    BitMask(int w, int h) : width(w), height(h), bits(std::size_t(w) * h, 0) {}

    bool at(int y, int x) const { return bits[std::size_t(y) * width + x] != 0; }
    void set(int y, int x, bool v) { bits[std::size_t(y) * width + x] = v ? 1 : 0; }
};

// BT.601 luma, round-half-up, clamped to [0,255].
GrayImage to_grayscale(const RgbImage& img);

// Global threshold maximizing inter-class variance of {<=t, >t}; smallest t on
// ties. Throws ConstantImage when every pixel is equal.
std::uint8_t otsu_threshold(const GrayImage& img);

// Ink is dark: bit set iff intensity <= t.
BitMask binarize(const GrayImage& img, std::uint8_t t);

} // namespace docsource
