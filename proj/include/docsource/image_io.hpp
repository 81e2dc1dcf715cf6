#pragma once

#include <string>
#include <variant>

#include "docsource/image.hpp"

namespace docsource {

using AnyImage = std::variant<GrayImage, RgbImage>;

// Supported formats: binary PGM (P5) / PPM (P6) with maxval 255, and PNG
// (8-bit grayscale or RGB, non-interlaced). Format selection is by file
// content on load, by extension on save (.pgm/.ppm/.png).
AnyImage load_image(const std::string& path);
void save_image(const GrayImage& img, const std::string& path);
void save_image(const RgbImage& img, const std::string& path);

// Any loaded image as grayscale (RGB inputs go through to_grayscale).
GrayImage load_grayscale(const std::string& path);

} // namespace docsource
