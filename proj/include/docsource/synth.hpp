#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "docsource/eval.hpp"
#include "docsource/image.hpp"

namespace docsource {

struct PageSpec {
    int width = 3120;
    int height = 4160;
    int glyph_target = 2200;
    int glyph_min = 28; // glyph box side, pixels
    int glyph_max = 56;
    std::uint64_t seed = 0;
    int style = 0; // 0 = angular, 1 = serif, 2 = mono
};

// Parametric capture signature. The multiplicative gain field is a fixed
// low-frequency pattern regenerated from `seed` in normalized coordinates, so
// signatures stay tiny and the pattern is capture-resolution independent.
struct DeviceSignature {
    std::uint64_t seed = 0;
    double field_strength = 0.0; // std-dev of the unit-mean smooth gain field
    double noise_sigma = 0.0;    // additive Gaussian noise, intensity units
    double blur_sigma = 0.0;     // Gaussian blur, pixels
    double vignette = 0.0;       // corner falloff strength
    int quality = 100;           // on-device compression quality, 1-100
};

struct MessagingProfile {
    int width = 780;
    int height = 1040;
    int quality = 75;
};

// White page with letter-like procedural glyphs on a jittered grid.
// Deterministic given the spec; throws LayoutOverflow when the grid
// cannot hold glyph_target boxes.
GrayImage render_page(const PageSpec& spec);

// blur -> multiply gain field -> additive noise (seeded from signature +
// page content hash) -> vignette -> clamp -> compression round trip.
GrayImage apply_device(const GrayImage& page, const DeviceSignature& sig);

// Area-average downscale to the profile size, then recompress.
// Throws UpscaleRefused if the target exceeds the source.
GrayImage simulate_messaging(const GrayImage& img, const MessagingProfile& profile);

// ---- building blocks, exposed for tests and the rescale-attack path ----

GrayImage gaussian_blur(const GrayImage& img, double sigma);
GrayImage area_downscale(const GrayImage& img, int target_w, int target_h);
GrayImage resize_bilinear(const GrayImage& img, int target_w, int target_h);

// 8x8 block DCT + uniform quantization + reconstruction; the standard
// luminance table scaled by quality. Self-contained stand-in for the
// transform-coding stage of a real codec.
GrayImage dct_codec_roundtrip(const GrayImage& img, int quality);

// ---- dataset generation ----

struct GeneratorDevice {
    std::string id;
    DeviceSignature signature;
    int native_width = 0;  // 0 = capture at the page size
    int native_height = 0;
};

struct GeneratorConfig {
    std::uint64_t seed = 0;
    std::string out_dir;
    PageSpec page;                     // template; seed/style set per page
    std::vector<std::pair<std::string, int>> fonts; // name -> style id
    int pages_per_font = 5;
    MessagingProfile messaging;
    std::vector<GeneratorDevice> devices;
};

GeneratorConfig load_generator_config(const std::string& path);

// Renders one shared clean page per (font, page index), then runs every
// device's capture pipeline on it. Devices with a non-standard native size
// are captured at that size and rescaled back to the page size before the
// messaging stage (the rescale-attack setup). Writes PNGs plus manifest.json
// and signatures.json under out_dir; fully deterministic.
DatasetManifest generate_dataset(const GeneratorConfig& config);

} // namespace docsource
