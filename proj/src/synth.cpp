#include "docsource/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>

#include "docsource/image_io.hpp"
#include "docsource/parallel.hpp"
#include "docsource/rng.hpp"

namespace fs = std::filesystem;

namespace docsource {

// ---- page rendering ----

namespace {

// filled disc stamp; used to give strokes their thickness
void stamp(GrayImage& img, double cy, double cx, double radius, std::uint8_t ink) {
    const int y0 = std::max(0, int(std::floor(cy - radius)));
    const int y1 = std::min(img.height - 1, int(std::ceil(cy + radius)));
    const int x0 = std::max(0, int(std::floor(cx - radius)));
    const int x1 = std::min(img.width - 1, int(std::ceil(cx + radius)));
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dy = y - cy, dx = x - cx;
            if (dy * dy + dx * dx <= r2 && img.at(y, x) > ink) img.at(y, x) = ink;
        }
}

void draw_stroke(GrayImage& img, double y0, double x0, double y1, double x1,
                 double thickness, std::uint8_t ink) {
    const double len = std::hypot(y1 - y0, x1 - x0);
    const int steps = std::max(1, int(std::ceil(len / 0.3)));
    for (int i = 0; i <= steps; ++i) {
        const double t = double(i) / steps;
        stamp(img, y0 + t * (y1 - y0), x0 + t * (x1 - x0), thickness * 0.5, ink);
    }
}

// A synthetic "font": a fixed alphabet of letter-like stroke bundles in unit
// box coordinates. Like real print, the same letter repeats identically all
// over the corpus; only the placement varies.
struct GlyphProto {
    struct Seg {
        double y0, x0, y1, x1;
    };
    std::vector<Seg> segs;
    double thickness = 0.12;   // fraction of the box side
    std::uint8_t ink = 40;
};

// All strokes pass through the box center, so every glyph is one
// 8-connected component.
std::vector<GlyphProto> make_alphabet(int style) {
    constexpr int kLetters = 24;
    Rng rng(mix_seed(0xA1F4BE7, std::uint64_t(style)));
    std::vector<GlyphProto> alphabet;

    auto edge_point = [&](double& ey, double& ex) {
        const int side = int(rng.below(4));
        const double t = rng.uniform();
        switch (side) {
            case 0: ey = 0.0; ex = t; break;
            case 1: ey = 1.0; ex = t; break;
            case 2: ey = t; ex = 0.0; break;
            default: ey = t; ex = 1.0; break;
        }
    };

    for (int letter = 0; letter < kLetters; ++letter) {
        GlyphProto g;
        g.ink = std::uint8_t(20 + rng.below(50));
        if (style == 2) {
            // mono: axis-aligned bars from the center, uniform thickness
            g.thickness = 1.0 / 7.0;
            const int n = 2 + int(rng.below(3));
            const double ends[4][2] = {{0.0, 0.5}, {1.0, 0.5}, {0.5, 0.0}, {0.5, 1.0}};
            std::vector<int> dirs = {0, 1, 2, 3};
            rng.shuffle(dirs);
            for (int i = 0; i < n; ++i)
                g.segs.push_back({0.5, 0.5, ends[dirs[std::size_t(i)]][0],
                                  ends[dirs[std::size_t(i)]][1]});
        } else {
            const bool serif = style == 1;
            g.thickness = serif ? 1.0 / 12.0 : 1.0 / 9.0;
            const int n = serif ? 2 + int(rng.below(3)) : 3 + int(rng.below(3));
            for (int i = 0; i < n; ++i) {
                double ey, ex;
                edge_point(ey, ex);
                g.segs.push_back({0.5, 0.5, ey, ex});
                if (serif) {
                    // perpendicular tick at the stroke end
                    const double dy = ey - 0.5, dx = ex - 0.5;
                    const double len = std::hypot(dy, dx);
                    if (len > 0.05) {
                        const double py = -dx / len, px = dy / len;
                        const double tick = 0.2;
                        g.segs.push_back({ey - py * tick * 0.5, ex - px * tick * 0.5,
                                          ey + py * tick * 0.5, ex + px * tick * 0.5});
                    }
                }
            }
        }
        alphabet.push_back(std::move(g));
    }
    return alphabet;
}

void draw_glyph(GrayImage& img, int top, int left, int size, const GlyphProto& proto) {
    const double s = size - 1;
    const double th = std::max(2.0, proto.thickness * size);
    for (const GlyphProto::Seg& seg : proto.segs)
        draw_stroke(img, top + seg.y0 * s, left + seg.x0 * s, top + seg.y1 * s,
                    left + seg.x1 * s, th, proto.ink);
}

} // namespace

GrayImage render_page(const PageSpec& spec) {
    if (spec.glyph_min < 4 || spec.glyph_max < spec.glyph_min)
        throw BadConfig("bad glyph size range");
    GrayImage page(spec.width, spec.height, 255);
    if (spec.glyph_target == 0) return page;

    const int margin_y = spec.height / 25, margin_x = spec.width / 25;
    const int usable_w = spec.width - 2 * margin_x, usable_h = spec.height - 2 * margin_y;
    // grid roughly matching the page aspect ratio
    int cols = std::max(1, int(std::lround(
        std::sqrt(double(spec.glyph_target) * usable_w / usable_h))));
    int rows = (spec.glyph_target + cols - 1) / cols;
    const double cell_w = double(usable_w) / cols, cell_h = double(usable_h) / rows;
    if (cell_w < spec.glyph_max + 2 || cell_h < spec.glyph_max + 2)
        throw LayoutOverflow("glyphs do not fit the page grid");

    const std::vector<GlyphProto> alphabet = make_alphabet(spec.style);
    Rng rng(mix_seed(spec.seed, std::uint64_t(spec.style) + 0x9A6E));
    int placed = 0;
    for (int r = 0; r < rows && placed < spec.glyph_target; ++r) {
        for (int c = 0; c < cols && placed < spec.glyph_target; ++c) {
            const int size = spec.glyph_min + int(rng.below(std::uint64_t(
                                 spec.glyph_max - spec.glyph_min + 1)));
            const int max_jy = std::max(1, int(cell_h) - size - 1);
            const int max_jx = std::max(1, int(cell_w) - size - 1);
            const int top = margin_y + int(r * cell_h) + int(rng.below(std::uint64_t(max_jy)));
            const int left = margin_x + int(c * cell_w) + int(rng.below(std::uint64_t(max_jx)));
            draw_glyph(page, top, left, size, alphabet[std::size_t(rng.below(alphabet.size()))]);
            ++placed;
        }
    }
    return page;
}

// ---- capture pipeline ----

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(std::size_t(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[std::size_t(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[std::size_t(i + radius)];
    }
    for (double& k : kernel) k /= sum;

    const int w = img.width, h = img.height;
    std::vector<double> tmp(std::size_t(w) * h), out(std::size_t(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                acc += kernel[std::size_t(i + radius)] * img.at(y, xx);
            }
            tmp[std::size_t(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                acc += kernel[std::size_t(i + radius)] * tmp[std::size_t(yy) * w + x];
            }
            out[std::size_t(y) * w + x] = acc;
        }
    GrayImage res(w, h);
    for (std::size_t i = 0; i < out.size(); ++i)
        res.data[i] = std::uint8_t(std::clamp(std::lround(out[i]), 0L, 255L));
    return res;
}

namespace {

std::uint64_t page_hash(const GrayImage& img) {
    // FNV-1a over pixels and dimensions
    std::uint64_t h = 1469598103934665603ULL;
    auto mixb = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mixb(std::uint64_t(img.width));
    mixb(std::uint64_t(img.height));
    for (std::uint8_t b : img.data) mixb(b);
    return h;
}

// JPEG luminance base table (ITU T.81 Annex K), row-major
constexpr int kQuantBase[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

void quant_table(int quality, double table[64]) {
    quality = std::clamp(quality, 1, 100);
    const double scale = quality < 50 ? 5000.0 / quality : 200.0 - 2.0 * quality;
    for (int i = 0; i < 64; ++i) {
        double q = std::floor((kQuantBase[i] * scale + 50.0) / 100.0);
        table[i] = std::clamp(q, 1.0, 255.0);
    }
}

// orthonormal DCT-II basis, C[k][n] = a_k cos(pi (2n+1) k / 16)
struct DctBasis {
    double c[8][8];
    DctBasis() {
        for (int k = 0; k < 8; ++k) {
            const double a = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int n = 0; n < 8; ++n)
                c[k][n] = a * std::cos(M_PI * (2 * n + 1) * k / 16.0);
        }
    }
};

} // namespace

GrayImage dct_codec_roundtrip(const GrayImage& img, int quality) {
    static const DctBasis basis;
    double qt[64];
    quant_table(quality, qt);

    const int w = img.width, h = img.height;
    const int bw = (w + 7) / 8, bh = (h + 7) / 8;
    GrayImage out(w, h);
    double block[8][8], coeff[8][8], tmp[8][8];
    for (int by = 0; by < bh; ++by) {
        for (int bx = 0; bx < bw; ++bx) {
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    // edge replication for partial boundary blocks
                    const int sy = std::min(by * 8 + y, h - 1);
                    const int sx = std::min(bx * 8 + x, w - 1);
                    block[y][x] = double(img.at(sy, sx)) - 128.0;
                }
            // rows then columns
            for (int y = 0; y < 8; ++y)
                for (int k = 0; k < 8; ++k) {
                    double acc = 0.0;
                    for (int n = 0; n < 8; ++n) acc += basis.c[k][n] * block[y][n];
                    tmp[y][k] = acc;
                }
            for (int k = 0; k < 8; ++k)
                for (int x = 0; x < 8; ++x) {
                    double acc = 0.0;
                    for (int n = 0; n < 8; ++n) acc += basis.c[k][n] * tmp[n][x];
                    coeff[k][x] = acc;
                }
            // uniform quantization round trip
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    const double q = qt[y * 8 + x];
                    coeff[y][x] = std::round(coeff[y][x] / q) * q;
                }
            // inverse
            for (int x = 0; x < 8; ++x)
                for (int n = 0; n < 8; ++n) {
                    double acc = 0.0;
                    for (int k = 0; k < 8; ++k) acc += basis.c[k][n] * coeff[k][x];
                    tmp[n][x] = acc;
                }
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    double acc = 0.0;
                    for (int k = 0; k < 8; ++k) acc += basis.c[k][x] * tmp[y][k];
                    block[y][x] = acc;
                }
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    const int py = by * 8 + y, px = bx * 8 + x;
                    if (py >= h || px >= w) continue;
                    out.at(py, px) = std::uint8_t(
                        std::clamp(std::lround(block[y][x] + 128.0), 0L, 255L));
                }
        }
    }
    return out;
}

GrayImage apply_device(const GrayImage& page, const DeviceSignature& sig) {
    if (page.data.empty()) throw ShapeMismatch("apply_device: empty page");
    const int w = page.width, h = page.height;

    const GrayImage blurred = gaussian_blur(page, sig.blur_sigma);

    std::vector<double> plane(blurred.data.begin(), blurred.data.end());

    // fixed per-device gain field regenerated from the signature seed: a
    // unit-mean sum of a few randomly oriented sinusoidal gratings (correlated
    // sensor noise). Frequencies live in normalized page coordinates, so the
    // same seed paints the same pattern at any capture resolution. Unlike a
    // location-keyed noise map, the realization's orientations and frequencies
    // show up in every local window, so the pattern is recognizable from
    // letter patches regardless of where on the page they were cut.
    if (sig.field_strength > 0.0) {
        constexpr int kWaves = 2;
        Rng field_rng(mix_seed(sig.seed, 0xF1E1D));
        double kx[kWaves], ky[kWaves], ph[kWaves], amp[kWaves];
        double norm = 0.0;
        for (int i = 0; i < kWaves; ++i) {
            const double theta = field_rng.uniform() * std::numbers::pi;
            // cycles per page height; periods of roughly 6-17 px after the
            // messaging downscale to 1040-row pages (roughly 4-10 px)
            const double freq = 100.0 + 140.0 * field_rng.uniform();
            kx[i] = 2.0 * std::numbers::pi * freq * std::cos(theta);
            ky[i] = 2.0 * std::numbers::pi * freq * std::sin(theta);
            ph[i] = 2.0 * std::numbers::pi * field_rng.uniform();
            amp[i] = 0.5 + field_rng.uniform();
            norm += 0.5 * amp[i] * amp[i];
        }
        // scale so the field's standard deviation equals field_strength
        const double scale = sig.field_strength / std::sqrt(norm);
        for (int y = 0; y < h; ++y) {
            const double v = double(y) / h;
            for (int x = 0; x < w; ++x) {
                const double u = double(x) / h;
                double g = 0.0;
                for (int i = 0; i < kWaves; ++i)
                    g += amp[i] * std::sin(kx[i] * u + ky[i] * v + ph[i]);
                plane[std::size_t(y) * w + x] *=
                    std::clamp(1.0 + scale * g, 0.5, 1.5);
            }
        }
    }

    if (sig.noise_sigma > 0.0) {
        Rng noise_rng(mix_seed(sig.seed, page_hash(page)));
        for (double& v : plane) v += sig.noise_sigma * noise_rng.normal();
    }

    if (sig.vignette > 0.0) {
        const double cy = (h - 1) * 0.5, cx = (w - 1) * 0.5;
        const double rmax2 = cy * cy + cx * cx;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double r2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
                plane[std::size_t(y) * w + x] *= 1.0 - sig.vignette * r2 / rmax2;
            }
    }

    GrayImage clamped(w, h);
    for (std::size_t i = 0; i < plane.size(); ++i)
        clamped.data[i] = std::uint8_t(std::clamp(std::lround(plane[i]), 0L, 255L));

    return dct_codec_roundtrip(clamped, sig.quality);
}

GrayImage area_downscale(const GrayImage& img, int target_w, int target_h) {
    if (target_w > img.width || target_h > img.height)
        throw UpscaleRefused("area_downscale cannot enlarge");
    const double sx = double(img.width) / target_w, sy = double(img.height) / target_h;
    GrayImage out(target_w, target_h);
    for (int oy = 0; oy < target_h; ++oy) {
        const double y0 = oy * sy, y1 = (oy + 1) * sy;
        for (int ox = 0; ox < target_w; ++ox) {
            const double x0 = ox * sx, x1 = (ox + 1) * sx;
            double acc = 0.0, area = 0.0;
            for (int y = int(y0); y < int(std::ceil(y1)); ++y) {
                const double wy = std::min(y1, double(y + 1)) - std::max(y0, double(y));
                if (wy <= 0.0) continue;
                for (int x = int(x0); x < int(std::ceil(x1)); ++x) {
                    const double wx = std::min(x1, double(x + 1)) - std::max(x0, double(x));
                    if (wx <= 0.0) continue;
                    acc += wy * wx * img.at(std::min(y, img.height - 1), std::min(x, img.width - 1));
                    area += wy * wx;
                }
            }
            out.at(oy, ox) = std::uint8_t(std::clamp(std::lround(acc / area), 0L, 255L));
        }
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int target_w, int target_h) {
    GrayImage out(target_w, target_h);
    const double sx = double(img.width) / target_w, sy = double(img.height) / target_h;
    for (int oy = 0; oy < target_h; ++oy) {
        const double fy = std::clamp((oy + 0.5) * sy - 0.5, 0.0, double(img.height - 1));
        const int y0 = int(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < target_w; ++ox) {
            const double fx = std::clamp((ox + 0.5) * sx - 0.5, 0.0, double(img.width - 1));
            const int x0 = int(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double v = (1 - wy) * ((1 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                             wy * ((1 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
            out.at(oy, ox) = std::uint8_t(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return out;
}

GrayImage simulate_messaging(const GrayImage& img, const MessagingProfile& profile) {
    if (profile.width > img.width || profile.height > img.height)
        throw UpscaleRefused("messaging target exceeds source size");
    const GrayImage scaled = area_downscale(img, profile.width, profile.height);
    return dct_codec_roundtrip(scaled, profile.quality);
}

// ---- dataset generation ----

GeneratorConfig load_generator_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open generator config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw BadConfig(std::string("generator config parse error: ") + e.what());
    }
    GeneratorConfig c;
    try {
        c.seed = j.value("seed", std::uint64_t(0));
        c.out_dir = j.value("out_dir", std::string("dataset"));
        if (j.contains("page")) {
            const auto& p = j["page"];
            c.page.width = p.value("width", c.page.width);
            c.page.height = p.value("height", c.page.height);
            c.page.glyph_target = p.value("glyph_target", c.page.glyph_target);
            c.page.glyph_min = p.value("glyph_min", c.page.glyph_min);
            c.page.glyph_max = p.value("glyph_max", c.page.glyph_max);
        }
        if (j.contains("messaging")) {
            const auto& m = j["messaging"];
            c.messaging.width = m.value("width", c.messaging.width);
            c.messaging.height = m.value("height", c.messaging.height);
            c.messaging.quality = m.value("quality", c.messaging.quality);
        }
        c.pages_per_font = j.value("pages_per_font", 5);
        if (j.contains("fonts"))
            for (const auto& f : j["fonts"])
                c.fonts.emplace_back(f.at("name").get<std::string>(), f.value("style", 0));
        for (const auto& d : j.at("devices")) {
            GeneratorDevice dev;
            dev.id = d.at("id").get<std::string>();
            dev.signature.seed = d.value("seed", std::uint64_t(0));
            dev.signature.field_strength = d.value("field_strength", 0.0);
            dev.signature.noise_sigma = d.value("noise_sigma", 0.0);
            dev.signature.blur_sigma = d.value("blur_sigma", 0.0);
            dev.signature.vignette = d.value("vignette", 0.0);
            dev.signature.quality = d.value("quality", 100);
            dev.native_width = d.value("native_width", 0);
            dev.native_height = d.value("native_height", 0);
            c.devices.push_back(std::move(dev));
        }
    } catch (const nlohmann::json::exception& e) {
        throw BadConfig(std::string("generator config schema error: ") + e.what());
    }
    if (c.fonts.empty()) c.fonts.emplace_back("fontA", 0);
    return c;
}

DatasetManifest generate_dataset(const GeneratorConfig& config) {
    if (config.devices.empty()) throw BadConfig("no devices configured");
    fs::create_directories(config.out_dir);

    DatasetManifest manifest;
    manifest.root = config.out_dir;
    for (const auto& [name, style] : config.fonts) manifest.fonts.push_back(name);
    for (const auto& dev : config.devices) {
        DeviceEntry e;
        e.id = dev.id;
        for (const auto& [name, style] : config.fonts)
            e.pages.emplace_back(name, std::vector<std::string>());
        manifest.devices.push_back(std::move(e));
    }

    struct Job {
        std::size_t font_idx;
        int page_idx;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < config.fonts.size(); ++f)
        for (int p = 0; p < config.pages_per_font; ++p) jobs.push_back({f, p});

    // relative paths are fixed up front; work only fills in the files
    for (std::size_t d = 0; d < config.devices.size(); ++d)
        for (const auto& job : jobs) {
            const auto& font = config.fonts[job.font_idx].first;
            manifest.devices[d].pages[job.font_idx].second.resize(
                std::size_t(config.pages_per_font));
            manifest.devices[d].pages[job.font_idx].second[std::size_t(job.page_idx)] =
                config.devices[d].id + "/" + font + "/page" + std::to_string(job.page_idx) +
                ".png";
        }

    parallel_for(jobs.size(), [&](std::size_t ji) {
        const Job& job = jobs[ji];
        PageSpec spec = config.page;
        spec.style = config.fonts[job.font_idx].second;
        spec.seed = mix_seed(config.seed, job.font_idx * 1000003ULL + std::uint64_t(job.page_idx));
        const GrayImage clean = render_page(spec);

        for (std::size_t d = 0; d < config.devices.size(); ++d) {
            const GeneratorDevice& dev = config.devices[d];
            GrayImage img = clean;
            const bool other_native =
                dev.native_width > 0 && dev.native_height > 0 &&
                (dev.native_width != spec.width || dev.native_height != spec.height);
            if (other_native) img = resize_bilinear(img, dev.native_width, dev.native_height);
            img = apply_device(img, dev.signature);
            if (other_native) img = resize_bilinear(img, spec.width, spec.height);
            img = simulate_messaging(img, config.messaging);

            const std::string rel =
                manifest.devices[d].pages[job.font_idx].second[std::size_t(job.page_idx)];
            const fs::path full = fs::path(config.out_dir) / rel;
            fs::create_directories(full.parent_path());
            save_image(img, full.string());
        }
    });

    save_manifest(manifest, (fs::path(config.out_dir) / "manifest.json").string());

    // signature bank for reproducibility audits
    nlohmann::ordered_json bank = nlohmann::ordered_json::array();
    for (const auto& dev : config.devices) {
        bank.push_back({{"id", dev.id},
                        {"seed", dev.signature.seed},
                        {"field_strength", dev.signature.field_strength},
                        {"noise_sigma", dev.signature.noise_sigma},
                        {"blur_sigma", dev.signature.blur_sigma},
                        {"vignette", dev.signature.vignette},
                        {"quality", dev.signature.quality},
                        {"native_width", dev.native_width},
                        {"native_height", dev.native_height}});
    }
    std::ofstream bank_out(fs::path(config.out_dir) / "signatures.json");
    bank_out << bank.dump(2) << '\n';

    return manifest;
}

} // namespace docsource
