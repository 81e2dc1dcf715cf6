#include "docsource/image_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace docsource {
namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    return buf;
}

void write_file(const std::string& path, const std::uint8_t* data, std::size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data), std::streamsize(n));
    if (!out) throw IoError("short write to " + path);
}

// ---- PNM (P5 gray / P6 rgb, maxval 255) ----

struct PnmHeader {
    int type = 0; // 5 or 6
    int width = 0, height = 0, maxval = 0;
    std::size_t data_offset = 0;
};

PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& buf) {
    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '5' && buf[1] != '6'))
        throw UnsupportedFormat("not a P5/P6 PNM file");
    PnmHeader h;
    h.type = buf[1] - '0';
    std::size_t i = 2;
    int fields[3];
    for (int f = 0; f < 3; ++f) {
        // skip whitespace and '#' comments
        while (i < buf.size()) {
            if (std::isspace(buf[i])) { ++i; }
            else if (buf[i] == '#') { while (i < buf.size() && buf[i] != '\n') ++i; }
            else break;
        }
        int v = 0;
        bool any = false;
        while (i < buf.size() && std::isdigit(buf[i])) {
            v = v * 10 + (buf[i] - '0');
            any = true;
            ++i;
        }
        if (!any) throw CorruptData("malformed PNM header");
        fields[f] = v;
    }
    if (i >= buf.size() || !std::isspace(buf[i])) throw CorruptData("malformed PNM header");
    ++i; // single whitespace before raster
    h.width = fields[0];
    h.height = fields[1];
    h.maxval = fields[2];
    h.data_offset = i;
    if (h.width < 1 || h.height < 1) throw CorruptData("bad PNM dimensions");
    if (h.maxval != 255) throw UnsupportedFormat("only maxval 255 PNM supported");
    return h;
}

AnyImage load_pnm(const std::vector<std::uint8_t>& buf) {
    const PnmHeader h = parse_pnm_header(buf);
    const std::size_t channels = h.type == 5 ? 1 : 3;
    const std::size_t need = std::size_t(h.width) * h.height * channels;
    if (buf.size() - h.data_offset < need) throw CorruptData("truncated PNM raster");
    if (h.type == 5) {
        GrayImage img(h.width, h.height);
        std::memcpy(img.data.data(), buf.data() + h.data_offset, need);
        return img;
    }
    RgbImage img;
    img.width = h.width;
    img.height = h.height;
    img.data.assign(buf.begin() + std::ptrdiff_t(h.data_offset),
                    buf.begin() + std::ptrdiff_t(h.data_offset + need));
    return img;
}

void save_pnm(const std::string& path, int type, int w, int h,
              const std::uint8_t* data, std::size_t n) {
    std::ostringstream hdr;
    hdr << 'P' << type << '\n' << w << ' ' << h << "\n255\n";
    const std::string hs = hdr.str();
    std::vector<std::uint8_t> buf(hs.begin(), hs.end());
    buf.insert(buf.end(), data, data + n);
    write_file(path, buf.data(), buf.size());
}

// ---- PNG (8-bit gray / RGB, non-interlaced) ----

constexpr std::uint8_t kPngSig[8] = {137, 80, 78, 71, 13, 10, 26, 10};

void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(std::uint8_t(x >> 24));
    v.push_back(std::uint8_t(x >> 16));
    v.push_back(std::uint8_t(x >> 8));
    v.push_back(std::uint8_t(x));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char tag[4],
                  const std::uint8_t* data, std::size_t n) {
    put_u32(out, std::uint32_t(n));
    const std::size_t tag_pos = out.size();
    out.insert(out.end(), tag, tag + 4);
    out.insert(out.end(), data, data + n);
    const uLong crc = crc32(0L, out.data() + tag_pos, uInt(4 + n));
    put_u32(out, std::uint32_t(crc));
}

void save_png(const std::string& path, int w, int h, int channels,
              const std::uint8_t* pixels) {
    // filter type 0 on every scanline
    const std::size_t stride = std::size_t(w) * channels;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * h);
    for (int y = 0; y < h; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), pixels + y * stride, pixels + (y + 1) * stride);
    }
    uLongf comp_len = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw IoError("deflate failed for " + path);
    comp.resize(comp_len);

    std::vector<std::uint8_t> out(kPngSig, kPngSig + 8);
    std::uint8_t ihdr[13];
    ihdr[0] = std::uint8_t(std::uint32_t(w) >> 24);
    ihdr[1] = std::uint8_t(std::uint32_t(w) >> 16);
    ihdr[2] = std::uint8_t(std::uint32_t(w) >> 8);
    ihdr[3] = std::uint8_t(w);
    ihdr[4] = std::uint8_t(std::uint32_t(h) >> 24);
    ihdr[5] = std::uint8_t(std::uint32_t(h) >> 16);
    ihdr[6] = std::uint8_t(std::uint32_t(h) >> 8);
    ihdr[7] = std::uint8_t(h);
    ihdr[8] = 8;                                    // bit depth
    ihdr[9] = channels == 1 ? 0 : 2;                // color type
    ihdr[10] = ihdr[11] = ihdr[12] = 0;             // deflate, adaptive, no interlace
    append_chunk(out, "IHDR", ihdr, 13);
    append_chunk(out, "IDAT", comp.data(), comp.size());
    append_chunk(out, "IEND", nullptr, 0);
    write_file(path, out.data(), out.size());
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

AnyImage load_png(const std::vector<std::uint8_t>& buf) {
    if (buf.size() < 8 || std::memcmp(buf.data(), kPngSig, 8) != 0)
        throw UnsupportedFormat("not a PNG file");
    std::size_t i = 8;
    int w = 0, h = 0, channels = 0;
    std::vector<std::uint8_t> idat;
    bool seen_ihdr = false, seen_iend = false;
    while (i + 8 <= buf.size()) {
        const std::uint32_t len = get_u32(buf.data() + i);
        if (i + 12 + len > buf.size()) throw CorruptData("truncated PNG chunk");
        const char* tag = reinterpret_cast<const char*>(buf.data() + i + 4);
        const std::uint8_t* data = buf.data() + i + 8;
        if (std::memcmp(tag, "IHDR", 4) == 0) {
            if (len != 13) throw CorruptData("bad IHDR length");
            w = int(get_u32(data));
            h = int(get_u32(data + 4));
            const int depth = data[8], color = data[9], interlace = data[12];
            if (depth != 8 || (color != 0 && color != 2))
                throw UnsupportedFormat("only 8-bit gray/RGB PNG supported");
            if (interlace != 0) throw UnsupportedFormat("interlaced PNG not supported");
            channels = color == 0 ? 1 : 3;
            seen_ihdr = true;
        } else if (std::memcmp(tag, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(tag, "IEND", 4) == 0) {
            seen_iend = true;
            break;
        }
        i += 12 + len;
    }
    if (!seen_ihdr || !seen_iend || w < 1 || h < 1) throw CorruptData("incomplete PNG");

    const std::size_t stride = std::size_t(w) * channels;
    std::vector<std::uint8_t> raw((stride + 1) * h);
    uLongf raw_len = uLongf(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), uLong(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw CorruptData("PNG inflate failed");

    std::vector<std::uint8_t> pix(stride * h);
    const int bpp = channels;
    for (int y = 0; y < h; ++y) {
        const std::uint8_t filter = raw[y * (stride + 1)];
        const std::uint8_t* src = raw.data() + y * (stride + 1) + 1;
        std::uint8_t* dst = pix.data() + y * stride;
        const std::uint8_t* up = y > 0 ? pix.data() + (y - 1) * stride : nullptr;
        for (std::size_t x = 0; x < stride; ++x) {
            const int a = x >= std::size_t(bpp) ? dst[x - bpp] : 0;
            const int b = up ? up[x] : 0;
            const int c = (up && x >= std::size_t(bpp)) ? up[x - bpp] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw CorruptData("unknown PNG filter type");
            }
            dst[x] = std::uint8_t(v);
        }
    }
    if (channels == 1) {
        GrayImage img(w, h);
        img.data = std::move(pix);
        return img;
    }
    RgbImage img;
    img.width = w;
    img.height = h;
    img.data = std::move(pix);
    return img;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

AnyImage load_image(const std::string& path) {
    const auto buf = read_file(path);
    if (buf.size() >= 8 && std::memcmp(buf.data(), kPngSig, 8) == 0) return load_png(buf);
    if (buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '5' || buf[1] == '6'))
        return load_pnm(buf);
    throw UnsupportedFormat("unrecognized image format: " + path);
}

void save_image(const GrayImage& img, const std::string& path) {
    if (ends_with(path, ".png")) save_png(path, img.width, img.height, 1, img.data.data());
    else if (ends_with(path, ".pgm"))
        save_pnm(path, 5, img.width, img.height, img.data.data(), img.data.size());
    else throw UnsupportedFormat("unsupported extension for gray image: " + path);
}

void save_image(const RgbImage& img, const std::string& path) {
    if (ends_with(path, ".png")) save_png(path, img.width, img.height, 3, img.data.data());
    else if (ends_with(path, ".ppm"))
        save_pnm(path, 6, img.width, img.height, img.data.data(), img.data.size());
    else throw UnsupportedFormat("unsupported extension for rgb image: " + path);
}

GrayImage load_grayscale(const std::string& path) {
    AnyImage any = load_image(path);
    if (std::holds_alternative<GrayImage>(any)) return std::get<GrayImage>(std::move(any));
    return to_grayscale(std::get<RgbImage>(any));
}

} // namespace docsource
