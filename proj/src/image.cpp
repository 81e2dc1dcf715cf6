#include "docsource/image.hpp"

#include <array>
#include <cmath>

namespace docsource {

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    const std::size_t n = std::size_t(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                         0.114 * img.data[3 * i + 2];
        double r = std::floor(v + 0.5);
        if (r < 0.0) r = 0.0;
        if (r > 255.0) r = 255.0;
        out.data[i] = static_cast<std::uint8_t>(r);
    }
    return out;
}

std::uint8_t otsu_threshold(const GrayImage& img) {
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : img.data) ++hist[v];

    const double total = static_cast<double>(img.data.size());
    double sum_all = 0.0;
    int distinct = 0;
    for (int v = 0; v < 256; ++v) {
        sum_all += double(v) * double(hist[v]);
        if (hist[v] > 0) ++distinct;
    }
    if (distinct < 2) throw ConstantImage("otsu_threshold: image has a single intensity");

    int best_t = 0;
    double best_var = -1.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 256; ++t) {
        w0 += double(hist[t]);
        sum0 += double(t) * double(hist[t]);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return static_cast<std::uint8_t>(best_t);
}

BitMask binarize(const GrayImage& img, std::uint8_t t) {
    BitMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        mask.bits[i] = img.data[i] <= t ? 1 : 0;
    }
    return mask;
}

} // namespace docsource
