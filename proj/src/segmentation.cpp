#include "docsource/segmentation.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

namespace docsource {

std::vector<Component> label_components(const BitMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<int> label(std::size_t(w) * h, -1);
    std::vector<Component> comps;
    std::vector<int> stack;

    static constexpr int dx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
    static constexpr int dy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

    int next = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = std::size_t(y) * w + x;
            if (!mask.bits[idx] || label[idx] >= 0) continue;
            Component c;
            c.label = next++;
            int min_x = x, max_x = x, min_y = y, max_y = y;
            label[idx] = c.label;
            stack.assign(1, int(idx));
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int cy = cur / w, cx = cur % w;
                ++c.area;
                min_x = std::min(min_x, cx); max_x = std::max(max_x, cx);
                min_y = std::min(min_y, cy); max_y = std::max(max_y, cy);
                for (int k = 0; k < 8; ++k) {
                    const int ny = cy + dy[k], nx = cx + dx[k];
                    if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                    const std::size_t nidx = std::size_t(ny) * w + nx;
                    if (mask.bits[nidx] && label[nidx] < 0) {
                        label[nidx] = c.label;
                        stack.push_back(int(nidx));
                    }
                }
            }
            c.top = min_y;
            c.left = min_x;
            c.height = max_y - min_y + 1;
            c.width = max_x - min_x + 1;
            comps.push_back(c);
        }
    }
    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        if (a.top != b.top) return a.top < b.top;
        if (a.left != b.left) return a.left < b.left;
        return a.label < b.label;
    });
    return comps;
}

namespace {

double median_area(const std::vector<Component>& comps) {
    std::vector<long> areas;
    areas.reserve(comps.size());
    for (const auto& c : comps) areas.push_back(c.area);
    std::sort(areas.begin(), areas.end());
    const std::size_t n = areas.size();
    if (n % 2 == 1) return double(areas[n / 2]);
    return 0.5 * (double(areas[n / 2 - 1]) + double(areas[n / 2]));
}

bool keep_component(const Component& c, double med) {
    return double(c.area) >= 0.5 * med && c.height >= 3 && c.height <= 90 &&
           c.width >= 2 && c.width <= 100;
}

} // namespace

std::vector<Component> filter_components(const std::vector<Component>& comps) {
    if (comps.empty()) return {};
    const double med = median_area(comps);
    std::vector<Component> out;
    out.reserve(comps.size());
    for (const auto& c : comps)
        if (keep_component(c, med)) out.push_back(c);
    return out;
}

Patch extract_patch(const GrayImage& img, const Component& comp, int p) {
    if (p < 1) throw BadPatchSize("patch size must be >= 1");
    Patch patch;
    patch.size = p;
    patch.values.assign(std::size_t(p) * p, 0.0);

    // per axis: source window start in bbox coords and destination offset
    auto axis = [p](int extent, int& src_start, int& dst_start, int& count) {
        if (extent >= p) {
            src_start = (extent - p) / 2; // smaller share dropped on the top/left
            dst_start = 0;
            count = p;
        } else {
            src_start = 0;
            dst_start = (p - extent) / 2; // smaller share padded on the top/left
            count = extent;
        }
    };
    int sy, dy_off, rows, sx, dx_off, cols;
    axis(comp.height, sy, dy_off, rows);
    axis(comp.width, sx, dx_off, cols);

    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
            const std::uint8_t v = img.at(comp.top + sy + y, comp.left + sx + x);
            patch.values[std::size_t(dy_off + y) * p + (dx_off + x)] = double(v) / 255.0;
        }
    }
    return patch;
}

std::vector<Patch> extract_patches(const GrayImage& img,
                                   const std::vector<Component>& comps, int p) {
    std::vector<Patch> out;
    out.reserve(comps.size());
    for (const auto& c : comps) out.push_back(extract_patch(img, c, p));
    return out;
}

std::string dump_components_json(const std::vector<Component>& comps) {
    const double med = comps.empty() ? 0.0 : median_area(comps);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : comps) {
        nlohmann::ordered_json rec;
        rec["label"] = c.label;
        rec["bbox"] = {c.top, c.left, c.height, c.width};
        rec["area"] = c.area;
        const bool kept = keep_component(c, med);
        rec["kept"] = kept;
        if (!kept) {
            std::string reason;
            if (double(c.area) < 0.5 * med) reason = "area below half-median";
            else if (c.height < 3 || c.height > 90) reason = "height out of [3,90]";
            else reason = "width out of [2,100]";
            rec["reason"] = reason;
        }
        arr.push_back(std::move(rec));
    }
    return arr.dump(2);
}

} // namespace docsource
