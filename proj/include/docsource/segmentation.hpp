#pragma once

#include <string>
#include <vector>

#include "docsource/image.hpp"

namespace docsource {

struct Component {
    int label = 0;
    int top = 0, left = 0, height = 0, width = 0; // tight bounding box
    long area = 0;                                // ink pixel count
};

struct Patch {
    int size = 0;               // pixels per side
    std::vector<double> values; // size*size, row-major, in [0,1]

    double at(int y, int x) const { return values[std::size_t(y) * size + x]; }
};

// 8-connected components of true bits, bboxes tight, ordered by
// (bbox top, bbox left, label). Empty mask yields an empty list.
std::vector<Component> label_components(const BitMask& mask);

// One conjunctive pass over the original set: keeps components with
// area >= 0.5 * median(all input areas), height in [3, 90], width in [2, 100].
// Median of an even count is the mean of the two middle values.
std::vector<Component> filter_components(const std::vector<Component>& comps);

// Center-crop or zero-pad the bbox sub-image to p x p (smaller share on the
// top/left), then scale intensities by 1/255.
Patch extract_patch(const GrayImage& img, const Component& comp, int p);

std::vector<Patch> extract_patches(const GrayImage& img,
                                   const std::vector<Component>& comps, int p);

// Per-page debug dump: JSON array of components with bbox, area and the
// keep/drop verdict of filter_components.
std::string dump_components_json(const std::vector<Component>& comps);

} // namespace docsource
