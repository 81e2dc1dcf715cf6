#pragma once

#include "docsource/image_io.hpp"
#include "docsource/train.hpp"

namespace docsource {

struct PageVerdict {
    int label = 0;
    std::vector<long> histogram;     // per-class component votes
    long component_count = 0;
    bool tie_broken = false;

    std::string to_json() const;
};

// Full page pipeline: grayscale -> Otsu -> binarize -> components -> filter ->
// patches -> CNN -> majority vote. Vote ties break by larger summed softmax
// score, then lower class index. Throws NoComponents on an unusable page.
PageVerdict predict_page(const Checkpoint& ckpt, const GrayImage& img);
PageVerdict predict_page(Network& net, const GrayImage& img);
PageVerdict predict_page(const Checkpoint& ckpt, const RgbImage& img);

// Vote aggregation only (shared by the harness, which batches inference).
PageVerdict majority_vote(const std::vector<Prediction>& preds, int class_count);

} // namespace docsource
