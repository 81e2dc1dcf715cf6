#include "docsource/classify.hpp"

#include <nlohmann/json.hpp>

namespace docsource {

PageVerdict majority_vote(const std::vector<Prediction>& preds, int class_count) {
    if (preds.empty()) throw NoComponents("no component predictions to vote on");
    PageVerdict v;
    v.histogram.assign(std::size_t(class_count), 0);
    v.component_count = long(preds.size());
    std::vector<double> score_sum(std::size_t(class_count), 0.0);
    for (const auto& pr : preds) {
        if (pr.label < 0 || pr.label >= class_count)
            throw LabelOutOfRange("prediction label out of range");
        ++v.histogram[std::size_t(pr.label)];
        for (int c = 0; c < class_count; ++c) score_sum[std::size_t(c)] += pr.scores[std::size_t(c)];
    }
    const long max_votes = *std::max_element(v.histogram.begin(), v.histogram.end());
    int best = -1;
    int tied = 0;
    for (int c = 0; c < class_count; ++c) {
        if (v.histogram[std::size_t(c)] != max_votes) continue;
        ++tied;
        if (best < 0 || score_sum[std::size_t(c)] > score_sum[std::size_t(best)]) best = c;
    }
    v.label = best;
    v.tie_broken = tied > 1;
    return v;
}

namespace {

std::vector<Patch> page_patches(const GrayImage& img, int p) {
    const std::uint8_t t = otsu_threshold(img);
    const BitMask mask = binarize(img, t);
    const auto comps = filter_components(label_components(mask));
    if (comps.empty()) throw NoComponents("page yields no usable components");
    return extract_patches(img, comps, p);
}

} // namespace

PageVerdict predict_page(Network& net, const GrayImage& img) {
    const auto patches = page_patches(img, net.config.patch_size);
    return majority_vote(predict(net, patches), net.config.class_count);
}

PageVerdict predict_page(const Checkpoint& ckpt, const GrayImage& img) {
    Network net = ckpt.to_network();
    return predict_page(net, img);
}

PageVerdict predict_page(const Checkpoint& ckpt, const RgbImage& img) {
    return predict_page(ckpt, to_grayscale(img));
}

std::string PageVerdict::to_json() const {
    nlohmann::ordered_json j;
    j["label"] = label;
    j["histogram"] = histogram;
    j["component_count"] = component_count;
    j["tie_broken"] = tie_broken;
    return j.dump(2);
}

} // namespace docsource
