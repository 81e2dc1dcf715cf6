#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "docsource/classify.hpp"

using namespace docsource;

namespace {

Prediction pred(int label, std::vector<double> scores) {
    Prediction p;
    p.label = label;
    p.scores = std::move(scores);
    return p;
}

// tiny trained network over solid-dark vs solid-light 10x10 patches; used for
// the image-level pipeline tests
Checkpoint trained_toy() {
    LabeledPatchSet set;
    Rng rng(902);
    for (int label = 0; label < 2; ++label)
        for (int s = 0; s < 20; ++s) {
            Patch p;
            p.size = 10;
            p.values.assign(100, 0.0);
            for (auto& v : p.values)
                v = std::clamp((label == 0 ? 0.9 : 0.15) + 0.05 * rng.normal(), 0.0, 1.0);
            set.patches.push_back(std::move(p));
            set.labels.push_back(label);
        }
    NetworkConfig cfg;
    cfg.patch_size = 10;
    cfg.class_count = 2;
    cfg.conv_filters = 6;
    cfg.dense_units = 12;
    cfg.epochs = 20;
    cfg.batch_size = 16;
    cfg.seed = 37;
    const auto [tr, va] = stratified_split(set, 0.1, 37);
    return train(tr, va, cfg);
}

} // namespace

TEST_CASE("a single prediction decides the page outright") {
    const PageVerdict v = majority_vote({pred(2, {0.1, 0.2, 0.7})}, 3);
    CHECK(v.label == 2);
    CHECK(v.component_count == 1);
    CHECK(v.histogram == std::vector<long>{0, 0, 1});
    CHECK_FALSE(v.tie_broken);
}

TEST_CASE("the plurality class wins even without a majority") {
    const PageVerdict v = majority_vote(
        {pred(0, {0.9, 0.05, 0.05}), pred(0, {0.8, 0.1, 0.1}), pred(1, {0.1, 0.8, 0.1}),
         pred(2, {0.2, 0.2, 0.6})},
        3);
    CHECK(v.label == 0);
    CHECK(v.histogram == std::vector<long>{2, 1, 1});
    CHECK_FALSE(v.tie_broken);
}

TEST_CASE("vote ties break toward the larger summed softmax score") {
    // one vote each; class 1 holds clearly more total mass
    const PageVerdict v =
        majority_vote({pred(0, {0.51, 0.49}), pred(1, {0.05, 0.95})}, 2);
    CHECK(v.label == 1);
    CHECK(v.tie_broken);
}

TEST_CASE("vote and score ties break toward the lower class index") {
    const PageVerdict v =
        majority_vote({pred(1, {0.3, 0.4, 0.3}), pred(2, {0.3, 0.3, 0.4})}, 3);
    // score sums: class 1 gets 0.7, class 2 gets 0.7 -> lower index wins
    CHECK(v.label == 1);
    CHECK(v.tie_broken);
}

TEST_CASE("the verdict is invariant to prediction order") {
    std::vector<Prediction> preds = {pred(0, {0.6, 0.4}), pred(1, {0.2, 0.8}),
                                     pred(1, {0.45, 0.55}), pred(0, {0.7, 0.3}),
                                     pred(1, {0.1, 0.9})};
    const PageVerdict base = majority_vote(preds, 2);
    Rng rng(417);
    for (int trial = 0; trial < 20; ++trial) {
        rng.shuffle(preds);
        const PageVerdict v = majority_vote(preds, 2);
        CHECK(v.label == base.label);
        CHECK(v.histogram == base.histogram);
        CHECK(v.tie_broken == base.tie_broken);
    }
}

TEST_CASE("histogram entries always sum to the component count") {
    Rng rng(418);
    for (int trial = 0; trial < 30; ++trial) {
        const int S = 2 + int(rng.below(5));
        std::vector<Prediction> preds;
        const int n = 1 + int(rng.below(40));
        for (int i = 0; i < n; ++i) {
            std::vector<double> scores(std::size_t(S), 0.0);
            double sum = 0.0;
            for (auto& s : scores) sum += (s = rng.uniform());
            for (auto& s : scores) s /= sum;
            int best = 0;
            for (int c = 1; c < S; ++c)
                if (scores[std::size_t(c)] > scores[std::size_t(best)]) best = c;
            preds.push_back(pred(best, scores));
        }
        const PageVerdict v = majority_vote(preds, S);
        long total = 0;
        for (long h : v.histogram) total += h;
        CHECK(total == v.component_count);
        CHECK(v.component_count == n);
        CHECK(v.histogram[std::size_t(v.label)] ==
              *std::max_element(v.histogram.begin(), v.histogram.end()));
    }
}

TEST_CASE("an empty prediction list cannot produce a verdict") {
    CHECK_THROWS_AS(majority_vote({}, 3), NoComponents);
}

TEST_CASE("verdict JSON carries label, histogram, counts and the tie flag") {
    const PageVerdict v = majority_vote(
        {pred(1, {0.2, 0.8}), pred(1, {0.3, 0.7}), pred(0, {0.9, 0.1})}, 2);
    const auto j = nlohmann::json::parse(v.to_json());
    CHECK(j.at("label").get<int>() == 1);
    CHECK(j.at("component_count").get<long>() == 3);
    CHECK(j.at("histogram").get<std::vector<long>>() == std::vector<long>{1, 2});
    CHECK(j.at("tie_broken").get<bool>() == false);
}

TEST_CASE("a constant page fails in thresholding, a speck-only page in filtering") {
    const Checkpoint ckpt = trained_toy();
    const GrayImage blank(32, 32, 255);
    CHECK_THROWS_AS(predict_page(ckpt, blank), ConstantImage);

    GrayImage speck(32, 32, 255);
    speck.at(10, 10) = 0; // 1x1 component, below the minimum height
    CHECK_THROWS_AS(predict_page(ckpt, speck), NoComponents);
}

TEST_CASE("the page pipeline votes across extracted components") {
    const Checkpoint ckpt = trained_toy();
    // several solid dark blobs on a light page: every patch is mostly dark,
    // the class the toy model maps to label 0
    GrayImage page(64, 64, 255);
    for (int by : {8, 28, 48})
        for (int bx : {8, 28, 48})
            for (int y = 0; y < 6; ++y)
                for (int x = 0; x < 6; ++x) page.at(by + y, bx + x) = 20;
    const PageVerdict v = predict_page(ckpt, page);
    CHECK(v.component_count == 9);
    // the zero-padded dark-blob patches sit near the class-1 intensity level
    CHECK(v.label == 1);
    CHECK(v.histogram[0] + v.histogram[1] == 9);
}
