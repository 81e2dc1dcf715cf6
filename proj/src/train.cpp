#include "docsource/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "docsource/adam.hpp"

namespace docsource {

std::pair<LabeledPatchSet, LabeledPatchSet>
stratified_split(const LabeledPatchSet& all, double frac, std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < all.size(); ++i) by_class[all.labels[i]].push_back(i);

    Rng rng(mix_seed(seed, 0x5117));
    std::vector<std::uint8_t> is_val(all.size(), 0);
    for (auto& [label, idxs] : by_class) {
        std::size_t take = std::size_t(std::llround(frac * double(idxs.size())));
        if (take == 0 && idxs.size() >= 2) take = 1;
        if (take >= idxs.size()) take = idxs.size() - 1;
        rng.shuffle(idxs);
        for (std::size_t i = 0; i < take; ++i) is_val[idxs[i]] = 1;
    }

    LabeledPatchSet tr, va;
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto& dst = is_val[i] ? va : tr;
        dst.patches.push_back(all.patches[i]);
        dst.labels.push_back(all.labels[i]);
    }
    return {std::move(tr), std::move(va)};
}

Tensor patches_to_tensor(const Patch* patches, std::size_t count, int p) {
    Tensor t(int(count), p, p, 1);
    for (std::size_t i = 0; i < count; ++i) {
        if (patches[i].size != p) throw ShapeMismatch("patch size mismatch");
        std::memcpy(t.data.data() + Eigen::Index(i) * p * p, patches[i].values.data(),
                    std::size_t(p) * p * sizeof(double));
    }
    return t;
}

namespace {

double validation_loss(Network& net, const LabeledPatchSet& val) {
    // averaged over the whole set regardless of chunking
    constexpr std::size_t kChunk = 256;
    double total = 0.0;
    for (std::size_t off = 0; off < val.size(); off += kChunk) {
        const std::size_t n = std::min(kChunk, val.size() - off);
        Tensor x = patches_to_tensor(val.patches.data() + off, n, net.config.patch_size);
        Tensor scores = net.forward(x, /*train=*/false);
        const auto rows = scores.rows();
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            const double s = std::max(rows(r, val.labels[off + std::size_t(r)]), 1e-12);
            total += -std::log(s);
        }
    }
    return total / double(val.size());
}

} // namespace

Checkpoint train(const LabeledPatchSet& train_set, const LabeledPatchSet& val_set,
                 const NetworkConfig& cfg) {
    cfg.validate();
    if (train_set.size() == 0 || val_set.size() == 0)
        throw EmptyDataset("train and validation sets must be non-empty");
    for (int y : train_set.labels)
        if (y < 0 || y >= cfg.class_count) throw LabelOutOfRange("train label out of range");
    for (int y : val_set.labels)
        if (y < 0 || y >= cfg.class_count) throw LabelOutOfRange("validation label out of range");

    Network net = build_network(cfg);
    auto params = net.params();
    AdamState adam(params);
    Rng shuffle_rng(mix_seed(cfg.seed, 0xBA7C4));

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    Checkpoint best;
    bool have_best = false;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        std::size_t off = 0;
        while (off < order.size()) {
            std::size_t n = std::min(std::size_t(cfg.batch_size), order.size() - off);
            // a trailing singleton cannot be batch-normalized; fold it in
            if (order.size() - (off + n) == 1) ++n;
            Tensor x(int(n), cfg.patch_size, cfg.patch_size, 1);
            std::vector<int> labels(n);
            for (std::size_t i = 0; i < n; ++i) {
                const Patch& patch = train_set.patches[order[off + i]];
                if (patch.size != cfg.patch_size) throw ShapeMismatch("patch size mismatch");
                std::memcpy(x.data.data() + Eigen::Index(i) * cfg.patch_size * cfg.patch_size,
                            patch.values.data(),
                            std::size_t(cfg.patch_size) * cfg.patch_size * sizeof(double));
                labels[i] = train_set.labels[order[off + i]];
            }
            net.zero_grads();
            Tensor scores = net.forward(x, /*train=*/true);
            net.backward(scores, labels);
            adam_step(params, adam, decayed_lr(cfg.lr0, cfg.decay, adam.t));
            off += n;
        }

        const double loss = validation_loss(net, val_set);
        if (!have_best || loss < best.val_loss) {
            best = Checkpoint::from_network(net, epoch, loss);
            have_best = true;
        }
    }
    return best;
}

std::vector<Prediction> predict(Network& net, const std::vector<Patch>& patches) {
    constexpr std::size_t kChunk = 256;
    const int p = net.config.patch_size;
    const int S = net.config.class_count;
    std::vector<Prediction> out;
    out.reserve(patches.size());
    for (std::size_t off = 0; off < patches.size(); off += kChunk) {
        const std::size_t n = std::min(kChunk, patches.size() - off);
        Tensor x = patches_to_tensor(patches.data() + off, n, p);
        Tensor scores = net.forward(x, /*train=*/false);
        const auto rows = scores.rows();
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            Prediction pr;
            pr.scores.assign(S, 0.0);
            int best = 0;
            for (int c = 0; c < S; ++c) {
                pr.scores[std::size_t(c)] = rows(r, c);
                if (rows(r, c) > rows(r, best)) best = c;
            }
            pr.label = best;
            out.push_back(std::move(pr));
        }
    }
    return out;
}

std::vector<Prediction> predict(const Checkpoint& ckpt, const std::vector<Patch>& patches) {
    Network net = ckpt.to_network();
    return predict(net, patches);
}

} // namespace docsource
