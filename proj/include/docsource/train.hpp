#pragma once

#include "docsource/checkpoint.hpp"
#include "docsource/segmentation.hpp"

namespace docsource {

struct LabeledPatchSet {
    std::vector<Patch> patches;
    std::vector<int> labels; // in [0, S)

    std::size_t size() const { return patches.size(); }
};

// Per-class hold-out: for each class, round(frac * count) samples (at least 1
// when the class has >= 2) move to the validation set. Selection is seeded.
std::pair<LabeledPatchSet, LabeledPatchSet>
stratified_split(const LabeledPatchSet& all, double frac, std::uint64_t seed);

// Batch tensor (n, p, p, 1) from a span of patches.
Tensor patches_to_tensor(const Patch* patches, std::size_t count, int p);

// Shuffled mini-batch training with Adam and per-update learning-rate decay.
// Validation loss is evaluated after each epoch in inference mode; the
// checkpoint with the lowest loss wins, earliest epoch on ties.
Checkpoint train(const LabeledPatchSet& train_set, const LabeledPatchSet& val_set,
                 const NetworkConfig& cfg);

struct Prediction {
    int label = 0;
    std::vector<double> scores; // softmax, length S
};

// Inference-mode predictions, one per patch; processed in fixed-size chunks.
std::vector<Prediction> predict(const Checkpoint& ckpt, const std::vector<Patch>& patches);
std::vector<Prediction> predict(Network& net, const std::vector<Patch>& patches);

} // namespace docsource
