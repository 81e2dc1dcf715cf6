#pragma once

#include <string>
#include <vector>

#include "docsource/train.hpp"

namespace docsource {

struct DeviceEntry {
    std::string id;
    // font name -> ordered page image paths
    std::vector<std::pair<std::string, std::vector<std::string>>> pages;

    const std::vector<std::string>* pages_for(const std::string& font) const;
};

// JSON layout: {"version":1, "fonts":[...],
//   "devices":[{"id":..., "pages":{font:[paths...]}}]}
struct DatasetManifest {
    std::string root; // directory of the manifest file; paths resolve against it
    std::vector<std::string> fonts;
    std::vector<DeviceEntry> devices;

    // Validates shape and file existence for the requested scope.
    void check(const std::vector<std::string>& device_ids, const std::string& font) const;
    std::string resolve(const std::string& path) const;
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

struct Split {
    std::vector<int> train_pages;
    std::vector<int> test_pages;
};

// All C(n_pages, k_train) combinations in lexicographic order of the train set.
std::vector<Split> enumerate_splits(int n_pages, int k_train);

// Row-normalized percentages: entry (i,j) = percent of true-i items
// predicted j. Rows with no items stay zero.
std::vector<std::vector<double>> confusion_matrix(const std::vector<int>& truth,
                                                  const std::vector<int>& predicted,
                                                  int class_count);

struct ExperimentOptions {
    int k_train = 2;
    // 0 = use every filtered component; otherwise deterministic evenly-strided
    // subsample per training page (testing always votes over all components)
    int max_train_patches_per_page = 0;
};

struct ExperimentReport {
    std::string font;
    std::vector<std::string> device_ids;
    NetworkConfig config;
    ExperimentOptions options;
    std::vector<double> split_accuracy_pct;            // per split
    double mean_accuracy_pct = 0.0;
    std::vector<std::vector<double>> confusion_pct;    // averaged over splits
    std::vector<std::uint64_t> split_seeds;

    std::string to_json() const;
    std::string summary_csv() const;    // font, split_id, accuracy_pct
    std::string confusion_csv() const;
};

// The paper's protocol: for every split, pool training patches from the train
// pages of every device, hold out a stratified validation set, train, then
// majority-vote each test page. Split seeds are cfg.seed + split index.
ExperimentReport run_experiment(const DatasetManifest& manifest,
                                const std::vector<std::string>& device_ids,
                                const std::string& font, const NetworkConfig& cfg,
                                const ExperimentOptions& options = {});

} // namespace docsource
