#include "docsource/eval.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>

#include "docsource/classify.hpp"
#include "docsource/parallel.hpp"

namespace fs = std::filesystem;

namespace docsource {

const std::vector<std::string>* DeviceEntry::pages_for(const std::string& font) const {
    for (const auto& [f, paths] : pages)
        if (f == font) return &paths;
    return nullptr;
}

std::string DatasetManifest::resolve(const std::string& path) const {
    fs::path p(path);
    if (p.is_absolute() || root.empty()) return path;
    return (fs::path(root) / p).string();
}

void DatasetManifest::check(const std::vector<std::string>& device_ids,
                            const std::string& font) const {
    if (std::find(fonts.begin(), fonts.end(), font) == fonts.end())
        throw ManifestError("font not in manifest: " + font);
    std::size_t page_count = 0;
    bool first = true;
    for (const auto& id : device_ids) {
        const auto it = std::find_if(devices.begin(), devices.end(),
                                     [&](const DeviceEntry& d) { return d.id == id; });
        if (it == devices.end()) throw ManifestError("device not in manifest: " + id);
        const auto* paths = it->pages_for(font);
        if (!paths || paths->empty())
            throw ManifestError("device " + id + " has no pages for font " + font);
        if (first) {
            page_count = paths->size();
            first = false;
        } else if (paths->size() != page_count) {
            throw ManifestError("unequal page counts across devices for font " + font);
        }
        for (const auto& p : *paths)
            if (!fs::exists(resolve(p)))
                throw ManifestError("missing page image: " + resolve(p));
    }
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("manifest parse error: ") + e.what());
    }
    DatasetManifest m;
    m.root = fs::path(path).parent_path().string();
    try {
        if (j.at("version").get<int>() != 1) throw ManifestError("unsupported manifest version");
        m.fonts = j.at("fonts").get<std::vector<std::string>>();
        for (const auto& dev : j.at("devices")) {
            DeviceEntry e;
            e.id = dev.at("id").get<std::string>();
            for (const auto& font : m.fonts) {
                if (!dev.at("pages").contains(font)) continue;
                e.pages.emplace_back(font,
                                     dev.at("pages").at(font).get<std::vector<std::string>>());
            }
            m.devices.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("manifest schema error: ") + e.what());
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["fonts"] = manifest.fonts;
    j["devices"] = nlohmann::ordered_json::array();
    for (const auto& d : manifest.devices) {
        nlohmann::ordered_json dev;
        dev["id"] = d.id;
        nlohmann::ordered_json pages;
        for (const auto& [font, paths] : d.pages) pages[font] = paths;
        dev["pages"] = std::move(pages);
        j["devices"].push_back(std::move(dev));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path);
    out << j.dump(2) << '\n';
}

std::vector<Split> enumerate_splits(int n_pages, int k_train) {
    if (k_train < 1 || k_train >= n_pages)
        throw BadSplitSpec("need 1 <= k_train < n_pages");
    std::vector<Split> out;
    std::vector<int> idx(static_cast<std::size_t>(k_train), 0);
    for (int i = 0; i < k_train; ++i) idx[std::size_t(i)] = i;
    for (;;) {
        Split s;
        s.train_pages = idx;
        for (int p = 0; p < n_pages; ++p)
            if (!std::binary_search(idx.begin(), idx.end(), p)) s.test_pages.push_back(p);
        out.push_back(std::move(s));
        // next combination
        int i = k_train - 1;
        while (i >= 0 && idx[std::size_t(i)] == n_pages - k_train + i) --i;
        if (i < 0) break;
        ++idx[std::size_t(i)];
        for (int j = i + 1; j < k_train; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
    }
    return out;
}

std::vector<std::vector<double>> confusion_matrix(const std::vector<int>& truth,
                                                  const std::vector<int>& predicted,
                                                  int class_count) {
    if (truth.size() != predicted.size())
        throw ShapeMismatch("label lists must have equal length");
    std::vector<std::vector<long>> counts(std::size_t(class_count),
                                          std::vector<long>(std::size_t(class_count), 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= class_count || predicted[i] < 0 ||
            predicted[i] >= class_count)
            throw LabelOutOfRange("label outside [0, class_count)");
        ++counts[std::size_t(truth[i])][std::size_t(predicted[i])];
    }
    std::vector<std::vector<double>> pct(std::size_t(class_count),
                                         std::vector<double>(std::size_t(class_count), 0.0));
    for (int i = 0; i < class_count; ++i) {
        long row = 0;
        for (int j = 0; j < class_count; ++j) row += counts[std::size_t(i)][std::size_t(j)];
        if (row == 0) continue;
        for (int j = 0; j < class_count; ++j)
            pct[std::size_t(i)][std::size_t(j)] =
                100.0 * double(counts[std::size_t(i)][std::size_t(j)]) / double(row);
    }
    return pct;
}

namespace {

struct SplitResult {
    double accuracy_pct = 0.0;
    std::vector<std::vector<double>> confusion;
};

std::vector<Patch> page_patches_for(const GrayImage& img, int p) {
    const auto mask = binarize(img, otsu_threshold(img));
    return extract_patches(img, filter_components(label_components(mask)), p);
}

SplitResult run_split(const DatasetManifest& manifest,
                      const std::vector<std::string>& device_ids, const std::string& font,
                      const Split& split, const NetworkConfig& cfg,
                      const ExperimentOptions& options) {
    const int S = int(device_ids.size());

    LabeledPatchSet pool;
    for (int dev = 0; dev < S; ++dev) {
        const std::vector<std::string>* paths = nullptr;
        for (const auto& d : manifest.devices)
            if (d.id == device_ids[std::size_t(dev)]) {
                paths = d.pages_for(font);
                break;
            }
        for (int page : split.train_pages) {
            const GrayImage img =
                load_grayscale(manifest.resolve((*paths)[std::size_t(page)]));
            auto patches = page_patches_for(img, cfg.patch_size);
            if (options.max_train_patches_per_page > 0 &&
                int(patches.size()) > options.max_train_patches_per_page) {
                const std::size_t keep = std::size_t(options.max_train_patches_per_page);
                std::vector<Patch> sub;
                sub.reserve(keep);
                for (std::size_t i = 0; i < keep; ++i)
                    sub.push_back(std::move(patches[i * patches.size() / keep]));
                patches = std::move(sub);
            }
            for (auto& patch : patches) {
                pool.patches.push_back(std::move(patch));
                pool.labels.push_back(dev);
            }
        }
    }
    if (pool.size() == 0) throw EmptyDataset("no training components extracted");

    auto [train_set, val_set] = stratified_split(pool, cfg.val_fraction, cfg.seed);
    const Checkpoint best = train(train_set, val_set, cfg);
    Network net = best.to_network();

    std::vector<int> truth, verdicts;
    for (int dev = 0; dev < S; ++dev) {
        const std::vector<std::string>* paths = nullptr;
        for (const auto& d : manifest.devices)
            if (d.id == device_ids[std::size_t(dev)]) {
                paths = d.pages_for(font);
                break;
            }
        for (int page : split.test_pages) {
            const GrayImage img =
                load_grayscale(manifest.resolve((*paths)[std::size_t(page)]));
            const auto patches = page_patches_for(img, cfg.patch_size);
            if (patches.empty()) throw NoComponents("test page yields no components");
            const PageVerdict v = majority_vote(predict(net, patches), S);
            truth.push_back(dev);
            verdicts.push_back(v.label);
        }
    }

    SplitResult r;
    long correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == verdicts[i]) ++correct;
    r.accuracy_pct = 100.0 * double(correct) / double(truth.size());
    r.confusion = confusion_matrix(truth, verdicts, S);
    return r;
}

} // namespace

ExperimentReport run_experiment(const DatasetManifest& manifest,
                                const std::vector<std::string>& device_ids,
                                const std::string& font, const NetworkConfig& cfg,
                                const ExperimentOptions& options) {
    if (device_ids.empty()) throw ManifestError("no devices selected");
    manifest.check(device_ids, font);
    const std::vector<std::string>* first_pages = nullptr;
    for (const auto& d : manifest.devices)
        if (d.id == device_ids[0]) {
            first_pages = d.pages_for(font);
            break;
        }
    const int n_pages = int(first_pages->size());
    if (n_pages < 2) throw BadSplitSpec("need at least 2 pages per device-font");

    NetworkConfig split_cfg = cfg;
    split_cfg.class_count = int(device_ids.size());
    split_cfg.validate();

    const auto splits = enumerate_splits(n_pages, options.k_train);

    ExperimentReport report;
    report.font = font;
    report.device_ids = device_ids;
    report.config = split_cfg;
    report.options = options;
    report.split_accuracy_pct.resize(splits.size());
    report.split_seeds.resize(splits.size());
    std::vector<SplitResult> results(splits.size());

    parallel_for(splits.size(), [&](std::size_t i) {
        NetworkConfig c = split_cfg;
        c.seed = cfg.seed + std::uint64_t(i); // per-split seed
        results[i] = run_split(manifest, device_ids, font, splits[i], c, options);
    });

    const int S = int(device_ids.size());
    report.confusion_pct.assign(std::size_t(S), std::vector<double>(std::size_t(S), 0.0));
    double mean = 0.0;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        report.split_accuracy_pct[i] = results[i].accuracy_pct;
        report.split_seeds[i] = cfg.seed + std::uint64_t(i);
        mean += results[i].accuracy_pct;
        for (int r = 0; r < S; ++r)
            for (int c = 0; c < S; ++c)
                report.confusion_pct[std::size_t(r)][std::size_t(c)] +=
                    results[i].confusion[std::size_t(r)][std::size_t(c)] / double(splits.size());
    }
    report.mean_accuracy_pct = mean / double(splits.size());
    return report;
}

std::string ExperimentReport::to_json() const {
    nlohmann::ordered_json j;
    j["font"] = font;
    j["devices"] = device_ids;
    j["config"] = {
        {"patch_size", config.patch_size},   {"class_count", config.class_count},
        {"conv_filters", config.conv_filters}, {"kernel", config.kernel},
        {"dense_units", config.dense_units}, {"epochs", config.epochs},
        {"batch_size", config.batch_size},   {"lr0", config.lr0},
        {"decay", config.decay},             {"seed", config.seed},
        {"val_fraction", config.val_fraction}};
    j["options"] = {{"k_train", options.k_train},
                    {"max_train_patches_per_page", options.max_train_patches_per_page}};
    j["split_seeds"] = split_seeds;
    j["split_accuracy_pct"] = split_accuracy_pct;
    j["mean_accuracy_pct"] = mean_accuracy_pct;
    j["confusion_pct"] = confusion_pct;
    return j.dump(2);
}

std::string ExperimentReport::summary_csv() const {
    std::ostringstream os;
    os << "font,split_id,accuracy_pct\n";
    for (std::size_t i = 0; i < split_accuracy_pct.size(); ++i)
        os << font << ',' << i << ',' << split_accuracy_pct[i] << '\n';
    return os.str();
}

std::string ExperimentReport::confusion_csv() const {
    std::ostringstream os;
    for (const auto& row : confusion_pct) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) os << ',';
            os << row[j];
        }
        os << '\n';
    }
    return os.str();
}

} // namespace docsource
