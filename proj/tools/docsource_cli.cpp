#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "docsource/classify.hpp"
#include "docsource/eval.hpp"
#include "docsource/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat JSON config; keys mirror the NetworkConfig / experiment option field
// names. Command-line flags override file values. Unknown keys are rejected.
struct TrainEvalConfig {
    docsource::NetworkConfig net;
    docsource::ExperimentOptions options;
};

TrainEvalConfig load_run_config(const std::string& path) {
    TrainEvalConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw docsource::IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw docsource::BadConfig(std::string("config parse error: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "patch_size") cfg.net.patch_size = value.get<int>();
        else if (key == "class_count") cfg.net.class_count = value.get<int>();
        else if (key == "conv_filters") cfg.net.conv_filters = value.get<int>();
        else if (key == "dense_units") cfg.net.dense_units = value.get<int>();
        else if (key == "epochs") cfg.net.epochs = value.get<int>();
        else if (key == "batch_size") cfg.net.batch_size = value.get<int>();
        else if (key == "lr0") cfg.net.lr0 = value.get<double>();
        else if (key == "decay") cfg.net.decay = value.get<double>();
        else if (key == "seed") cfg.net.seed = value.get<std::uint64_t>();
        else if (key == "val_fraction") cfg.net.val_fraction = value.get<double>();
        else if (key == "k_train") cfg.options.k_train = value.get<int>();
        else if (key == "max_train_patches_per_page")
            cfg.options.max_train_patches_per_page = value.get<int>();
        else throw UsageError("unknown config key: " + key);
    }
    return cfg;
}

void echo_config(const docsource::NetworkConfig& c) {
    std::cerr << "config: patch_size=" << c.patch_size << " class_count=" << c.class_count
              << " epochs=" << c.epochs << " batch_size=" << c.batch_size
              << " lr0=" << c.lr0 << " decay=" << c.decay
              << " val_fraction=" << c.val_fraction << " seed=" << c.seed << "\n";
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

docsource::LabeledPatchSet pool_patches(const docsource::DatasetManifest& manifest,
                                        const std::vector<std::string>& devices,
                                        const std::string& font,
                                        const std::vector<int>& pages, int p,
                                        int max_per_page) {
    docsource::LabeledPatchSet pool;
    for (std::size_t d = 0; d < devices.size(); ++d) {
        const docsource::DeviceEntry* entry = nullptr;
        for (const auto& e : manifest.devices)
            if (e.id == devices[d]) entry = &e;
        if (!entry) throw docsource::ManifestError("device not in manifest: " + devices[d]);
        const auto* paths = entry->pages_for(font);
        if (!paths) throw docsource::ManifestError("no pages for font " + font);
        for (int page : pages) {
            if (page < 0 || page >= int(paths->size()))
                throw docsource::ManifestError("page index out of range");
            const auto img = docsource::load_grayscale(
                manifest.resolve((*paths)[std::size_t(page)]));
            const auto mask = docsource::binarize(img, docsource::otsu_threshold(img));
            auto comps = docsource::filter_components(docsource::label_components(mask));
            auto patches = docsource::extract_patches(img, comps, p);
            if (max_per_page > 0 && int(patches.size()) > max_per_page) {
                std::vector<docsource::Patch> sub;
                for (std::size_t i = 0; i < std::size_t(max_per_page); ++i)
                    sub.push_back(std::move(patches[i * patches.size() / std::size_t(max_per_page)]));
                patches = std::move(sub);
            }
            for (auto& patch : patches) {
                pool.patches.push_back(std::move(patch));
                pool.labels.push_back(int(d));
            }
        }
    }
    return pool;
}

int run(int argc, char** argv) {
    CLI::App app{"document source attribution pipeline"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    std::string gen_config;
    std::string gen_out;
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    gen->add_option("--config", gen_config, "generator config JSON")->required();
    gen->add_option("--out", gen_out, "output directory (overrides config)");
    gen->add_option("--seed", gen_seed, "run seed (overrides config)")
        ->each([&](const std::string&) { gen_seed_set = true; });

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model from manifest pages");
    std::string tr_manifest, tr_font, tr_devices, tr_pages, tr_out = "model.ckpt", tr_config;
    int tr_patch = -1, tr_epochs = -1, tr_batch = -1;
    std::uint64_t tr_seed = 0;
    bool tr_seed_set = false;
    train_cmd->add_option("--manifest", tr_manifest)->required();
    train_cmd->add_option("--font", tr_font)->required();
    train_cmd->add_option("--devices", tr_devices, "comma-separated device ids")->required();
    train_cmd->add_option("--pages", tr_pages, "comma-separated train page indices")->required();
    train_cmd->add_option("--out", tr_out, "checkpoint output path");
    train_cmd->add_option("--config", tr_config, "flat JSON config file");
    train_cmd->add_option("--patch-size", tr_patch);
    train_cmd->add_option("--epochs", tr_epochs);
    train_cmd->add_option("--batch-size", tr_batch);
    train_cmd->add_option("--seed", tr_seed)->each([&](const std::string&) { tr_seed_set = true; });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "run the split protocol, optionally sweeping patch sizes");
    std::string ev_manifest, ev_font, ev_devices, ev_out = "reports", ev_config, ev_patches = "18";
    int ev_epochs = -1, ev_batch = -1, ev_ktrain = -1;
    std::uint64_t ev_seed = 0;
    bool ev_seed_set = false;
    eval_cmd->add_option("--manifest", ev_manifest)->required();
    eval_cmd->add_option("--font", ev_font)->required();
    eval_cmd->add_option("--devices", ev_devices, "comma-separated device ids")->required();
    eval_cmd->add_option("--out", ev_out, "report output directory");
    eval_cmd->add_option("--config", ev_config, "flat JSON config file");
    eval_cmd->add_option("--patch-size", ev_patches,
                         "patch size, or comma-separated list for a sweep");
    eval_cmd->add_option("--epochs", ev_epochs);
    eval_cmd->add_option("--batch-size", ev_batch);
    eval_cmd->add_option("--k-train", ev_ktrain, "train pages per split");
    eval_cmd->add_option("--seed", ev_seed)->each([&](const std::string&) { ev_seed_set = true; });

    // predict
    auto* pred = app.add_subcommand("predict", "classify one page image");
    std::string pr_model, pr_image;
    pred->add_option("--model", pr_model)->required();
    pred->add_option("--image", pr_image)->required();

    // inspect
    auto* insp = app.add_subcommand("inspect", "dump segmentation components as JSON");
    std::string in_image, in_out;
    insp->add_option("--image", in_image)->required();
    insp->add_option("--out", in_out, "write JSON here instead of stdout");

    app.parse(argc, argv);

    if (gen->parsed()) {
        docsource::GeneratorConfig cfg = docsource::load_generator_config(gen_config);
        if (!gen_out.empty()) cfg.out_dir = gen_out;
        if (gen_seed_set) cfg.seed = gen_seed;
        std::cerr << "gen: seed=" << cfg.seed << " out=" << cfg.out_dir
                  << " devices=" << cfg.devices.size() << " fonts=" << cfg.fonts.size()
                  << " pages_per_font=" << cfg.pages_per_font << "\n";
        const auto manifest = docsource::generate_dataset(cfg);
        ordered_json j;
        j["manifest"] = (fs::path(cfg.out_dir) / "manifest.json").string();
        j["devices"] = manifest.devices.size();
        j["fonts"] = manifest.fonts;
        j["pages_per_font"] = cfg.pages_per_font;
        std::cout << j.dump(2) << std::endl;
        return 0;
    }

    if (train_cmd->parsed()) {
        TrainEvalConfig cfg = load_run_config(tr_config);
        if (tr_patch > 0) cfg.net.patch_size = tr_patch;
        if (tr_epochs > 0) cfg.net.epochs = tr_epochs;
        if (tr_batch > 0) cfg.net.batch_size = tr_batch;
        if (tr_seed_set) cfg.net.seed = tr_seed;
        const auto devices = split_csv(tr_devices);
        std::vector<int> pages;
        for (const auto& s : split_csv(tr_pages)) pages.push_back(std::stoi(s));
        cfg.net.class_count = int(devices.size());
        echo_config(cfg.net);

        const auto manifest = docsource::load_manifest(tr_manifest);
        manifest.check(devices, tr_font);
        auto pool = pool_patches(manifest, devices, tr_font, pages, cfg.net.patch_size,
                                 cfg.options.max_train_patches_per_page);
        auto [train_set, val_set] =
            docsource::stratified_split(pool, cfg.net.val_fraction, cfg.net.seed);
        const auto ckpt = docsource::train(train_set, val_set, cfg.net);
        docsource::save_checkpoint(ckpt, tr_out);
        ordered_json j;
        j["checkpoint"] = tr_out;
        j["best_epoch"] = ckpt.epoch;
        j["val_loss"] = ckpt.val_loss;
        j["train_patches"] = train_set.size();
        j["val_patches"] = val_set.size();
        std::cout << j.dump(2) << std::endl;
        return 0;
    }

    if (eval_cmd->parsed()) {
        TrainEvalConfig cfg = load_run_config(ev_config);
        if (ev_epochs > 0) cfg.net.epochs = ev_epochs;
        if (ev_batch > 0) cfg.net.batch_size = ev_batch;
        if (ev_ktrain > 0) cfg.options.k_train = ev_ktrain;
        if (ev_seed_set) cfg.net.seed = ev_seed;
        const auto devices = split_csv(ev_devices);
        const auto manifest = docsource::load_manifest(ev_manifest);
        fs::create_directories(ev_out);

        ordered_json out = ordered_json::array();
        for (const auto& ps : split_csv(ev_patches)) {
            docsource::NetworkConfig net_cfg = cfg.net;
            net_cfg.patch_size = std::stoi(ps);
            echo_config(net_cfg);
            const auto report =
                docsource::run_experiment(manifest, devices, ev_font, net_cfg, cfg.options);
            const std::string stem = ev_font + "_p" + ps;
            const auto report_path = fs::path(ev_out) / (stem + "_report.json");
            std::ofstream(report_path) << report.to_json() << '\n';
            std::ofstream(fs::path(ev_out) / (stem + "_summary.csv")) << report.summary_csv();
            std::ofstream(fs::path(ev_out) / (stem + "_confusion.csv")) << report.confusion_csv();
            ordered_json e;
            e["font"] = ev_font;
            e["patch_size"] = net_cfg.patch_size;
            e["mean_accuracy_pct"] = report.mean_accuracy_pct;
            e["report"] = report_path.string();
            out.push_back(std::move(e));
        }
        std::cout << out.dump(2) << std::endl;
        return 0;
    }

    if (pred->parsed()) {
        const auto ckpt = docsource::load_checkpoint(pr_model);
        echo_config(ckpt.config);
        const auto img = docsource::load_grayscale(pr_image);
        const auto verdict = docsource::predict_page(ckpt, img);
        std::cout << verdict.to_json() << std::endl;
        return 0;
    }

    if (insp->parsed()) {
        const auto img = docsource::load_grayscale(in_image);
        const auto mask = docsource::binarize(img, docsource::otsu_threshold(img));
        const auto comps = docsource::label_components(mask);
        const std::string dump = docsource::dump_components_json(comps);
        if (in_out.empty()) std::cout << dump << std::endl;
        else std::ofstream(in_out) << dump << '\n';
        return 0;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        try {
            return run(argc, argv);
        } catch (const CLI::ParseError& e) {
            CLI::App dummy;
            if (e.get_exit_code() == 0) return dummy.exit(e); // --help
            std::cerr << "usage error: " << e.what() << "\n";
            return 1;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const docsource::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
