#include "preflab/config.hpp"

#include <algorithm>
#include <sstream>

#include "preflab/errors.hpp"

namespace preflab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int to_int(const std::string& section, const std::string& key,
           const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InputError("config [" + section + "] " + key +
                         ": expected an integer, got '" + v + "'");
    }
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InputError("config [" + section + "] " + key +
                         ": expected a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& section, const std::string& key,
             const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InputError("config [" + section + "] " + key +
                     ": expected true/false, got '" + v + "'");
}

}  // namespace

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    return it != sections.end() && it->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto it = sections.find(section);
    if (it == sections.end()) return fallback;
    auto kt = it->second.find(key);
    return kt == it->second.end() ? fallback : kt->second;
}

IniFile parse_ini(const std::string& text) {
    IniFile ini;
    std::string section;
    ini.sections[section];
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw FormatError("ini line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            ini.sections[section];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw FormatError("ini line " + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw FormatError("ini line " + std::to_string(line_no) +
                              ": empty key");
        if (!ini.sections[section].emplace(key, value).second)
            throw FormatError("ini line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
    }
    return ini;
}

namespace {

// section -> accepted keys. Unknown sections/keys are hard errors.
const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"", {}},
        {"scene",
         {"canvas_side", "feature_box_side", "pad", "crop_side",
          "feature_render_side", "normalization"}},
        {"counts", {"n_train", "n_val", "n_test", "n_conflict"}},
        {"train",
         {"epochs", "base_lr", "lr_decay_epochs", "lr_decay_factor", "momentum",
          "weight_decay", "batch_size"}},
        {"model", {"channels"}},
        {"experiment",
         {"n_runs", "seed", "workers", "include_trained_pairs", "swept_feature",
          "overlap_partner", "dataset_indices"}},
        {"budgets", {"mode", "large", "medium", "small", "matched"}},
        {"sweep", {"axis", "values"}},
        {"shiftmnist",
         {"q_values", "n_runs", "epochs", "base_lr", "batch_size", "channels",
          "train_images", "train_labels", "test_images", "test_labels"}},
    };
    return s;
}

void check_schema(const IniFile& ini) {
    for (const auto& [section, keys] : ini.sections) {
        auto it = schema().find(section);
        if (it == schema().end()) {
            std::string known;
            for (const auto& [name, _] : schema())
                if (!name.empty()) known += (known.empty() ? "" : ", ") + name;
            throw InputError("config: unknown section [" + section +
                             "]; accepted sections: " + known);
        }
        for (const auto& [key, _] : keys) {
            if (std::find(it->second.begin(), it->second.end(), key) ==
                it->second.end()) {
                std::string known;
                for (const auto& k : it->second)
                    known += (known.empty() ? "" : ", ") + k;
                throw InputError("config [" + section + "]: unknown key '" +
                                 key + "'; accepted keys: " + known);
            }
        }
    }
}

}  // namespace

void LabConfig::apply_budgets() {
    if (budget_mode == "default")
        experiment.catalog = default_catalog(budget_large, budget_medium, budget_small);
    else if (budget_mode == "swapped")
        experiment.catalog = swapped_catalog(budget_large, budget_medium, budget_small);
    else if (budget_mode == "matched")
        experiment.catalog = matched_catalog(budget_matched);
    else
        throw InputError("config [budgets] mode: expected default, swapped or "
                         "matched, got '" + budget_mode + "'");
}

LabConfig LabConfig::from_ini(const IniFile& ini) {
    check_schema(ini);
    LabConfig cfg;
    auto geti = [&](const std::string& s, const std::string& k, int d) {
        return ini.has(s, k) ? to_int(s, k, ini.get(s, k, "")) : d;
    };
    auto getd = [&](const std::string& s, const std::string& k, double d) {
        return ini.has(s, k) ? to_double(s, k, ini.get(s, k, "")) : d;
    };

    auto& sc = cfg.experiment.scene;
    sc.canvas_side = geti("scene", "canvas_side", sc.canvas_side);
    sc.feature_box_side = geti("scene", "feature_box_side", sc.feature_box_side);
    sc.pad = geti("scene", "pad", sc.pad);
    sc.crop_side = geti("scene", "crop_side", sc.crop_side);
    sc.feature_render_side = geti("scene", "feature_render_side", sc.feature_render_side);
    if (ini.has("scene", "normalization")) {
        std::string n = ini.get("scene", "normalization", "");
        if (n == "none")
            sc.normalization = SceneConfig::Normalization::none;
        else if (n == "imagenet")
            sc.normalization = SceneConfig::Normalization::imagenet;
        else
            throw InputError("config [scene] normalization: expected none or "
                             "imagenet, got '" + n + "'");
    }

    cfg.experiment.n_train = geti("counts", "n_train", cfg.experiment.n_train);
    cfg.experiment.n_val = geti("counts", "n_val", cfg.experiment.n_val);
    cfg.experiment.n_test = geti("counts", "n_test", cfg.experiment.n_test);
    cfg.experiment.n_conflict = geti("counts", "n_conflict", cfg.experiment.n_conflict);

    auto& tc = cfg.experiment.train;
    tc.epochs = geti("train", "epochs", tc.epochs);
    tc.base_lr = getd("train", "base_lr", tc.base_lr);
    tc.lr_decay_factor = getd("train", "lr_decay_factor", tc.lr_decay_factor);
    tc.momentum = getd("train", "momentum", tc.momentum);
    tc.weight_decay = getd("train", "weight_decay", tc.weight_decay);
    tc.batch_size = geti("train", "batch_size", tc.batch_size);
    if (ini.has("train", "lr_decay_epochs")) {
        tc.lr_decay_epochs.clear();
        for (const auto& v : split_list(ini.get("train", "lr_decay_epochs", "")))
            tc.lr_decay_epochs.push_back(to_int("train", "lr_decay_epochs", v));
    }

    if (ini.has("model", "channels")) {
        cfg.experiment.model.channels.clear();
        for (const auto& v : split_list(ini.get("model", "channels", "")))
            cfg.experiment.model.channels.push_back(to_int("model", "channels", v));
    }

    cfg.experiment.n_runs = geti("experiment", "n_runs", cfg.experiment.n_runs);
    cfg.experiment.workers = geti("experiment", "workers", cfg.experiment.workers);
    if (ini.has("experiment", "seed"))
        cfg.experiment.seed = static_cast<std::uint64_t>(
            std::stoull(ini.get("experiment", "seed", "0")));
    if (ini.has("experiment", "include_trained_pairs"))
        cfg.experiment.include_trained_pairs = to_bool(
            "experiment", "include_trained_pairs",
            ini.get("experiment", "include_trained_pairs", ""));
    cfg.experiment.swept_feature =
        ini.get("experiment", "swept_feature", cfg.experiment.swept_feature);
    cfg.experiment.overlap_partner =
        ini.get("experiment", "overlap_partner", cfg.experiment.overlap_partner);
    if (ini.has("experiment", "dataset_indices")) {
        cfg.experiment.dataset_indices.clear();
        for (const auto& v :
             split_list(ini.get("experiment", "dataset_indices", "")))
            cfg.experiment.dataset_indices.push_back(
                to_int("experiment", "dataset_indices", v));
    }

    cfg.budget_mode = ini.get("budgets", "mode", cfg.budget_mode);
    cfg.budget_large = geti("budgets", "large", cfg.budget_large);
    cfg.budget_medium = geti("budgets", "medium", cfg.budget_medium);
    cfg.budget_small = geti("budgets", "small", cfg.budget_small);
    cfg.budget_matched = geti("budgets", "matched", cfg.budget_matched);
    cfg.apply_budgets();

    cfg.sweep_axis = ini.get("sweep", "axis", cfg.sweep_axis);
    axis_from_name(cfg.sweep_axis);
    if (ini.has("sweep", "values")) {
        cfg.sweep_values.clear();
        for (const auto& v : split_list(ini.get("sweep", "values", "")))
            cfg.sweep_values.push_back(to_double("sweep", "values", v));
    }

    if (ini.has("shiftmnist", "q_values")) {
        cfg.shift_q_values.clear();
        for (const auto& v : split_list(ini.get("shiftmnist", "q_values", "")))
            cfg.shift_q_values.push_back(to_double("shiftmnist", "q_values", v));
    }
    cfg.shift_n_runs = geti("shiftmnist", "n_runs", cfg.shift_n_runs);
    cfg.shift_epochs = geti("shiftmnist", "epochs", cfg.shift_epochs);
    cfg.shift_lr = getd("shiftmnist", "base_lr", cfg.shift_lr);
    cfg.shift_batch_size = geti("shiftmnist", "batch_size", cfg.shift_batch_size);
    if (ini.has("shiftmnist", "channels")) {
        cfg.shift_channels.clear();
        for (const auto& v : split_list(ini.get("shiftmnist", "channels", "")))
            cfg.shift_channels.push_back(to_int("shiftmnist", "channels", v));
    }
    cfg.mnist_train_images = ini.get("shiftmnist", "train_images", "");
    cfg.mnist_train_labels = ini.get("shiftmnist", "train_labels", "");
    cfg.mnist_test_images = ini.get("shiftmnist", "test_images", "");
    cfg.mnist_test_labels = ini.get("shiftmnist", "test_labels", "");

    cfg.experiment.validate();
    return cfg;
}

LabConfig LabConfig::from_text(const std::string& text) {
    return from_ini(parse_ini(text));
}

std::string default_config_text() {
    return R"(# preflab configuration (all values shown are the defaults)

[scene]
canvas_side = 64
feature_box_side = 48
pad = 8
crop_side = 56
feature_render_side = 20
# normalization: none | imagenet
normalization = none

[counts]
# counts are per class; n_conflict is per feature pair
n_train = 100
n_val = 30
n_test = 30
n_conflict = 30

[train]
epochs = 30
base_lr = 0.01
lr_decay_epochs = 15, 25
lr_decay_factor = 0.1
momentum = 0.9
weight_decay = 0.0001
batch_size = 32

[model]
channels = 16, 32, 64

[experiment]
n_runs = 3
seed = 0
workers = 1
include_trained_pairs = false
swept_feature = blue
overlap_partner = green
# dataset_indices defaults to all 9 rounds, e.g.: dataset_indices = 0, 1, 2

[budgets]
# mode: default | swapped | matched
mode = default
large = 140
medium = 100
small = 55
matched = 100

[sweep]
# axis: pixel_count | deviation | overlap | predictivity
axis = deviation
values = 0, 30, 60, 90, 120

[shiftmnist]
q_values = 0.01, 0.05, 0.10, 0.25, 0.50, 1.00
n_runs = 2
epochs = 6
base_lr = 0.05
batch_size = 64
channels = 8, 16, 32
# train_images = path/to/train-images-idx3-ubyte
# train_labels = path/to/train-labels-idx1-ubyte
# test_images = path/to/t10k-images-idx3-ubyte
# test_labels = path/to/t10k-labels-idx1-ubyte
)";
}

}  // namespace preflab
