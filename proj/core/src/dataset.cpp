#include "preflab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "preflab/errors.hpp"
#include "preflab/image.hpp"
#include "preflab/rng.hpp"

namespace preflab {

namespace fs = std::filesystem;

const FeatureSpec& FeatureCatalog::by_id(const std::string& id) const {
    for (const auto& f : features)
        if (f.id == id) return f;
    throw InputError("FeatureCatalog: unknown feature id '" + id + "'");
}

FeatureSpec& FeatureCatalog::by_id(const std::string& id) {
    return const_cast<FeatureSpec&>(
        static_cast<const FeatureCatalog*>(this)->by_id(id));
}

std::vector<std::string> FeatureCatalog::ids() const {
    std::vector<std::string> out;
    for (const auto& f : features) out.push_back(f.id);
    return out;
}

namespace {

FeatureCatalog catalog_with(int large, int medium, int small) {
    auto budget = [&](FeatureVariant v) {
        switch (v) {
            case FeatureVariant::square:
            case FeatureVariant::blue:
            case FeatureVariant::banded:
                return large;
            case FeatureVariant::plus:
            case FeatureVariant::red:
            case FeatureVariant::blocky:
                return small;
            default:
                return medium;  // triangle, green, yellow, wavy
        }
    };
    FeatureCatalog cat;
    for (auto v : all_variants()) cat.features.push_back(make_feature(v, budget(v)));
    return cat;
}

}  // namespace

FeatureCatalog default_catalog(int large, int medium, int small) {
    return catalog_with(large, medium, small);
}

FeatureCatalog swapped_catalog(int large, int medium, int small) {
    return catalog_with(small, medium, large);
}

FeatureCatalog matched_catalog(int count) {
    return catalog_with(count, count, count);
}

void DatasetSpec::validate() const {
    if (class_pairs.size() != 5)
        throw InputError("DatasetSpec: expected 5 class pairs, got " +
                         std::to_string(class_pairs.size()));
    if (n_train <= 0 || n_val <= 0 || n_test <= 0 || n_conflict <= 0)
        throw InputError("DatasetSpec: all counts must be > 0");
    scene.validate();
    for (const auto& p : class_pairs) {
        catalog.by_id(p.a).validate();
        catalog.by_id(p.b).validate();
    }
}

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

namespace {

int split_count(const DatasetSpec& spec, Split split) {
    switch (split) {
        case Split::train: return spec.n_train;
        case Split::val: return spec.n_val;
        case Split::test: return spec.n_test;
    }
    return 0;
}

// Which training images of a class contain the feature: exactly
// round(p * n) of them, chosen by a seeded shuffle.
std::vector<bool> presence_vector(double predictivity, int n,
                                  std::uint64_t seed) {
    int k = static_cast<int>(std::lround(predictivity * n));
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<bool> present(n, false);
    for (int i = 0; i < k; ++i) present[idx[i]] = true;
    return present;
}

ComposedScene render_one(const DatasetSpec& spec, Split split, int class_index,
                         int image_index, bool a_present, bool b_present) {
    const auto& pair = spec.class_pairs[class_index];
    std::vector<FeatureSpec> feats;
    if (a_present) feats.push_back(spec.catalog.by_id(pair.a));
    if (b_present) feats.push_back(spec.catalog.by_id(pair.b));
    std::uint64_t seed = derive_seed(
        spec.seed, (static_cast<std::uint64_t>(split) << 8) | class_index,
        image_index);
    return compose_scene(feats, spec.scene, seed);
}

struct PresencePlan {
    std::vector<bool> a, b;
};

PresencePlan presence_plan(const DatasetSpec& spec, Split split, int class_index) {
    const int n = split_count(spec, split);
    PresencePlan plan{std::vector<bool>(n, true), std::vector<bool>(n, true)};
    if (split != Split::train) return plan;  // predictivity is train-only
    const auto& pair = spec.class_pairs[class_index];
    double pa = spec.catalog.by_id(pair.a).predictivity;
    double pb = spec.catalog.by_id(pair.b).predictivity;
    if (pa < 1.0)
        plan.a = presence_vector(pa, n, derive_seed(spec.seed, 0x9E55, class_index * 2));
    if (pb < 1.0)
        plan.b = presence_vector(pb, n, derive_seed(spec.seed, 0x9E55, class_index * 2 + 1));
    return plan;
}

void append_image(const Image& img, const SceneConfig& scene,
                  std::vector<float>& out) {
    static const double kMean[3] = {0.485, 0.456, 0.406};
    static const double kStd[3] = {0.229, 0.224, 0.225};
    const bool imagenet =
        scene.normalization == SceneConfig::Normalization::imagenet;
    const int hw = img.width * img.height;
    std::size_t base = out.size();
    out.resize(base + 3 * static_cast<std::size_t>(hw));
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            Rgb c = img.get(x, y);
            const double ch[3] = {c.r / 255.0, c.g / 255.0, c.b / 255.0};
            for (int k = 0; k < 3; ++k) {
                double v = ch[k];
                if (imagenet) v = (v - kMean[k]) / kStd[k];
                out[base + static_cast<std::size_t>(k) * hw + y * img.width + x] =
                    static_cast<float>(v);
            }
        }
}

}  // namespace

SplitData render_split(const DatasetSpec& spec, Split split) {
    spec.validate();
    const int n = split_count(spec, split);
    SplitData data;
    std::vector<float> pixels;
    pixels.reserve(static_cast<std::size_t>(5) * n * 3 * spec.scene.crop_side *
                   spec.scene.crop_side);
    for (int c = 0; c < 5; ++c) {
        PresencePlan plan = presence_plan(spec, split, c);
        for (int i = 0; i < n; ++i) {
            ComposedScene s = render_one(spec, split, c, i, plan.a[i], plan.b[i]);
            append_image(s.image, spec.scene, pixels);
            data.labels.push_back(c);
        }
    }
    data.images = Tensor::from_data(
        {5 * n, 3, spec.scene.crop_side, spec.scene.crop_side}, std::move(pixels));
    return data;
}

Tensor images_to_tensor(const std::vector<Image>& images,
                        const SceneConfig& scene) {
    if (images.empty()) throw InputError("images_to_tensor: empty batch");
    const int side = images[0].width;
    std::vector<float> pixels;
    pixels.reserve(images.size() * 3ull * side * side);
    for (const auto& img : images) {
        if (img.width != side || img.height != side)
            throw InputError("images_to_tensor: mismatched image sizes");
        append_image(img, scene, pixels);
    }
    return Tensor::from_data(
        {static_cast<int>(images.size()), 3, side, side}, std::move(pixels));
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string build_dataset(const DatasetSpec& spec, const fs::path& root) {
    spec.validate();
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("build_dataset: cannot create " + root.string());

    std::ostringstream manifest;
    manifest << "dataset_index=" << spec.dataset_index << "\n";
    manifest << "seed=" << spec.seed << "\n";
    for (int c = 0; c < 5; ++c)
        manifest << "class" << c << "=" << spec.class_pairs[c].to_string() << "\n";

    for (Split split : {Split::train, Split::val, Split::test}) {
        const int n = split_count(spec, split);
        for (int c = 0; c < 5; ++c) {
            fs::path dir = root / split_name(split) /
                           ("c" + std::to_string(c) + "_" +
                            spec.class_pairs[c].to_string());
            fs::create_directories(dir, ec);
            if (ec) throw IoError("build_dataset: cannot create " + dir.string());
            PresencePlan plan = presence_plan(spec, split, c);
            for (int i = 0; i < n; ++i) {
                ComposedScene s =
                    render_one(spec, split, c, i, plan.a[i], plan.b[i]);
                fs::path file = dir / (std::to_string(i) + ".ppm");
                write_ppm(file, s.image);
                manifest << fs::relative(file, root).generic_string() << " "
                         << fnv1a64(s.image.pixels.data(), s.image.pixels.size())
                         << "\n";
            }
        }
    }

    std::string text = manifest.str();
    std::ofstream out(root / "manifest.txt", std::ios::binary);
    out << text;
    if (!out) throw IoError("build_dataset: cannot write " +
                            (root / "manifest.txt").string());
    return text;
}

SplitData load_split(const fs::path& root, Split split, const SceneConfig& scene) {
    fs::path dir = root / split_name(split);
    if (!fs::exists(dir)) throw IoError("load_split: missing " + dir.string());
    std::vector<fs::path> class_dirs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) class_dirs.push_back(e.path());
    std::sort(class_dirs.begin(), class_dirs.end());

    SplitData data;
    std::vector<float> pixels;
    int side = 0;
    for (std::size_t c = 0; c < class_dirs.size(); ++c) {
        std::size_t n_files = 0;
        for (const auto& e : fs::directory_iterator(class_dirs[c]))
            if (e.path().extension() == ".ppm") ++n_files;
        for (std::size_t i = 0; i < n_files; ++i) {
            Image img = read_ppm(class_dirs[c] / (std::to_string(i) + ".ppm"));
            side = img.width;
            append_image(img, scene, pixels);
            data.labels.push_back(static_cast<int>(c));
        }
    }
    data.images = Tensor::from_data(
        {static_cast<int>(data.labels.size()), 3, side, side}, std::move(pixels));
    return data;
}

}  // namespace preflab
