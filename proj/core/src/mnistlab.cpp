#include "preflab/mnistlab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "preflab/errors.hpp"
#include "preflab/rng.hpp"

namespace preflab {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    if (off + 4 > b.size())
        throw FormatError("idx: truncated header at byte offset " +
                          std::to_string(off));
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

void write_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 24));
    b.push_back(static_cast<std::uint8_t>(v >> 16));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

void IdxDataset::validate() const {
    if (rows <= 0 || cols <= 0)
        throw FormatError("IdxDataset: non-positive dimensions");
    if (images.size() != labels.size() * static_cast<std::size_t>(rows) * cols)
        throw FormatError("IdxDataset: image/label count mismatch");
}

IdxImages parse_idx_images(const std::vector<std::uint8_t>& bytes) {
    std::uint32_t magic = read_be32(bytes, 0);
    if (magic != 0x00000803)
        throw FormatError("idx images: bad magic at byte offset 0 (got 0x" +
                          [&] { char b[16]; snprintf(b, 16, "%08x", magic); return std::string(b); }() +
                          ", want 0x00000803)");
    IdxImages out;
    out.n = read_be32(bytes, 4);
    out.rows = static_cast<int>(read_be32(bytes, 8));
    out.cols = static_cast<int>(read_be32(bytes, 12));
    const std::size_t need = 16 + out.n * static_cast<std::size_t>(out.rows) * out.cols;
    if (bytes.size() < need)
        throw FormatError("idx images: truncated payload at byte offset " +
                          std::to_string(bytes.size()) + " (need " +
                          std::to_string(need) + ")");
    out.data.assign(bytes.begin() + 16, bytes.begin() + static_cast<long>(need));
    return out;
}

std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
    std::uint32_t magic = read_be32(bytes, 0);
    if (magic != 0x00000801)
        throw FormatError("idx labels: bad magic at byte offset 0");
    std::size_t n = read_be32(bytes, 4);
    if (bytes.size() < 8 + n)
        throw FormatError("idx labels: truncated payload at byte offset " +
                          std::to_string(bytes.size()) + " (need " +
                          std::to_string(8 + n) + ")");
    return {bytes.begin() + 8, bytes.begin() + static_cast<long>(8 + n)};
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images) {
    std::vector<std::uint8_t> out;
    write_be32(out, 0x00000803);
    write_be32(out, static_cast<std::uint32_t>(images.n));
    write_be32(out, static_cast<std::uint32_t>(images.rows));
    write_be32(out, static_cast<std::uint32_t>(images.cols));
    out.insert(out.end(), images.data.begin(), images.data.end());
    return out;
}

std::vector<std::uint8_t> serialize_idx_labels(
    const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> out;
    write_be32(out, 0x00000801);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

IdxDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path) {
    IdxImages imgs = parse_idx_images(read_file(images_path));
    std::vector<std::uint8_t> labels = parse_idx_labels(read_file(labels_path));
    if (imgs.n != labels.size())
        throw FormatError("idx: " + std::to_string(imgs.n) + " images vs " +
                          std::to_string(labels.size()) + " labels");
    IdxDataset out;
    out.rows = imgs.rows;
    out.cols = imgs.cols;
    out.images = std::move(imgs.data);
    out.labels = std::move(labels);
    out.validate();
    return out;
}

void save_idx(const IdxDataset& dataset,
              const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path) {
    dataset.validate();
    IdxImages imgs{dataset.rows, dataset.cols, dataset.images, dataset.n()};
    write_file(images_path, serialize_idx_images(imgs));
    write_file(labels_path, serialize_idx_labels(dataset.labels));
}

Tensor idx_to_tensor(const IdxDataset& dataset) {
    dataset.validate();
    std::vector<float> v(dataset.images.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<float>(dataset.images[i]) / 255.0f;
    return Tensor::from_data({static_cast<int>(dataset.n()), 1, dataset.rows,
                              dataset.cols},
                             std::move(v));
}

std::vector<int> idx_labels(const IdxDataset& dataset) {
    return {dataset.labels.begin(), dataset.labels.end()};
}

IdxDataset pad_centered(const IdxDataset& dataset, int side) {
    if (side < dataset.rows || side < dataset.cols)
        throw InputError("pad_centered: target side smaller than the digits");
    if (side == dataset.rows && side == dataset.cols) return dataset;
    IdxDataset out;
    out.rows = side;
    out.cols = side;
    out.labels = dataset.labels;
    out.images.assign(dataset.n() * side * side, 0);
    const int oy = (side - dataset.rows) / 2, ox = (side - dataset.cols) / 2;
    for (std::size_t i = 0; i < dataset.n(); ++i)
        for (int y = 0; y < dataset.rows; ++y)
            std::copy_n(dataset.image(i) + y * dataset.cols, dataset.cols,
                        out.images.data() + (i * side + oy + y) * side + ox);
    return out;
}

SegmentResult segment_by_deviation(const IdxDataset& dataset,
                                   const MiniCnn& embedder, double q) {
    if (q <= 0.0 || q > 1.0)
        throw InputError("segment_by_deviation: q must be in (0, 1]");
    dataset.validate();

    // Embed in batches; digits are center-padded up to the embedder's input
    // side when the sizes differ.
    const int dim = embedder.embedding_dim();
    const std::size_t n = dataset.n();
    std::vector<float> emb(n * static_cast<std::size_t>(dim));
    Tensor all = idx_to_tensor(
        pad_centered(dataset, embedder.config().input_side));
    const int batch = 256;
    for (std::size_t b = 0; b < n; b += batch) {
        int e = static_cast<int>(std::min(n, b + batch));
        Tensor x = slice_batch(all, static_cast<int>(b), e);
        Tensor z = embedder.embed(x);
        std::copy(z.data().begin(), z.data().end(),
                  emb.begin() + b * static_cast<std::size_t>(dim));
    }

    const int n_classes = 10;
    std::vector<std::vector<int>> by_class(n_classes);
    for (std::size_t i = 0; i < n; ++i) by_class[dataset.labels[i]].push_back(static_cast<int>(i));

    SegmentResult out;
    out.segment.q = q;
    out.segment.kept_per_class.resize(n_classes);
    out.dataset.rows = dataset.rows;
    out.dataset.cols = dataset.cols;
    const std::size_t px = static_cast<std::size_t>(dataset.rows) * dataset.cols;

    for (int c = 0; c < n_classes; ++c) {
        const auto& idx = by_class[c];
        if (idx.empty()) continue;
        std::vector<double> mean(dim, 0.0);
        for (int i : idx)
            for (int d = 0; d < dim; ++d)
                mean[d] += emb[static_cast<std::size_t>(i) * dim + d];
        for (double& m : mean) m /= static_cast<double>(idx.size());

        std::vector<std::pair<double, int>> dist;
        dist.reserve(idx.size());
        for (int i : idx) {
            double s = 0;
            for (int d = 0; d < dim; ++d) {
                double diff = emb[static_cast<std::size_t>(i) * dim + d] - mean[d];
                s += diff * diff;
            }
            dist.emplace_back(s, i);
        }
        std::sort(dist.begin(), dist.end());
        const std::size_t keep = static_cast<std::size_t>(
            std::ceil(q * static_cast<double>(idx.size())));
        auto& kept = out.segment.kept_per_class[c];
        for (std::size_t k = 0; k < keep; ++k) kept.push_back(dist[k].second);

        // Cyclic replication back to the original class size.
        for (std::size_t k = 0; k < idx.size(); ++k) {
            int src = kept[k % kept.size()];
            out.dataset.images.insert(
                out.dataset.images.end(), dataset.images.begin() + src * px,
                dataset.images.begin() + (src + 1) * px);
            out.dataset.labels.push_back(static_cast<std::uint8_t>(c));
        }
    }
    out.dataset.validate();
    return out;
}

ShiftMnistConfig ShiftMnistConfig::defaults() {
    ShiftMnistConfig cfg;
    for (int label = 0; label < 10; ++label)
        cfg.pixel_positions.emplace_back(1, 2 + 3 * label);
    return cfg;
}

void ShiftMnistConfig::validate(int digit_rows, int digit_cols) const {
    if (pixel_positions.size() != 10)
        throw InputError("ShiftMnistConfig: need 10 pixel positions");
    const int r0 = (canvas_side - digit_rows) / 2;
    const int c0 = (canvas_side - digit_cols) / 2;
    std::vector<std::pair<int, int>> seen;
    for (const auto& [r, c] : pixel_positions) {
        if (r < 0 || r >= canvas_side || c < 0 || c >= canvas_side)
            throw InputError("ShiftMnistConfig: pixel position off canvas");
        if (r >= r0 && r < r0 + digit_rows && c >= c0 && c < c0 + digit_cols)
            throw InputError("ShiftMnistConfig: pixel position (" +
                             std::to_string(r) + "," + std::to_string(c) +
                             ") collides with the digit region");
        if (std::count(seen.begin(), seen.end(), std::make_pair(r, c)))
            throw InputError("ShiftMnistConfig: duplicate pixel position");
        seen.emplace_back(r, c);
    }
}

const char* shift_mode_name(ShiftMode m) {
    switch (m) {
        case ShiftMode::train: return "train";
        case ShiftMode::digits_only: return "digits_only";
        case ShiftMode::pixel_only: return "pixel_only";
        case ShiftMode::both: return "both";
    }
    return "?";
}

IdxDataset build_shift_mnist(const IdxDataset& dataset,
                             const ShiftMnistConfig& cfg, ShiftMode mode) {
    dataset.validate();
    cfg.validate(dataset.rows, dataset.cols);
    const int side = cfg.canvas_side;
    const int r0 = (side - dataset.rows) / 2;
    const int c0 = (side - dataset.cols) / 2;

    IdxDataset out;
    out.rows = side;
    out.cols = side;
    out.labels = dataset.labels;
    out.images.assign(dataset.n() * static_cast<std::size_t>(side) * side, 0);

    const bool with_digit = mode != ShiftMode::pixel_only;
    const bool with_pixel = mode != ShiftMode::digits_only;
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        std::uint8_t* canvas = out.images.data() + i * side * side;
        if (with_digit) {
            const std::uint8_t* src = dataset.image(i);
            for (int r = 0; r < dataset.rows; ++r)
                std::copy(src + r * dataset.cols, src + (r + 1) * dataset.cols,
                          canvas + (r0 + r) * side + c0);
        }
        if (with_pixel) {
            auto [pr, pc] = cfg.pixel_positions[dataset.labels[i]];
            canvas[pr * side + pc] = cfg.pixel_intensity;
        }
    }
    return out;
}

ShiftExperimentResult run_shift_experiment(const IdxDataset& train_set,
                                           const IdxDataset& test_set,
                                           const std::vector<double>& q_values,
                                           const ShiftExperimentConfig& cfg) {
    train_set.validate();
    test_set.validate();

    // Embedder: trained once on the unmodified digits, center-padded to the
    // canvas so any pooling depth divides the input side.
    IdxDataset train_padded = pad_centered(train_set, cfg.shift.canvas_side);
    IdxDataset test_padded = pad_centered(test_set, cfg.shift.canvas_side);
    MiniCnnConfig emc = cfg.model;
    emc.input_side = cfg.shift.canvas_side;
    emc.in_channels = 1;
    emc.num_classes = 10;
    emc.seed = derive_seed(cfg.seed, 0xE3BD, 0);
    MiniCnn embedder(emc);
    TrainConfig etc = cfg.embedder_train;
    etc.seed = derive_seed(cfg.seed, 0xE3BD, 1);
    TrainResult etr = train_classifier(embedder, idx_to_tensor(train_padded),
                                       idx_labels(train_padded), etc);
    if (etr.diverged) throw StateError("run_shift_experiment: embedder diverged");

    ShiftExperimentResult result;
    result.clean_accuracy = evaluate_accuracy(
        embedder, idx_to_tensor(test_padded), idx_labels(test_padded));

    // The three evaluation sets are q-independent; build them once.
    IdxDataset test_digits = build_shift_mnist(test_set, cfg.shift, ShiftMode::digits_only);
    IdxDataset test_pixel = build_shift_mnist(test_set, cfg.shift, ShiftMode::pixel_only);
    IdxDataset test_both = build_shift_mnist(test_set, cfg.shift, ShiftMode::both);
    Tensor tx_digits = idx_to_tensor(test_digits);
    Tensor tx_pixel = idx_to_tensor(test_pixel);
    Tensor tx_both = idx_to_tensor(test_both);
    std::vector<int> ty = idx_labels(test_set);

    for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
        const double q = q_values[qi];
        SegmentResult seg = segment_by_deviation(train_set, embedder, q);
        IdxDataset shifted = build_shift_mnist(seg.dataset, cfg.shift, ShiftMode::train);
        Tensor x = idx_to_tensor(shifted);
        std::vector<int> y = idx_labels(shifted);

        ShiftPointResult mean;
        mean.q = q;
        for (int run = 0; run < cfg.n_runs; ++run) {
            MiniCnnConfig mc = cfg.model;
            mc.input_side = cfg.shift.canvas_side;
            mc.in_channels = 1;
            mc.num_classes = 10;
            mc.seed = derive_seed(cfg.seed, 0x5417, qi * 64 + run);
            MiniCnn model(mc);
            TrainConfig tc = cfg.train;
            tc.seed = derive_seed(cfg.seed, 0x5418, qi * 64 + run);
            TrainResult tr = train_classifier(model, x, y, tc);
            if (tr.diverged)
                throw StateError("run_shift_experiment: training diverged at q=" +
                                 std::to_string(q));

            ShiftPointResult point;
            point.q = q;
            point.run = run;
            point.digits_only = evaluate_accuracy(model, tx_digits, ty);
            point.pixel_only = evaluate_accuracy(model, tx_pixel, ty);
            point.both = evaluate_accuracy(model, tx_both, ty);
            mean.digits_only += point.digits_only / cfg.n_runs;
            mean.pixel_only += point.pixel_only / cfg.n_runs;
            mean.both += point.both / cfg.n_runs;
            result.points.push_back(point);
        }
        result.means.push_back(mean);
    }
    return result;
}

}  // namespace preflab
