#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "preflab/errors.hpp"
#include "preflab/mnistlab.hpp"
#include "preflab/rng.hpp"

using namespace preflab;

namespace {

// Tiny synthetic digit set: per-class blob at a class-specific position
// with per-image jitter, so embeddings cluster by class.
IdxDataset synthetic_digits(int per_class, std::uint64_t seed, int side = 28) {
    IdxDataset d;
    d.rows = side;
    d.cols = side;
    Rng rng(seed);
    for (int c = 0; c < 10; ++c) {
        int cx = 6 + (c % 5) * 4, cy = 8 + (c / 5) * 10;
        for (int i = 0; i < per_class; ++i) {
            std::vector<std::uint8_t> img(side * side, 0);
            int jx = static_cast<int>(rng.below(5)) - 2;
            int jy = static_cast<int>(rng.below(5)) - 2;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    int x = cx + jx + dx, y = cy + jy + dy;
                    if (x >= 0 && x < side && y >= 0 && y < side)
                        img[y * side + x] = 200;
                }
            d.images.insert(d.images.end(), img.begin(), img.end());
            d.labels.push_back(static_cast<std::uint8_t>(c));
        }
    }
    return d;
}

MiniCnn tiny_embedder(int side) {
    MiniCnnConfig mc;
    mc.input_side = side;
    mc.in_channels = 1;
    mc.channels = {4, 8};
    mc.num_classes = 10;
    mc.seed = 1;
    return MiniCnn(mc);
}

}  // namespace

TEST_CASE("idx codec against a hand-assembled byte oracle") {
    // 2 images of 2x2, pixel values 1..8.
    std::vector<std::uint8_t> bytes = {
        0, 0, 8, 3,   // magic 0x00000803
        0, 0, 0, 2,   // n = 2
        0, 0, 0, 2,   // rows
        0, 0, 0, 2,   // cols
        1, 2, 3, 4, 5, 6, 7, 8,
    };
    auto imgs = parse_idx_images(bytes);
    CHECK(imgs.n == 2);
    CHECK(imgs.rows == 2);
    CHECK(imgs.cols == 2);
    CHECK(imgs.data == std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6, 7, 8});

    SUBCASE("round trip is byte-identical") {
        CHECK(serialize_idx_images(imgs) == bytes);
        std::vector<std::uint8_t> labels = {0, 0, 8, 1, 0, 0, 0, 3, 7, 1, 9};
        auto parsed = parse_idx_labels(labels);
        CHECK(parsed == std::vector<std::uint8_t>{7, 1, 9});
        CHECK(serialize_idx_labels(parsed) == labels);
        for (auto l : parsed) CHECK(l < 10);
    }

    SUBCASE("bad magic names the offset") {
        auto bad = bytes;
        bad[3] = 1;
        CHECK_THROWS_WITH_AS(parse_idx_images(bad),
                             doctest::Contains("byte offset 0"), FormatError);
        CHECK_THROWS_AS(parse_idx_labels(bytes), FormatError);
    }

    SUBCASE("truncation detected with offsets") {
        auto cut = bytes;
        cut.resize(20);
        CHECK_THROWS_WITH_AS(parse_idx_images(cut),
                             doctest::Contains("byte offset 20"), FormatError);
        CHECK_THROWS_AS(parse_idx_images(std::vector<std::uint8_t>{0, 0}),
                        FormatError);
    }
}

TEST_CASE("idx file round trip") {
    IdxDataset d = synthetic_digits(3, 5);
    auto dir = std::filesystem::temp_directory_path() / "preflab_idx_test";
    std::filesystem::create_directories(dir);
    save_idx(d, dir / "img", dir / "lab");
    IdxDataset back = load_idx(dir / "img", dir / "lab");
    CHECK(back.rows == d.rows);
    CHECK(back.images == d.images);
    CHECK(back.labels == d.labels);
    std::filesystem::remove_all(dir);
}

TEST_CASE("segment_by_deviation") {
    IdxDataset d = synthetic_digits(20, 9);
    MiniCnn embedder = tiny_embedder(28);

    SUBCASE("q = 1.0 keeps everything") {
        auto r = segment_by_deviation(d, embedder, 1.0);
        CHECK(r.dataset.n() == d.n());
        for (int c = 0; c < 10; ++c)
            CHECK(r.segment.kept_per_class[c].size() == 20);
        // Unchanged up to ordering: same multiset of (label, image) entries.
        auto key = [](const IdxDataset& ds, std::size_t i) {
            return std::make_pair(ds.labels[i],
                                  std::vector<std::uint8_t>(
                                      ds.image(i), ds.image(i) + 28 * 28));
        };
        std::multiset<std::pair<std::uint8_t, std::vector<std::uint8_t>>> a, b;
        for (std::size_t i = 0; i < d.n(); ++i) {
            a.insert(key(d, i));
            b.insert(key(r.dataset, i));
        }
        CHECK(a == b);
    }

    SUBCASE("kept count is ceil(q*n); replication restores class size") {
        auto r = segment_by_deviation(d, embedder, 0.15);
        for (int c = 0; c < 10; ++c)
            CHECK(r.segment.kept_per_class[c].size() == 3);  // ceil(0.15*20)
        CHECK(r.dataset.n() == d.n());
        // Each kept image appears n/keep times (cyclic replication).
        for (int c = 0; c < 10; ++c) {
            std::map<int, int> uses;
            const auto& kept = r.segment.kept_per_class[c];
            for (std::size_t k = 0; k < 20; ++k)
                ++uses[kept[k % kept.size()]];
            for (const auto& [_, count] : uses) CHECK(count >= 6);
        }
    }

    SUBCASE("determinism and recomputed-distance oracle") {
        auto r1 = segment_by_deviation(d, embedder, 0.3);
        auto r2 = segment_by_deviation(d, embedder, 0.3);
        CHECK(r1.segment.kept_per_class == r2.segment.kept_per_class);
        CHECK(r1.dataset.images == r2.dataset.images);

        // Oracle: every kept image is at least as close to the class mean
        // as every dropped one.
        Tensor all = idx_to_tensor(d);
        Tensor emb = embedder.embed(all);
        const int dim = embedder.embedding_dim();
        for (int c = 0; c < 10; ++c) {
            std::vector<int> members;
            for (std::size_t i = 0; i < d.n(); ++i)
                if (d.labels[i] == c) members.push_back(static_cast<int>(i));
            std::vector<double> mean(dim, 0);
            for (int i : members)
                for (int k = 0; k < dim; ++k) mean[k] += emb.data()[i * dim + k];
            for (auto& m : mean) m /= members.size();
            auto dist = [&](int i) {
                double s = 0;
                for (int k = 0; k < dim; ++k) {
                    double diff = emb.data()[i * dim + k] - mean[k];
                    s += diff * diff;
                }
                return s;
            };
            const auto& kept = r1.segment.kept_per_class[c];
            std::set<int> kept_set(kept.begin(), kept.end());
            double max_kept = 0;
            for (int i : kept) max_kept = std::max(max_kept, dist(i));
            for (int i : members)
                if (!kept_set.count(i)) CHECK(dist(i) >= max_kept - 1e-9);
        }
    }

    SUBCASE("monotonicity: kept(q1) subset of kept(q2) for q1 <= q2") {
        auto small = segment_by_deviation(d, embedder, 0.2);
        auto large = segment_by_deviation(d, embedder, 0.6);
        for (int c = 0; c < 10; ++c) {
            std::set<int> big(large.segment.kept_per_class[c].begin(),
                              large.segment.kept_per_class[c].end());
            for (int i : small.segment.kept_per_class[c]) CHECK(big.count(i));
        }
    }

    SUBCASE("q out of range rejected") {
        CHECK_THROWS_AS(segment_by_deviation(d, embedder, 0.0), InputError);
        CHECK_THROWS_AS(segment_by_deviation(d, embedder, 1.5), InputError);
    }
}

TEST_CASE("build_shift_mnist") {
    IdxDataset d = synthetic_digits(4, 3);
    auto cfg = ShiftMnistConfig::defaults();

    SUBCASE("pixel_only has exactly one nonzero pixel at the class position") {
        auto p = build_shift_mnist(d, cfg, ShiftMode::pixel_only);
        CHECK(p.rows == 32);
        for (std::size_t i = 0; i < p.n(); ++i) {
            int nz = 0;
            for (int j = 0; j < 32 * 32; ++j) nz += p.image(i)[j] != 0;
            CHECK(nz == 1);
            auto [r, c] = cfg.pixel_positions[p.labels[i]];
            CHECK(p.image(i)[r * 32 + c] == 255);
        }
    }

    SUBCASE("digits_only equals the canvas-padded original") {
        auto g = build_shift_mnist(d, cfg, ShiftMode::digits_only);
        for (std::size_t i = 0; i < d.n(); ++i)
            for (int y = 0; y < 28; ++y)
                for (int x = 0; x < 28; ++x)
                    CHECK(g.image(i)[(y + 2) * 32 + (x + 2)] ==
                          d.image(i)[y * 28 + x]);
    }

    SUBCASE("train and both modes build identical images") {
        auto t = build_shift_mnist(d, cfg, ShiftMode::train);
        auto b = build_shift_mnist(d, cfg, ShiftMode::both);
        CHECK(t.images == b.images);
        // Shift never alters digit pixels.
        auto g = build_shift_mnist(d, cfg, ShiftMode::digits_only);
        for (std::size_t i = 0; i < d.n(); ++i)
            for (int y = 2; y < 30; ++y)
                for (int x = 2; x < 30; ++x)
                    if (g.image(i)[y * 32 + x] != 0)
                        CHECK(t.image(i)[y * 32 + x] == g.image(i)[y * 32 + x]);
    }

    SUBCASE("colliding pixel position rejected") {
        auto bad = cfg;
        bad.pixel_positions[3] = {16, 16};  // inside the digit region
        CHECK_THROWS_AS(build_shift_mnist(d, bad, ShiftMode::train), InputError);
        auto dup = cfg;
        dup.pixel_positions[4] = dup.pixel_positions[5];
        CHECK_THROWS_AS(build_shift_mnist(d, dup, ShiftMode::train), InputError);
    }
}

TEST_CASE("untrained model is near chance on pixel_only") {
    IdxDataset d = synthetic_digits(10, 21);
    auto cfg = ShiftMnistConfig::defaults();
    auto p = build_shift_mnist(d, cfg, ShiftMode::pixel_only);
    MiniCnn model = tiny_embedder(32);
    double acc = evaluate_accuracy(model, idx_to_tensor(p), idx_labels(p));
    CHECK(acc >= 0.0);
    CHECK(acc <= 0.31);  // untrained: at or near 1/10 chance
}
