#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "double_ref.hpp"
#include "preflab/errors.hpp"
#include "preflab/nn.hpp"
#include "preflab/rng.hpp"
#include "preflab/train.hpp"

using namespace preflab;

namespace {

MiniCnnConfig tiny_config(std::uint64_t seed = 1) {
    MiniCnnConfig cfg;
    cfg.input_side = 8;
    cfg.in_channels = 3;
    cfg.channels = {4, 6};
    cfg.num_classes = 3;
    cfg.seed = seed;
    return cfg;
}

Tensor random_images(int n, int c, int side, std::uint64_t seed) {
    Rng rng(seed);
    Tensor t = Tensor::zeros({n, c, side, side});
    for (float& v : t.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
    return t;
}

}  // namespace

TEST_CASE("sgd plain step: param -= lr * grad") {
    TrainConfig cfg;
    cfg.base_lr = 0.1;
    cfg.momentum = 0.0;
    cfg.weight_decay = 0.0;
    cfg.lr_decay_epochs = {};
    std::vector<Tensor> params = {Tensor::zeros({1}, true)};
    {
        Tensor loss = sum(params[0]);
        backward(loss);  // grad = 1
    }
    SgdOptimizer opt(params, cfg);
    opt.step(0);
    CHECK(params[0].data()[0] == doctest::Approx(-0.1f));
}

TEST_CASE("sgd learning rate passes both decay points") {
    TrainConfig cfg;
    cfg.base_lr = 0.1;
    cfg.lr_decay_epochs = {30, 60};
    cfg.lr_decay_factor = 0.1;
    CHECK(cfg.lr_at(0) == doctest::Approx(0.1));
    CHECK(cfg.lr_at(30) == doctest::Approx(0.01));
    CHECK(cfg.lr_at(59) == doctest::Approx(0.01));
    CHECK(cfg.lr_at(61) == doctest::Approx(0.1 * 0.01));
}

TEST_CASE("sgd momentum: two steps on constant grad total lr*(g + 1.9g)") {
    TrainConfig cfg;
    cfg.base_lr = 0.05;
    cfg.momentum = 0.9;
    cfg.weight_decay = 0.0;
    cfg.lr_decay_epochs = {};
    const float g = 2.0f;
    std::vector<Tensor> params = {Tensor::zeros({1}, true)};
    SgdOptimizer opt(params, cfg);
    for (int i = 0; i < 2; ++i) {
        params[0].zero_grad();
        Tensor scaled = mul(params[0], Tensor::full({1}, 0.0f));  // grad path
        Tensor loss = sum(add(scaled, Tensor::full({1}, 0.0f)));
        // Direct grad injection keeps the recurrence exact.
        backward(loss);
        params[0].grad()[0] = g;
        opt.step(0);
    }
    // v1 = g, v2 = 0.9 g + g; total = lr * (g + 1.9 g)
    CHECK(params[0].data()[0] == doctest::Approx(-0.05f * (g + 1.9f * g)));
}

TEST_CASE("sgd without grads is a state error") {
    TrainConfig cfg;
    std::vector<Tensor> params = {Tensor::zeros({2}, true)};
    SgdOptimizer opt(params, cfg);
    CHECK_THROWS_AS(opt.step(0), StateError);
}

TEST_CASE("train config invariants") {
    TrainConfig cfg;
    cfg.lr_decay_epochs = {10, 10};
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = TrainConfig{};
    cfg.momentum = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = TrainConfig{};
    cfg.base_lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("MiniCNN gradients match central finite differences") {
    MiniCnn model(tiny_config(2024));
    Tensor images = random_images(4, 3, 8, 5);
    std::vector<int> labels = {0, 1, 2, 1};
    Tensor loss = softmax_cross_entropy(model.forward(images), labels);
    backward(loss);

    refd::MiniCnnRef ref = refd::MiniCnnRef::from(model);
    refd::Vec imgs(images.data().begin(), images.data().end());
    const double h = 1e-3;
    const double f0 = ref.loss(imgs, 4, labels);
    int checked = 0, failed = 0, skipped = 0;
    for (std::size_t pi = 0; pi < model.parameters().size(); ++pi) {
        Tensor& p = model.parameters()[pi];
        REQUIRE(p.has_grad());
        for (std::int64_t i = 0; i < p.size(); ++i) {
            double saved = ref.params[pi][i];
            ref.params[pi][i] = saved + h;
            double up = ref.loss(imgs, 4, labels);
            ref.params[pi][i] = saved - h;
            double down = ref.loss(imgs, 4, labels);
            ref.params[pi][i] = saved;
            double fd = (up - down) / (2.0 * h);
            double a = p.grad()[i];
            double kink = std::abs((up - f0) / h - (f0 - down) / h);
            bool ok;
            if (std::abs(a) < 1e-3) {
                ok = std::abs(fd - a) < 1e-4 + 1e-2 * std::abs(fd);
            } else {
                ok = std::abs(fd - a) / std::max(std::abs(a), std::abs(fd)) < 1e-2;
            }
            if (!ok && kink >= std::abs(fd - a)) {
                // A ReLU/maxpool kink inside the window explains the
                // mismatch; the FD estimate is invalid there.
                ++skipped;
                continue;
            }
            ++checked;
            if (!ok) ++failed;
        }
    }
    CHECK(checked > 500);
    CHECK(failed == 0);
    CHECK(skipped * 20 <= checked);
}

TEST_CASE("embed: deterministic, batch independent, right width") {
    MiniCnn model(tiny_config(7));
    Tensor one = random_images(1, 3, 8, 11);
    Tensor e1 = model.embed(one);
    Tensor e2 = model.embed(one);
    CHECK(std::equal(e1.data().begin(), e1.data().end(), e2.data().begin()));

    // Same image inside a larger batch yields the identical row.
    Tensor batch = random_images(3, 3, 8, 13);
    std::copy(one.data().begin(), one.data().end(), batch.data().begin());
    Tensor eb = model.embed(batch);
    for (int d = 0; d < model.embedding_dim(); ++d)
        CHECK(eb.data()[d] == doctest::Approx(e1.data()[d]));

    for (std::vector<int> chans : {std::vector<int>{4}, {4, 8}, {2, 4, 6}}) {
        MiniCnnConfig cfg = tiny_config(3);
        cfg.channels = chans;
        cfg.input_side = 8 * (chans.size() == 3 ? 1 : 1);
        MiniCnn m(cfg);
        Tensor e = m.embed(random_images(2, 3, cfg.input_side, 17));
        CHECK(e.shape() == std::vector<int>{2, chans.back()});
    }
}

TEST_CASE("training is bit-reproducible for identical seeds") {
    Tensor images = random_images(24, 3, 8, 21);
    std::vector<int> labels(24);
    for (int i = 0; i < 24; ++i) labels[i] = i % 3;
    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 8;
    tc.seed = 5;

    auto run = [&] {
        MiniCnn model(tiny_config(9));
        train_classifier(model, images, labels, tc);
        return model;
    };
    MiniCnn a = run(), b = run();
    for (std::size_t i = 0; i < a.parameters().size(); ++i) {
        auto da = a.parameters()[i].data(), db = b.parameters()[i].data();
        CHECK(std::equal(da.begin(), da.end(), db.begin()));
    }
}

TEST_CASE("loss decreases monotonically on a separable toy set") {
    // Class 0: bright left half; class 1: bright right half.
    const int n = 32, side = 8;
    Tensor images = Tensor::zeros({n, 3, side, side});
    std::vector<int> labels(n);
    Rng rng(31);
    for (int i = 0; i < n; ++i) {
        labels[i] = i % 2;
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < side; ++y)
                for (int x = 0; x < side; ++x) {
                    bool lit = labels[i] == 0 ? x < side / 2 : x >= side / 2;
                    float noise = static_cast<float>(rng.uniform(0.0, 0.05));
                    images.data()[((i * 3 + c) * side + y) * side + x] =
                        lit ? 1.0f - noise : noise;
                }
    }
    MiniCnnConfig mc = tiny_config(42);
    mc.num_classes = 2;
    MiniCnn model(mc);
    TrainConfig tc;
    tc.epochs = 8;
    tc.base_lr = 0.05;
    tc.lr_decay_epochs = {};
    tc.batch_size = 8;
    TrainResult r = train_classifier(model, images, labels, tc);
    REQUIRE(!r.diverged);
    // Strictly decreasing until the loss floors at ~0 (full convergence).
    for (std::size_t e = 3; e < r.epoch_losses.size(); ++e) {
        if (r.epoch_losses[e - 1] < 1e-6) break;
        CHECK(r.epoch_losses[e] < r.epoch_losses[e - 1]);
    }
    CHECK(r.epoch_losses.back() < r.epoch_losses[2]);
    CHECK(evaluate_accuracy(model, images, labels) == doctest::Approx(1.0));
}

TEST_CASE("checkpoint round-trip preserves config and parameters") {
    MiniCnn model(tiny_config(77));
    auto path = std::filesystem::temp_directory_path() / "preflab_ckpt_test.bin";
    model.save(path);
    MiniCnn loaded = MiniCnn::load(path);
    CHECK(loaded.config().to_text() == model.config().to_text());
    for (std::size_t i = 0; i < model.parameters().size(); ++i) {
        auto a = model.parameters()[i].data(), b = loaded.parameters()[i].data();
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    std::filesystem::remove(path);
}

TEST_CASE("MiniCnnConfig invariants") {
    MiniCnnConfig cfg = tiny_config();
    cfg.num_classes = 1;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = tiny_config();
    cfg.input_side = 10;  // not divisible by 2^2
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = tiny_config();
    CHECK(MiniCnnConfig::from_text(cfg.to_text()).to_text() == cfg.to_text());
}
