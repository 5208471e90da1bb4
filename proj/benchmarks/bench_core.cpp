#include <benchmark/benchmark.h>

#include "preflab/render.hpp"
#include "preflab/rng.hpp"
#include "preflab/tensor.hpp"

using namespace preflab;

namespace {

Tensor seeded(std::vector<int> shape, std::uint64_t seed,
              bool requires_grad = false) {
    Tensor t = Tensor::zeros(std::move(shape), requires_grad);
    Rng rng(seed);
    for (auto& v : t.data()) v = static_cast<float>(rng.uniform() * 2 - 1);
    return t;
}

void BM_conv2d_forward(benchmark::State& state) {
    NoGradGuard ng;
    Tensor input = seeded({8, 16, 28, 28}, 1);
    Tensor kernel = seeded({32, 16, 3, 3}, 2);
    for (auto _ : state) {
        Tensor out = conv2d(input, kernel, 1, 1);
        benchmark::DoNotOptimize(out.data().data());
    }
    state.SetItemsProcessed(state.iterations() * input.dim(0));
}
BENCHMARK(BM_conv2d_forward);

void BM_conv2d_backward(benchmark::State& state) {
    for (auto _ : state) {
        Tensor input = seeded({8, 16, 28, 28}, 1, true);
        Tensor kernel = seeded({32, 16, 3, 3}, 2, true);
        Tensor out = conv2d(input, kernel, 1, 1);
        Tensor loss = sum(out);
        backward(loss);
        benchmark::DoNotOptimize(kernel.grad().data());
    }
    state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_conv2d_backward);

void BM_render_feature(benchmark::State& state) {
    FeatureSpec spec =
        make_feature(static_cast<FeatureVariant>(state.range(0)), 140);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        RenderedFeature f = render_feature(spec, 48, seed++);
        benchmark::DoNotOptimize(f.image.pixels.data());
    }
}
BENCHMARK(BM_render_feature)
    ->Arg(static_cast<int>(FeatureVariant::square))
    ->Arg(static_cast<int>(FeatureVariant::blue))
    ->Arg(static_cast<int>(FeatureVariant::blocky));

void BM_compose_scene(benchmark::State& state) {
    SceneConfig scene;
    std::vector<FeatureSpec> feats = {make_feature(FeatureVariant::blue, 140),
                                      make_feature(FeatureVariant::plus, 55)};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Image img = compose_scene(feats, scene, seed++).image;
        benchmark::DoNotOptimize(img.pixels.data());
    }
}
BENCHMARK(BM_compose_scene);

}  // namespace

BENCHMARK_MAIN();
