// Generates a procedural stroke-font digit corpus in IDX format, as a
// stand-in for MNIST when the real files are unavailable.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>

#include "preflab/digits.hpp"
#include "preflab/errors.hpp"
#include "preflab/mnistlab.hpp"
#include "preflab/rng.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic digit corpus generator (IDX output)"};
    std::string out = "mnist";
    int train_per_class = 400;
    int test_per_class = 100;
    std::uint64_t seed = 0;
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--train-per-class", train_per_class)
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--test-per-class", test_per_class)
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        namespace fs = std::filesystem;
        fs::create_directories(out);
        auto train = preflab::synth_digit_corpus(train_per_class, seed);
        auto test = preflab::synth_digit_corpus(
            test_per_class, preflab::derive_seed(seed, 0x7E57, 0, 0));
        preflab::save_idx(train, fs::path(out) / "train-images-idx3-ubyte",
                          fs::path(out) / "train-labels-idx1-ubyte");
        preflab::save_idx(test, fs::path(out) / "t10k-images-idx3-ubyte",
                          fs::path(out) / "t10k-labels-idx1-ubyte");
        std::printf("wrote %zu train / %zu test images to %s\n", train.n(),
                    test.n(), out.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
