#pragma once

#include <map>
#include <string>
#include <vector>

#include "preflab/mnistlab.hpp"
#include "preflab/sweep.hpp"

namespace preflab {

// Minimal INI: [section] headers, key = value lines, '#'/';' comments.
struct IniFile {
    // section -> key -> value; "" is the implicit top section.
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
};

// Throws FormatError with a line number on malformed input or duplicate keys.
IniFile parse_ini(const std::string& text);

// Typed configuration for the CLI. Unknown sections or keys are hard
// errors naming the offender and the accepted keys.
struct LabConfig {
    ExperimentConfig experiment;
    // Pixel budgets behind experiment.catalog.
    int budget_large = 140;
    int budget_medium = 100;
    int budget_small = 55;
    std::string budget_mode = "default";  // default | swapped | matched
    int budget_matched = 100;

    std::string sweep_axis = "deviation";
    std::vector<double> sweep_values = {0, 30, 60, 90, 120};

    std::vector<double> shift_q_values = {0.01, 0.05, 0.10, 0.25, 0.50, 1.00};
    int shift_n_runs = 2;
    int shift_epochs = 6;
    double shift_lr = 0.05;
    int shift_batch_size = 64;
    std::vector<int> shift_channels = {8, 16, 32};
    std::string mnist_train_images, mnist_train_labels;
    std::string mnist_test_images, mnist_test_labels;

    static LabConfig from_ini(const IniFile& ini);  // throws InputError
    static LabConfig from_text(const std::string& text);

    void apply_budgets();  // rebuilds experiment.catalog from the budget keys
};

// The documented default config, parseable by from_text.
std::string default_config_text();

}  // namespace preflab
