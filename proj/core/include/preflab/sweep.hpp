#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "preflab/dataset.hpp"
#include "preflab/evaluate.hpp"
#include "preflab/nn.hpp"
#include "preflab/stats.hpp"
#include "preflab/train.hpp"

namespace preflab {

enum class SweepAxis { pixel_count, deviation, overlap, predictivity };
const char* axis_name(SweepAxis axis);
SweepAxis axis_from_name(const std::string& name);  // throws InputError

// Everything a pairs-matrix trial needs. Desk-scale defaults.
struct ExperimentConfig {
    FeatureCatalog catalog = default_catalog();
    SceneConfig scene;
    MiniCnnConfig model;  // input_side/num_classes are set per trial
    TrainConfig train;
    int n_train = 100;
    int n_val = 30;
    int n_test = 30;
    int n_conflict = 30;
    int n_runs = 3;
    int workers = 1;
    std::uint64_t seed = 0;
    bool include_trained_pairs = false;
    // Rounds of the pairs matrix to run; empty = all 9.
    std::vector<int> dataset_indices;
    // Feature manipulated by the deviation/overlap/predictivity sweeps and
    // its interpolation partner.
    std::string swept_feature = "blue";
    std::string overlap_partner = "green";

    void validate() const;
};

struct TrialRecord {
    int dataset_index = 0;
    int run = 0;
    double final_loss = 0.0;
    double val_accuracy = 0.0;
    bool diverged = false;
};

// The full pairs-matrix experiment: train n_runs models per round,
// evaluate all 45 conflict pairs each, aggregate.
struct PairsExperimentResult {
    PreferenceTable aggregate;
    std::vector<PreferenceTable> per_trial;
    std::vector<TrialRecord> trials;
    LinearFit pixel_fit;  // preference vs pixel budget over the 10 features
};

PairsExperimentResult run_pairs_experiment(const ExperimentConfig& config);

struct SweepPoint {
    double value = 0.0;
    double mean_preference = 0.0;           // swept feature, trials aggregated
    double partner_mean_preference = 0.0;   // overlap sweeps only
    std::vector<double> run_preferences;    // per completed trial
    int excluded_trials = 0;                // diverged, reported not counted
};

struct SweepResult {
    SweepAxis axis = SweepAxis::deviation;
    std::vector<SweepPoint> points;
    LinearFit fit;            // mean preference vs axis value
    double spearman_rho = 0;  // ditto, rank correlation
    LinearFit partner_fit;    // overlap sweeps only
    double partner_spearman_rho = 0;
};

// Applies each axis value to `swept_feature` (pixel budget, hue-deviation
// eps, interpolation alpha toward `overlap_partner`, or predictivity),
// trains, evaluates conflicts, and fits preference against the axis.
SweepResult run_sweep(SweepAxis axis, const std::vector<double>& values,
                      const ExperimentConfig& config);

// One trained model for one round of the matrix, plus its conflict table.
struct Trial {
    MiniCnn model;
    PreferenceTable table;
    TrialRecord record;
};

Trial run_trial(const ExperimentConfig& config, const PairsMatrix& matrix,
                int dataset_index, int run);

// The matrix over config.catalog's feature ids.
PairsMatrix matrix_for(const ExperimentConfig& config);

}  // namespace preflab
