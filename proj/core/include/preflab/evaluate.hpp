#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "preflab/dataset.hpp"
#include "preflab/nn.hpp"
#include "preflab/pairs.hpp"
#include "preflab/render.hpp"

namespace preflab {

struct FeatureTally {
    long long wins = 0;
    long long appearances = 0;
    double preference() const {
        return appearances == 0 ? 0.0
                                : static_cast<double>(wins) / appearances;
    }
};

// Outcome of the n_conflict stimuli of one feature pair under one model.
struct PairOutcome {
    FeaturePair pair;
    long long wins_a = 0;
    long long wins_b = 0;
    long long abstentions = 0;  // predicted class contains neither feature
    bool trained = false;       // the pair is one of the model's own classes
};

struct PreferenceTable {
    std::vector<std::string> features;  // universe, catalog order
    std::map<std::string, FeatureTally> tallies;
    std::vector<PairOutcome> pairs;
    long long abstentions = 0;
    bool trained_pairs_included = false;

    double preference(const std::string& id) const;  // throws InputError
};

struct ConflictOptions {
    int n_conflict = 30;
    std::uint64_t seed = 0;
    // Trained pairs are not conflicts (a hit credits both features); they
    // are excluded from the tallies by default but always reported in
    // `pairs`.
    bool include_trained_pairs = false;
};

// Rendered conflict stimuli for one dataset round, reusable across the
// models trained on that round.
struct ConflictSet {
    std::vector<std::string> features;  // universe, catalog order
    std::vector<FeaturePair> pairs;     // all 45, conflict_pairs order
    std::vector<int> class_a, class_b;  // class index of each side
    std::vector<Tensor> stimuli;        // [n_conflict,3,S,S] per pair
    int n_conflict = 0;
};

ConflictSet build_conflict_set(const PairsMatrix& matrix, int dataset_index,
                               const FeatureCatalog& catalog,
                               const SceneConfig& scene,
                               const ConflictOptions& options);

// Classifies n_conflict composed images for each of the 45 pairs. A
// prediction of the class containing feature A credits A; a class holding
// neither feature counts as an abstention. Preference = wins/appearances.
PreferenceTable evaluate_conflicts(const MiniCnn& model,
                                   const ConflictSet& conflicts,
                                   bool include_trained_pairs = false);
PreferenceTable evaluate_conflicts(const MiniCnn& model,
                                   const PairsMatrix& matrix, int dataset_index,
                                   const FeatureCatalog& catalog,
                                   const SceneConfig& scene,
                                   const ConflictOptions& options);

// Sums wins and appearances per feature across tables; the feature universe
// must match. Throws InputError on mismatch or empty input.
PreferenceTable aggregate_preferences(const std::vector<PreferenceTable>& tables);

}  // namespace preflab
