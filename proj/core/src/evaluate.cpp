#include "preflab/evaluate.hpp"

#include <algorithm>

#include "preflab/errors.hpp"
#include "preflab/rng.hpp"

namespace preflab {

double PreferenceTable::preference(const std::string& id) const {
    auto it = tallies.find(id);
    if (it == tallies.end())
        throw InputError("PreferenceTable: unknown feature '" + id + "'");
    return it->second.preference();
}

ConflictSet build_conflict_set(const PairsMatrix& matrix, int dataset_index,
                               const FeatureCatalog& catalog,
                               const SceneConfig& scene,
                               const ConflictOptions& options) {
    if (dataset_index < 0 ||
        dataset_index >= static_cast<int>(matrix.rounds.size()))
        throw InputError("evaluate_conflicts: dataset_index out of range");
    if (options.n_conflict <= 0)
        throw InputError("evaluate_conflicts: n_conflict must be > 0");

    // Feature -> class index within this dataset's round.
    std::map<std::string, int> class_of;
    const auto& round = matrix.rounds[dataset_index];
    for (std::size_t c = 0; c < round.size(); ++c) {
        class_of[round[c].a] = static_cast<int>(c);
        class_of[round[c].b] = static_cast<int>(c);
    }
    for (const auto& id : matrix.features)
        if (!class_of.count(id))
            throw StateError("evaluate_conflicts: feature '" + id +
                             "' missing from dataset " +
                             std::to_string(dataset_index));

    ConflictSet set;
    set.features = matrix.features;
    set.n_conflict = options.n_conflict;
    auto conflicts = conflict_pairs(matrix);
    for (std::size_t pi = 0; pi < conflicts.size(); ++pi) {
        const auto& pair = conflicts[pi].pair;
        set.pairs.push_back(pair);
        set.class_a.push_back(class_of.at(pair.a));
        set.class_b.push_back(class_of.at(pair.b));
        std::vector<Image> stimuli;
        stimuli.reserve(options.n_conflict);
        for (int i = 0; i < options.n_conflict; ++i) {
            ComposedScene s = compose_scene(
                {catalog.by_id(pair.a), catalog.by_id(pair.b)}, scene,
                derive_seed(options.seed, 0xC0F1 + pi, i));
            stimuli.push_back(std::move(s.image));
        }
        set.stimuli.push_back(images_to_tensor(stimuli, scene));
    }
    return set;
}

PreferenceTable evaluate_conflicts(const MiniCnn& model,
                                   const ConflictSet& set,
                                   bool include_trained_pairs) {
    PreferenceTable table;
    table.features = set.features;
    table.trained_pairs_included = include_trained_pairs;
    for (const auto& id : set.features) table.tallies[id];

    for (std::size_t pi = 0; pi < set.pairs.size(); ++pi) {
        const auto& pair = set.pairs[pi];
        const int ca = set.class_a[pi];
        const int cb = set.class_b[pi];
        PairOutcome outcome;
        outcome.pair = pair;
        outcome.trained = (ca == cb);

        std::vector<int> preds = model.predict(set.stimuli[pi]);
        for (int p : preds) {
            if (outcome.trained) {
                if (p == ca) {
                    ++outcome.wins_a;
                    ++outcome.wins_b;
                } else {
                    ++outcome.abstentions;
                }
            } else if (p == ca) {
                ++outcome.wins_a;
            } else if (p == cb) {
                ++outcome.wins_b;
            } else {
                ++outcome.abstentions;
            }
        }

        if (!outcome.trained || include_trained_pairs) {
            table.tallies[pair.a].wins += outcome.wins_a;
            table.tallies[pair.a].appearances += set.n_conflict;
            table.tallies[pair.b].wins += outcome.wins_b;
            table.tallies[pair.b].appearances += set.n_conflict;
            table.abstentions += outcome.abstentions;
        }
        table.pairs.push_back(std::move(outcome));
    }
    return table;
}

PreferenceTable evaluate_conflicts(const MiniCnn& model,
                                   const PairsMatrix& matrix, int dataset_index,
                                   const FeatureCatalog& catalog,
                                   const SceneConfig& scene,
                                   const ConflictOptions& options) {
    ConflictSet set =
        build_conflict_set(matrix, dataset_index, catalog, scene, options);
    return evaluate_conflicts(model, set, options.include_trained_pairs);
}

PreferenceTable aggregate_preferences(const std::vector<PreferenceTable>& tables) {
    if (tables.empty()) throw InputError("aggregate_preferences: no tables");
    PreferenceTable out;
    out.features = tables[0].features;
    out.trained_pairs_included = tables[0].trained_pairs_included;
    for (const auto& id : out.features) out.tallies[id];
    for (const auto& t : tables) {
        if (t.features != out.features)
            throw InputError("aggregate_preferences: mismatched feature universes");
        for (const auto& id : out.features) {
            const auto& tally = t.tallies.at(id);
            out.tallies[id].wins += tally.wins;
            out.tallies[id].appearances += tally.appearances;
        }
        out.abstentions += t.abstentions;
        out.pairs.insert(out.pairs.end(), t.pairs.begin(), t.pairs.end());
    }
    return out;
}

}  // namespace preflab
