#include "preflab/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "preflab/errors.hpp"
#include "preflab/pool.hpp"
#include "preflab/rng.hpp"

namespace preflab {

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::pixel_count: return "pixel_count";
        case SweepAxis::deviation: return "deviation";
        case SweepAxis::overlap: return "overlap";
        case SweepAxis::predictivity: return "predictivity";
    }
    return "?";
}

SweepAxis axis_from_name(const std::string& name) {
    for (auto a : {SweepAxis::pixel_count, SweepAxis::deviation,
                   SweepAxis::overlap, SweepAxis::predictivity})
        if (name == axis_name(a)) return a;
    throw InputError("unknown sweep axis '" + name +
                     "' (expected pixel_count, deviation, overlap or "
                     "predictivity)");
}

void ExperimentConfig::validate() const {
    scene.validate();
    train.validate();
    if (n_train <= 0 || n_val <= 0 || n_test <= 0 || n_conflict <= 0)
        throw InputError("ExperimentConfig: all counts must be > 0");
    if (n_runs <= 0) throw InputError("ExperimentConfig: n_runs must be > 0");
    if (workers <= 0) throw InputError("ExperimentConfig: workers must be > 0");
    catalog.by_id(swept_feature);
    catalog.by_id(overlap_partner);
    for (const auto& f : catalog.features) f.validate();
}

PairsMatrix matrix_for(const ExperimentConfig& config) {
    return build_pairs_matrix(config.catalog.ids());
}

namespace {

std::vector<int> rounds_to_run(const ExperimentConfig& config,
                               const PairsMatrix& matrix) {
    if (!config.dataset_indices.empty()) return config.dataset_indices;
    std::vector<int> all(matrix.rounds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
}

DatasetSpec dataset_spec_for(const ExperimentConfig& config,
                             const PairsMatrix& matrix, int dataset_index) {
    DatasetSpec spec;
    spec.class_pairs = matrix.rounds[dataset_index];
    spec.catalog = config.catalog;
    spec.scene = config.scene;
    spec.n_train = config.n_train;
    spec.n_val = config.n_val;
    spec.n_test = config.n_test;
    spec.n_conflict = config.n_conflict;
    spec.seed = derive_seed(config.seed, 0xDA7A, dataset_index);
    spec.dataset_index = dataset_index;
    return spec;
}

// Renders shared by every run on the same dataset round.
struct RoundData {
    SplitData train;
    SplitData val;
    ConflictSet conflicts;
};

RoundData render_round(const ExperimentConfig& config, const PairsMatrix& matrix,
                       int dataset_index) {
    DatasetSpec spec = dataset_spec_for(config, matrix, dataset_index);
    RoundData rd;
    rd.train = render_split(spec, Split::train);
    rd.val = render_split(spec, Split::val);
    ConflictOptions opts;
    opts.n_conflict = config.n_conflict;
    opts.seed = derive_seed(config.seed, 0xC0F0, dataset_index);
    opts.include_trained_pairs = config.include_trained_pairs;
    rd.conflicts = build_conflict_set(matrix, dataset_index, config.catalog,
                                      config.scene, opts);
    return rd;
}

Trial run_trial_on(const ExperimentConfig& config, const RoundData& data,
                   int dataset_index, int run) {
    MiniCnnConfig mc = config.model;
    mc.input_side = config.scene.crop_side;
    mc.in_channels = 3;
    mc.num_classes = 5;
    mc.seed = derive_seed(config.seed, 0x3D0D, dataset_index * 64 + run);
    MiniCnn model(mc);

    TrainConfig tc = config.train;
    tc.seed = derive_seed(config.seed, 0x7121, dataset_index * 64 + run);
    TrainResult tr = train_classifier(model, data.train.images,
                                      data.train.labels, tc);

    Trial trial{std::move(model), {}, {}};
    trial.record.dataset_index = dataset_index;
    trial.record.run = run;
    trial.record.diverged = tr.diverged;
    trial.record.final_loss = tr.epoch_losses.empty() ? 0.0 : tr.epoch_losses.back();
    if (tr.diverged) return trial;

    trial.record.val_accuracy =
        evaluate_accuracy(trial.model, data.val.images, data.val.labels);
    trial.table = evaluate_conflicts(trial.model, data.conflicts,
                                     config.include_trained_pairs);
    return trial;
}

}  // namespace

Trial run_trial(const ExperimentConfig& config, const PairsMatrix& matrix,
                int dataset_index, int run) {
    RoundData data = render_round(config, matrix, dataset_index);
    return run_trial_on(config, data, dataset_index, run);
}

namespace {

// All (dataset, run) trials of `config`, pool-parallel, merged in index
// order so worker scheduling cannot change results.
struct TrialBatch {
    std::vector<PreferenceTable> tables;  // completed trials only
    std::vector<TrialRecord> records;     // every trial, diverged included
};

TrialBatch run_trial_batch(const ExperimentConfig& config,
                           const PairsMatrix& matrix) {
    const std::vector<int> rounds = rounds_to_run(config, matrix);
    struct Slot {
        PreferenceTable table;
        TrialRecord record;
        bool completed = false;
    };
    std::vector<Slot> slots(rounds.size() * config.n_runs);

    // Each round's renders are shared by its runs; the RoundData must stay
    // alive until every run on it has finished.
    std::vector<std::shared_ptr<RoundData>> round_data(rounds.size());

    auto job = [&](std::size_t slot_index, const RoundData& data,
                   int dataset_index, int run) {
        Trial t = run_trial_on(config, data, dataset_index, run);
        slots[slot_index].record = t.record;
        if (!t.record.diverged) {
            slots[slot_index].table = std::move(t.table);
            slots[slot_index].completed = true;
        }
    };

    if (config.workers > 1) {
        WorkerPool pool(config.workers);
        for (std::size_t d = 0; d < rounds.size(); ++d) {
            round_data[d] = std::make_shared<RoundData>(
                render_round(config, matrix, rounds[d]));
            for (int r = 0; r < config.n_runs; ++r)
                pool.submit([&job, &rounds, &config, data = round_data[d], d, r] {
                    job(d * config.n_runs + r, *data, rounds[d], r);
                });
        }
        pool.wait();
    } else {
        for (std::size_t d = 0; d < rounds.size(); ++d) {
            RoundData data = render_round(config, matrix, rounds[d]);
            for (int r = 0; r < config.n_runs; ++r)
                job(d * config.n_runs + r, data, rounds[d], r);
        }
    }

    TrialBatch batch;
    for (auto& s : slots) {
        batch.records.push_back(s.record);
        if (s.completed) batch.tables.push_back(std::move(s.table));
    }
    return batch;
}

}  // namespace

PairsExperimentResult run_pairs_experiment(const ExperimentConfig& config) {
    config.validate();
    PairsMatrix matrix = matrix_for(config);
    TrialBatch batch = run_trial_batch(config, matrix);
    if (batch.tables.empty())
        throw StateError("run_pairs_experiment: every trial diverged");

    PairsExperimentResult result;
    result.aggregate = aggregate_preferences(batch.tables);
    result.per_trial = std::move(batch.tables);
    result.trials = std::move(batch.records);

    std::vector<double> px, pref;
    for (const auto& f : config.catalog.features) {
        px.push_back(f.target_pixel_count);
        pref.push_back(result.aggregate.preference(f.id));
    }
    result.pixel_fit = linear_fit(px, pref);
    return result;
}

SweepResult run_sweep(SweepAxis axis, const std::vector<double>& values,
                      const ExperimentConfig& config) {
    config.validate();
    if (values.size() < 3)
        throw InputError("run_sweep: need >= 3 axis values, got " +
                         std::to_string(values.size()));

    SweepResult result;
    result.axis = axis;
    const std::string& fid = config.swept_feature;

    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        const double v = values[vi];
        ExperimentConfig point = config;
        point.seed = derive_seed(config.seed, 0x53EE, vi);
        FeatureSpec& feat = point.catalog.by_id(fid);
        switch (axis) {
            case SweepAxis::pixel_count:
                feat.target_pixel_count = static_cast<int>(std::lround(v));
                break;
            case SweepAxis::deviation:
                feat.hue_deviation_eps = v;
                break;
            case SweepAxis::overlap:
                feat = interpolate_feature(
                    feat, point.catalog.by_id(config.overlap_partner), v);
                break;
            case SweepAxis::predictivity:
                feat.predictivity = v;
                break;
        }

        PairsMatrix matrix = matrix_for(point);
        TrialBatch batch = run_trial_batch(point, matrix);

        SweepPoint sp;
        sp.value = v;
        for (const auto& t : batch.tables)
            sp.run_preferences.push_back(t.preference(fid));
        for (const auto& r : batch.records)
            if (r.diverged) ++sp.excluded_trials;
        if (!batch.tables.empty()) {
            PreferenceTable agg = aggregate_preferences(batch.tables);
            sp.mean_preference = agg.preference(fid);
            sp.partner_mean_preference = agg.preference(config.overlap_partner);
        }
        result.points.push_back(std::move(sp));
    }

    std::vector<double> xs, ys, partner_ys;
    for (const auto& p : result.points) {
        xs.push_back(p.value);
        ys.push_back(p.mean_preference);
        partner_ys.push_back(p.partner_mean_preference);
    }
    result.fit = linear_fit(xs, ys);
    result.spearman_rho = result.fit.degenerate ? 0.0 : spearman(xs, ys);
    result.partner_fit = linear_fit(xs, partner_ys);
    result.partner_spearman_rho =
        result.partner_fit.degenerate ? 0.0 : spearman(xs, partner_ys);
    return result;
}

}  // namespace preflab
