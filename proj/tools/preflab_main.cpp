// preflab: forge datasets, run experiments, emit reports, verify manifests.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "preflab/config.hpp"
#include "preflab/csv.hpp"
#include "preflab/dataset.hpp"
#include "preflab/digits.hpp"
#include "preflab/errors.hpp"
#include "preflab/manifest.hpp"
#include "preflab/mnistlab.hpp"
#include "preflab/rng.hpp"
#include "preflab/stimops.hpp"
#include "preflab/svg.hpp"
#include "preflab/sweep.hpp"

namespace fs = std::filesystem;
using namespace preflab;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct CommonOpts {
    std::string config_path;
    std::string out = "preflab_out";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool paper_scale = false;
    bool include_trained_pairs = false;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void apply_paper_scale(LabConfig& cfg) {
    auto& e = cfg.experiment;
    e.scene.canvas_side = 256;
    e.scene.feature_box_side = 192;
    e.scene.pad = 32;
    e.scene.crop_side = 224;
    e.scene.feature_render_side = 64;
    e.n_train = 300;
    e.n_val = 100;
    e.n_test = 100;
    e.train.epochs = 90;
    e.train.lr_decay_epochs = {45, 75};
}

LabConfig load_config(const CommonOpts& opts) {
    LabConfig cfg = opts.config_path.empty()
                        ? LabConfig::from_text(default_config_text())
                        : LabConfig::from_text(read_file(opts.config_path));
    if (opts.seed) cfg.experiment.seed = *opts.seed;
    if (opts.workers) cfg.experiment.workers = *opts.workers;
    if (opts.include_trained_pairs) cfg.experiment.include_trained_pairs = true;
    if (opts.paper_scale) apply_paper_scale(cfg);
    cfg.apply_budgets();
    cfg.experiment.validate();
    return cfg;
}

std::string config_text_of(const CommonOpts& opts) {
    return opts.config_path.empty() ? default_config_text()
                                    : read_file(opts.config_path);
}

RunManifest base_manifest(const CommonOpts& opts, const LabConfig& cfg,
                          const std::string& experiment) {
    RunManifest m;
    m.set("tool_version", kToolVersion);
    m.set("experiment", experiment);
    std::string text = config_text_of(opts);
    write_file(fs::path(opts.out) / "config.ini", text);
    m.set("config", "config.ini");
    m.set_u64("config_hash",
              fnv1a64(text));
    m.set_u64("root_seed", cfg.experiment.seed);
    m.set("workers", std::to_string(cfg.experiment.workers));
    m.set("include_trained_pairs",
          cfg.experiment.include_trained_pairs ? "true" : "false");
    m.set("paper_scale", opts.paper_scale ? "true" : "false");
    m.set("timestamp", timestamp());
    return m;
}

void add_output(RunManifest& m, const std::string& rel) {
    m.set("output", rel);
}

CsvTable preferences_table(const PairsExperimentResult& result,
                           const FeatureCatalog& catalog) {
    CsvTable t;
    t.header = {"feature", "pixel_count", "wins", "appearances", "preference"};
    for (const auto& id : result.aggregate.features) {
        const auto& tally = result.aggregate.tallies.at(id);
        t.rows.push_back({id,
                          std::to_string(catalog.by_id(id).target_pixel_count),
                          std::to_string(tally.wins),
                          std::to_string(tally.appearances),
                          csv_num(tally.preference())});
    }
    return t;
}

CsvTable fit_table(const std::vector<std::pair<std::string, LinearFit>>& fits,
                   const std::vector<double>& spearman = {}) {
    CsvTable t;
    t.header = {"series", "slope", "intercept", "pearson_r", "r_squared",
                "spearman_rho"};
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const auto& [name, f] = fits[i];
        t.rows.push_back({name, csv_num(f.slope), csv_num(f.intercept),
                          csv_num(f.pearson_r), csv_num(f.r_squared),
                          i < spearman.size() ? csv_num(spearman[i]) : ""});
    }
    return t;
}

int report_trials(const std::vector<TrialRecord>& trials) {
    int failed = 0;
    for (const auto& tr : trials)
        if (tr.diverged) {
            std::fprintf(stderr,
                         "trial failed (diverged): dataset %d run %d\n",
                         tr.dataset_index, tr.run);
            ++failed;
        }
    return failed;
}

void plot_preferences(const fs::path& path, const CsvTable& prefs,
                      const LinearFit& fit) {
    PlotSeries s;
    s.label = "features";
    int cx = prefs.column("pixel_count"), cy = prefs.column("preference");
    for (const auto& row : prefs.rows) {
        s.x.push_back(std::stod(row[cx]));
        s.y.push_back(std::stod(row[cy]));
    }
    PlotSpec spec;
    spec.title = "feature preference vs pixel count";
    spec.x_label = "pixel count";
    spec.y_label = "preference";
    spec.series = {s};
    spec.fit = fit;
    write_svg(path, spec);
}

// ---------------------------------------------------------------- forge

int cmd_forge(const CommonOpts& opts) {
    LabConfig cfg = load_config(opts);
    const auto& e = cfg.experiment;
    PairsMatrix matrix = matrix_for(e);
    RunManifest m = base_manifest(opts, cfg, "forge");
    std::vector<int> indices = e.dataset_indices;
    if (indices.empty())
        for (int d = 0; d < static_cast<int>(matrix.rounds.size()); ++d)
            indices.push_back(d);
    for (int d : indices) {
        DatasetSpec spec;
        spec.class_pairs = matrix.rounds[d];
        spec.catalog = e.catalog;
        spec.scene = e.scene;
        spec.n_train = e.n_train;
        spec.n_val = e.n_val;
        spec.n_test = e.n_test;
        spec.seed = derive_seed(e.seed, 0xDA7A, d, 0);
        spec.dataset_index = d;
        fs::path dir = fs::path(opts.out) / "datasets" / ("d" + std::to_string(d));
        std::string manifest = build_dataset(spec, dir);
        m.set("dataset", "datasets/d" + std::to_string(d));
        m.set_u64("dataset_hash",
                  fnv1a64(manifest));
        std::printf("forged dataset %d -> %s\n", d, dir.string().c_str());
    }
    m.save(fs::path(opts.out) / "forge_manifest.txt");
    return 0;
}

// ------------------------------------------------------------------ run

int run_pairs(const CommonOpts& opts, const LabConfig& cfg) {
    auto result = run_pairs_experiment(cfg.experiment);
    RunManifest m = base_manifest(opts, cfg, "pairs");
    for (const auto& tr : result.trials) {
        std::ostringstream line;
        line << "dataset=" << tr.dataset_index << " run=" << tr.run
             << " loss=" << csv_num(tr.final_loss)
             << " val_acc=" << csv_num(tr.val_accuracy)
             << " diverged=" << (tr.diverged ? 1 : 0);
        m.set("trial", line.str());
    }
    CsvTable prefs = preferences_table(result, cfg.experiment.catalog);
    write_csv(fs::path(opts.out) / "preferences.csv", prefs);
    add_output(m, "preferences.csv");
    write_csv(fs::path(opts.out) / "fit.csv",
              fit_table({{"pixel_count", result.pixel_fit}}));
    add_output(m, "fit.csv");
    plot_preferences(fs::path(opts.out) / "preferences.svg", prefs,
                     result.pixel_fit);
    add_output(m, "preferences.svg");
    m.set("pearson_r", csv_num(result.pixel_fit.pearson_r));
    m.set("abstentions", std::to_string(result.aggregate.abstentions));
    m.save(fs::path(opts.out) / "manifest.txt");
    std::printf("pairs: pearson r = %s over %zu features\n",
                csv_num(result.pixel_fit.pearson_r, 3).c_str(),
                result.aggregate.features.size());
    return report_trials(result.trials) ? 1 : 0;
}

std::vector<double> default_axis_values(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::pixel_count: return {55, 80, 100, 120, 140};
        case SweepAxis::deviation: return {0, 30, 60, 90, 120};
        case SweepAxis::overlap: return {0, 0.25, 0.5, 0.75, 1.0};
        case SweepAxis::predictivity: return {1.0, 0.8, 0.6, 0.4};
    }
    throw InputError("unknown sweep axis");
}

int run_sweep_cmd(const CommonOpts& opts, const LabConfig& cfg,
                  const std::string& axis_str) {
    SweepAxis axis = axis_from_name(axis_str);
    std::vector<double> values = cfg.sweep_axis == axis_str
                                     ? cfg.sweep_values
                                     : default_axis_values(axis);
    auto result = run_sweep(axis, values, cfg.experiment);
    RunManifest m = base_manifest(opts, cfg, "sweep:" + axis_str);

    CsvTable t;
    t.header = {"axis_value", "run", "feature", "preference"};
    int excluded = 0;
    for (const auto& pt : result.points) {
        for (std::size_t r = 0; r < pt.run_preferences.size(); ++r)
            t.rows.push_back({csv_num(pt.value), std::to_string(int(r)),
                              cfg.experiment.swept_feature,
                              csv_num(pt.run_preferences[r])});
        excluded += pt.excluded_trials;
        if (axis == SweepAxis::overlap)
            t.rows.push_back({csv_num(pt.value), "mean",
                              cfg.experiment.overlap_partner,
                              csv_num(pt.partner_mean_preference)});
    }
    write_csv(fs::path(opts.out) / "sweep.csv", t);
    add_output(m, "sweep.csv");

    std::vector<std::pair<std::string, LinearFit>> fits = {
        {cfg.experiment.swept_feature, result.fit}};
    std::vector<double> rhos = {result.spearman_rho};
    if (axis == SweepAxis::overlap) {
        fits.push_back({cfg.experiment.overlap_partner, result.partner_fit});
        rhos.push_back(result.partner_spearman_rho);
    }
    write_csv(fs::path(opts.out) / "fit.csv", fit_table(fits, rhos));
    add_output(m, "fit.csv");

    PlotSeries s;
    s.label = cfg.experiment.swept_feature;
    for (const auto& pt : result.points) {
        s.x.push_back(pt.value);
        s.y.push_back(pt.mean_preference);
    }
    PlotSpec spec;
    spec.title = std::string("preference vs ") + axis_name(axis);
    spec.x_label = axis_name(axis);
    spec.y_label = "preference";
    spec.series = {s};
    if (axis == SweepAxis::overlap) {
        PlotSeries p;
        p.label = cfg.experiment.overlap_partner;
        for (const auto& pt : result.points) {
            p.x.push_back(pt.value);
            p.y.push_back(pt.partner_mean_preference);
        }
        spec.series.push_back(p);
    }
    spec.fit = result.fit;
    spec.connect_points = true;
    write_svg(fs::path(opts.out) / "sweep.svg", spec);
    add_output(m, "sweep.svg");

    m.set("spearman_rho", csv_num(result.spearman_rho));
    m.set("excluded_trials", std::to_string(excluded));
    m.save(fs::path(opts.out) / "manifest.txt");
    std::printf("sweep:%s spearman rho = %s%s\n", axis_str.c_str(),
                csv_num(result.spearman_rho, 3).c_str(),
                excluded ? " (some trials diverged)" : "");
    return excluded ? 1 : 0;
}

int run_shiftmnist(const CommonOpts& opts, const LabConfig& cfg) {
    IdxDataset train, test;
    if (!cfg.mnist_train_images.empty()) {
        train = load_idx(cfg.mnist_train_images, cfg.mnist_train_labels);
        test = load_idx(cfg.mnist_test_images, cfg.mnist_test_labels);
    } else {
        std::printf("no IDX paths configured; generating a synthetic corpus\n");
        std::uint64_t s = cfg.experiment.seed;
        train = synth_digit_corpus(400, derive_seed(s, 0x7E57, 1, 0));
        test = synth_digit_corpus(100, derive_seed(s, 0x7E57, 2, 0));
    }

    ShiftExperimentConfig sc;
    sc.train.epochs = cfg.shift_epochs;
    sc.train.base_lr = cfg.shift_lr;
    sc.train.batch_size = cfg.shift_batch_size;
    sc.train.lr_decay_epochs = {};
    sc.model.channels = cfg.shift_channels;
    sc.n_runs = cfg.shift_n_runs;
    sc.seed = cfg.experiment.seed;
    auto result = run_shift_experiment(train, test, cfg.shift_q_values, sc);

    RunManifest m = base_manifest(opts, cfg, "shiftmnist");
    CsvTable t;
    t.header = {"q", "run", "test_set", "accuracy"};
    for (const auto& p : result.points) {
        t.rows.push_back({csv_num(p.q), std::to_string(p.run), "digits_only",
                          csv_num(p.digits_only)});
        t.rows.push_back({csv_num(p.q), std::to_string(p.run), "pixel_only",
                          csv_num(p.pixel_only)});
        t.rows.push_back(
            {csv_num(p.q), std::to_string(p.run), "both", csv_num(p.both)});
    }
    write_csv(fs::path(opts.out) / "shiftmnist.csv", t);
    add_output(m, "shiftmnist.csv");

    PlotSpec spec;
    spec.title = "shift-cue accuracy vs segment fraction q";
    spec.x_label = "q";
    spec.y_label = "accuracy";
    spec.connect_points = true;
    for (const char* name : {"digits_only", "pixel_only", "both"}) {
        PlotSeries s;
        s.label = name;
        for (const auto& p : result.means) {
            s.x.push_back(p.q);
            s.y.push_back(std::string(name) == "digits_only" ? p.digits_only
                          : std::string(name) == "pixel_only" ? p.pixel_only
                                                              : p.both);
        }
        spec.series.push_back(s);
    }
    write_svg(fs::path(opts.out) / "shiftmnist.svg", spec);
    add_output(m, "shiftmnist.svg");
    m.set("clean_accuracy", csv_num(result.clean_accuracy));
    m.save(fs::path(opts.out) / "manifest.txt");
    std::printf("shiftmnist: clean accuracy %s\n",
                csv_num(result.clean_accuracy, 4).c_str());
    return 0;
}

int run_stimops(const CommonOpts& opts, const LabConfig& cfg,
                const std::string& input_dir, const std::string& mask_dir,
                const std::string& allowlist_path) {
    RunManifest m = base_manifest(opts, cfg, "stimops");
    std::vector<std::pair<std::string, MaskedStimulus>> stimuli;

    if (!input_dir.empty()) {
        std::vector<std::string> ids;
        if (!allowlist_path.empty()) {
            std::istringstream in(read_file(allowlist_path));
            std::string line;
            while (std::getline(in, line))
                if (!line.empty()) ids.push_back(line);
        } else {
            for (const auto& e : fs::directory_iterator(input_dir))
                if (e.path().extension() == ".ppm")
                    ids.push_back(e.path().stem().string());
            std::sort(ids.begin(), ids.end());
        }
        for (const auto& id : ids) {
            MaskedStimulus s;
            s.image = read_ppm(fs::path(input_dir) / (id + ".ppm"));
            s.mask = read_pgm_mask(
                fs::path(mask_dir.empty() ? input_dir : mask_dir) /
                (id + ".pgm"));
            s.provenance = MaskedStimulus::Provenance::external;
            s.validate();
            stimuli.emplace_back(id, s);
        }
        if (stimuli.empty())
            throw InputError("no stimuli found in " + input_dir);
    } else {
        // Synthetic stimuli straight from the renderer, masks for free.
        const auto& scene = cfg.experiment.scene;
        int box = scene.feature_box_side;
        for (const auto& f : cfg.experiment.catalog.features) {
            auto rendered =
                render_feature(f, box, derive_seed(cfg.experiment.seed, 0x571C, 0, 0));
            MaskedStimulus s;
            s.image = rendered.image;
            s.mask = Mask(box, box);
            for (int y = 0; y < box; ++y)
                for (int x = 0; x < box; ++x) {
                    Rgb c = rendered.image.get(x, y);
                    s.mask.set(x, y, c.r || c.g || c.b);
                }
            stimuli.emplace_back(f.id, s);
        }
    }

    CsvTable t;
    t.header = {"stimulus", "op", "param", "object_pixels"};
    fs::path img_dir = fs::path(opts.out) / "stimuli";
    fs::create_directories(img_dir);
    for (const auto& [id, s] : stimuli) {
        write_ppm(img_dir / (id + "_original.ppm"), s.image);
        Image masked = exterior_mask(s);
        write_ppm(img_dir / (id + "_masked.ppm"), masked);
        t.rows.push_back({id, "exterior_mask", "", std::to_string(s.mask.count())});
        for (double lambda : {0.25, 0.5, 0.75}) {
            Image mixed = background_interpolate(s.image, masked, s.mask, lambda);
            write_ppm(img_dir / (id + "_bg" + csv_num(lambda, 2) + ".ppm"), mixed);
            t.rows.push_back({id, "background_interpolate", csv_num(lambda, 2),
                              std::to_string(s.mask.count())});
        }
        for (double scale : {0.75, 0.5}) {
            auto small = resize_with_pad(s, scale);
            write_ppm(img_dir / (id + "_s" + csv_num(scale, 2) + ".ppm"),
                      small.image);
            t.rows.push_back({id, "resize_with_pad", csv_num(scale, 2),
                              std::to_string(small.mask.count())});
        }
    }
    write_csv(fs::path(opts.out) / "stimops.csv", t);
    add_output(m, "stimops.csv");
    add_output(m, "stimuli/");

    // Area-vs-scale^2 check plot across all stimuli.
    PlotSeries s;
    s.label = "object area";
    int cop = t.column("op"), cparam = t.column("param"), cpx = t.column("object_pixels");
    std::map<std::string, std::int64_t> base;
    for (const auto& row : t.rows)
        if (row[cop] == "exterior_mask") base[row[0]] = std::stoll(row[cpx]);
    for (const auto& row : t.rows)
        if (row[cop] == "resize_with_pad") {
            double scale = std::stod(row[cparam]);
            s.x.push_back(scale * scale);
            s.y.push_back(static_cast<double>(std::stoll(row[cpx])) /
                          static_cast<double>(base[row[0]]));
        }
    PlotSpec spec;
    spec.title = "object area ratio vs scale^2";
    spec.x_label = "scale^2";
    spec.y_label = "area ratio";
    spec.series = {s};
    spec.fit = linear_fit(s.x, s.y);
    write_svg(fs::path(opts.out) / "stimops.svg", spec);
    add_output(m, "stimops.svg");
    m.save(fs::path(opts.out) / "manifest.txt");
    std::printf("stimops: processed %zu stimuli\n", stimuli.size());
    return 0;
}

// --------------------------------------------------------------- report

int cmd_report(const std::string& metrics_dir) {
    fs::path dir(metrics_dir);
    bool any = false;
    std::ostringstream summary;

    if (fs::exists(dir / "preferences.csv")) {
        CsvTable prefs = read_csv(dir / "preferences.csv");
        if (prefs.rows.empty()) throw InputError("preferences.csv: no data");
        LinearFit fit;
        if (fs::exists(dir / "fit.csv")) {
            CsvTable f = read_csv(dir / "fit.csv");
            fit.slope = std::stod(f.rows.at(0)[f.column("slope")]);
            fit.intercept = std::stod(f.rows.at(0)[f.column("intercept")]);
            fit.pearson_r = std::stod(f.rows.at(0)[f.column("pearson_r")]);
            fit.r_squared = std::stod(f.rows.at(0)[f.column("r_squared")]);
        } else {
            std::vector<double> x, y;
            int cx = prefs.column("pixel_count"), cy = prefs.column("preference");
            for (const auto& row : prefs.rows) {
                x.push_back(std::stod(row[cx]));
                y.push_back(std::stod(row[cy]));
            }
            fit = linear_fit(x, y);
        }
        plot_preferences(dir / "preferences.svg", prefs, fit);
        summary << "preferences: " << prefs.rows.size()
                << " features, pearson r = " << csv_num(fit.pearson_r, 3)
                << "\n";
        any = true;
    }

    if (fs::exists(dir / "sweep.csv")) {
        CsvTable t = read_csv(dir / "sweep.csv");
        if (t.rows.empty()) throw InputError("sweep.csv: no data");
        int cv = t.column("axis_value"), cf = t.column("feature"),
            cp = t.column("preference"), cr = t.column("run");
        std::map<std::string, std::map<double, std::pair<double, int>>> series;
        for (const auto& row : t.rows) {
            if (row[cr] == "mean") {
                series[row[cf]][std::stod(row[cv])] = {std::stod(row[cp]), 1};
                continue;
            }
            auto& acc = series[row[cf]][std::stod(row[cv])];
            acc.first += std::stod(row[cp]);
            ++acc.second;
        }
        PlotSpec spec;
        spec.title = "sweep";
        spec.x_label = "axis value";
        spec.y_label = "preference";
        spec.connect_points = true;
        for (const auto& [feature, pts] : series) {
            PlotSeries s;
            s.label = feature;
            for (const auto& [v, acc] : pts) {
                s.x.push_back(v);
                s.y.push_back(acc.first / acc.second);
            }
            spec.series.push_back(s);
        }
        if (fs::exists(dir / "fit.csv")) {
            CsvTable f = read_csv(dir / "fit.csv");
            LinearFit fit;
            fit.slope = std::stod(f.rows.at(0)[f.column("slope")]);
            fit.intercept = std::stod(f.rows.at(0)[f.column("intercept")]);
            fit.pearson_r = std::stod(f.rows.at(0)[f.column("pearson_r")]);
            spec.fit = fit;
        }
        write_svg(dir / "sweep.svg", spec);
        summary << "sweep: " << t.rows.size() << " rows, "
                << spec.series.size() << " series\n";
        any = true;
    }

    if (fs::exists(dir / "shiftmnist.csv")) {
        CsvTable t = read_csv(dir / "shiftmnist.csv");
        if (t.rows.empty()) throw InputError("shiftmnist.csv: no data");
        int cq = t.column("q"), cs = t.column("test_set"), ca = t.column("accuracy");
        std::map<std::string, std::map<double, std::pair<double, int>>> series;
        for (const auto& row : t.rows) {
            auto& acc = series[row[cs]][std::stod(row[cq])];
            acc.first += std::stod(row[ca]);
            ++acc.second;
        }
        PlotSpec spec;
        spec.title = "shift-cue accuracy vs q";
        spec.x_label = "q";
        spec.y_label = "accuracy";
        spec.connect_points = true;
        for (const auto& [name, pts] : series) {
            PlotSeries s;
            s.label = name;
            for (const auto& [q, acc] : pts) {
                s.x.push_back(q);
                s.y.push_back(acc.first / acc.second);
            }
            spec.series.push_back(s);
        }
        write_svg(dir / "shiftmnist.svg", spec);
        summary << "shiftmnist: " << t.rows.size() << " rows\n";
        any = true;
    }

    if (!any) throw InputError("no metrics CSVs found in " + metrics_dir);
    write_file(dir / "summary.txt", summary.str());
    std::fputs(summary.str().c_str(), stdout);
    return 0;
}

// --------------------------------------------------------------- verify

int cmd_verify(const std::string& run_dir) {
    fs::path dir(run_dir);
    RunManifest m = RunManifest::load(dir / "manifest.txt");
    std::string experiment = m.get("experiment");
    if (experiment != "pairs")
        throw InputError("verify supports pairs manifests; got '" + experiment +
                         "'");
    std::string text = read_file(dir / m.get("config"));
    std::uint64_t hash = fnv1a64(text);
    if (hash != m.get_u64("config_hash"))
        throw StateError("config.ini does not match the manifest hash");

    LabConfig cfg = LabConfig::from_text(text);
    cfg.experiment.seed = m.get_u64("root_seed");
    cfg.experiment.workers = std::stoi(m.get("workers"));
    cfg.experiment.include_trained_pairs = m.get("include_trained_pairs") == "true";
    if (m.get("paper_scale") == "true") apply_paper_scale(cfg);
    cfg.apply_budgets();

    auto result = run_pairs_experiment(cfg.experiment);
    CsvTable prefs = preferences_table(result, cfg.experiment.catalog);
    std::string replayed = to_csv_text(prefs);
    std::string original = read_file(dir / "preferences.csv");
    if (replayed != original) {
        std::fprintf(stderr, "verify FAILED: preferences.csv differs\n");
        write_file(dir / "preferences.replayed.csv", replayed);
        return 1;
    }
    std::printf("verify OK: preferences.csv replayed byte-identical\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"preference-lab: synthetic cue-conflict experiments"};
    app.require_subcommand(1);

    CommonOpts opts;
    if (const char* env = std::getenv("PREFLAB_OUT")) opts.out = env;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "INI config file");
        if (!std::getenv("PREFLAB_OUT"))
            cmd->add_option("--out", opts.out, "output directory")
                ->capture_default_str();
        cmd->add_option("--seed", opts.seed, "override the root seed");
        cmd->add_option("--workers", opts.workers, "worker pool size");
        cmd->add_flag("--paper-scale", opts.paper_scale,
                      "full-resolution canvas, counts, and schedule");
        cmd->add_flag("--include-trained-pairs", opts.include_trained_pairs,
                      "count trained pairs in preference denominators");
    };

    auto* forge = app.add_subcommand("forge", "render the pairs-matrix datasets");
    add_common(forge);

    auto* run = app.add_subcommand("run", "run an experiment end-to-end");
    std::string experiment;
    run->add_option("experiment", experiment,
                    "pairs | sweep:<axis> | shiftmnist | stimops")
        ->required();
    add_common(run);
    std::string stim_input, stim_masks, stim_allowlist;
    run->add_option("--input", stim_input, "stimops: external stimulus dir (.ppm)");
    run->add_option("--masks", stim_masks, "stimops: mask dir (.pgm)");
    run->add_option("--allowlist", stim_allowlist,
                    "stimops: file of stimulus ids, one per line");

    auto* report = app.add_subcommand("report", "re-render plots from CSVs");
    std::string metrics_dir;
    report->add_option("metrics_dir", metrics_dir)->required();

    auto* verify = app.add_subcommand("verify", "replay a manifest and compare");
    std::string verify_dir;
    verify->add_option("run_dir", verify_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (forge->parsed()) return cmd_forge(opts);
        if (run->parsed()) {
            LabConfig cfg = load_config(opts);
            if (experiment == "pairs") return run_pairs(opts, cfg);
            if (experiment.rfind("sweep:", 0) == 0)
                return run_sweep_cmd(opts, cfg, experiment.substr(6));
            if (experiment == "shiftmnist") return run_shiftmnist(opts, cfg);
            if (experiment == "stimops")
                return run_stimops(opts, cfg, stim_input, stim_masks,
                                   stim_allowlist);
            throw InputError(
                "unknown experiment '" + experiment +
                "'; expected pairs, sweep:<axis>, shiftmnist, or stimops");
        }
        if (report->parsed()) return cmd_report(metrics_dir);
        if (verify->parsed()) return cmd_verify(verify_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
