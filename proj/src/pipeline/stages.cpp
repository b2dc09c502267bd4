#include "elstm/pipeline/stages.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "elstm/daelof/dae.hpp"
#include "elstm/datapipe/csv.hpp"
#include "elstm/datapipe/normalize.hpp"
#include "elstm/datapipe/synth.hpp"
#include "elstm/datapipe/windows.hpp"
#include "elstm/gmm/serialize.hpp"
#include "elstm/log.hpp"
#include "elstm/lstmvae/train.hpp"

namespace elstm::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

json history_json(const num::TrainingHistory& h) {
    std::vector<double> train;
    std::vector<double> val;
    for (const auto& e : h.epochs) {
        train.push_back(e.train_loss);
        val.push_back(e.val_loss);
    }
    return {{"epochs", h.epochs.size()},
            {"best_epoch", h.best_epoch},
            {"best_val_loss", h.best_val_loss},
            {"stopped_early", h.stopped_early},
            {"train_loss", train},
            {"val_loss", val}};
}

json refinement_summary(const dae::RefinementReport& r) {
    return {{"skipped", r.skipped},
            {"k_neighbors", r.k_neighbors},
            {"contamination", r.contamination},
            {"removed", r.removed.size()},
            {"retained", r.retained.size()}};
}

std::string fmt(double v) { return data::format_double(v); }

num::Matrix features_of(std::span<const vae::DafPoint> points, FeatureMode mode) {
    const std::size_t d = mode == FeatureMode::daf ? 3 : 2;
    num::Matrix m(points.size(), d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        m(i, 0) = points[i].mu1;
        m(i, 1) = points[i].mu2;
        if (d == 3) m(i, 2) = points[i].e_rec;
    }
    return m;
}

num::Matrix stack_rows(const num::Matrix& a, const num::Matrix& b) {
    num::Matrix out(a.rows() + b.rows(), a.cols());
    std::copy(a.values().begin(), a.values().end(), out.values().begin());
    std::copy(b.values().begin(), b.values().end(), out.values().begin() + static_cast<std::ptrdiff_t>(a.size()));
    return out;
}

data::SensorFrame load_input(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("input file " + path.string() + " does not exist");
    return data::load_csv(path);
}

std::string label_name(data::Label l) { return std::string(data::to_string(l)); }

}  // namespace

int classify(const Error& e, int stage_code) {
    if (dynamic_cast<const ConfigError*>(&e)) return exit_code::usage;
    if (dynamic_cast<const IngestError*>(&e) || dynamic_cast<const DataQualityError*>(&e)) return exit_code::data;
    if (dynamic_cast<const IoError*>(&e)) return exit_code::io;
    return stage_code;
}

void write_json(const json& j, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

json run_synth(const PipelineConfig& cfg, const fs::path& out_dir) {
    const data::SynthConfig sc = synth_config(cfg);
    data::validate(sc);
    const data::SynthOutput out = data::generate_with_truth(sc);
    const std::size_t cut = cfg.synth.train_samples;
    const data::SensorFrame train = out.frame.slice(0, cut);
    const data::SensorFrame test = out.frame.slice(cut, out.frame.samples());
    fs::create_directories(out_dir);
    data::write_csv(train, out_dir / "train.csv");
    data::write_csv(test, out_dir / "test.csv");

    std::size_t abnormal_train = 0;
    std::size_t abnormal_test = 0;
    for (auto l : train.labels) abnormal_train += l == data::Label::abnormal;
    for (auto l : test.labels) abnormal_test += l == data::Label::abnormal;
    write_json({{"onset", sc.onset}, {"spike_rows", out.spike_rows}, {"missing_rows", out.missing_rows}},
               out_dir / "synth_truth.json");
    return {{"train_csv", (out_dir / "train.csv").string()},
            {"test_csv", (out_dir / "test.csv").string()},
            {"train_rows", train.samples()},
            {"test_rows", test.samples()},
            {"features", train.features()},
            {"abnormal_train_rows", abnormal_train},
            {"abnormal_test_rows", abnormal_test},
            {"spike_rows", out.spike_rows.size()},
            {"missing_rows", out.missing_rows.size()}};
}

TrainOutcome train_pipeline(const PipelineConfig& cfg, const data::SensorFrame& raw_train) {
    validate(cfg);
    TrainOutcome out;
    json timings = json::object();

    auto t0 = Clock::now();
    data::CleanResult cleaned = run_stage("clean", exit_code::data, [&] {
        return data::clean(raw_train, cfg.max_removed_fraction);
    });
    out.clean = cleaned.report;
    const data::SensorFrame& frame = cleaned.frame;
    const std::size_t f = frame.features();
    if (cfg.dae_layers.front() != f) {
        throw StageError("train", exit_code::usage,
                         "dae_layers start at " + std::to_string(cfg.dae_layers.front()) + " but the data have " +
                             std::to_string(f) + " features");
    }
    const data::NormalizationStats stats = data::fit_normalizer(frame);
    const data::SensorFrame norm = data::apply_normalizer(frame, stats);
    timings["clean_normalize_s"] = seconds_since(t0);

    t0 = Clock::now();
    dae::DaeTrainResult dae_result = run_stage("dae", exit_code::training, [&] {
        const std::size_t cut = data::split_point(norm.samples(), cfg.train_fraction);
        if (cut == 0 || cut == norm.samples()) throw DataQualityError("too few rows for a DAE validation split");
        dae::DaeTrainConfig dc;
        dc.layers = cfg.dae_layers;
        dc.schedule = schedule(cfg);
        dc.seed = cfg.seed;
        return dae::dae_train(norm.slice(0, cut).values, norm.slice(cut, norm.samples()).values, dc);
    });
    out.dae_history = dae_result.history;
    timings["dae_train_s"] = seconds_since(t0);

    t0 = Clock::now();
    dae::RefineResult refined = run_stage("refine", exit_code::training, [&] {
        const std::vector<double> errors = dae::reconstruction_errors(dae_result.model, norm.values);
        if (!cfg.use_selection) {
            dae::RefineResult r{norm, dae::skipped_report(norm.samples())};
            r.report.errors = errors;
            return r;
        }
        return dae::refine(norm, errors, lof_config(cfg));
    });
    out.refinement = refined.report;
    timings["refine_s"] = seconds_since(t0);

    t0 = Clock::now();
    vae::VaeTrainResult vae_result = run_stage("vae", exit_code::training, [&] {
        const data::WindowSet windows = data::make_windows(refined.frame, cfg.seq_len, cfg.train_stride);
        out.train_windows = windows.size();
        vae::VaeTrainConfig vc;
        vc.dims.features = f;
        vc.dims.seq_len = cfg.seq_len;
        vc.dims.latent = cfg.latent_dim;
        vc.architecture = cfg.use_lstm ? vae::Architecture::lstm : vae::Architecture::flat;
        vc.schedule = schedule(cfg);
        vc.train_fraction = cfg.train_fraction;
        vc.seed = cfg.seed;
        return vae::train(windows, vc);
    });
    vae_result.model.set_normalization(stats);
    out.vae_history = vae_result.history;
    timings["vae_train_s"] = seconds_since(t0);

    t0 = Clock::now();
    out.bundle.config = cfg;
    out.bundle.feature_names = frame.feature_names;
    out.bundle.dae = std::move(dae_result.model);
    out.bundle.vae = std::move(vae_result.model);
    out.bundle.train_daf = run_stage("train-daf", exit_code::training, [&] {
        return vae::extract_daf(out.bundle.vae, data::make_windows(refined.frame, cfg.seq_len, cfg.detect_stride));
    });
    timings["train_daf_s"] = seconds_since(t0);

    out.report = {{"config", to_json(cfg)},
                  {"input_rows", raw_train.samples()},
                  {"clean", {{"removed_rows", out.clean.removed_rows.size()},
                             {"bad_per_feature", out.clean.bad_per_feature}}},
                  {"normalization", {{"mean", stats.mean}, {"stddev", stats.stddev}, {"floored", stats.floored}}},
                  {"dae",
                   {{"layers", out.bundle.dae.layers()},
                    {"parameters", out.bundle.dae.params().scalar_count()},
                    {"history", history_json(out.dae_history)}}},
                  {"refinement", refinement_summary(out.refinement)},
                  {"vae",
                   {{"architecture", cfg.use_lstm ? "lstm" : "flat"},
                    {"parameters", out.bundle.vae.params().scalar_count()},
                    {"train_windows", out.train_windows},
                    {"history", history_json(out.vae_history)}}}};
    out.timings = timings;
    return out;
}

void write_train_outputs(const TrainOutcome& o, const fs::path& out_dir) {
    run_stage("write", exit_code::io, [&] {
        save_bundle(o.bundle, out_dir);
        write_json(o.report, out_dir / "train_report.json");
        write_json(dae::to_json(o.refinement), out_dir / "refinement.json");
        write_json(o.timings, out_dir / "train_timings.json");
    });
}

void apply_detection_settings(PipelineConfig& target, const PipelineConfig& source) {
    target.feature_mode = source.feature_mode;
    target.fit_on = source.fit_on;
    target.detect_stride = source.detect_stride;
    target.em = source.em;
}

DetectOutcome detect_pipeline(const Bundle& bundle, const PipelineConfig& cfg, const data::SensorFrame& raw_test) {
    DetectOutcome out;
    out.config = bundle.config;
    apply_detection_settings(out.config, cfg);
    validate(out.config);
    const PipelineConfig& c = out.config;
    json timings = json::object();

    if (raw_test.feature_names != bundle.feature_names) {
        throw StageError("detect", exit_code::detection,
                         "test data have " + std::to_string(raw_test.features()) +
                             " features that do not match the model's " + std::to_string(bundle.feature_names.size()));
    }
    auto t0 = Clock::now();
    const data::CleanResult cleaned = run_stage("clean", exit_code::data, [&] {
        return data::clean(raw_test, c.max_removed_fraction);
    });
    const data::SensorFrame norm = data::apply_normalizer(cleaned.frame, bundle.vae.normalization());
    const data::WindowSet windows = run_stage("detect", exit_code::detection, [&] {
        return data::make_windows(norm, bundle.vae.dims().seq_len, c.detect_stride);
    });
    const std::vector<vae::DafPoint> daf = run_stage("daf", exit_code::detection, [&] {
        return vae::extract_daf(bundle.vae, windows);
    });
    timings["daf_s"] = seconds_since(t0);

    t0 = Clock::now();
    const num::Matrix test_features = features_of(daf, c.feature_mode);
    num::Matrix fit_features;
    switch (c.fit_on) {
        case FitScope::test: fit_features = test_features; break;
        case FitScope::train: fit_features = features_of(bundle.train_daf, c.feature_mode); break;
        case FitScope::both:
            fit_features = stack_rows(features_of(bundle.train_daf, c.feature_mode), test_features);
            break;
    }
    gmm::Prediction pred;
    std::vector<double> e_rec(daf.size());
    for (std::size_t i = 0; i < daf.size(); ++i) e_rec[i] = daf[i].e_rec;
    run_stage("gmm", exit_code::detection, [&] {
        out.fit = gmm::fit(fit_features, em_config(c));
        pred = gmm::predict(out.fit.model, test_features);
        out.fit.model.labels = c.feature_mode == FeatureMode::daf
                                   ? gmm::map_clusters(out.fit.model)
                                   : gmm::map_clusters_by_score(pred.clusters, e_rec, out.fit.model.components());
    });
    timings["gmm_s"] = seconds_since(t0);

    out.rows.resize(daf.size());
    std::size_t abnormal = 0;
    for (std::size_t i = 0; i < daf.size(); ++i) {
        VerdictRow& r = out.rows[i];
        r.window = i;
        r.timestamp = windows.timestamp(i);
        r.daf = daf[i];
        r.cluster = pred.clusters[i];
        r.label = out.fit.model.labels[r.cluster];
        r.truth = windows.label(i);
        abnormal += r.label == data::Label::abnormal;
    }
    out.report = {{"config", to_json(c)},
                  {"test_rows", raw_test.samples()},
                  {"clean_removed_rows", cleaned.report.removed_rows.size()},
                  {"windows", daf.size()},
                  {"abnormal_verdicts", abnormal},
                  {"gmm",
                   {{"model", gmm::to_json(out.fit.model)},
                    {"em", gmm::to_json(em_config(c))},
                    {"fit_points", fit_features.rows()},
                    {"iterations", out.fit.trace.size() - 1},
                    {"converged", out.fit.converged},
                    {"best_restart", out.fit.best_restart},
                    {"failed_restarts", out.fit.failed_restarts},
                    {"log_likelihood", out.fit.trace}}}};
    out.timings = timings;
    return out;
}

void write_verdicts(std::span<const VerdictRow> rows, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "window,timestamp,mu1,mu2,e_rec,cluster,label\n";
    for (const auto& r : rows) {
        out << r.window << ',' << data::format_timestamp(r.timestamp) << ',' << fmt(r.daf.mu1) << ','
            << fmt(r.daf.mu2) << ',' << fmt(r.daf.e_rec) << ',' << r.cluster << ',' << label_name(r.label) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void write_detect_outputs(const DetectOutcome& o, const fs::path& out_dir) {
    run_stage("write", exit_code::io, [&] {
        fs::create_directories(out_dir);
        write_verdicts(o.rows, out_dir / "verdicts.csv");
        const fs::path daf_path = out_dir / "daf.csv";
        std::ofstream daf(daf_path);
        if (!daf) throw IoError("cannot write " + daf_path.string());
        daf << "window,timestamp,mu1,mu2,e_rec,true_label\n";
        for (const auto& r : o.rows) {
            daf << r.window << ',' << data::format_timestamp(r.timestamp) << ',' << fmt(r.daf.mu1) << ','
                << fmt(r.daf.mu2) << ',' << fmt(r.daf.e_rec) << ',' << label_name(r.truth) << '\n';
        }
        if (!daf) throw IoError("write failed for " + daf_path.string());
        write_json(o.report, out_dir / "detect_report.json");
        write_json(o.timings, out_dir / "detect_timings.json");
    });
}

std::vector<VerdictRow> read_verdicts(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read verdicts " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "window,timestamp,mu1,mu2,e_rec,cluster,label") {
        throw IngestError(path.string() + ": unexpected verdict header");
    }
    std::vector<VerdictRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        const std::string where = path.string() + " line " + std::to_string(line_no);
        if (fields.size() != 7) throw IngestError(where + ": expected 7 fields");
        VerdictRow r;
        try {
            r.window = std::stoull(fields[0]);
            r.daf = {std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4])};
            r.cluster = std::stoull(fields[5]);
        } catch (const std::exception&) {
            throw IngestError(where + ": malformed number");
        }
        const auto ts = data::parse_timestamp(fields[1]);
        if (!ts) throw IngestError(where + ": malformed timestamp");
        r.timestamp = *ts;
        const auto label = data::parse_label_name(fields[6]);
        if (!label || *label == data::Label::unknown) throw IngestError(where + ": label must be normal or abnormal");
        r.label = *label;
        rows.push_back(r);
    }
    return rows;
}

metrics::MetricReport evaluate_verdicts(std::span<const VerdictRow> rows, const data::SensorFrame& labelled) {
    if (rows.empty()) throw DomainError("evaluate: no verdicts");
    std::map<data::Timestamp, data::Label> truth;
    for (std::size_t i = 0; i < labelled.samples(); ++i) truth[labelled.timestamps[i]] = labelled.labels[i];
    std::vector<data::Label> predicted;
    std::vector<data::Label> actual;
    for (const auto& r : rows) {
        const auto it = truth.find(r.timestamp);
        if (it == truth.end()) {
            throw DomainError("evaluate: verdict for window " + std::to_string(r.window) + " at " +
                              data::format_timestamp(r.timestamp) + " has no row in the labelled data");
        }
        if (it->second == data::Label::unknown) {
            throw DomainError("evaluate: the labelled data have no label at " + data::format_timestamp(r.timestamp));
        }
        predicted.push_back(r.label);
        actual.push_back(it->second);
    }
    return metrics::compute_metrics(predicted, actual);
}

json cmd_synth(const PipelineConfig& cfg, const fs::path& out_dir) {
    return run_stage("synth", exit_code::data, [&] {
        json summary = run_synth(cfg, out_dir);
        summary["config"] = to_json(cfg);
        write_json(summary, out_dir / "synth_report.json");
        return summary;
    });
}

void cmd_train(const PipelineConfig& cfg, const fs::path& train_csv, const fs::path& out_dir) {
    const data::SensorFrame raw = run_stage("load", exit_code::data, [&] { return load_input(train_csv); });
    const TrainOutcome outcome = train_pipeline(cfg, raw);
    write_train_outputs(outcome, out_dir);
}

void cmd_detect(const PipelineConfig& cfg, const fs::path& bundle_path, const fs::path& test_csv,
                const fs::path& out_dir) {
    const Bundle bundle = run_stage("load", exit_code::detection, [&] { return load_bundle(bundle_path); });
    const data::SensorFrame raw = run_stage("load", exit_code::data, [&] { return load_input(test_csv); });
    const DetectOutcome outcome = detect_pipeline(bundle, cfg, raw);
    write_detect_outputs(outcome, out_dir);
}

metrics::MetricReport cmd_evaluate(const fs::path& verdicts, const fs::path& test_csv, const fs::path& out_dir) {
    return run_stage("evaluate", exit_code::evaluation, [&] {
        const std::vector<VerdictRow> rows = read_verdicts(verdicts);
        const data::SensorFrame labelled = load_input(test_csv);
        const metrics::MetricReport report = evaluate_verdicts(rows, labelled);
        write_json(metrics::to_json(report), out_dir / "metrics.json");
        return report;
    });
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "contamination") return SweepAxis::contamination;
    if (name == "seq_len") return SweepAxis::seq_len;
    if (name == "batch" || name == "batch_size") return SweepAxis::batch;
    throw ConfigError("sweep axis must be contamination, seq_len or batch, got " + name);
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::contamination: return "contamination";
        case SweepAxis::seq_len: return "seq_len";
        case SweepAxis::batch: return "batch";
    }
    return "contamination";
}

void apply_sweep_value(PipelineConfig& cfg, SweepAxis axis, double value) {
    auto whole = [&](const char* what) {
        if (!(value >= 1.0) || value != std::floor(value)) {
            throw ConfigError(std::string(what) + " sweep values must be positive integers, got " + fmt(value));
        }
        return static_cast<std::size_t>(value);
    };
    switch (axis) {
        case SweepAxis::contamination: cfg.contamination = value; break;
        case SweepAxis::seq_len: cfg.seq_len = whole("seq_len"); break;
        case SweepAxis::batch: cfg.batch_size = whole("batch"); break;
    }
    validate(cfg);
}

std::vector<SweepRow> cmd_sweep(const PipelineConfig& cfg, SweepAxis axis, std::span<const double> values,
                                const fs::path& train_csv, const fs::path& test_csv, const fs::path& out_dir) {
    if (values.empty()) throw StageError("sweep", exit_code::usage, "no sweep values given");
    std::vector<PipelineConfig> configs;
    for (double v : values) {
        PipelineConfig c = cfg;
        run_stage("sweep", exit_code::usage, [&] { apply_sweep_value(c, axis, v); });
        configs.push_back(c);
    }
    const data::SensorFrame raw_train = run_stage("load", exit_code::data, [&] { return load_input(train_csv); });
    const data::SensorFrame raw_test = run_stage("load", exit_code::data, [&] { return load_input(test_csv); });

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const fs::path run_dir = out_dir / (to_string(axis) + "_" + fmt(values[i]));
        log::info("sweep " + to_string(axis) + " = " + fmt(values[i]));
        const TrainOutcome trained = train_pipeline(configs[i], raw_train);
        write_train_outputs(trained, run_dir);
        const DetectOutcome detected = detect_pipeline(trained.bundle, configs[i], raw_test);
        write_detect_outputs(detected, run_dir);
        const metrics::MetricReport report = run_stage("evaluate", exit_code::evaluation, [&] {
            return evaluate_verdicts(detected.rows, raw_test);
        });
        run_stage("write", exit_code::io, [&] { write_json(metrics::to_json(report), run_dir / "metrics.json"); });
        rows.push_back({values[i], report});
    }

    run_stage("write", exit_code::io, [&] {
        fs::create_directories(out_dir);
        const fs::path path = out_dir / "sweep.csv";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << to_string(axis) << ",ac,pr,rc,f1,far\n";
        for (const auto& r : rows) {
            out << fmt(r.value) << ',' << fmt(r.metrics.ac) << ',' << fmt(r.metrics.pr) << ',' << fmt(r.metrics.rc)
                << ',' << fmt(r.metrics.f1) << ',' << fmt(r.metrics.far) << '\n';
        }
        if (!out) throw IoError("write failed for " + path.string());
    });
    return rows;
}

}  // namespace elstm::pipeline
