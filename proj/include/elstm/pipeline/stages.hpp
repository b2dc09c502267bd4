#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "elstm/daelof/refine.hpp"
#include "elstm/datapipe/clean.hpp"
#include "elstm/datapipe/sensor_frame.hpp"
#include "elstm/error.hpp"
#include "elstm/gmm/gmm.hpp"
#include "elstm/metrics/metrics.hpp"
#include "elstm/numkernel/trainer.hpp"
#include "elstm/pipeline/bundle.hpp"
#include "elstm/pipeline/config.hpp"

namespace elstm::pipeline {

/// Process exit codes of the command-line tool.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int data = 3;
inline constexpr int training = 4;
inline constexpr int detection = 5;
inline constexpr int evaluation = 6;
inline constexpr int io = 7;
}  // namespace exit_code

/// A library error tagged with the pipeline stage it came from.
class StageError : public Error {
public:
    StageError(std::string stage, int code, const std::string& message)
        : Error(stage + ": " + message), stage_(std::move(stage)), code_(code) {}
    const std::string& stage() const noexcept { return stage_; }
    int exit_code() const noexcept { return code_; }

private:
    std::string stage_;
    int code_;
};

/// Exit code for `e` raised inside a stage whose own failures map to `stage_code`.
int classify(const Error& e, int stage_code);

template <typename Fn>
auto run_stage(const std::string& stage, int stage_code, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, classify(e, stage_code), e.what());
    }
}

/// Writes train.csv, test.csv and synth_truth.json into `out_dir`; returns a summary.
nlohmann::json run_synth(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

struct TrainOutcome {
    Bundle bundle;
    data::CleanReport clean;
    dae::RefinementReport refinement;
    num::TrainingHistory dae_history;
    num::TrainingHistory vae_history;
    std::size_t train_windows = 0;
    /// Deterministic summary; wall-clock figures live in `timings` only.
    nlohmann::json report;
    nlohmann::json timings;
};

/// clean -> normalize -> DAE -> LOF refinement -> windows -> LSTMVAE -> train DAF.
TrainOutcome train_pipeline(const PipelineConfig& cfg, const data::SensorFrame& raw_train);
void write_train_outputs(const TrainOutcome& outcome, const std::filesystem::path& out_dir);

struct VerdictRow {
    std::size_t window = 0;
    data::Timestamp timestamp = 0;
    vae::DafPoint daf;
    std::size_t cluster = 0;
    data::Label label = data::Label::unknown;
    data::Label truth = data::Label::unknown;
};

struct DetectOutcome {
    PipelineConfig config;
    std::vector<VerdictRow> rows;
    gmm::FitResult fit;
    nlohmann::json report;
    nlohmann::json timings;
};

/// Copies the detection-time settings (feature mode, fit scope, stride, EM) from `source`.
void apply_detection_settings(PipelineConfig& target, const PipelineConfig& source);

/// Windows the test data, extracts DAF, fits the mixture and maps clusters to verdicts.
/// Model-shape settings come from the bundle; detection settings from `cfg`.
DetectOutcome detect_pipeline(const Bundle& bundle, const PipelineConfig& cfg, const data::SensorFrame& raw_test);
void write_detect_outputs(const DetectOutcome& outcome, const std::filesystem::path& out_dir);

void write_verdicts(std::span<const VerdictRow> rows, const std::filesystem::path& path);
std::vector<VerdictRow> read_verdicts(const std::filesystem::path& path);

/// Matches verdicts to the labelled test frame by timestamp.
metrics::MetricReport evaluate_verdicts(std::span<const VerdictRow> rows, const data::SensorFrame& labelled);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

// File-level commands.
nlohmann::json cmd_synth(const PipelineConfig& cfg, const std::filesystem::path& out_dir);
void cmd_train(const PipelineConfig& cfg, const std::filesystem::path& train_csv, const std::filesystem::path& out_dir);
void cmd_detect(const PipelineConfig& cfg, const std::filesystem::path& bundle,
                const std::filesystem::path& test_csv, const std::filesystem::path& out_dir);
metrics::MetricReport cmd_evaluate(const std::filesystem::path& verdicts, const std::filesystem::path& test_csv,
                                   const std::filesystem::path& out_dir);

enum class SweepAxis { contamination, seq_len, batch };
SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);
void apply_sweep_value(PipelineConfig& cfg, SweepAxis axis, double value);

struct SweepRow {
    double value = 0.0;
    metrics::MetricReport metrics;
};

/// Full train + detect + evaluate per value, each run under <out_dir>/<axis>_<value>/,
/// plus <out_dir>/sweep.csv with one row per value.
std::vector<SweepRow> cmd_sweep(const PipelineConfig& cfg, SweepAxis axis, std::span<const double> values,
                                const std::filesystem::path& train_csv, const std::filesystem::path& test_csv,
                                const std::filesystem::path& out_dir);

}  // namespace elstm::pipeline
