#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elstm/log.hpp"
#include "elstm/pipeline/stages.hpp"

namespace fs = std::filesystem;
using namespace elstm;
using namespace elstm::pipeline;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> contamination;
    std::optional<std::size_t> seq_len;
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> epoch_limit;
    std::optional<std::size_t> patience;
    std::optional<std::size_t> train_stride;
    std::optional<std::size_t> detect_stride;
    bool no_selection = false;
    bool no_lstm = false;
    std::optional<std::string> features;
    std::optional<std::string> fit_on;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--seed", o.seed, "Master seed");
}

void add_training(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--contamination", o.contamination, "Fraction of training samples removed by DAE-LOF");
    cmd->add_option("--seq-len", o.seq_len, "Window length L");
    cmd->add_option("--batch-size", o.batch_size, "Minibatch size");
    cmd->add_option("--epoch-limit", o.epoch_limit, "Maximum training epochs");
    cmd->add_option("--patience", o.patience, "Validations without improvement before stopping");
    cmd->add_option("--train-stride", o.train_stride, "Step between training windows");
    cmd->add_flag("--no-selection", o.no_selection, "Skip DAE-LOF sample selection");
    cmd->add_flag("--no-lstm", o.no_lstm, "Dense VAE over flattened windows instead of LSTM");
}

void add_detection(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--features", o.features, "Mixture input: daf or latent")->check(CLI::IsMember({"daf", "latent"}));
    cmd->add_option("--fit-on", o.fit_on, "Windows the mixture is fitted on")
        ->check(CLI::IsMember({"train", "test", "both"}));
    cmd->add_option("--detect-stride", o.detect_stride, "Step between detection windows");
}

void apply(const Overrides& o, PipelineConfig& c) {
    if (o.seed) {
        c.seed = *o.seed;
        c.em.seed = *o.seed;
    }
    if (o.contamination) c.contamination = *o.contamination;
    if (o.seq_len) c.seq_len = *o.seq_len;
    if (o.batch_size) c.batch_size = *o.batch_size;
    if (o.epoch_limit) c.epoch_limit = *o.epoch_limit;
    if (o.patience) c.patience = *o.patience;
    if (o.train_stride) c.train_stride = *o.train_stride;
    if (o.detect_stride) c.detect_stride = *o.detect_stride;
    if (o.no_selection) c.use_selection = false;
    if (o.no_lstm) c.use_lstm = false;
    if (o.features) c.feature_mode = *o.features == "daf" ? FeatureMode::daf : FeatureMode::latent_only;
    if (o.fit_on) c.fit_on = *o.fit_on == "train" ? FitScope::train : *o.fit_on == "both" ? FitScope::both : FitScope::test;
    validate(c);
}

PipelineConfig resolve(const Overrides& o) {
    PipelineConfig c = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    apply(o, c);
    return c;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) throw ConfigError("sweep value '" + item + "' is not a number");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised anomaly detection for multivariate sensor telemetry"};
    app.require_subcommand(1);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "debug, info, warn, error or off")
        ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

    Overrides o;
    fs::path out = "out";
    fs::path train_csv;
    fs::path test_csv;
    fs::path bundle;
    fs::path verdicts;
    std::string axis;
    std::string values;

    CLI::App* synth = app.add_subcommand("synth", "Write the synthetic train/test CSVs");
    add_common(synth, o);
    synth->add_option("--out", out, "Output directory")->capture_default_str();

    CLI::App* train = app.add_subcommand("train", "Clean, refine and train the DAE and LSTMVAE");
    add_common(train, o);
    add_training(train, o);
    add_detection(train, o);
    train->add_option("--train", train_csv, "Training CSV")->required();
    train->add_option("--out", out, "Output directory for the model bundle")->capture_default_str();

    CLI::App* detect = app.add_subcommand("detect", "Extract DAF on test data and classify with a GMM");
    add_common(detect, o);
    add_detection(detect, o);
    detect->add_option("--bundle", bundle, "Bundle directory written by train")->required();
    detect->add_option("--test", test_csv, "Test CSV")->required();
    detect->add_option("--out", out, "Output directory")->capture_default_str();

    CLI::App* evaluate = app.add_subcommand("evaluate", "Score verdicts against labelled test data");
    evaluate->add_option("--verdicts", verdicts, "verdicts.csv written by detect")->required();
    evaluate->add_option("--test", test_csv, "Labelled test CSV")->required();
    evaluate->add_option("--out", out, "Output directory")->capture_default_str();

    CLI::App* sweep = app.add_subcommand("sweep", "Run the full pipeline for each value of one parameter");
    add_common(sweep, o);
    add_training(sweep, o);
    add_detection(sweep, o);
    sweep->add_option("--axis", axis, "contamination, seq_len or batch")->required();
    sweep->add_option("--values", values, "Comma-separated values, e.g. 0,0.1,0.2,0.3")->required();
    sweep->add_option("--train", train_csv, "Training CSV")->required();
    sweep->add_option("--test", test_csv, "Labelled test CSV")->required();
    sweep->add_option("--out", out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    const std::pair<const char*, log::Level> levels[] = {{"debug", log::Level::debug},
                                                         {"info", log::Level::info},
                                                         {"warn", log::Level::warn},
                                                         {"error", log::Level::error},
                                                         {"off", log::Level::off}};
    for (const auto& [name, level] : levels) {
        if (log_level == name) log::set_level(level);
    }

    try {
        if (synth->parsed()) {
            const PipelineConfig c = run_stage("config", exit_code::usage, [&] { return resolve(o); });
            std::cout << cmd_synth(c, out).dump(2) << '\n';
        } else if (train->parsed()) {
            const PipelineConfig c = run_stage("config", exit_code::usage, [&] { return resolve(o); });
            cmd_train(c, train_csv, out);
            std::cout << "bundle written to " << (out / "bundle.json").string() << '\n';
        } else if (detect->parsed()) {
            const PipelineConfig c = run_stage("config", exit_code::usage, [&] {
                PipelineConfig base = load_bundle(bundle).config;
                if (!o.config.empty()) apply_detection_settings(base, load_config(o.config));
                apply(o, base);
                return base;
            });
            cmd_detect(c, bundle, test_csv, out);
            std::cout << "verdicts written to " << (out / "verdicts.csv").string() << '\n';
        } else if (evaluate->parsed()) {
            const auto report = cmd_evaluate(verdicts, test_csv, out);
            std::cout << metrics::to_json(report).dump(2) << '\n';
        } else if (sweep->parsed()) {
            const PipelineConfig c = run_stage("config", exit_code::usage, [&] { return resolve(o); });
            const std::vector<double> v = run_stage("config", exit_code::usage, [&] { return parse_values(values); });
            const SweepAxis a = run_stage("config", exit_code::usage, [&] { return parse_sweep_axis(axis); });
            cmd_sweep(c, a, v, train_csv, test_csv, out);
            std::cout << "sweep table written to " << (out / "sweep.csv").string() << '\n';
        }
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(e, exit_code::training);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::io;
    }
    return exit_code::ok;
}
