#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "elstm/datapipe/csv.hpp"
#include "elstm/error.hpp"
#include "elstm/lstmvae/serialize.hpp"
#include "elstm/pipeline/stages.hpp"
#include "support.hpp"

using namespace elstm;
using namespace elstm::pipeline;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config() {
    PipelineConfig c;
    c.seed = 5;
    c.synth.n_samples = 1200;
    c.synth.train_samples = 800;
    c.synth.onset = 1000;
    c.seq_len = 20;
    c.train_stride = 5;
    c.detect_stride = 2;
    c.batch_size = 32;
    c.epoch_limit = 4;
    c.patience = 2;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t data_rows(const fs::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++n;
    }
    return n - 1;
}

// Synthetic data shared by the cases below, generated once.
const fs::path& scenario() {
    static const fs::path dir = [] {
        auto d = test::scratch_dir("pipeline_scenario");
        cmd_synth(small_config(), d);
        return d;
    }();
    return dir;
}

// A trained bundle for the shared scenario.
const fs::path& trained() {
    static const fs::path dir = [] {
        auto d = test::scratch_dir("pipeline_trained");
        cmd_train(small_config(), scenario() / "train.csv", d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ELSTM_CLI_PATH) + " --log-level off " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path write_config(const nlohmann::json& j, const std::string& name) {
    const fs::path p = test::scratch_dir("cfg_" + name) / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

}  // namespace

TEST_CASE("config round trip and validation") {
    const PipelineConfig c = small_config();
    const auto j = to_json(c);
    CHECK(to_json(from_json(j)) == j);
    CHECK(to_json(from_json(nlohmann::json::object())) == to_json(PipelineConfig{}));

    auto unknown = j;
    unknown["learning_rate_typo"] = 1;
    CHECK_THROWS_AS(from_json(unknown), ConfigError);
    auto ill_typed = j;
    ill_typed["seq_len"] = "long";
    CHECK_THROWS_AS(from_json(ill_typed), ConfigError);

    PipelineConfig bad = c;
    bad.contamination = 1.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.seq_len = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.batch_size = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.synth.train_samples = bad.synth.n_samples;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("synth writes the split with both labels and is reproducible") {
    const auto& dir = scenario();
    CHECK(data_rows(dir / "train.csv") == 800);
    CHECK(data_rows(dir / "test.csv") == 400);
    const auto test = data::load_csv(dir / "test.csv");
    std::size_t abnormal = 0;
    for (auto l : test.labels) abnormal += l == data::Label::abnormal;
    CHECK(abnormal == 200);

    const auto again = test::scratch_dir("pipeline_synth_again");
    cmd_synth(small_config(), again);
    CHECK(slurp(dir / "train.csv") == slurp(again / "train.csv"));
    CHECK(slurp(dir / "test.csv") == slurp(again / "test.csv"));

    PipelineConfig other = small_config();
    other.seed = 6;
    const auto third = test::scratch_dir("pipeline_synth_other");
    cmd_synth(other, third);
    CHECK(slurp(dir / "train.csv") != slurp(third / "train.csv"));
}

TEST_CASE("train writes a bundle whose report echoes the config") {
    const auto& dir = trained();
    for (const char* f : {"bundle.json", "train_report.json", "refinement.json", "train_timings.json"}) {
        CHECK(fs::exists(dir / f));
    }
    const auto report = nlohmann::json::parse(slurp(dir / "train_report.json"));
    CHECK(report["config"] == to_json(small_config()));
    const Bundle b = load_bundle(dir);
    CHECK(b.feature_names.size() == 19);
    CHECK(b.train_daf.size() > 0);
}

TEST_CASE("selection switch and zero contamination agree") {
    const auto raw = data::load_csv(scenario() / "train.csv");
    PipelineConfig off = small_config();
    off.use_selection = false;
    const TrainOutcome a = train_pipeline(off, raw);
    CHECK(a.bundle.train_daf.size() > 0);
    CHECK(a.refinement.skipped);

    PipelineConfig zero = small_config();
    zero.contamination = 0.0;
    const TrainOutcome b = train_pipeline(zero, raw);
    CHECK(b.refinement.removed.empty());
    CHECK(vae::to_json(a.bundle.vae) == vae::to_json(b.bundle.vae));
    REQUIRE(a.bundle.train_daf.size() == b.bundle.train_daf.size());
    for (std::size_t i = 0; i < a.bundle.train_daf.size(); ++i) {
        CHECK(a.bundle.train_daf[i].e_rec == b.bundle.train_daf[i].e_rec);
    }
}

TEST_CASE("detect gives one verdict per window and reruns identically") {
    const auto out1 = test::scratch_dir("pipeline_detect1");
    const auto out2 = test::scratch_dir("pipeline_detect2");
    cmd_detect(small_config(), trained(), scenario() / "test.csv", out1);
    cmd_detect(small_config(), trained(), scenario() / "test.csv", out2);
    const auto rows = read_verdicts(out1 / "verdicts.csv");
    CHECK(rows.size() == (400 - 20) / 2 + 1);
    for (const char* f : {"verdicts.csv", "daf.csv", "detect_report.json"}) {
        CHECK(slurp(out1 / f) == slurp(out2 / f));
    }
    const auto report = nlohmann::json::parse(slurp(out1 / "detect_report.json"));
    CHECK(report["config"] == to_json(small_config()));

    const auto m = cmd_evaluate(out1 / "verdicts.csv", scenario() / "test.csv", out1);
    CHECK(fs::exists(out1 / "metrics.json"));
    CHECK(m.ac >= 0.0);
    CHECK(m.ac <= 100.0);
}

TEST_CASE("evaluate against known verdicts") {
    const auto test = data::load_csv(scenario() / "test.csv");
    std::vector<VerdictRow> rows;
    for (std::size_t i = 0; i < test.samples(); i += 7) {
        VerdictRow r;
        r.window = rows.size();
        r.timestamp = test.timestamps[i];
        r.label = test.labels[i];
        rows.push_back(r);
    }
    const auto perfect = evaluate_verdicts(rows, test);
    CHECK(perfect.ac == 100.0);
    CHECK(perfect.far == 0.0);

    auto inverted = rows;
    for (auto& r : inverted) r.label = r.label == data::Label::normal ? data::Label::abnormal : data::Label::normal;
    CHECK(evaluate_verdicts(inverted, test).ac == 0.0);

    auto half = rows;
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < half.size(); i += 2, ++flipped) half[i].label = inverted[i].label;
    const double expected = 100.0 * static_cast<double>(half.size() - flipped) / static_cast<double>(half.size());
    CHECK(evaluate_verdicts(half, test).ac == doctest::Approx(expected));

    auto stray = rows;
    stray.back().timestamp += 1;
    CHECK_THROWS_AS(evaluate_verdicts(stray, test), DomainError);

    const auto dir = test::scratch_dir("pipeline_eval");
    write_verdicts(rows, dir / "verdicts.csv");
    const auto back = read_verdicts(dir / "verdicts.csv");
    REQUIRE(back.size() == rows.size());
    CHECK(back.front().timestamp == rows.front().timestamp);
    CHECK(back.back().label == rows.back().label);

    write_verdicts(stray, dir / "stray.csv");
    try {
        cmd_evaluate(dir / "stray.csv", scenario() / "test.csv", dir);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.exit_code() == exit_code::evaluation);
    }
}

TEST_CASE("single-value sweep matches a direct run") {
    const auto dir = test::scratch_dir("pipeline_sweep");
    const std::vector<double> values{0.1};
    const auto rows = cmd_sweep(small_config(), SweepAxis::contamination, values, scenario() / "train.csv",
                                scenario() / "test.csv", dir);
    REQUIRE(rows.size() == 1);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(data_rows(dir / "sweep.csv") == 1);
    CHECK(slurp(dir / "sweep.csv").rfind("contamination,ac,pr,rc,f1,far\n", 0) == 0);

    PipelineConfig c = small_config();
    c.contamination = 0.1;
    const auto direct = test::scratch_dir("pipeline_sweep_direct");
    cmd_train(c, scenario() / "train.csv", direct);
    cmd_detect(c, direct, scenario() / "test.csv", direct);
    const auto m = cmd_evaluate(direct / "verdicts.csv", scenario() / "test.csv", direct);
    CHECK(rows[0].metrics.ac == m.ac);
    CHECK(rows[0].metrics.f1 == m.f1);
    CHECK(rows[0].metrics.far == m.far);

    CHECK_THROWS_AS(parse_sweep_axis("lr"), ConfigError);
    PipelineConfig s = small_config();
    CHECK_THROWS_AS(apply_sweep_value(s, SweepAxis::seq_len, 2.5), ConfigError);
}

TEST_CASE("command-line exit codes") {
    const std::string sc = scenario().string();
    const auto cfg = write_config(to_json(small_config()), "good");
    const auto out = test::scratch_dir("pipeline_cli");

    CHECK(run_cli("train --no-such-flag") == exit_code::usage);
    CHECK(run_cli("frobnicate") == exit_code::usage);

    auto unknown = to_json(small_config());
    unknown["bogus"] = true;
    const auto bad_cfg = write_config(unknown, "unknown");
    CHECK(run_cli("train --config " + bad_cfg.string() + " --train " + sc + "/train.csv --out " + out.string()) ==
          exit_code::usage);
    CHECK(run_cli("train --config " + cfg.string() + " --contamination 1.5 --train " + sc + "/train.csv --out " +
                  out.string()) == exit_code::usage);

    CHECK(run_cli("train --config " + cfg.string() + " --train " + out.string() + "/absent.csv --out " +
                  out.string()) == exit_code::io);

    const fs::path broken = out / "broken.csv";
    std::ofstream(broken) << "timestamp,a,label\n2020-01-01 00:00:00,1.0,0\nnot-a-time,2.0,0\n";
    CHECK(run_cli("train --config " + cfg.string() + " --train " + broken.string() + " --out " + out.string()) ==
          exit_code::data);

    const fs::path narrow = out / "narrow.csv";
    std::ofstream(narrow) << "timestamp,a,label\n2020-01-01 00:00:00,1.0,0\n2020-01-01 00:00:01,2.0,0\n";
    CHECK(run_cli("detect --config " + cfg.string() + " --bundle " + trained().string() + " --test " +
                  narrow.string() + " --out " + out.string()) == exit_code::detection);

    CHECK(run_cli("detect --config " + cfg.string() + " --bundle " + trained().string() + " --test " + sc +
                  "/test.csv --out " + out.string()) == exit_code::ok);
    CHECK(run_cli("evaluate --verdicts " + out.string() + "/verdicts.csv --test " + sc + "/test.csv --out " +
                  out.string()) == exit_code::ok);
    CHECK(fs::exists(out / "metrics.json"));

    std::vector<VerdictRow> stray = read_verdicts(out / "verdicts.csv");
    stray.front().timestamp -= 1;
    write_verdicts(stray, out / "stray.csv");
    CHECK(run_cli("evaluate --verdicts " + out.string() + "/stray.csv --test " + sc + "/test.csv --out " +
                  out.string()) == exit_code::evaluation);
}
