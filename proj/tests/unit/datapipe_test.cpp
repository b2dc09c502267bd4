#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "elstm/datapipe/clean.hpp"
#include "elstm/datapipe/csv.hpp"
#include "elstm/datapipe/normalize.hpp"
#include "elstm/datapipe/synth.hpp"
#include "elstm/datapipe/windows.hpp"
#include "elstm/error.hpp"
#include "elstm/log.hpp"
#include "support.hpp"

using namespace elstm;
using data::Label;
using data::SensorFrame;

namespace {

SensorFrame small_frame(std::size_t n, std::size_t f = 2) {
    SensorFrame frame;
    for (std::size_t j = 0; j < f; ++j) frame.feature_names.push_back("s" + std::to_string(j));
    frame.values = num::Matrix(n, f);
    for (std::size_t i = 0; i < n; ++i) {
        frame.timestamps.push_back(1000 + 60 * static_cast<data::Timestamp>(i));
        frame.labels.push_back(i % 3 == 0 ? Label::abnormal : Label::normal);
        for (std::size_t j = 0; j < f; ++j) frame.values(i, j) = std::sin(0.3 * i + j) + 0.1 * j;
    }
    return frame;
}

data::SynthConfig short_scenario(std::size_t n = 2000) {
    auto cfg = data::default_synth_config(5);
    cfg.n_samples = n;
    cfg.onset = n * 3 / 4;
    cfg.spike_end = n / 2;
    return cfg;
}

}  // namespace

TEST_CASE("timestamps parse and format as ISO-8601") {
    const auto t = data::parse_timestamp("2017-06-05T00:01:00Z");
    REQUIRE(t.has_value());
    CHECK(*t == 1496620860);
    CHECK(data::format_timestamp(*t) == "2017-06-05T00:01:00Z");
    CHECK(data::parse_timestamp("2017-06-05 00:01:00") == t);
    CHECK_FALSE(data::parse_timestamp("2017-02-30T00:00:00").has_value());
    CHECK_FALSE(data::parse_timestamp("yesterday").has_value());
}

TEST_CASE("read_csv accepts a well-formed table") {
    std::istringstream in(
        "timestamp,a,b,label\n"
        "2020-01-01T00:00:00Z,1.5,2,0\n"
        "2020-01-01T00:01:00Z,,NaN,1\n"
        "2020-01-01T00:02:00Z,3,4,\n");
    const SensorFrame frame = data::read_csv(in);
    CHECK(frame.samples() == 3);
    CHECK(frame.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(frame.values(0, 0) == 1.5);
    CHECK(std::isnan(frame.values(1, 0)));
    CHECK(std::isnan(frame.values(1, 1)));
    CHECK(frame.labels == std::vector<Label>{Label::normal, Label::abnormal, Label::unknown});
}

TEST_CASE("read_csv rejects malformed input with line numbers") {
    SUBCASE("duplicated timestamp") {
        std::istringstream in(
            "timestamp,a\n"
            "2020-01-01T00:00:00,1\n"
            "2020-01-01T00:01:00,1\n"
            "2020-01-01T00:01:00,1\n");
        try {
            data::read_csv(in);
            FAIL("expected IngestError");
        } catch (const IngestError& e) {
            CHECK(std::string(e.what()).find("4") != std::string::npos);
        }
    }
    SUBCASE("unparseable timestamps") {
        std::istringstream in(
            "timestamp,a\n"
            "2020-01-01T00:00:00,1\n"
            "garbage,1\n"
            "2020-01-01T00:02:00,1\n"
            "2020-13-01T00:02:00,1\n");
        try {
            data::read_csv(in);
            FAIL("expected IngestError");
        } catch (const IngestError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("3") != std::string::npos);
            CHECK(msg.find("5") != std::string::npos);
        }
    }
    SUBCASE("schema mismatch") {
        std::istringstream in("timestamp,a,c\n2020-01-01T00:00:00,1,2\n");
        CHECK_THROWS_AS(data::read_csv(in, data::CsvSchema{{"a", "b"}, false}), IngestError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(data::load_csv("/nonexistent/elstm.csv"), IngestError);
    }
}

TEST_CASE("synthetic frame survives a CSV round trip") {
    auto cfg = short_scenario(500);
    cfg.missing_fraction = 0.0;
    const SensorFrame frame = data::generate(cfg);
    const auto dir = test::scratch_dir("csv_roundtrip");
    data::write_csv(frame, dir / "frame.csv");
    CHECK(data::load_csv(dir / "frame.csv") == frame);
}

TEST_CASE("clean drops bad rows and reports them") {
    SensorFrame frame = small_frame(10);
    SUBCASE("nothing to remove") {
        const auto result = data::clean(frame);
        CHECK(result.frame == frame);
        CHECK(result.report.removed_rows.empty());
    }
    SUBCASE("one infinity") {
        frame.values(4, 1) = std::numeric_limits<double>::infinity();
        const auto result = data::clean(frame);
        CHECK(result.frame.samples() == 9);
        CHECK(result.report.removed_rows == std::vector<std::size_t>{4});
        CHECK(result.report.bad_per_feature == std::vector<std::size_t>{0, 1});
        CHECK(data::clean(result.frame).frame == result.frame);
    }
    SUBCASE("too many bad rows") {
        for (std::size_t i = 0; i < 6; ++i) frame.values(i, 0) = std::nan("");
        CHECK_THROWS_AS(data::clean(frame), DataQualityError);
        CHECK(data::clean(frame, 0.7).frame.samples() == 4);
    }
}

TEST_CASE("clean removes exactly the generator's missing rows") {
    auto cfg = short_scenario(3000);
    cfg.missing_fraction = 0.01;
    const auto out = data::generate_with_truth(cfg);
    CHECK(out.missing_rows.size() == 30);
    const auto result = data::clean(out.frame);
    CHECK(result.report.removed_rows == out.missing_rows);
    CHECK(data::clean(result.frame).frame == result.frame);
}

TEST_CASE("z-score normalization") {
    const SensorFrame frame = data::generate(short_scenario(1000));
    const auto cleaned = data::clean(frame).frame;
    const auto stats = data::fit_normalizer(cleaned);
    const auto z = data::apply_normalizer(cleaned, stats);
    for (std::size_t j = 0; j < z.features(); ++j) {
        double mean = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < z.samples(); ++i) mean += z.values(i, j);
        mean /= static_cast<double>(z.samples());
        for (std::size_t i = 0; i < z.samples(); ++i) sq += (z.values(i, j) - mean) * (z.values(i, j) - mean);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(sq / static_cast<double>(z.samples())) - 1.0) < 1e-9);
    }
    const auto back = data::invert_normalizer(z, stats);
    CHECK(num::max_abs_diff(back.values, cleaned.values) < 1e-9);

    SUBCASE("constant feature is floored to zeros") {
        log::set_level(log::Level::off);
        SensorFrame c = small_frame(20);
        for (std::size_t i = 0; i < 20; ++i) c.values(i, 1) = 7.0;
        const auto s = data::fit_normalizer(c);
        CHECK(s.floored == std::vector<std::size_t>{1});
        CHECK(s.stddev[1] == data::kStdFloor);
        const auto n = data::apply_normalizer(c, s);
        for (std::size_t i = 0; i < 20; ++i) CHECK(n.values(i, 1) == 0.0);
        log::set_level(log::Level::warn);
    }
    SUBCASE("shifted feature normalizes identically") {
        SensorFrame shifted = cleaned;
        for (std::size_t i = 0; i < shifted.samples(); ++i) shifted.values(i, 0) += 10.0;
        const auto zs = data::apply_normalizer(shifted, data::fit_normalizer(shifted));
        for (std::size_t i = 0; i < z.samples(); ++i) CHECK(zs.values(i, 0) == doctest::Approx(z.values(i, 0)));
    }
}

TEST_CASE("chronological split") {
    const SensorFrame frame = small_frame(100);
    const auto [train, val] = data::split_chronological(frame, 0.8);
    CHECK(train.samples() == 80);
    CHECK(val.samples() == 20);
    CHECK(data::concat(train, val) == frame);
    CHECK(data::split_point(5, 0.8) == 4);
    CHECK_THROWS_AS(data::split_chronological(small_frame(1), 0.8), DataQualityError);
    CHECK_THROWS_AS(data::split_chronological(frame, 1.0), ConfigError);
}

TEST_CASE("sliding windows") {
    const SensorFrame frame = small_frame(10);
    CHECK(data::make_windows(frame, 3).size() == 8);
    CHECK(data::make_windows(frame, 10).size() == 1);
    CHECK(data::make_windows(frame, 3, 4).size() == 2);
    CHECK_THROWS_AS(data::make_windows(frame, 11), DataQualityError);

    const auto windows = data::make_windows(frame, 3);
    CHECK(windows.label(windows.size() - 1) == frame.labels[9]);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const std::size_t last = windows.source_index(i);
        CHECK(last == i + 2);
        CHECK(windows.label(i) == frame.labels[last]);
        CHECK(windows.timestamp(i) == frame.timestamps[last]);
        const auto row = windows.row(i, 2);
        CHECK(std::equal(row.begin(), row.end(), frame.values.row(last).begin()));
        const num::Matrix w = windows.window(i);
        CHECK(w.rows() == 3);
        CHECK(w(0, 1) == frame.values(i, 1));
    }
    const auto tail = windows.subset(5, 8);
    CHECK(tail.size() == 3);
    CHECK(tail.window(0) == windows.window(5));
}

TEST_CASE("generator is deterministic and labels split at onset") {
    const auto cfg = short_scenario();
    const SensorFrame a = data::generate(cfg);
    const SensorFrame b = data::generate(cfg);
    CHECK(a.values.values().size() == b.values.values().size());
    CHECK(std::memcmp(a.values.values().data(), b.values.values().data(), a.values.size() * sizeof(double)) == 0);
    CHECK(a.timestamps == b.timestamps);
    for (std::size_t i = 0; i < a.samples(); ++i) {
        CHECK(a.labels[i] == (i < cfg.onset ? Label::normal : Label::abnormal));
    }
    auto other = cfg;
    other.seed = 6;
    CHECK_FALSE(data::generate(other) == a);
}

TEST_CASE("drift adds exactly rate times elapsed samples") {
    auto flat = short_scenario(4000);
    flat.missing_fraction = 0.0;
    flat.spike_fraction = 0.0;
    std::fill(flat.drift_rate.begin(), flat.drift_rate.end(), 0.0);
    auto drifting = flat;
    const std::size_t j = 7;
    drifting.affected.assign(flat.features, false);
    drifting.affected[j] = true;
    drifting.drift_rate[j] = 0.01 * flat.scales[j];

    const auto base = data::generate(flat);
    const auto moved = data::generate(drifting);
    for (std::size_t t = 0; t < base.samples(); ++t) {
        const double expected = t >= flat.onset ? drifting.drift_rate[j] * static_cast<double>(t - flat.onset) : 0.0;
        CHECK(moved.values(t, j) - base.values(t, j) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(moved.values(t, 0) == base.values(t, 0));
    }

    // Last quarter of the abnormal segment against the normal-segment mean.
    const std::size_t start = flat.onset + (flat.n_samples - flat.onset) * 3 / 4;
    double normal_mean = 0.0, tail_mean = 0.0, elapsed = 0.0;
    for (std::size_t t = 0; t < flat.onset; ++t) normal_mean += moved.values(t, j);
    normal_mean /= static_cast<double>(flat.onset);
    for (std::size_t t = start; t < flat.n_samples; ++t) {
        tail_mean += moved.values(t, j);
        elapsed += static_cast<double>(t - flat.onset);
    }
    const double count = static_cast<double>(flat.n_samples - start);
    tail_mean /= count;
    elapsed /= count;
    CHECK(tail_mean - normal_mean == doctest::Approx(drifting.drift_rate[j] * elapsed).epsilon(0.15));
}

TEST_CASE("generator config validation") {
    auto cfg = short_scenario();
    cfg.onset = cfg.n_samples;
    CHECK_THROWS_AS(data::generate(cfg), ConfigError);
    cfg = short_scenario();
    cfg.noise_std = -1.0;
    CHECK_THROWS_AS(data::generate(cfg), ConfigError);
}

TEST_CASE("inherent spikes stay inside the spike range") {
    const auto out = data::generate_with_truth(short_scenario(2000));
    CHECK(out.spike_rows.size() == 20);
    for (std::size_t r : out.spike_rows) CHECK(r < 1000);
}
