#include "elstm/datapipe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "elstm/error.hpp"
#include "elstm/numkernel/rng.hpp"

namespace elstm::data {

namespace {

constexpr std::size_t kSharedDrivers = 3;

std::vector<std::size_t> pick_rows(num::Rng& rng, std::size_t population, std::size_t count) {
    std::vector<std::size_t> rows(population);
    for (std::size_t i = 0; i < population; ++i) rows[i] = i;
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) std::swap(rows[i], rows[i + rng.index(population - i)]);
    rows.resize(count);
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace

SynthConfig default_synth_config(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.feature_names = default_feature_names();
    const std::size_t f = cfg.feature_names.size();
    cfg.features = f;

    num::Rng rng = num::Rng(seed).stream("synth.layout");
    cfg.offsets.resize(f);
    cfg.scales.resize(f);
    for (std::size_t j = 0; j < f; ++j) {
        const std::string& name = cfg.feature_names[j];
        if (name == "Eff") {
            cfg.offsets[j] = 300.0;
            cfg.scales[j] = 20.0;
        } else if (name[0] == 'T') {
            cfg.offsets[j] = rng.uniform(300.0, 540.0);
            cfg.scales[j] = rng.uniform(3.0, 8.0);
        } else {
            cfg.offsets[j] = rng.uniform(0.5, 17.0);
            cfg.scales[j] = rng.uniform(0.05, 0.6);
        }
    }

    // Three plant-wide drivers (daily load cycle, shift pattern, ambient)
    // plus one slow private oscillation per sensor.
    cfg.drivers.push_back({1.0, 1440.0, rng.uniform(0.0, 2.0 * std::numbers::pi)});
    cfg.drivers.push_back({0.6, 480.0, rng.uniform(0.0, 2.0 * std::numbers::pi)});
    cfg.drivers.push_back({0.4, 211.0, rng.uniform(0.0, 2.0 * std::numbers::pi)});
    for (std::size_t j = 0; j < f; ++j) {
        cfg.drivers.push_back({0.3, rng.uniform(150.0, 700.0), rng.uniform(0.0, 2.0 * std::numbers::pi)});
    }
    cfg.coupling = num::Matrix(f, cfg.drivers.size());
    for (std::size_t j = 0; j < f; ++j) {
        for (std::size_t k = 0; k < kSharedDrivers; ++k) cfg.coupling(j, k) = rng.uniform(-1.0, 1.0);
        cfg.coupling(j, kSharedDrivers + j) = 1.0;
    }
    cfg.noise_std = 0.1;

    cfg.n_samples = 30000;
    cfg.onset = 26000;
    cfg.drift_rate.assign(f, 0.0);
    cfg.affected.assign(f, false);
    // Blade wear: exhaust and low-pressure temperatures creep up, output power sags.
    const double unit_rate = 4e-3;
    for (std::size_t j = 0; j < f; ++j) {
        const std::string& name = cfg.feature_names[j];
        if (name == "T_3" || name == "T_5" || name == "T_6" || name == "P_8") {
            cfg.affected[j] = true;
            cfg.drift_rate[j] = unit_rate * cfg.scales[j];
        } else if (name == "Eff") {
            cfg.affected[j] = true;
            cfg.drift_rate[j] = -unit_rate * cfg.scales[j];
        }
    }

    cfg.missing_fraction = 0.001;
    cfg.spike_fraction = 0.02;
    cfg.spike_scale = 3.0;
    cfg.spike_end = 20000;
    return cfg;
}

void validate(const SynthConfig& cfg) {
    const std::size_t f = cfg.features;
    auto fail = [](const std::string& what) { throw ConfigError("synth config: " + what); };
    if (cfg.n_samples == 0) fail("n_samples must be >= 1");
    if (f == 0) fail("features must be >= 1");
    if (cfg.sampling_period_s <= 0) fail("sampling period must be > 0");
    if (cfg.onset >= cfg.n_samples) fail("onset index must be < n_samples");
    if (!(cfg.noise_std >= 0.0)) fail("noise std must be >= 0");
    if (cfg.feature_names.size() != f) fail("feature_names must have one entry per feature");
    if (cfg.offsets.size() != f || cfg.scales.size() != f) fail("offsets/scales must have one entry per feature");
    if (cfg.drift_rate.size() != f || cfg.affected.size() != f) fail("drift_rate/affected must have one entry per feature");
    if (cfg.coupling.rows() != f || cfg.coupling.cols() != cfg.drivers.size()) {
        fail("coupling must be features x drivers");
    }
    for (const auto& d : cfg.drivers) {
        if (!(d.period > 0.0)) fail("driver periods must be > 0");
    }
    if (!(cfg.missing_fraction >= 0.0 && cfg.missing_fraction <= 1.0)) fail("missing_fraction must be in [0, 1]");
    if (!(cfg.spike_fraction >= 0.0 && cfg.spike_fraction <= 1.0)) fail("spike_fraction must be in [0, 1]");
    if (cfg.spike_end > cfg.n_samples) fail("spike_end must be <= n_samples");
}

SynthOutput generate_with_truth(const SynthConfig& cfg) {
    validate(cfg);
    const std::size_t n = cfg.n_samples;
    const std::size_t f = cfg.features;
    const num::Rng root(cfg.seed);
    num::Rng noise = root.stream("synth.noise");

    SynthOutput out;
    SensorFrame& frame = out.frame;
    frame.feature_names = cfg.feature_names;
    frame.values = num::Matrix(n, f);
    frame.timestamps.resize(n);
    frame.labels.resize(n);

    std::vector<double> driver(cfg.drivers.size());
    for (std::size_t t = 0; t < n; ++t) {
        frame.timestamps[t] = cfg.start_time + static_cast<Timestamp>(t) * cfg.sampling_period_s;
        frame.labels[t] = t < cfg.onset ? Label::normal : Label::abnormal;
        for (std::size_t k = 0; k < driver.size(); ++k) {
            const auto& d = cfg.drivers[k];
            driver[k] = d.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / d.period + d.phase);
        }
        auto row = frame.values.row(t);
        for (std::size_t j = 0; j < f; ++j) {
            double z = 0.0;
            for (std::size_t k = 0; k < driver.size(); ++k) z += cfg.coupling(j, k) * driver[k];
            z += cfg.noise_std * noise.normal();
            double v = cfg.offsets[j] + cfg.scales[j] * z;
            if (t >= cfg.onset && cfg.affected[j]) v += cfg.drift_rate[j] * static_cast<double>(t - cfg.onset);
            row[j] = v;
        }
    }

    if (cfg.spike_fraction > 0.0 && cfg.spike_end > 0) {
        num::Rng spikes = root.stream("synth.spikes");
        const auto count = static_cast<std::size_t>(std::llround(cfg.spike_fraction * static_cast<double>(cfg.spike_end)));
        out.spike_rows = pick_rows(spikes, cfg.spike_end, count);
        for (std::size_t r : out.spike_rows) {
            auto row = frame.values.row(r);
            for (std::size_t j = 0; j < f; ++j) row[j] += cfg.spike_scale * cfg.scales[j] * spikes.normal();
        }
    }
    if (cfg.missing_fraction > 0.0) {
        num::Rng missing = root.stream("synth.missing");
        const auto count = static_cast<std::size_t>(std::llround(cfg.missing_fraction * static_cast<double>(n)));
        out.missing_rows = pick_rows(missing, n, count);
        for (std::size_t r : out.missing_rows) {
            frame.values(r, missing.index(f)) = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

SensorFrame generate(const SynthConfig& cfg) { return generate_with_truth(cfg).frame; }

}  // namespace elstm::data
