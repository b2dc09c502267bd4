#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "elstm/datapipe/sensor_frame.hpp"
#include "elstm/numkernel/matrix.hpp"

namespace elstm::data {

struct Sinusoid {
    double amplitude = 1.0;
    /// In samples.
    double period = 1440.0;
    double phase = 0.0;
};

/// Synthetic turbine telemetry.
///
/// Feature j at sample t is
///   offset_j + scale_j * (sum_k coupling(j, k) * driver_k(t) + noise_std * e)
///   + drift_rate_j * (t - onset)            for affected j and t >= onset
/// with driver_k(t) = amplitude_k * sin(2 pi t / period_k + phase_k) and e ~ N(0, 1).
/// Samples before `onset` are labelled normal, the rest abnormal.
struct SynthConfig {
    std::size_t n_samples = 30000;
    std::size_t features = 19;
    std::int64_t sampling_period_s = 60;
    Timestamp start_time = 1496620800;  // 2017-06-05T00:00:00Z
    std::uint64_t seed = 42;

    std::vector<std::string> feature_names;
    std::vector<double> offsets;
    std::vector<double> scales;
    std::vector<Sinusoid> drivers;
    /// features x drivers
    num::Matrix coupling;
    double noise_std = 0.1;

    std::size_t onset = 26000;
    /// Physical units per sample.
    std::vector<double> drift_rate;
    std::vector<bool> affected;

    /// Fraction of rows that get one feature blanked (NaN).
    double missing_fraction = 0.0;
    /// Inherent anomalies: this fraction of rows in [0, spike_end) receive
    /// spike_scale * scale_j * N(0, 1) on every feature. Labels stay normal.
    double spike_fraction = 0.0;
    double spike_scale = 0.0;
    std::size_t spike_end = 0;
};

/// The bundled turbine scenario: 30000 one-minute samples, the first 20000
/// for training (with 2% inherent spikes), a gradual multi-sensor drift
/// starting at sample 26000.
SynthConfig default_synth_config(std::uint64_t seed = 42);

void validate(const SynthConfig& cfg);

struct SynthOutput {
    SensorFrame frame;
    std::vector<std::size_t> missing_rows;
    std::vector<std::size_t> spike_rows;
};

SynthOutput generate_with_truth(const SynthConfig& cfg);
SensorFrame generate(const SynthConfig& cfg);

}  // namespace elstm::data
