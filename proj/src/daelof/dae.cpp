#include "elstm/daelof/dae.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elstm/error.hpp"
#include "elstm/numkernel/ops.hpp"
#include "elstm/numkernel/rng.hpp"

namespace elstm::dae {

using num::Matrix;
using num::Var;

namespace {

constexpr std::size_t kInferenceBatch = 1024;

std::string layer_name(std::size_t i, const char* part) { return "dae.l" + std::to_string(i) + "." + part; }

void validate_layers(const std::vector<std::size_t>& layers) {
    if (layers.size() < 2) throw ConfigError("DAE needs at least an input and an output layer");
    if (layers.front() != layers.back()) {
        throw ConfigError("DAE input size " + std::to_string(layers.front()) + " differs from output size " +
                          std::to_string(layers.back()));
    }
    for (std::size_t n : layers) {
        if (n == 0) throw ConfigError("DAE layer sizes must be >= 1");
    }
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = m.row(idx[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix row_range(const Matrix& m, std::size_t begin, std::size_t end) {
    Matrix out(end - begin, m.cols());
    std::copy(m.values().begin() + static_cast<std::ptrdiff_t>(begin * m.cols()),
              m.values().begin() + static_cast<std::ptrdiff_t>(end * m.cols()), out.values().begin());
    return out;
}

}  // namespace

std::vector<std::size_t> default_dae_layers() { return {19, 16, 10, 8, 4, 8, 10, 16, 19}; }

DaeModel DaeModel::create(std::vector<std::size_t> layers, std::uint64_t seed) {
    validate_layers(layers);
    DaeModel m;
    m.layers_ = std::move(layers);
    num::Rng rng = num::Rng(seed).stream("dae.init");
    for (std::size_t i = 0; i + 1 < m.layers_.size(); ++i) {
        const std::size_t in = m.layers_[i];
        const std::size_t out = m.layers_[i + 1];
        Matrix w(in, out);
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (double& v : w.values()) v = rng.uniform(-bound, bound);
        m.params_.add(layer_name(i, "W"), std::move(w));
        m.params_.add(layer_name(i, "b"), Matrix(1, out));
    }
    return m;
}

DaeModel DaeModel::restore(std::vector<std::size_t> layers, num::ParamSet params) {
    DaeModel m = create(std::move(layers), 0);
    if (!m.params_.same_layout(params)) throw ConfigError("DAE: stored parameters do not match the layer sizes");
    m.params_ = std::move(params);
    return m;
}

Var DaeModel::forward(num::Tape& tape, Var x) const {
    if (x.cols() != features()) {
        throw DimensionError("DAE: input has " + std::to_string(x.cols()) + " features, model expects " +
                             std::to_string(features()));
    }
    Var h = x;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        h = num::affine(h, tape.param(layer_name(i, "W")), tape.param(layer_name(i, "b")));
        if (activation(i) == Activation::tanh) h = num::tanh(h);
    }
    return h;
}

Matrix DaeModel::reconstruct(const Matrix& samples) const {
    num::Tape tape(params_, false);
    return forward(tape, tape.constant(samples)).value();
}

std::vector<double> reconstruction_errors(const DaeModel& model, const Matrix& samples) {
    if (samples.cols() != model.features()) {
        throw DimensionError("reconstruction_errors: samples have " + std::to_string(samples.cols()) +
                             " features, model expects " + std::to_string(model.features()));
    }
    std::vector<double> out;
    out.reserve(samples.rows());
    for (std::size_t begin = 0; begin < samples.rows(); begin += kInferenceBatch) {
        const std::size_t end = std::min(samples.rows(), begin + kInferenceBatch);
        const Matrix chunk = row_range(samples, begin, end);
        const Matrix recon = model.reconstruct(chunk);
        for (std::size_t r = 0; r < chunk.rows(); ++r) {
            auto x = chunk.row(r);
            auto y = recon.row(r);
            double sq = 0.0;
            for (std::size_t c = 0; c < x.size(); ++c) sq += (y[c] - x[c]) * (y[c] - x[c]);
            out.push_back(sq / static_cast<double>(x.size()));
        }
    }
    return out;
}

double reconstruction_loss(const DaeModel& model, const Matrix& samples) {
    if (samples.rows() == 0) throw DimensionError("reconstruction_loss: no samples");
    const std::vector<double> errors = reconstruction_errors(model, samples);
    double total = 0.0;
    for (double e : errors) total += e;
    return total / static_cast<double>(errors.size());
}

DaeTrainResult dae_train(const Matrix& train, const Matrix& val, const DaeTrainConfig& config) {
    if (train.rows() == 0 || val.rows() == 0) throw DataQualityError("DAE training needs train and validation samples");
    if (!num::all_finite(train) || !num::all_finite(val)) {
        throw DataQualityError("DAE training samples contain non-finite values");
    }
    DaeTrainResult result;
    result.model = DaeModel::create(config.layers, config.seed);
    const DaeModel& model = result.model;
    if (train.cols() != model.features() || val.cols() != model.features()) {
        throw DimensionError("DAE: samples have " + std::to_string(train.cols()) + " features, model expects " +
                             std::to_string(model.features()));
    }
    auto batch_loss = [&](num::Tape& tape, std::span<const std::size_t> idx) {
        Var x = tape.constant(gather_rows(train, idx));
        return num::mse(model.forward(tape, x), x);
    };
    auto val_loss = [&](const num::ParamSet&) { return reconstruction_loss(model, val); };
    result.history = num::train_minibatch(result.model.params(), train.rows(), config.schedule,
                                          num::Rng(config.seed).stream("dae.shuffle"), batch_loss, val_loss, "dae");
    return result;
}

}  // namespace elstm::dae
