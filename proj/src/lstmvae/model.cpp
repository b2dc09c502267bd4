#include "elstm/lstmvae/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "elstm/error.hpp"
#include "elstm/numkernel/ops.hpp"

namespace elstm::vae {

using num::Matrix;
using num::Tape;
using num::Var;

namespace {

constexpr std::size_t kInferenceBatch = 256;

void validate_dims(const VaeDims& d) {
    if (d.features == 0 || d.seq_len == 0 || d.enc_hidden1 == 0 || d.enc_hidden2 == 0 || d.enc_dense == 0 ||
        d.latent == 0 || d.dec_hidden1 == 0 || d.dec_hidden2 == 0) {
        throw ConfigError("LstmVaeModel: every dimension must be >= 1");
    }
}

void add_dense(num::ParamSet& params, num::Rng& rng, const std::string& prefix, std::size_t in, std::size_t out) {
    Matrix w(in, out);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& v : w.values()) v = rng.uniform(-bound, bound);
    params.add(prefix + ".W", std::move(w));
    params.add(prefix + ".b", Matrix(1, out));
}

Var dense(Tape& tape, const std::string& prefix, Var x) {
    return num::affine(x, tape.param(prefix + ".W"), tape.param(prefix + ".b"));
}

// B x (L * F) row-per-window layout of a time-major batch.
Matrix flatten(const SequenceBatch& batch) {
    const std::size_t steps = batch.size();
    const std::size_t rows = batch.front().rows();
    const std::size_t f = batch.front().cols();
    Matrix out(rows, steps * f);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t b = 0; b < rows; ++b) {
            auto src = batch[t].row(b);
            std::copy(src.begin(), src.end(), out.row(b).begin() + static_cast<std::ptrdiff_t>(t * f));
        }
    }
    return out;
}

void check_batch(const LstmVaeModel& model, const SequenceBatch& batch) {
    const VaeDims& d = model.dims();
    if (batch.empty()) throw DimensionError("encode: empty sequence batch");
    const std::size_t rows = batch.front().rows();
    if (rows == 0) throw DimensionError("encode: batch has no windows");
    if (model.architecture() == Architecture::flat && batch.size() != d.seq_len) {
        throw DimensionError("encode: flat model expects " + std::to_string(d.seq_len) + " steps, got " +
                             std::to_string(batch.size()));
    }
    for (const Matrix& step : batch) {
        if (step.rows() != rows || step.cols() != d.features) {
            throw DimensionError("encode: step shape " + step.shape_string() + " does not match " +
                                 std::to_string(rows) + "x" + std::to_string(d.features));
        }
    }
}

std::vector<std::size_t> iota_range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> out(end - begin);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = begin + i;
    return out;
}

}  // namespace

LstmVaeModel LstmVaeModel::create(const VaeDims& dims, Architecture arch, std::uint64_t seed) {
    validate_dims(dims);
    LstmVaeModel m;
    m.dims_ = dims;
    m.arch_ = arch;
    m.seed_ = seed;
    m.build_layers();

    num::Rng rng = num::Rng(seed).stream("vae.init");
    const VaeDims& d = dims;
    if (arch == Architecture::lstm) {
        m.enc1_.init(m.params_, rng);
        m.enc2_.init(m.params_, rng);
        add_dense(m.params_, rng, "enc.dense", d.enc_hidden2, d.enc_dense);
        add_dense(m.params_, rng, "enc.mu", d.enc_dense, d.latent);
        add_dense(m.params_, rng, "enc.logvar", d.enc_dense, d.latent);
        m.dec1_.init(m.params_, rng);
        m.dec2_.init(m.params_, rng);
        add_dense(m.params_, rng, "dec.out", d.dec_hidden2, d.features);
    } else {
        const std::size_t flat = d.seq_len * d.features;
        add_dense(m.params_, rng, "enc.fc1", flat, d.enc_hidden1);
        add_dense(m.params_, rng, "enc.fc2", d.enc_hidden1, d.enc_hidden2);
        add_dense(m.params_, rng, "enc.dense", d.enc_hidden2, d.enc_dense);
        add_dense(m.params_, rng, "enc.mu", d.enc_dense, d.latent);
        add_dense(m.params_, rng, "enc.logvar", d.enc_dense, d.latent);
        add_dense(m.params_, rng, "dec.fc1", d.latent, d.dec_hidden1);
        add_dense(m.params_, rng, "dec.fc2", d.dec_hidden1, d.dec_hidden2);
        add_dense(m.params_, rng, "dec.out", d.dec_hidden2, flat);
    }
    return m;
}

LstmVaeModel LstmVaeModel::restore(const VaeDims& dims, Architecture arch, std::uint64_t seed, num::ParamSet params,
                                   data::NormalizationStats stats) {
    LstmVaeModel m = create(dims, arch, seed);
    if (!m.params_.same_layout(params)) {
        throw ConfigError("LstmVaeModel: stored parameters do not match the architecture");
    }
    if (!stats.mean.empty() && (stats.mean.size() != dims.features || stats.stddev.size() != dims.features)) {
        throw ConfigError("LstmVaeModel: normalization covers " + std::to_string(stats.mean.size()) +
                          " features, model has " + std::to_string(dims.features));
    }
    m.params_ = std::move(params);
    m.normalization_ = std::move(stats);
    return m;
}

void LstmVaeModel::build_layers() {
    if (arch_ != Architecture::lstm) return;
    enc1_ = LstmCell("enc.lstm1", dims_.features, dims_.enc_hidden1);
    enc2_ = LstmCell("enc.lstm2", dims_.enc_hidden1, dims_.enc_hidden2);
    dec1_ = LstmCell("dec.lstm1", dims_.latent, dims_.dec_hidden1);
    dec2_ = LstmCell("dec.lstm2", dims_.dec_hidden1, dims_.dec_hidden2);
}

LstmVaeModel::Encoded LstmVaeModel::encode(Tape& tape, const SequenceBatch& batch) const {
    check_batch(*this, batch);
    const std::size_t rows = batch.front().rows();
    Var top;
    if (arch_ == Architecture::lstm) {
        const LstmCell::Bound w1 = enc1_.bind(tape);
        const LstmCell::Bound w2 = enc2_.bind(tape);
        Var h1 = tape.constant(Matrix(rows, dims_.enc_hidden1));
        Var c1 = h1;
        Var h2 = tape.constant(Matrix(rows, dims_.enc_hidden2));
        Var c2 = h2;
        for (const Matrix& step : batch) {
            std::tie(h1, c1) = enc1_.step(w1, tape.constant(step), h1, c1);
            std::tie(h2, c2) = enc2_.step(w2, h1, h2, c2);
        }
        top = h2;
    } else {
        Var x = tape.constant(flatten(batch));
        top = num::tanh(dense(tape, "enc.fc2", num::tanh(dense(tape, "enc.fc1", x))));
    }
    Var hidden = num::tanh(dense(tape, "enc.dense", top));
    return {dense(tape, "enc.mu", hidden), dense(tape, "enc.logvar", hidden)};
}

std::vector<Var> LstmVaeModel::decode(Tape& tape, Var z, std::size_t steps) const {
    if (z.cols() != dims_.latent) {
        throw DimensionError("decode: z has " + std::to_string(z.cols()) + " columns, latent size is " +
                             std::to_string(dims_.latent));
    }
    const std::size_t rows = z.rows();
    std::vector<Var> out;
    out.reserve(steps);
    if (arch_ == Architecture::lstm) {
        const LstmCell::Bound w1 = dec1_.bind(tape);
        const LstmCell::Bound w2 = dec2_.bind(tape);
        Var wo = tape.param("dec.out.W");
        Var bo = tape.param("dec.out.b");
        Var h1 = tape.constant(Matrix(rows, dims_.dec_hidden1));
        Var c1 = h1;
        Var h2 = tape.constant(Matrix(rows, dims_.dec_hidden2));
        Var c2 = h2;
        for (std::size_t t = 0; t < steps; ++t) {
            std::tie(h1, c1) = dec1_.step(w1, z, h1, c1);
            std::tie(h2, c2) = dec2_.step(w2, h1, h2, c2);
            out.push_back(num::affine(h2, wo, bo));
        }
    } else {
        if (steps != dims_.seq_len) {
            throw DimensionError("decode: flat model produces exactly " + std::to_string(dims_.seq_len) + " steps");
        }
        Var h = num::tanh(dense(tape, "dec.fc2", num::tanh(dense(tape, "dec.fc1", z))));
        Var flat = dense(tape, "dec.out", h);
        for (std::size_t t = 0; t < steps; ++t) out.push_back(num::slice_cols(flat, t * dims_.features, dims_.features));
    }
    return out;
}

SequenceBatch gather_batch(const data::WindowSet& windows, std::span<const std::size_t> indices) {
    SequenceBatch batch(windows.length(), Matrix(indices.size(), windows.features()));
    for (std::size_t b = 0; b < indices.size(); ++b) {
        if (indices[b] >= windows.size()) {
            throw DimensionError("gather_batch: window " + std::to_string(indices[b]) + " out of range");
        }
        for (std::size_t t = 0; t < windows.length(); ++t) {
            auto src = windows.row(indices[b], t);
            std::copy(src.begin(), src.end(), batch[t].row(b).begin());
        }
    }
    return batch;
}

SequenceBatch to_batch(const Matrix& window) {
    SequenceBatch batch;
    batch.reserve(window.rows());
    for (std::size_t t = 0; t < window.rows(); ++t) {
        Matrix row(1, window.cols());
        auto src = window.row(t);
        std::copy(src.begin(), src.end(), row.row(0).begin());
        batch.push_back(std::move(row));
    }
    return batch;
}

Var reparameterize(Var mu, Var logvar, const Matrix& eps) {
    if (!mu.value().same_shape(eps)) {
        throw DimensionError("reparameterize: eps " + eps.shape_string() + " vs mu " + mu.value().shape_string());
    }
    Tape& tape = mu.tape();
    Var sigma = num::exp(num::scale(logvar, 0.5));
    return num::add(mu, num::hadamard(sigma, tape.constant(eps)));
}

BatchLoss batch_elbo(const LstmVaeModel& model, Tape& tape, const SequenceBatch& batch, const Matrix& eps) {
    const auto enc = model.encode(tape, batch);
    const Var z = reparameterize(enc.mu, enc.logvar, eps);
    const std::vector<Var> recon = model.decode(tape, z, batch.size());
    const std::size_t rows = batch.front().rows();

    Var acc;
    for (std::size_t t = 0; t < batch.size(); ++t) {
        Var step = num::sum(num::square(num::sub(recon[t], tape.constant(batch[t]))));
        acc = t == 0 ? step : num::add(acc, step);
    }
    const double entries = static_cast<double>(rows * batch.size() * batch.front().cols());
    Var rec = num::scale(acc, 1.0 / entries);
    Var inner = num::add_scalar(num::sub(num::sub(enc.logvar, num::square(enc.mu)), num::exp(enc.logvar)), 1.0);
    Var kl = num::scale(num::sum(inner), -0.5 / static_cast<double>(rows));
    return {num::add(rec, kl), rec, kl};
}

LatentStats encode(const LstmVaeModel& model, const Matrix& window) {
    Tape tape(model.params(), false);
    const auto enc = model.encode(tape, to_batch(window));
    const auto mu = enc.mu.value().row(0);
    const auto lv = enc.logvar.value().row(0);
    return {std::vector<double>(mu.begin(), mu.end()), std::vector<double>(lv.begin(), lv.end())};
}

std::vector<double> reparameterize(const LatentStats& stats, std::span<const double> eps) {
    if (stats.mu.size() != stats.logvar.size() || eps.size() != stats.mu.size()) {
        throw DimensionError("reparameterize: mu, logvar and eps sizes differ");
    }
    std::vector<double> z(stats.mu.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = stats.mu[j] + std::exp(0.5 * stats.logvar[j]) * eps[j];
    return z;
}

Matrix decode(const LstmVaeModel& model, std::span<const double> z) {
    Tape tape(model.params(), false);
    Matrix zm(1, z.size());
    std::copy(z.begin(), z.end(), zm.row(0).begin());
    const std::vector<Var> steps = model.decode(tape, tape.constant(std::move(zm)), model.dims().seq_len);
    Matrix out(steps.size(), model.dims().features);
    for (std::size_t t = 0; t < steps.size(); ++t) {
        auto src = steps[t].value().row(0);
        std::copy(src.begin(), src.end(), out.row(t).begin());
    }
    return out;
}

ElboTerms elbo_loss(const Matrix& window, const Matrix& reconstruction, const LatentStats& stats) {
    if (!window.same_shape(reconstruction)) {
        throw DimensionError("elbo_loss: window " + window.shape_string() + " vs reconstruction " +
                             reconstruction.shape_string());
    }
    if (stats.mu.size() != stats.logvar.size()) throw DimensionError("elbo_loss: mu and logvar sizes differ");
    if (window.size() == 0) throw DimensionError("elbo_loss: empty window");
    double sq = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        const double d = reconstruction[i] - window[i];
        sq += d * d;
    }
    double kl = 0.0;
    for (std::size_t j = 0; j < stats.mu.size(); ++j) {
        const double lv = stats.logvar[j];
        kl += 1.0 + lv - stats.mu[j] * stats.mu[j] - std::exp(lv);
    }
    ElboTerms out;
    out.rec = sq / static_cast<double>(window.size());
    out.kl = -0.5 * kl;
    out.total = out.rec + out.kl;
    return out;
}

std::vector<DafPoint> extract_daf(const LstmVaeModel& model, const data::WindowSet& windows) {
    if (model.dims().latent != 2) throw ConfigError("extract_daf: DAF needs a 2-D latent space");
    if (windows.features() != model.dims().features && !windows.empty()) {
        throw DimensionError("extract_daf: windows have " + std::to_string(windows.features()) +
                             " features, model expects " + std::to_string(model.dims().features));
    }
    std::vector<DafPoint> out;
    out.reserve(windows.size());
    for (std::size_t begin = 0; begin < windows.size(); begin += kInferenceBatch) {
        const std::size_t end = std::min(windows.size(), begin + kInferenceBatch);
        const auto idx = iota_range(begin, end);
        const SequenceBatch batch = gather_batch(windows, idx);
        Tape tape(model.params(), false);
        const auto enc = model.encode(tape, batch);
        const std::vector<Var> recon = model.decode(tape, enc.mu, batch.size());
        std::vector<double> sq(idx.size(), 0.0);
        for (std::size_t t = 0; t < batch.size(); ++t) {
            const Matrix& r = recon[t].value();
            for (std::size_t b = 0; b < idx.size(); ++b) {
                auto xr = batch[t].row(b);
                auto rr = r.row(b);
                for (std::size_t f = 0; f < xr.size(); ++f) {
                    const double d = rr[f] - xr[f];
                    sq[b] += d * d;
                }
            }
        }
        const double entries = static_cast<double>(batch.size() * batch.front().cols());
        const Matrix& mu = enc.mu.value();
        for (std::size_t b = 0; b < idx.size(); ++b) {
            out.push_back({mu(b, 0), mu(b, 1), sq[b] / entries});
        }
    }
    return out;
}

ElboTerms evaluate_loss(const LstmVaeModel& model, const data::WindowSet& windows) {
    if (windows.empty()) throw DimensionError("evaluate_loss: no windows");
    ElboTerms total;
    for (std::size_t begin = 0; begin < windows.size(); begin += kInferenceBatch) {
        const std::size_t end = std::min(windows.size(), begin + kInferenceBatch);
        const auto idx = iota_range(begin, end);
        const SequenceBatch batch = gather_batch(windows, idx);
        Tape tape(model.params(), false);
        const BatchLoss loss = batch_elbo(model, tape, batch, Matrix(idx.size(), model.dims().latent));
        const double w = static_cast<double>(idx.size());
        total.total += w * loss.total.value()[0];
        total.rec += w * loss.rec.value()[0];
        total.kl += w * loss.kl.value()[0];
    }
    const double n = static_cast<double>(windows.size());
    total.total /= n;
    total.rec /= n;
    total.kl /= n;
    return total;
}

}  // namespace elstm::vae
