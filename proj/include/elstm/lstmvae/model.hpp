#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "elstm/datapipe/normalize.hpp"
#include "elstm/datapipe/windows.hpp"
#include "elstm/lstmvae/lstm_cell.hpp"
#include "elstm/numkernel/matrix.hpp"
#include "elstm/numkernel/param_set.hpp"
#include "elstm/numkernel/tape.hpp"

namespace elstm::vae {

/// `lstm` is the recurrent encoder/decoder; `flat` replaces both with dense
/// layers over the flattened window (the no-LSTM ablation).
enum class Architecture { lstm, flat };

struct VaeDims {
    std::size_t features = 19;
    std::size_t seq_len = 100;
    std::size_t enc_hidden1 = 19;
    std::size_t enc_hidden2 = 8;
    std::size_t enc_dense = 8;
    std::size_t latent = 2;
    std::size_t dec_hidden1 = 8;
    std::size_t dec_hidden2 = 19;

    friend bool operator==(const VaeDims&, const VaeDims&) = default;
};

struct LatentStats {
    std::vector<double> mu;
    std::vector<double> logvar;
};

/// (mu_1, mu_2, e_rec): latent mean plus the window's mean squared
/// reconstruction error.
struct DafPoint {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double e_rec = 0.0;

    friend bool operator==(const DafPoint&, const DafPoint&) = default;
};

struct ElboTerms {
    double total = 0.0;
    double rec = 0.0;
    double kl = 0.0;
};

/// Time-major batch: steps[t] is B x F.
using SequenceBatch = std::vector<num::Matrix>;

/// LSTM variational autoencoder.
///
/// Encoder: LSTM(F -> 19) -> LSTM(19 -> 8) -> final hidden state -> dense 8
/// (tanh) -> two linear heads producing mu and log sigma^2. Decoder: z repeated
/// seq_len times -> LSTM(latent -> 8) -> LSTM(8 -> 19) -> linear F per step.
class LstmVaeModel {
public:
    LstmVaeModel() = default;
    static LstmVaeModel create(const VaeDims& dims, Architecture arch, std::uint64_t seed);

    const VaeDims& dims() const noexcept { return dims_; }
    Architecture architecture() const noexcept { return arch_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const num::ParamSet& params() const noexcept { return params_; }
    num::ParamSet& params() noexcept { return params_; }

    const data::NormalizationStats& normalization() const noexcept { return normalization_; }
    void set_normalization(data::NormalizationStats stats) { normalization_ = std::move(stats); }

    struct Encoded {
        num::Var mu;
        num::Var logvar;
    };

    /// Tape-level forward passes used by training and inference.
    Encoded encode(num::Tape& tape, const SequenceBatch& batch) const;
    /// Reconstruction per time step, each B x F.
    std::vector<num::Var> decode(num::Tape& tape, num::Var z, std::size_t steps) const;

    /// Rebuilds a model from stored parts; validates the parameter layout.
    static LstmVaeModel restore(const VaeDims& dims, Architecture arch, std::uint64_t seed, num::ParamSet params,
                                data::NormalizationStats stats);

private:
    void build_layers();

    VaeDims dims_;
    Architecture arch_ = Architecture::lstm;
    std::uint64_t seed_ = 0;
    num::ParamSet params_;
    data::NormalizationStats normalization_;
    LstmCell enc1_, enc2_, dec1_, dec2_;
};

SequenceBatch gather_batch(const data::WindowSet& windows, std::span<const std::size_t> indices);
SequenceBatch to_batch(const num::Matrix& window);

/// Mean per-window ELBO loss of a batch, recorded on `tape`:
/// rec = mean squared error over every L x F entry, kl = -1/2 sum_j (1 + logvar_j - mu_j^2 - exp(logvar_j)),
/// both averaged over the batch. `eps` is B x latent (zeros for deterministic evaluation).
struct BatchLoss {
    num::Var total;
    num::Var rec;
    num::Var kl;
};
BatchLoss batch_elbo(const LstmVaeModel& model, num::Tape& tape, const SequenceBatch& batch, const num::Matrix& eps);

/// z = mu + exp(logvar / 2) * eps on the tape.
num::Var reparameterize(num::Var mu, num::Var logvar, const num::Matrix& eps);

// Plain single-window API.
LatentStats encode(const LstmVaeModel& model, const num::Matrix& window);
std::vector<double> reparameterize(const LatentStats& stats, std::span<const double> eps);
num::Matrix decode(const LstmVaeModel& model, std::span<const double> z);
ElboTerms elbo_loss(const num::Matrix& window, const num::Matrix& reconstruction, const LatentStats& stats);

/// Deterministic DAF extraction: mu from the encoder, reconstruction from z = mu.
std::vector<DafPoint> extract_daf(const LstmVaeModel& model, const data::WindowSet& windows);

/// Mean deterministic (eps = 0) ELBO over a window set.
ElboTerms evaluate_loss(const LstmVaeModel& model, const data::WindowSet& windows);

}  // namespace elstm::vae
