#include "elstm/lstmvae/train.hpp"

#include <string>

#include "elstm/error.hpp"
#include "elstm/log.hpp"

namespace elstm::vae {

VaeTrainResult train(const data::WindowSet& windows, const VaeTrainConfig& config) {
    num::validate(config.schedule);
    if (windows.features() != config.dims.features || windows.length() != config.dims.seq_len) {
        throw ConfigError("vae train: windows are " + std::to_string(windows.length()) + "x" +
                          std::to_string(windows.features()) + ", model expects " +
                          std::to_string(config.dims.seq_len) + "x" + std::to_string(config.dims.features));
    }
    const std::size_t cut = data::split_point(windows.size(), config.train_fraction);
    if (cut == 0 || cut == windows.size()) {
        throw DataQualityError("vae train: " + std::to_string(windows.size()) +
                               " windows are too few for a train/validation split");
    }
    const data::WindowSet fit = windows.subset(0, cut);
    const data::WindowSet val = windows.subset(cut, windows.size());

    VaeTrainResult result;
    result.model = LstmVaeModel::create(config.dims, config.architecture, config.seed);
    LstmVaeModel& model = result.model;

    const num::Rng root(config.seed);
    num::Rng eps_rng = root.stream("vae.eps");
    const std::size_t latent = config.dims.latent;

    auto batch_loss = [&](num::Tape& tape, std::span<const std::size_t> idx) {
        num::Matrix eps(idx.size(), latent);
        for (double& v : eps.values()) v = eps_rng.normal();
        return batch_elbo(model, tape, gather_batch(fit, idx), eps).total;
    };
    auto val_loss = [&](const num::ParamSet&) { return evaluate_loss(model, val).total; };

    log::info("vae train: " + std::to_string(fit.size()) + " fit / " + std::to_string(val.size()) +
              " validation windows, " + std::to_string(model.params().scalar_count()) + " parameters");
    result.history = num::train_minibatch(model.params(), fit.size(), config.schedule, root.stream("vae.shuffle"),
                                          batch_loss, val_loss, "vae");
    return result;
}

}  // namespace elstm::vae
