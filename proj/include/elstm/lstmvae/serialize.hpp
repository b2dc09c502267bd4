#pragma once

#include <filesystem>

#include <json.hpp>

#include "elstm/lstmvae/model.hpp"

namespace elstm::vae {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const LstmVaeModel& model);
LstmVaeModel model_from_json(const nlohmann::json& j);

void save_model(const LstmVaeModel& model, const std::filesystem::path& path);
LstmVaeModel load_model(const std::filesystem::path& path);

}  // namespace elstm::vae
