#pragma once

#include <json.hpp>

#include "spt/model.hpp"
#include "spt/prompt_vocab.hpp"
#include "spt/train.hpp"

namespace spt {

void to_json(nlohmann::json& j, const TemplateConfig& c);
void from_json(const nlohmann::json& j, TemplateConfig& c);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace spt
