#include "spt/config_json.hpp"

#include "spt/error.hpp"

namespace spt {
namespace {

// Missing keys keep the value already in `out`, so partial objects overlay defaults.
template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

void to_json(nlohmann::json& j, const TemplateConfig& c) {
  j = {{"use_abs", c.use_abs}, {"use_pos", c.use_pos}, {"max_index", c.max_index}};
}

void from_json(const nlohmann::json& j, TemplateConfig& c) {
  read(j, "use_abs", c.use_abs);
  read(j, "use_pos", c.use_pos);
  read(j, "max_index", c.max_index);
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"arch", std::string(to_string(c.arch))},
       {"layers", c.layers},
       {"heads", c.heads},
       {"model_dim", c.model_dim},
       {"ff_dim", c.ff_dim},
       {"max_positions", c.max_positions},
       {"vocab_size", c.vocab_size},
       {"dropout", c.dropout},
       {"seed", c.seed},
       {"tie_embeddings", c.tie_embeddings}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  if (j.contains("arch")) c.arch = parse_arch(j.at("arch").get<std::string>());
  read(j, "layers", c.layers);
  read(j, "heads", c.heads);
  read(j, "model_dim", c.model_dim);
  read(j, "ff_dim", c.ff_dim);
  read(j, "max_positions", c.max_positions);
  read(j, "vocab_size", c.vocab_size);
  read(j, "dropout", c.dropout);
  read(j, "seed", c.seed);
  read(j, "tie_embeddings", c.tie_embeddings);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"epochs", c.epochs},
       {"schedule", std::string(to_string(c.schedule))},
       {"weight_decay", c.weight_decay},
       {"grad_clip", c.grad_clip ? nlohmann::json(*c.grad_clip) : nlohmann::json(nullptr)},
       {"loss_scope", std::string(to_string(c.loss_scope))}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (j.value("preset", std::string()) == "fine_tune") c = TrainConfig::fine_tune_preset();
  read(j, "batch_size", c.batch_size);
  read(j, "learning_rate", c.learning_rate);
  read(j, "epochs", c.epochs);
  if (j.contains("schedule")) c.schedule = parse_schedule(j.at("schedule").get<std::string>());
  read(j, "weight_decay", c.weight_decay);
  if (j.contains("grad_clip")) {
    if (j.at("grad_clip").is_null()) c.grad_clip.reset();
    else c.grad_clip = j.at("grad_clip").get<double>();
  }
  if (j.contains("loss_scope")) c.loss_scope = parse_loss_scope(j.at("loss_scope").get<std::string>());
}

}  // namespace spt
