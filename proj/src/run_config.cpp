#include "spt/run_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "spt/config_json.hpp"
#include "spt/error.hpp"

namespace spt {

ScoreOptions EvalFlags::score_options() const {
  ScoreOptions o;
  o.exclude_punct = exclude_punct;
  o.punct_labels = {punct_labels.begin(), punct_labels.end()};
  o.length_edges = length_edges;
  o.index_edges = index_edges;
  return o;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["paths"] = {{"train", paths.train},   {"dev", paths.dev},
                {"test", paths.test},     {"vocab", paths.vocab},
                {"checkpoint", paths.checkpoint}, {"output_dir", paths.output_dir}};
  j["template"] = tmpl;
  j["model"] = model;
  j["train"] = train;
  j["train"]["stop_at_accuracy"] = stop_at_accuracy ? nlohmann::json(*stop_at_accuracy) : nlohmann::json(nullptr);
  j["train"]["accuracy_check_every"] = accuracy_check_every;
  j["eval"] = {{"exclude_punct", eval.exclude_punct},
               {"punct_labels", eval.punct_labels},
               {"length_edges", eval.length_edges},
               {"index_edges", eval.index_edges}};
  j["seed"] = seed;
  j["min_word_freq"] = min_word_freq;
  j["threads"] = threads;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.paths.train = p.value("train", c.paths.train);
      c.paths.dev = p.value("dev", c.paths.dev);
      c.paths.test = p.value("test", c.paths.test);
      c.paths.vocab = p.value("vocab", c.paths.vocab);
      c.paths.checkpoint = p.value("checkpoint", c.paths.checkpoint);
      c.paths.output_dir = p.value("output_dir", c.paths.output_dir);
    }
    if (j.contains("template")) j.at("template").get_to(c.tmpl);
    if (j.contains("model")) j.at("model").get_to(c.model);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      t.get_to(c.train);
      if (t.contains("stop_at_accuracy") && !t.at("stop_at_accuracy").is_null()) {
        c.stop_at_accuracy = t.at("stop_at_accuracy").get<double>();
      }
      c.accuracy_check_every = t.value("accuracy_check_every", c.accuracy_check_every);
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      c.eval.exclude_punct = e.value("exclude_punct", c.eval.exclude_punct);
      c.eval.punct_labels = e.value("punct_labels", c.eval.punct_labels);
      c.eval.length_edges = e.value("length_edges", c.eval.length_edges);
      c.eval.index_edges = e.value("index_edges", c.eval.index_edges);
    }
    c.seed = j.value("seed", c.seed);
    c.min_word_freq = j.value("min_word_freq", c.min_word_freq);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("invalid config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ContractError("config '" + path + "': " + e.what());
  }
  return RunConfig::from_json(j);
}

bool apply_seed_env(RunConfig& config) {
  const char* env = std::getenv("SPT_SEED");
  if (!env || !*env) return false;
  char* end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw ContractError("SPT_SEED must be an unsigned integer");
  const bool changed = v != config.seed;
  config.seed = v;
  return changed;
}

void require_existing(const std::vector<std::pair<std::string, std::string>>& labelled_paths) {
  for (const auto& [label, path] : labelled_paths) {
    if (path.empty()) throw ContractError(label + " path is not set");
    if (!std::filesystem::exists(path)) throw ContractError(label + " '" + path + "' does not exist");
  }
}

}  // namespace spt
