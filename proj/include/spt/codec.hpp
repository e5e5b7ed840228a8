#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spt/prompt_vocab.hpp"
#include "spt/treebank.hpp"

namespace spt {

/// One word's template: [abs][ref][label][pos]word. `refx` and `label`
/// hold either concrete prompts or the [HEAD]/[DEP] masks.
struct TemplateUnit {
  std::optional<std::string> abs;
  std::string refx;
  std::string label;
  std::optional<std::string> pos;
  std::string word;

  bool operator==(const TemplateUnit&) const = default;
};

struct PromptedSentence {
  std::vector<TemplateUnit> units;
  bool masked = false;

  int n() const { return static_cast<int>(units.size()); }
  bool operator==(const PromptedSentence&) const = default;
};

/// How illegal predicted slots are treated. Both policies write repaired
/// values (head 0, fallback label) into the ParseResult; under `strict`
/// scoring additionally counts every invalid slot as wrong.
enum class RepairPolicy { to_root, strict };

struct DecodeOptions {
  RepairPolicy policy = RepairPolicy::to_root;
  /// Replacement for illegal label slots; empty means the first label in
  /// vocabulary order.
  std::string fallback_label;
};

struct ParseResult {
  std::vector<int> heads;
  std::vector<std::string> labels;
  std::vector<bool> slot_valid;  // head_valid && label_valid
  std::vector<bool> head_valid;
  std::vector<bool> label_valid;
  /// Scaffold positions (abs, pos) whose token differs from what the
  /// template requires. Always zero for well-formed output.
  int scaffold_errors = 0;
  RepairPolicy policy = RepairPolicy::to_root;

  int n() const { return static_cast<int>(heads.size()); }
  int invalid_slots() const;
};

/// Tokens per template unit under a config: abs? + ref + label + pos? + word.
int tokens_per_unit(const TemplateConfig& config);

/// Gold template D. Throws EncodeError for over-length sentences, unknown
/// labels/POS, or words containing whitespace.
PromptedSentence encode(const Sentence& sentence, const PromptVocab& vocab,
                        const TemplateConfig& config);

/// Masked template D_M built from the words alone (heads and labels are
/// ignored), for inputs without gold annotation. Equals mask(encode(s))
/// whenever encode(s) succeeds.
PromptedSentence encode_masked(const Sentence& sentence, const PromptVocab& vocab,
                               const TemplateConfig& config);

/// Replaces every ref slot with [HEAD] and every label slot with [DEP].
/// Throws ContractError on already-masked input.
PromptedSentence mask(const PromptedSentence& d);

/// Writes concrete heads/labels into the slots of a masked template.
PromptedSentence fill(const PromptedSentence& masked, std::span<const int> heads,
                      std::span<const std::string> labels);

/// Lexeme sequence in model order (one string per model token).
std::vector<std::string> to_lexemes(const PromptedSentence& d);

ParseResult decode(std::span<const std::string> filled_tokens, int n, const PromptVocab& vocab,
                   const TemplateConfig& config, const DecodeOptions& options = {});

/// Prompts concatenated inside a unit, one space between units.
std::string flatten(const PromptedSentence& d);
PromptedSentence unflatten(std::string_view text, const PromptVocab& vocab,
                           const TemplateConfig& config);

/// Writes predicted heads/labels into a copy of the input sentence.
Sentence apply_parse(const Sentence& input, const ParseResult& parse);

}  // namespace spt
