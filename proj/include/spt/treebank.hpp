#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spt {

struct Token {
  int index = 0;  // 1-based position in the sentence
  std::string form;
  std::optional<std::string> pos;
  int head = 0;  // 0 is the artificial root
  std::string label;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<std::string> sent_id;
  std::optional<std::string> language;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence&) const = default;
};

struct TreeReport {
  int root_count = 0;
  bool has_cycle = false;
  std::vector<int> out_of_range_heads;

  /// One root, no cycle, every head in range.
  bool is_tree() const {
    return root_count == 1 && !has_cycle && out_of_range_heads.empty();
  }
};

/// Parses CoNLL-U text. Multiword-token and empty-node lines are skipped;
/// `# sent_id =` and `# lang =` comments populate the sentence metadata.
/// Throws ParseError (with the 1-based line number) on malformed input.
std::vector<Sentence> parse_conllu(std::string_view text);

/// Emits 10-column CoNLL-U. Throws SerializationError on invariant violations.
std::string write_conllu(const std::vector<Sentence>& sentences);

TreeReport validate_tree(const Sentence& sentence);

/// Checks the Token/Sentence invariants; returns an empty string when valid,
/// otherwise a description of the first violation.
std::string check_invariants(const Sentence& sentence);

std::vector<Sentence> read_conllu_file(const std::string& path);
void write_conllu_file(const std::string& path,
                       const std::vector<Sentence>& sentences);

}  // namespace spt
