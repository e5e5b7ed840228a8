#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spt/treebank.hpp"

namespace spt {

/// Prompt-slot switches for the word template. Turning off `use_abs` or
/// `use_pos` gives the two ablation variants.
struct TemplateConfig {
  bool use_abs = true;
  bool use_pos = true;
  int max_index = 128;

  bool operator==(const TemplateConfig&) const = default;
};

enum class TokenClass { idx, label, pos, mask, word };

std::string_view to_string(TokenClass c);

inline constexpr std::string_view kHeadMask = "[HEAD]";
inline constexpr std::string_view kDepMask = "[DEP]";
inline constexpr std::string_view kUnk = "<unk>";
inline constexpr std::string_view kPad = "<pad>";

/// "[7]" for index 7, "[nsubj]" for a label.
std::string bracket(std::string_view inner);
std::string index_prompt(int i);

/// Closed inventory of bracketed prompt tokens plus the word vocabulary.
/// The id space is dense: ids 0..size()-1, one token string per id.
///
/// Id layout is canonical: <pad>, <unk>, [HEAD], [DEP], [0]..[max_index],
/// labels sorted, POS tags sorted, words sorted. Two vocabularies with the
/// same token sets therefore always have the same ids.
class PromptVocab {
 public:
  PromptVocab() = default;

  /// Builds the canonical layout from token sets. Labels and POS tags are
  /// given without brackets; words unescaped.
  static PromptVocab from_sets(int max_index, const std::vector<std::string>& labels,
                               const std::vector<std::string>& pos_tags,
                               const std::vector<std::string>& words);

  int size() const { return static_cast<int>(tokens_.size()); }
  int max_index() const { return max_index_; }

  const std::string& token(int id) const { return tokens_.at(id); }
  TokenClass token_class(int id) const { return classes_.at(id); }

  /// Id of an exact token string (escaped form for words); -1 when absent.
  int find(std::string_view token) const;

  /// Id for a surface word: the escaped word entry, or <unk>.
  int word_id(std::string_view word) const;
  /// Id of a prompt lexeme; -1 when not a known prompt.
  int prompt_id(std::string_view lexeme) const;

  int index_id(int i) const { return i >= 0 && i <= max_index_ ? first_index_ + i : -1; }
  /// Inverse of index_id; -1 when id is not an index prompt.
  int index_of(int id) const {
    return id >= first_index_ && id <= first_index_ + max_index_ ? id - first_index_ : -1;
  }
  int label_id(std::string_view label) const;
  int pos_id(std::string_view pos) const;

  int head_mask_id() const { return 2; }
  int dep_mask_id() const { return 3; }
  int unk_id() const { return 1; }
  int pad_id() const { return 0; }

  /// Label names (unbracketed) in id order.
  std::vector<std::string> labels() const;
  std::vector<std::string> pos_tags() const;
  std::vector<std::string> words() const;  // unescaped
  const std::vector<int>& label_ids() const { return label_ids_; }

  /// Canonical text form; see save_vocab.
  std::string serialize() const;
  static PromptVocab deserialize(std::string_view text);

  bool operator==(const PromptVocab& o) const {
    return max_index_ == o.max_index_ && tokens_ == o.tokens_ && classes_ == o.classes_;
  }

 private:
  void add(std::string token, TokenClass cls);
  void reindex();

  int max_index_ = 0;
  int first_index_ = 4;
  std::vector<std::string> tokens_;
  std::vector<TokenClass> classes_;
  std::unordered_map<std::string, int> ids_;
  std::vector<int> label_ids_;
};

/// Word-vocabulary key for a surface word. Words that could be mistaken for
/// a prompt or a reserved entry get a leading '\x01'.
std::string escape_word(std::string_view word);
std::string unescape_word(std::string_view key);

PromptVocab build_vocab(const std::vector<std::vector<Sentence>>& treebanks,
                        const TemplateConfig& config, int min_word_freq = 1);

PromptVocab unify_labels(const std::vector<PromptVocab>& vocabs);

/// Most frequent gold label in a corpus (ties broken alphabetically); used
/// as the fallback when a predicted label slot is illegal.
std::string most_frequent_label(const std::vector<Sentence>& corpus);

void save_vocab(const PromptVocab& vocab, const std::string& path);
PromptVocab load_vocab(const std::string& path);

/// 64-bit FNV-1a of the serialized vocabulary.
std::uint64_t vocab_hash(const PromptVocab& vocab);

}  // namespace spt
