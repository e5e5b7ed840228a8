#include "spt/prompt_vocab.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "spt/error.hpp"

namespace spt {
namespace {

constexpr std::string_view kHeader = "sptvocab v1";
constexpr std::string_view kFooter = "end";
constexpr char kEscape = '\x01';

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void check_prompt_name(std::string_view name, std::string_view what) {
  if (name.empty()) throw VocabError("empty " + std::string(what) + " cannot become a prompt");
  if (name.find_first_of("[]") != std::string_view::npos) {
    throw VocabError(std::string(what) + " '" + std::string(name) + "' contains a bracket");
  }
  if (name.find_first_of(" \t\n\r") != std::string_view::npos) {
    throw VocabError(std::string(what) + " '" + std::string(name) + "' contains whitespace");
  }
  if (all_digits(name) || name == "HEAD" || name == "DEP") {
    throw VocabError(std::string(what) + " '" + std::string(name) + "' collides with a reserved prompt");
  }
}

TokenClass parse_class(std::string_view s) {
  if (s == "idx") return TokenClass::idx;
  if (s == "label") return TokenClass::label;
  if (s == "pos") return TokenClass::pos;
  if (s == "mask") return TokenClass::mask;
  if (s == "word") return TokenClass::word;
  throw VocabError("unknown token class '" + std::string(s) + "'");
}

std::string unbracket(const std::string& s) { return s.substr(1, s.size() - 2); }

}  // namespace

std::string_view to_string(TokenClass c) {
  switch (c) {
    case TokenClass::idx: return "idx";
    case TokenClass::label: return "label";
    case TokenClass::pos: return "pos";
    case TokenClass::mask: return "mask";
    case TokenClass::word: return "word";
  }
  return "?";
}

std::string bracket(std::string_view inner) {
  std::string s;
  s.reserve(inner.size() + 2);
  s += '[';
  s += inner;
  s += ']';
  return s;
}

std::string index_prompt(int i) { return bracket(std::to_string(i)); }

std::string escape_word(std::string_view word) {
  bool needs = !word.empty() && (word.front() == '[' || word.front() == kEscape);
  needs = needs || word == kUnk || word == kPad;
  return needs ? std::string(1, kEscape) + std::string(word) : std::string(word);
}

std::string unescape_word(std::string_view key) {
  if (!key.empty() && key.front() == kEscape) key.remove_prefix(1);
  return std::string(key);
}

void PromptVocab::add(std::string token, TokenClass cls) {
  auto [it, inserted] = ids_.emplace(token, static_cast<int>(tokens_.size()));
  if (!inserted) throw VocabError("duplicate token '" + token + "'");
  if (cls == TokenClass::label) label_ids_.push_back(it->second);
  tokens_.push_back(std::move(token));
  classes_.push_back(cls);
}

void PromptVocab::reindex() {
  ids_.clear();
  label_ids_.clear();
  for (int i = 0; i < size(); ++i) {
    if (!ids_.emplace(tokens_[i], i).second) throw VocabError("duplicate token '" + tokens_[i] + "'");
    if (classes_[i] == TokenClass::label) label_ids_.push_back(i);
  }
}

PromptVocab PromptVocab::from_sets(int max_index, const std::vector<std::string>& labels,
                                   const std::vector<std::string>& pos_tags,
                                   const std::vector<std::string>& words) {
  if (max_index < 1) throw VocabError("max_index must be >= 1");
  PromptVocab v;
  v.max_index_ = max_index;
  v.add(std::string(kPad), TokenClass::word);
  v.add(std::string(kUnk), TokenClass::word);
  v.add(std::string(kHeadMask), TokenClass::mask);
  v.add(std::string(kDepMask), TokenClass::mask);
  for (int i = 0; i <= max_index; ++i) v.add(index_prompt(i), TokenClass::idx);

  std::set<std::string> ls(labels.begin(), labels.end());
  for (const auto& l : ls) {
    check_prompt_name(l, "label");
    v.add(bracket(l), TokenClass::label);
  }
  std::set<std::string> ps(pos_tags.begin(), pos_tags.end());
  for (const auto& p : ps) {
    check_prompt_name(p == "_" ? "x" : p, "POS tag");
    if (ls.count(p)) throw VocabError("POS tag '" + p + "' collides with a label prompt");
    v.add(bracket(p), TokenClass::pos);
  }
  std::set<std::string> ws;
  for (const auto& w : words) ws.insert(escape_word(w));
  for (const auto& w : ws) v.add(w, TokenClass::word);
  return v;
}

int PromptVocab::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? -1 : it->second;
}

int PromptVocab::word_id(std::string_view word) const {
  int id = find(escape_word(word));
  return id >= 0 && classes_[id] == TokenClass::word ? id : unk_id();
}

int PromptVocab::prompt_id(std::string_view lexeme) const {
  int id = find(lexeme);
  return id >= 0 && classes_[id] != TokenClass::word ? id : -1;
}

int PromptVocab::label_id(std::string_view label) const {
  int id = find(bracket(label));
  return id >= 0 && classes_[id] == TokenClass::label ? id : -1;
}

int PromptVocab::pos_id(std::string_view pos) const {
  int id = find(bracket(pos));
  return id >= 0 && classes_[id] == TokenClass::pos ? id : -1;
}

std::vector<std::string> PromptVocab::labels() const {
  std::vector<std::string> out;
  for (int id : label_ids_) out.push_back(unbracket(tokens_[id]));
  return out;
}

std::vector<std::string> PromptVocab::pos_tags() const {
  std::vector<std::string> out;
  for (int i = 0; i < size(); ++i)
    if (classes_[i] == TokenClass::pos) out.push_back(unbracket(tokens_[i]));
  return out;
}

std::vector<std::string> PromptVocab::words() const {
  std::vector<std::string> out;
  for (int i = 2; i < size(); ++i)
    if (classes_[i] == TokenClass::word) out.push_back(unescape_word(tokens_[i]));
  return out;
}

std::string PromptVocab::serialize() const {
  std::ostringstream os;
  os << kHeader << '\n';
  for (int i = 0; i < size(); ++i) os << i << '\t' << tokens_[i] << '\t' << to_string(classes_[i]) << '\n';
  os << kFooter << '\t' << size() << '\n';
  return os.str();
}

PromptVocab PromptVocab::deserialize(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw VocabError("vocabulary file truncated (last line has no terminator)");
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty() || lines.front() != kHeader) {
    throw VocabError("not a vocabulary file or unsupported version (expected '" + std::string(kHeader) + "')");
  }
  if (lines.size() < 2 || lines.back().substr(0, kFooter.size() + 1) != std::string(kFooter) + "\t") {
    throw VocabError("vocabulary file truncated (missing end marker)");
  }

  PromptVocab v;
  for (std::size_t ln = 1; ln + 1 < lines.size(); ++ln) {
    auto line = lines[ln];
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw VocabError("malformed vocabulary line " + std::to_string(ln + 1));
    int id = -1;
    auto idtxt = line.substr(0, t1);
    auto [p, ec] = std::from_chars(idtxt.data(), idtxt.data() + idtxt.size(), id);
    if (ec != std::errc() || id != v.size()) {
      throw VocabError("vocabulary ids not dense at line " + std::to_string(ln + 1));
    }
    v.tokens_.emplace_back(line.substr(t1 + 1, t2 - t1 - 1));
    v.classes_.push_back(parse_class(line.substr(t2 + 1)));
  }
  int count = -1;
  auto ctext = lines.back().substr(kFooter.size() + 1);
  std::from_chars(ctext.data(), ctext.data() + ctext.size(), count);
  if (count != v.size()) throw VocabError("vocabulary entry count does not match end marker");

  if (v.size() < 5 || v.tokens_[0] != kPad || v.tokens_[1] != kUnk || v.tokens_[2] != kHeadMask ||
      v.tokens_[3] != kDepMask) {
    throw VocabError("vocabulary is missing reserved entries");
  }
  int max_index = -1;
  for (int i = 4; i < v.size() && v.classes_[i] == TokenClass::idx; ++i) {
    if (v.tokens_[i] != index_prompt(i - 4)) throw VocabError("index prompts are not contiguous");
    max_index = i - 4;
  }
  if (max_index < 1) throw VocabError("vocabulary has no index prompts");
  for (int i = 5 + max_index; i < v.size(); ++i) {
    if (v.classes_[i] == TokenClass::idx || v.classes_[i] == TokenClass::mask) {
      throw VocabError("unexpected prompt '" + v.tokens_[i] + "' after the index block");
    }
  }
  v.max_index_ = max_index;
  v.reindex();
  return v;
}

PromptVocab build_vocab(const std::vector<std::vector<Sentence>>& treebanks,
                        const TemplateConfig& config, int min_word_freq) {
  if (treebanks.empty()) throw VocabError("build_vocab needs at least one treebank");
  if (min_word_freq < 1) throw VocabError("min_word_freq must be >= 1");
  std::set<std::string> labels, pos;
  std::map<std::string, int> freq;
  for (const auto& tb : treebanks) {
    for (const auto& s : tb) {
      for (const auto& t : s.tokens) {
        labels.insert(t.label);
        if (config.use_pos) pos.insert(t.pos.value_or("_"));
        ++freq[t.form];
      }
    }
  }
  std::vector<std::string> words;
  for (const auto& [w, f] : freq)
    if (f >= min_word_freq) words.push_back(w);
  return PromptVocab::from_sets(config.max_index, {labels.begin(), labels.end()},
                                {pos.begin(), pos.end()}, words);
}

PromptVocab unify_labels(const std::vector<PromptVocab>& vocabs) {
  if (vocabs.empty()) throw VocabError("unify needs at least one vocabulary");
  const int max_index = vocabs.front().max_index();
  std::set<std::string> labels, pos, words;
  for (const auto& v : vocabs) {
    if (v.max_index() != max_index) {
      throw VocabError("cannot unify vocabularies with max_index " + std::to_string(max_index) +
                       " and " + std::to_string(v.max_index()));
    }
    for (auto& l : v.labels()) labels.insert(l);
    for (auto& p : v.pos_tags()) pos.insert(p);
    for (auto& w : v.words()) words.insert(w);
  }
  return PromptVocab::from_sets(max_index, {labels.begin(), labels.end()}, {pos.begin(), pos.end()},
                                {words.begin(), words.end()});
}

std::string most_frequent_label(const std::vector<Sentence>& corpus) {
  std::map<std::string, long> counts;
  for (const auto& s : corpus)
    for (const auto& t : s.tokens) ++counts[t.label];
  std::string best;
  long best_count = -1;
  for (const auto& [l, c] : counts) {
    if (c > best_count) {
      best = l;
      best_count = c;
    }
  }
  return best;
}

void save_vocab(const PromptVocab& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw VocabError("cannot write vocabulary '" + path + "'");
  out << vocab.serialize();
  if (!out) throw VocabError("failed writing vocabulary '" + path + "'");
}

PromptVocab load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VocabError("cannot open vocabulary '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return PromptVocab::deserialize(buf.str());
  } catch (const VocabError& e) {
    throw VocabError(path + ": " + e.what());
  }
}

std::uint64_t vocab_hash(const PromptVocab& vocab) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : vocab.serialize()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace spt
