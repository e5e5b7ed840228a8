#include "spt/codec.hpp"

#include <algorithm>

#include "spt/error.hpp"

namespace spt {
namespace {

std::string describe(const Sentence& s) {
  return s.sent_id ? "sentence '" + *s.sent_id + "'" : "sentence";
}

void check_length(const Sentence& s, const TemplateConfig& config, const PromptVocab& vocab) {
  if (s.size() > config.max_index || s.size() > vocab.max_index()) {
    throw EncodeError(describe(s) + " has " + std::to_string(s.size()) + " words, exceeding max_index " +
                      std::to_string(std::min(config.max_index, vocab.max_index())));
  }
}

TemplateUnit scaffold_unit(const Sentence& s, const Token& t, const PromptVocab& vocab,
                           const TemplateConfig& config) {
  if (t.form.empty() || t.form.find_first_of(" \t\n\r") != std::string::npos) {
    throw EncodeError(describe(s) + ", token " + std::to_string(t.index) +
                      ": word is empty or contains whitespace");
  }
  TemplateUnit u;
  if (config.use_abs) u.abs = index_prompt(t.index);
  if (config.use_pos) {
    auto p = t.pos.value_or("_");
    if (vocab.pos_id(p) < 0) {
      throw EncodeError(describe(s) + ", token " + std::to_string(t.index) + ": unknown POS tag '" + p + "'");
    }
    u.pos = bracket(p);
  }
  u.word = t.form;
  return u;
}

std::string_view unbracketed(std::string_view s) { return s.substr(1, s.size() - 2); }

}  // namespace

int ParseResult::invalid_slots() const {
  return static_cast<int>(std::count(slot_valid.begin(), slot_valid.end(), false));
}

int tokens_per_unit(const TemplateConfig& config) {
  return 3 + (config.use_abs ? 1 : 0) + (config.use_pos ? 1 : 0);
}

PromptedSentence encode(const Sentence& s, const PromptVocab& vocab, const TemplateConfig& config) {
  check_length(s, config, vocab);
  PromptedSentence d;
  d.units.reserve(s.tokens.size());
  for (const Token& t : s.tokens) {
    TemplateUnit u = scaffold_unit(s, t, vocab, config);
    if (t.head < 0 || t.head > s.size()) {
      throw EncodeError(describe(s) + ", token " + std::to_string(t.index) + ": head out of range");
    }
    if (vocab.label_id(t.label) < 0) {
      throw EncodeError(describe(s) + ", token " + std::to_string(t.index) + ": unknown label '" + t.label + "'");
    }
    u.refx = index_prompt(t.head);
    u.label = bracket(t.label);
    d.units.push_back(std::move(u));
  }
  return d;
}

PromptedSentence encode_masked(const Sentence& s, const PromptVocab& vocab, const TemplateConfig& config) {
  check_length(s, config, vocab);
  PromptedSentence d;
  d.masked = true;
  d.units.reserve(s.tokens.size());
  for (const Token& t : s.tokens) {
    TemplateUnit u = scaffold_unit(s, t, vocab, config);
    u.refx = kHeadMask;
    u.label = kDepMask;
    d.units.push_back(std::move(u));
  }
  return d;
}

PromptedSentence mask(const PromptedSentence& d) {
  if (d.masked) throw ContractError("mask: input is already masked");
  PromptedSentence m = d;
  m.masked = true;
  for (auto& u : m.units) {
    u.refx = kHeadMask;
    u.label = kDepMask;
  }
  return m;
}

PromptedSentence fill(const PromptedSentence& masked, std::span<const int> heads,
                      std::span<const std::string> labels) {
  if (!masked.masked) throw ContractError("fill: input is not masked");
  if (static_cast<int>(heads.size()) != masked.n() || static_cast<int>(labels.size()) != masked.n()) {
    throw ContractError("fill: slot count does not match unit count");
  }
  PromptedSentence d = masked;
  d.masked = false;
  for (int i = 0; i < d.n(); ++i) {
    d.units[i].refx = index_prompt(heads[i]);
    d.units[i].label = bracket(labels[i]);
  }
  return d;
}

std::vector<std::string> to_lexemes(const PromptedSentence& d) {
  std::vector<std::string> out;
  for (const auto& u : d.units) {
    if (u.abs) out.push_back(*u.abs);
    out.push_back(u.refx);
    out.push_back(u.label);
    if (u.pos) out.push_back(*u.pos);
    out.push_back(u.word);
  }
  return out;
}

ParseResult decode(std::span<const std::string> tokens, int n, const PromptVocab& vocab,
                   const TemplateConfig& config, const DecodeOptions& options) {
  const int k = tokens_per_unit(config);
  if (n < 0 || static_cast<long>(tokens.size()) != static_cast<long>(n) * k) {
    throw DecodeError("decode: " + std::to_string(tokens.size()) + " tokens do not fit a scaffold of " +
                      std::to_string(n) + " units x " + std::to_string(k) + " tokens");
  }
  std::string fallback = options.fallback_label;
  if (fallback.empty()) {
    auto labels = vocab.labels();
    if (!labels.empty()) fallback = labels.front();
  }

  ParseResult r;
  r.policy = options.policy;
  r.heads.resize(n);
  r.labels.resize(n);
  r.slot_valid.resize(n);
  r.head_valid.resize(n);
  r.label_valid.resize(n);
  const int ref_off = config.use_abs ? 1 : 0;
  for (int u = 0; u < n; ++u) {
    const int i = u + 1;
    const std::size_t base = static_cast<std::size_t>(u) * k;
    if (config.use_abs && tokens[base] != index_prompt(i)) ++r.scaffold_errors;
    if (config.use_pos) {
      int pid = vocab.prompt_id(tokens[base + ref_off + 2]);
      if (pid < 0 || vocab.token_class(pid) != TokenClass::pos) ++r.scaffold_errors;
    }

    const std::string& ref = tokens[base + ref_off];
    int head = vocab.index_of(vocab.prompt_id(ref));
    bool head_ok = head >= 0 && head <= n && head != i;
    r.heads[u] = head_ok ? head : 0;

    const std::string& lab = tokens[base + ref_off + 1];
    int lid = vocab.prompt_id(lab);
    bool label_ok = lid >= 0 && vocab.token_class(lid) == TokenClass::label;
    r.labels[u] = label_ok ? std::string(unbracketed(lab)) : fallback;

    r.head_valid[u] = head_ok;
    r.label_valid[u] = label_ok;
    r.slot_valid[u] = head_ok && label_ok;
  }
  return r;
}

std::string flatten(const PromptedSentence& d) {
  std::string out;
  for (int u = 0; u < d.n(); ++u) {
    const auto& unit = d.units[u];
    if (u > 0) out += ' ';
    if (unit.abs) out += *unit.abs;
    out += unit.refx;
    out += unit.label;
    if (unit.pos) out += *unit.pos;
    out += unit.word;
  }
  return out;
}

PromptedSentence unflatten(std::string_view text, const PromptVocab& vocab, const TemplateConfig& config) {
  PromptedSentence d;
  if (text.empty()) return d;
  const int prompts = tokens_per_unit(config) - 1;
  int masked_units = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto sp = text.find(' ', pos);
    auto chunk = text.substr(pos, sp == std::string_view::npos ? std::string_view::npos : sp - pos);
    const int unit_no = d.n() + 1;
    auto fail = [&](const std::string& why) {
      return ParseError("unit " + std::to_string(unit_no) + ": " + why);
    };

    std::vector<std::string> lex;
    std::size_t c = 0;
    for (int p = 0; p < prompts; ++p) {
      if (c >= chunk.size() || chunk[c] != '[') throw fail("expected a bracketed prompt");
      auto close = chunk.find(']', c);
      if (close == std::string_view::npos) throw fail("unmatched bracket");
      auto lexeme = chunk.substr(c, close - c + 1);
      if (vocab.prompt_id(lexeme) < 0) throw fail("unknown prompt '" + std::string(lexeme) + "'");
      lex.emplace_back(lexeme);
      c = close + 1;
    }
    if (c >= chunk.size()) throw fail("missing word");

    auto cls = [&](const std::string& s) { return vocab.token_class(vocab.prompt_id(s)); };
    TemplateUnit u;
    int li = 0;
    if (config.use_abs) {
      if (cls(lex[li]) != TokenClass::idx) throw fail("abs slot holds '" + lex[li] + "'");
      u.abs = lex[li++];
    }
    u.refx = lex[li++];
    u.label = lex[li++];
    if (config.use_pos) {
      if (cls(lex[li]) != TokenClass::pos) throw fail("POS slot holds '" + lex[li] + "'");
      u.pos = lex[li++];
    }
    bool ref_mask = u.refx == kHeadMask, label_mask = u.label == kDepMask;
    if (ref_mask != label_mask) throw fail("ref and label slots mix masks and concrete prompts");
    if (!ref_mask && (cls(u.refx) != TokenClass::idx || cls(u.label) != TokenClass::label)) {
      throw fail("ref/label slots hold prompts of the wrong class");
    }
    masked_units += ref_mask ? 1 : 0;
    u.word = std::string(chunk.substr(c));
    d.units.push_back(std::move(u));
    if (sp == std::string_view::npos) break;
    pos = sp + 1;
  }
  if (masked_units != 0 && masked_units != d.n()) throw ParseError("sequence mixes masked and unmasked units");
  d.masked = masked_units == d.n();
  return d;
}

Sentence apply_parse(const Sentence& input, const ParseResult& parse) {
  if (parse.n() != input.size()) {
    throw ContractError("apply_parse: parse has " + std::to_string(parse.n()) + " tokens, sentence has " +
                        std::to_string(input.size()));
  }
  Sentence out = input;
  for (int i = 0; i < out.size(); ++i) {
    out.tokens[i].head = parse.heads[i];
    out.tokens[i].label = parse.labels[i];
  }
  return out;
}

}  // namespace spt
