#include "spt/synthetic.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

namespace spt {
namespace {

struct Lexicon {
  std::vector<std::string> nouns, trans_verbs, intrans_verbs, adjectives, determiners, verb_adps, noun_adps,
      adverbs, pronouns, conjunctions, complementizers, relativizers, speech_verbs;
};

std::string pseudo_word(std::mt19937_64& rng, int syllables) {
  static const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "sh", "tr"};
  static const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::uniform_int_distribution<int> o(0, 15), v(0, 6);
  std::string w;
  for (int s = 0; s < syllables; ++s) {
    w += onsets[o(rng)];
    w += vowels[v(rng)];
  }
  return w;
}

std::vector<std::string> word_list(std::mt19937_64& rng, int count, int syllables, const std::string& suffix) {
  std::vector<std::string> out;
  while (static_cast<int>(out.size()) < count) {
    auto w = pseudo_word(rng, syllables) + suffix;
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  return out;
}

Lexicon make_lexicon(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Lexicon l;
  l.nouns = word_list(rng, 40, 2, "");
  l.trans_verbs = word_list(rng, 12, 2, "s");
  l.intrans_verbs = word_list(rng, 8, 3, "s");
  l.adjectives = word_list(rng, 15, 2, "y");
  l.determiners = word_list(rng, 4, 1, "");
  l.verb_adps = word_list(rng, 4, 1, "n");
  l.noun_adps = word_list(rng, 4, 1, "f");
  l.adverbs = word_list(rng, 8, 2, "ly");
  l.pronouns = word_list(rng, 6, 1, "m");
  l.conjunctions = word_list(rng, 2, 1, "nd");
  l.complementizers = word_list(rng, 2, 1, "th");
  l.relativizers = word_list(rng, 2, 1, "ch");
  l.speech_verbs = word_list(rng, 5, 2, "st");
  return l;
}

struct Node {
  std::string form, pos, label;
  std::vector<std::unique_ptr<Node>> left, right;  // dependents in surface order
};

class Generator {
 public:
  Generator(const GrammarOptions& opt, std::uint64_t seed)
      : opt_(opt), lex_(make_lexicon(opt.lexicon_seed)), rng_(seed) {}

  Sentence sentence() {
    auto root = clause(0);
    root->label = "root";
    auto punct = leaf(".", "PUNCT", "punct");
    root->right.push_back(std::move(punct));
    Sentence s;
    s.language = opt_.language;
    linearize(*root, 0, s);
    // resolve provisional heads (stored as node ordinals) happens in linearize
    return s;
  }

 private:
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  const std::string& pick(const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }
  std::unique_ptr<Node> leaf(std::string form, std::string pos, std::string label) {
    auto n = std::make_unique<Node>();
    n->form = std::move(form);
    n->pos = std::move(pos);
    n->label = std::move(label);
    return n;
  }

  std::unique_ptr<Node> noun_phrase(const std::string& label, int depth) {
    if (chance(0.15)) return leaf(pick(lex_.pronouns), "PRON", label);
    auto n = leaf(pick(lex_.nouns), "NOUN", label);
    if (chance(0.7)) n->left.push_back(leaf(pick(lex_.determiners), "DET", "det"));
    int adjs = chance(0.35) ? (chance(0.3) ? 2 : 1) : 0;
    for (int a = 0; a < adjs; ++a) {
      auto adj = leaf(pick(lex_.adjectives), "ADJ", "amod");
      if (opt_.adjective_after) n->right.push_back(std::move(adj));
      else n->left.push_back(std::move(adj));
    }
    if (depth < 2 && chance(0.2)) n->right.push_back(adpositional(lex_.noun_adps, "nmod", depth + 1));
    if (depth < 2 && chance(0.12)) n->right.push_back(relative_clause(depth + 1));
    if (depth < 1 && chance(0.12)) {
      auto conj = leaf(pick(lex_.nouns), "NOUN", "conj");
      conj->left.push_back(leaf(pick(lex_.conjunctions), "CCONJ", "cc"));
      if (chance(0.5)) conj->left.push_back(leaf(pick(lex_.determiners), "DET", "det"));
      n->right.push_back(std::move(conj));
    }
    return n;
  }

  std::unique_ptr<Node> adpositional(const std::vector<std::string>& adps, const std::string& label, int depth) {
    auto np = noun_phrase(label, depth);
    auto adp = leaf(pick(adps), "ADP", "case");
    if (opt_.postpositions) np->right.push_back(std::move(adp));
    else np->left.insert(np->left.begin(), std::move(adp));
    return np;
  }

  // "that"-less relative clause: relativizer subject, verb, optional object.
  std::unique_ptr<Node> relative_clause(int depth) {
    const bool transitive = chance(0.5);
    auto v = leaf(pick(transitive ? lex_.trans_verbs : lex_.intrans_verbs), "VERB", "acl:relcl");
    v->left.push_back(leaf(pick(lex_.relativizers), "PRON", "nsubj"));
    if (transitive) {
      auto obj = noun_phrase("obj", depth + 1);
      if (opt_.verb_final) v->left.push_back(std::move(obj));
      else v->right.push_back(std::move(obj));
    }
    return v;
  }

  std::unique_ptr<Node> clause(int depth) {
    const double kind = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    const bool reporting = depth < 2 && kind < 0.15;
    const bool transitive = !reporting && kind < 0.7;
    auto v = leaf(pick(reporting ? lex_.speech_verbs : transitive ? lex_.trans_verbs : lex_.intrans_verbs), "VERB",
                  "");
    v->left.push_back(noun_phrase("nsubj", 0));
    if (chance(0.25)) v->left.push_back(leaf(pick(lex_.adverbs), "ADV", "advmod"));
    std::vector<std::unique_ptr<Node>> post;
    if (transitive) {
      auto obj = noun_phrase("obj", 0);
      if (opt_.verb_final) v->left.push_back(std::move(obj));
      else post.push_back(std::move(obj));
    }
    if (chance(0.45)) {
      auto obl = adpositional(lex_.verb_adps, "obl", 1);
      if (opt_.verb_final) v->left.push_back(std::move(obl));
      else post.push_back(std::move(obl));
    }
    if (chance(0.2)) post.push_back(leaf(pick(lex_.adverbs), "ADV", "advmod"));
    if (reporting) {
      auto comp = clause(depth + 1);
      comp->label = "ccomp";
      comp->left.insert(comp->left.begin(), leaf(pick(lex_.complementizers), "SCONJ", "mark"));
      post.push_back(std::move(comp));
    }
    for (auto& p : post) v->right.push_back(std::move(p));
    if (depth == 0 && chance(0.3)) {
      auto second = clause(depth + 1);
      second->label = "conj";
      second->left.insert(second->left.begin(), leaf(pick(lex_.conjunctions), "CCONJ", "cc"));
      v->right.push_back(std::move(second));
    }
    return v;
  }

  // In-order traversal assigns indices; heads are patched once the head's
  // own index is known.
  int linearize(Node& node, int head_index, Sentence& s) {
    std::vector<std::pair<Node*, std::size_t>> deferred;
    for (auto& c : node.left) {
      const std::size_t before = s.tokens.size();
      linearize(*c, -1, s);
      deferred.emplace_back(c.get(), before);
    }
    Token t;
    t.index = static_cast<int>(s.tokens.size()) + 1;
    t.form = node.form;
    t.pos = node.pos;
    t.head = head_index;
    t.label = node.label;
    s.tokens.push_back(t);
    const int me = t.index;
    for (auto& [child, before] : deferred) patch_head(*child, before, me, s);
    for (auto& c : node.right) linearize(*c, me, s);
    return me;
  }

  // The left child occupies tokens [before, ...); its own token is the one
  // whose head is still the -1 placeholder.
  void patch_head(Node&, std::size_t before, int head, Sentence& s) {
    for (std::size_t k = before; k < s.tokens.size(); ++k) {
      if (s.tokens[k].head == -1) {
        s.tokens[k].head = head;
        return;
      }
    }
  }

  GrammarOptions opt_;
  Lexicon lex_;
  std::mt19937_64 rng_;
};

const std::vector<std::string>& wide_labels() {
  static const std::vector<std::string> labels{
      "acl",   "acl:relcl", "advcl", "advmod", "amod",     "appos",  "aux",    "case",      "cc",
      "ccomp", "compound",  "conj",  "cop",    "det",      "expl",   "fixed",  "flat",      "iobj",
      "mark",  "nmod",      "nmod:poss", "nsubj", "nummod", "obj",   "obl",    "parataxis", "punct",
      "root",  "xcomp"};
  return labels;
}

const std::vector<std::string>& wide_pos() {
  static const std::vector<std::string> pos{"ADJ", "ADP", "ADV",  "AUX",   "CCONJ", "DET", "INTJ", "NOUN",
                                            "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
  return pos;
}

}  // namespace

std::vector<Sentence> generate_grammar_corpus(int count, std::uint64_t seed, const GrammarOptions& options) {
  Generator gen(options, seed);
  std::vector<Sentence> out;
  while (static_cast<int>(out.size()) < count) {
    Sentence s = gen.sentence();
    if (s.size() > options.max_words) continue;
    s.sent_id = options.language + "-" + std::to_string(out.size() + 1);
    out.push_back(std::move(s));
  }
  return out;
}

Sentence random_tree(std::mt19937_64& rng, int n) {
  static const std::vector<std::string> odd_forms{"[bracketed", "[0]", "<unk>", "naïve", "東京", "x]y", "\x01raw"};
  Sentence s;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(n + 1, 0);
  for (int k = 1; k < n; ++k) {
    heads[order[k]] = order[std::uniform_int_distribution<int>(0, k - 1)(rng)];
  }
  const auto& labels = wide_labels();
  const auto& pos = wide_pos();
  std::uniform_int_distribution<std::size_t> lab(0, labels.size() - 1), ps(0, pos.size() - 1),
      odd(0, odd_forms.size() - 1);
  std::uniform_int_distribution<int> len(1, 8), ch('a', 'z');
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.index = i;
    if (std::bernoulli_distribution(0.05)(rng)) {
      t.form = odd_forms[odd(rng)];
    } else {
      for (int c = len(rng); c > 0; --c) t.form += static_cast<char>(ch(rng));
    }
    t.pos = pos[ps(rng)];
    t.head = heads[i];
    t.label = t.head == 0 ? "root" : labels[lab(rng)];
    s.tokens.push_back(std::move(t));
  }
  return s;
}

std::vector<Sentence> generate_random_trees(int count, std::uint64_t seed, int min_words, int max_words) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(min_words, max_words);
  std::vector<Sentence> out;
  for (int i = 0; i < count; ++i) {
    Sentence s = random_tree(rng, len(rng));
    s.sent_id = "rand-" + std::to_string(i + 1);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> attach_to_previous(const std::vector<Sentence>& gold) {
  auto out = gold;
  for (auto& s : out)
    for (auto& t : s.tokens) t.head = t.index - 1;
  return out;
}

std::vector<Sentence> attach_to_root(const std::vector<Sentence>& gold) {
  auto out = gold;
  for (auto& s : out)
    for (auto& t : s.tokens) t.head = 0;
  return out;
}

}  // namespace spt
