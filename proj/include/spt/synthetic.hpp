#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spt/treebank.hpp"

namespace spt {

/// Knobs of the toy projective grammar. Word order flags let several
/// "languages" share one generator.
struct GrammarOptions {
  std::string language = "syn";
  std::uint64_t lexicon_seed = 11;
  bool verb_final = false;      // SOV instead of SVO
  bool postpositions = false;   // ADP after its noun
  bool adjective_after = false; // ADJ after its noun
  int max_words = 60;
};

/// Sentences from a small head-driven grammar (subject, object, adverbs,
/// prepositional attachments, relative and complement clauses, clause and
/// noun coordination, determiners, adjectives,
/// punctuation). Every tree is projective with a single root.
std::vector<Sentence> generate_grammar_corpus(int count, std::uint64_t seed, const GrammarOptions& options = {});

/// Uniformly random rooted tree over n tokens (generally non-projective),
/// with random labels, POS tags and forms drawn from wide inventories,
/// including forms that start with '[' or carry non-ASCII text.
Sentence random_tree(std::mt19937_64& rng, int n);

std::vector<Sentence> generate_random_trees(int count, std::uint64_t seed, int min_words, int max_words);

/// Head baselines for a gold corpus: every token attached to its left
/// neighbour (first token to root), and every token attached to root.
std::vector<Sentence> attach_to_previous(const std::vector<Sentence>& gold);
std::vector<Sentence> attach_to_root(const std::vector<Sentence>& gold);

}  // namespace spt
