#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spt/treebank.hpp"

namespace spt::testing {

struct Row {
  const char* form;
  const char* pos;
  int head;
  const char* label;
};

inline Sentence sentence_of(const std::vector<Row>& rows, const char* id = nullptr) {
  Sentence s;
  int i = 1;
  for (const auto& r : rows) {
    Token t;
    t.index = i++;
    t.form = r.form;
    if (r.pos) t.pos = r.pos;
    t.head = r.head;
    t.label = r.label;
    s.tokens.push_back(t);
  }
  if (id) s.sent_id = id;
  return s;
}

/// He loves his rabbits: heads 2 0 4 2.
inline Sentence he_loves_his_rabbits(bool with_pos = false) {
  return sentence_of({{"He", with_pos ? "PRON" : nullptr, 2, "nsubj"},
                      {"loves", with_pos ? "VERB" : nullptr, 0, "root"},
                      {"his", with_pos ? "PRON" : nullptr, 4, "poss"},
                      {"rabbits", with_pos ? "NOUN" : nullptr, 2, "dobj"}});
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("spt_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::vector<int> heads_of(const Sentence& s) {
  std::vector<int> h;
  for (const auto& t : s.tokens) h.push_back(t.head);
  return h;
}

inline std::vector<std::string> labels_of(const Sentence& s) {
  std::vector<std::string> l;
  for (const auto& t : s.tokens) l.push_back(t.label);
  return l;
}

}  // namespace spt::testing
