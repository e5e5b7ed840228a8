#include "spt/treebank.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "spt/error.hpp"

namespace spt {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::optional<std::string> comment_value(std::string_view line,
                                         std::string_view key) {
  auto body = trim(line.substr(1));
  if (body.substr(0, key.size()) != key) return std::nullopt;
  auto rest = trim(body.substr(key.size()));
  if (rest.empty() || rest.front() != '=') return std::nullopt;
  return std::string(trim(rest.substr(1)));
}

std::string opt_or_underscore(const std::optional<std::string>& v) {
  return v && !v->empty() ? *v : std::string("_");
}

struct Block {
  Sentence sentence;
  int first_line = 0;
  bool open = false;
};

}  // namespace

std::vector<Sentence> parse_conllu(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<Sentence> out;
  Block block;
  auto flush = [&](int line_no) {
    if (!block.open) return;
    auto& toks = block.sentence.tokens;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      if (toks[k].index != static_cast<int>(k) + 1) {
        throw ParseError("line " + std::to_string(block.first_line) +
                         ": non-contiguous token ids (expected " +
                         std::to_string(k + 1) + ", found " +
                         std::to_string(toks[k].index) + ")");
      }
    }
    if (!toks.empty()) out.push_back(std::move(block.sentence));
    block = Block{};
    (void)line_no;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = nl == std::string_view::npos
                               ? text.substr(pos)
                               : text.substr(pos, nl - pos);
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    if (trim(raw).empty()) {
      flush(line_no);
    } else {
      if (!block.open) {
        block.open = true;
        block.first_line = line_no;
      }
      if (raw.front() == '#') {
        if (auto v = comment_value(raw, "sent_id")) block.sentence.sent_id = *v;
        else if (auto l = comment_value(raw, "lang")) block.sentence.language = *l;
      } else {
        auto cols = split_tabs(raw);
        if (cols.size() < 8) {
          throw ParseError("line " + std::to_string(line_no) + ": expected at least 8 tab-separated columns, found " +
                           std::to_string(cols.size()));
        }
        auto id = cols[0];
        if (id.find('-') != std::string_view::npos ||
            id.find('.') != std::string_view::npos) {
          // multiword range or empty node
        } else {
          Token t;
          if (!parse_int(id, t.index)) {
            throw ParseError("line " + std::to_string(line_no) + ": non-integer ID '" + std::string(id) + "'");
          }
          if (!parse_int(cols[6], t.head)) {
            throw ParseError("line " + std::to_string(line_no) + ": non-integer HEAD '" + std::string(cols[6]) + "'");
          }
          t.form = std::string(cols[1]);
          if (cols[3] != "_" && !cols[3].empty()) t.pos = std::string(cols[3]);
          t.label = cols[7] == "_" ? std::string() : std::string(cols[7]);
          block.sentence.tokens.push_back(std::move(t));
        }
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush(line_no);
  return out;
}

std::string check_invariants(const Sentence& s) {
  const int n = s.size();
  for (int k = 0; k < n; ++k) {
    const Token& t = s.tokens[k];
    std::string where = "token " + std::to_string(k + 1);
    if (t.index != k + 1) return where + ": index " + std::to_string(t.index) + " is not contiguous";
    if (t.head < 0 || t.head > n) return where + ": head " + std::to_string(t.head) + " out of range";
    if (t.head == t.index) return where + ": self-loop";
    if (t.form.empty()) return where + ": empty form";
    if (t.form.find_first_of("\t\n\r") != std::string::npos) return where + ": form contains tab or newline";
    if (t.label.find_first_of("\t\n\r") != std::string::npos) return where + ": label contains tab or newline";
  }
  return {};
}

std::string write_conllu(const std::vector<Sentence>& sentences) {
  std::ostringstream os;
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    const Sentence& s = sentences[si];
    if (auto err = check_invariants(s); !err.empty()) {
      std::string name = s.sent_id ? "'" + *s.sent_id + "'" : "#" + std::to_string(si + 1);
      throw SerializationError("sentence " + name + ", " + err);
    }
    if (s.sent_id) os << "# sent_id = " << *s.sent_id << '\n';
    if (s.language) os << "# lang = " << *s.language << '\n';
    for (const Token& t : s.tokens) {
      os << t.index << '\t' << t.form << "\t_\t" << opt_or_underscore(t.pos)
         << "\t_\t_\t" << t.head << '\t'
         << (t.label.empty() ? std::string("_") : t.label) << "\t_\t_\n";
    }
    os << '\n';
  }
  return os.str();
}

TreeReport validate_tree(const Sentence& s) {
  TreeReport r;
  const int n = s.size();
  for (const Token& t : s.tokens) {
    if (t.head == 0) ++r.root_count;
    if (t.head < 0 || t.head > n) r.out_of_range_heads.push_back(t.index);
  }
  // state: 0 unvisited, 1 on current chain, 2 known to reach root
  std::vector<int> state(n + 1, 0);
  for (int start = 1; start <= n && !r.has_cycle; ++start) {
    std::vector<int> chain;
    int cur = start;
    while (true) {
      if (cur == 0 || cur < 0 || cur > n || state[cur] == 2) break;
      if (state[cur] == 1) {
        r.has_cycle = true;
        break;
      }
      state[cur] = 1;
      chain.push_back(cur);
      cur = s.tokens[cur - 1].head;
    }
    for (int c : chain) state[c] = 2;
  }
  return r;
}

std::vector<Sentence> read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_conllu(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_conllu_file(const std::string& path,
                       const std::vector<Sentence>& sentences) {
  auto text = write_conllu(sentences);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SerializationError("cannot write '" + path + "'");
  out << text;
}

}  // namespace spt
