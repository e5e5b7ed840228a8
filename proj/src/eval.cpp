#include "spt/eval.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "spt/error.hpp"
#include "spt/predict.hpp"

namespace spt {
namespace {

struct Tally {
  long tokens = 0, head = 0, both = 0;
  void add(bool h, bool l) {
    ++tokens;
    head += h ? 1 : 0;
    both += (h && l) ? 1 : 0;
  }
  double uas() const { return tokens ? static_cast<double>(head) / tokens : 0.0; }
  double las() const { return tokens ? static_cast<double>(both) / tokens : 0.0; }
};

void check_alignment(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred) {
  if (gold.size() != pred.size()) {
    throw EvalError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                    std::to_string(pred.size()));
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].n()) {
      std::string name = gold[i].sent_id ? "'" + *gold[i].sent_id + "'" : "#" + std::to_string(i + 1);
      throw EvalError("sentence " + name + ": gold has " + std::to_string(gold[i].size()) +
                      " tokens, prediction has " + std::to_string(pred[i].n()));
    }
  }
}

/// Visits every scored token as (sentence, token index, head ok, label ok).
template <typename F>
void for_each_scored(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred,
                     const ScoreOptions& opt, F&& f) {
  check_alignment(gold, pred);
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const ParseResult& p = pred[s];
    const bool strict = opt.strict.value_or(p.policy == RepairPolicy::strict);
    for (int i = 0; i < gold[s].size(); ++i) {
      const Token& t = gold[s].tokens[i];
      if (opt.exclude_punct && opt.punct_labels.count(t.label)) continue;
      bool head_ok = p.heads[i] == t.head;
      bool label_ok = p.labels[i] == t.label;
      if (strict) {
        head_ok = head_ok && (p.head_valid.empty() || p.head_valid[i]);
        label_ok = label_ok && (p.label_valid.empty() || p.label_valid[i]);
      }
      f(s, i + 1, head_ok, label_ok);
    }
  }
}

int bucket_of(int value, const std::vector<int>& edges) {
  for (std::size_t b = 0; b < edges.size(); ++b)
    if (value <= edges[b]) return static_cast<int>(b);
  return static_cast<int>(edges.size());
}

std::vector<BucketRow> make_rows(const std::vector<int>& edges, const std::vector<long>& counts,
                                 const std::vector<Tally>& tallies) {
  std::vector<BucketRow> rows;
  int lo = 1;
  for (std::size_t b = 0; b <= edges.size(); ++b) {
    const bool overflow = b == edges.size();
    if (overflow && counts[b] == 0) break;
    BucketRow r;
    r.lo = lo;
    r.hi = overflow ? -1 : edges[b];
    r.count = counts[b];
    r.scored_tokens = tallies[b].tokens;
    r.uas = tallies[b].uas();
    r.las = tallies[b].las();
    rows.push_back(r);
    if (!overflow) lo = edges[b] + 1;
  }
  return rows;
}

void check_edges(const std::vector<int>& edges) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] < 1 || (i > 0 && edges[i] <= edges[i - 1])) {
      throw EvalError("bucket edges must be positive and strictly increasing");
    }
  }
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
  return buf;
}

std::string format_table(const std::string& range_header, const std::string& count_header,
                         const std::vector<BucketRow>& rows, long total_count, const EvalReport& total) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s | %-15s | %-6s | %-6s\n", range_header.c_str(), count_header.c_str(),
                "UAS", "LAS");
  os << line << std::string(58, '-') << '\n';
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-22s | %-15ld | %-6s | %-6s\n", r.range().c_str(), r.count,
                  pct(r.uas).c_str(), pct(r.las).c_str());
    os << line;
  }
  os << std::string(58, '-') << '\n';
  std::snprintf(line, sizeof line, "%-22s | %-15ld | %-6s | %-6s\n", "all", total_count, pct(total.uas).c_str(),
                pct(total.las).c_str());
  os << line;
  return os.str();
}

nlohmann::json rows_json(const std::vector<BucketRow>& rows) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rows) {
    a.push_back({{"range", r.range()},
                 {"lo", r.lo},
                 {"hi", r.hi},
                 {"count", r.count},
                 {"scored_tokens", r.scored_tokens},
                 {"uas", r.uas},
                 {"las", r.las}});
  }
  return a;
}

std::string signed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v * 100.0);
  return buf;
}

}  // namespace

std::vector<int> default_bucket_edges() { return {10, 20, 30, 40, 50, 60, 70}; }

std::string BucketRow::range() const {
  return hi < 0 ? std::to_string(lo) + "+" : std::to_string(lo) + "-" + std::to_string(hi);
}

std::vector<ParseResult> as_parse_results(const std::vector<Sentence>& predicted) {
  std::vector<ParseResult> out;
  out.reserve(predicted.size());
  for (const auto& s : predicted) {
    ParseResult r;
    for (const auto& t : s.tokens) {
      r.heads.push_back(t.head);
      r.labels.push_back(t.label);
    }
    r.slot_valid.assign(s.tokens.size(), true);
    r.head_valid.assign(s.tokens.size(), true);
    r.label_valid.assign(s.tokens.size(), true);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BucketRow> bucket_by_length(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred,
                                        const std::vector<int>& edges, const ScoreOptions& options) {
  check_edges(edges);
  check_alignment(gold, pred);
  std::vector<long> counts(edges.size() + 1, 0);
  std::vector<Tally> tallies(edges.size() + 1);
  for (const auto& s : gold) ++counts[bucket_of(s.size(), edges)];
  for_each_scored(gold, pred, options, [&](std::size_t s, int, bool h, bool l) {
    tallies[bucket_of(gold[s].size(), edges)].add(h, l);
  });
  return make_rows(edges, counts, tallies);
}

std::vector<BucketRow> bucket_by_index(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred,
                                       const std::vector<int>& edges, const ScoreOptions& options) {
  check_edges(edges);
  std::vector<long> counts(edges.size() + 1, 0);
  std::vector<Tally> tallies(edges.size() + 1);
  for_each_scored(gold, pred, options, [&](std::size_t, int index, bool h, bool l) {
    const int b = bucket_of(index, edges);
    ++counts[b];
    tallies[b].add(h, l);
  });
  return make_rows(edges, counts, tallies);
}

EvalReport score(const std::vector<Sentence>& gold, const std::vector<ParseResult>& pred,
                 const ScoreOptions& options) {
  Tally all;
  for_each_scored(gold, pred, options, [&](std::size_t, int, bool h, bool l) { all.add(h, l); });
  EvalReport r;
  r.uas = all.uas();
  r.las = all.las();
  r.token_count = all.tokens;
  r.sentence_count = static_cast<long>(gold.size());
  for (const auto& p : pred) r.invalid_slots += p.invalid_slots();
  r.per_length_bucket = bucket_by_length(gold, pred, options.length_edges, options);
  r.per_index_bucket = bucket_by_index(gold, pred, options.index_edges, options);
  return r;
}

std::string format_length_table(const std::vector<BucketRow>& rows, const EvalReport& total) {
  return format_table("Sentence Length Range", "# of Sentences", rows, total.sentence_count, total);
}

std::string format_index_table(const std::vector<BucketRow>& rows, const EvalReport& total) {
  return format_table("Index range", "# of Indices", rows, total.token_count, total);
}

nlohmann::json EvalReport::to_json() const {
  return {{"uas", uas},
          {"las", las},
          {"token_count", token_count},
          {"sentence_count", sentence_count},
          {"invalid_slots", invalid_slots},
          {"per_length_bucket", rows_json(per_length_bucket)},
          {"per_index_bucket", rows_json(per_index_bucket)}};
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "UAS = " << pct(uas) << "%\n"
     << "LAS = " << pct(las) << "%\n"
     << "tokens = " << token_count << ", sentences = " << sentence_count << '\n';
  if (invalid_slots > 0) os << "invalid slots (repaired) = " << invalid_slots << '\n';
  return os.str();
}

nlohmann::json SpeedReport::to_json() const {
  return {{"sentences_per_second", sentences_per_second},
          {"total_sentences", total_sentences},
          {"wall_seconds", wall_seconds},
          {"batch_size", batch_size},
          {"threads", threads}};
}

std::string SpeedReport::to_text() const {
  char buf[200];
  std::snprintf(buf, sizeof buf, "Speed(sent/s) = %.2f  (%ld sentences in %.3f s, batch size %d, threads %d)\n",
                sentences_per_second, total_sentences, wall_seconds, batch_size, threads);
  return buf;
}

SpeedReport benchmark_speed(const ModelBundle& bundle, const PromptVocab& vocab, const TemplateConfig& tmpl,
                            const std::vector<Sentence>& data, const BenchOptions& options) {
  if (data.empty()) throw EvalError("benchmark: empty dataset");
  if (options.batch_size < 1) throw EvalError("benchmark: batch size must be >= 1");
  using Clock = std::chrono::steady_clock;

  auto run_batch = [&](std::size_t lo, std::size_t hi) {
    std::vector<Sentence> batch(data.begin() + lo, data.begin() + hi);
    auto parsed = parse_corpus(bundle, vocab, tmpl, batch, {}, {}, options.threads);
    return static_cast<long>(parsed.size());
  };

  run_batch(0, std::min<std::size_t>(options.batch_size, data.size()));  // warm-up

  SpeedReport r;
  r.batch_size = options.batch_size;
  r.threads = options.threads;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do {
    for (std::size_t lo = 0; lo < data.size(); lo += options.batch_size) {
      r.total_sentences += run_batch(lo, std::min(data.size(), lo + options.batch_size));
    }
    elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  } while (elapsed < options.min_seconds);
  r.wall_seconds = elapsed;
  r.sentences_per_second = static_cast<double>(r.total_sentences) / r.wall_seconds;
  return r;
}

std::string_view to_string(AblationVariant v) {
  return v == AblationVariant::without_abs ? "w/o P_abs" : "w/o P_POS";
}

AblationTable run_ablation(const std::vector<Sentence>& train_set, const std::vector<Sentence>& test_set,
                           const PromptVocab& vocab, const AblationSetup& setup,
                           const std::vector<AblationVariant>& variants) {
  std::vector<std::pair<std::string, TemplateConfig>> runs{{"SPT-DP", setup.base}};
  for (auto v : variants) {
    TemplateConfig t = setup.base;
    if (v == AblationVariant::without_abs) t.use_abs = false;
    else t.use_pos = false;
    runs.emplace_back(std::string("SPT-DP (") + std::string(to_string(v)) + ")", t);
  }

  AblationTable table;
  for (const auto& [name, tmpl] : runs) {
    AblationRow row;
    row.name = name;
    row.tmpl = tmpl;
    try {
      auto pairs = make_training_pairs(train_set, vocab, tmpl);
      for (const auto& pair : pairs) {
        for (int id : tokenize(pair.masked, vocab).ids) row.abs_prompts_in_input += vocab.index_of(id) >= 0 ? 1 : 0;
      }
      ModelConfig mc = setup.model;
      mc.vocab_size = vocab.size();
      ModelBundle bundle = ModelBundle::create(mc);
      row.losses = train(bundle, pairs, vocab, setup.train, setup.seed).losses;
      auto pred = parse_corpus(bundle, vocab, tmpl, test_set, {RepairPolicy::to_root, setup.fallback_label});
      auto report = score(test_set, pred);
      row.uas = report.uas;
      row.las = report.las;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  const auto& base = table.rows.front();
  for (auto& r : table.rows) {
    r.delta_uas = r.uas - base.uas;
    r.delta_las = r.las - base.las;
  }
  return table;
}

nlohmann::json AblationTable::to_json() const {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : rows) {
    a.push_back({{"method", r.name},
                 {"use_abs", r.tmpl.use_abs},
                 {"use_pos", r.tmpl.use_pos},
                 {"uas", r.uas},
                 {"las", r.las},
                 {"delta_uas", r.delta_uas},
                 {"delta_las", r.delta_las},
                 {"abs_prompts_in_input", r.abs_prompts_in_input},
                 {"losses", r.losses},
                 {"error", r.error}});
  }
  return {{"rows", a}};
}

std::string AblationTable::to_text() const {
  std::ostringstream os;
  char line[200];
  std::snprintf(line, sizeof line, "%-22s | %-16s | %-16s\n", "Method", "UAS", "LAS");
  os << line << std::string(60, '-') << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.error.empty()) {
      os << r.name << " | failed: " << r.error << '\n';
      continue;
    }
    std::string u = pct(r.uas), l = pct(r.las);
    if (i > 0) {
      u += " (" + signed2(r.delta_uas) + ")";
      l += " (" + signed2(r.delta_las) + ")";
    }
    std::snprintf(line, sizeof line, "%-22s | %-16s | %-16s\n", r.name.c_str(), u.c_str(), l.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace spt
