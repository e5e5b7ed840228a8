// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers. Exit status is non-zero when any gating criterion fails; the
// ablation direction is an empirical finding about the data and is reported
// without gating.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "spt/checkpoint.hpp"
#include "spt/codec.hpp"
#include "spt/eval.hpp"
#include "spt/grad_check.hpp"
#include "spt/loss.hpp"
#include "spt/predict.hpp"
#include "spt/synthetic.hpp"
#include "spt/train.hpp"

using namespace spt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kWork = fs::temp_directory_path() / "spt_acceptance";

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string only;  // optional substring filter from argv[1]
int failures = 0;
int empirical_failures = 0;

void report(const std::string& name, const std::function<Verdict()>& check, bool gating = true) {
  if (!only.empty() && name.find(only) == std::string::npos) return;
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.1fs", secs);
  std::cout << (v.pass ? "PASS  " : "FAIL  ") << name << (gating ? "" : " (non-gating)") << "  [" << timing
            << "]  " << v.detail << std::endl;
  if (!v.pass) ++(gating ? failures : empirical_failures);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cli(const std::string& args, const fs::path& out = {}) {
  std::string cmd = "cd '" + kWork.string() + "' && '" SPT_CLI_PATH "' " + args;
  cmd += out.empty() ? " > /dev/null" : " > '" + out.string() + "'";
  cmd += " 2>> '" + (kWork / "cli_stderr.log").string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<Sentence> ud_sample() {
  std::vector<Sentence> all;
  for (int k = 1; k <= 12; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "/ud_sample/l%02d.conllu", k);
    auto part = read_conllu_file(SPT_DATA_DIR + std::string(name));
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

std::vector<int> heads_of(const Sentence& s) {
  std::vector<int> h;
  for (const auto& t : s.tokens) h.push_back(t.head);
  return h;
}

std::vector<std::string> labels_of(const Sentence& s) {
  std::vector<std::string> l;
  for (const auto& t : s.tokens) l.push_back(t.label);
  return l;
}

const std::vector<TemplateConfig> kTemplates{{true, true, 128}, {false, true, 128}, {true, false, 128},
                                             {false, false, 128}};

// ---- shared synthetic-grammar experiment ------------------------------------

struct GrammarRun {
  std::vector<Sentence> train, test;
  PromptVocab vocab;
  AblationTable table;
  ModelConfig model;
  TrainConfig tc;
  double seconds = 0;
};

GrammarRun& grammar_run() {
  static GrammarRun run = [] {
    GrammarRun r;
    const auto corpus = generate_grammar_corpus(1100, 42);
    r.train.assign(corpus.begin(), corpus.begin() + 1000);
    r.test.assign(corpus.begin() + 1000, corpus.end());
    r.vocab = build_vocab({r.train}, TemplateConfig{});
    r.model = ModelConfig{.arch = Arch::encoder,
                          .layers = 2,
                          .heads = 4,
                          .model_dim = 64,
                          .ff_dim = 256,
                          .max_positions = 512,
                          .vocab_size = r.vocab.size(),
                          .dropout = 0.1,
                          .seed = 5};
    r.tc.batch_size = 16;
    r.tc.learning_rate = 2e-3;
    r.tc.epochs = 20;
    AblationSetup setup{.base = TemplateConfig{},
                        .model = r.model,
                        .train = r.tc,
                        .seed = 5,
                        .fallback_label = most_frequent_label(r.train)};
    const auto t0 = Clock::now();
    r.table = run_ablation(r.train, r.test, r.vocab, setup, {AblationVariant::without_abs});
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

// ---- criteria ---------------------------------------------------------------

Verdict round_trip() {
  const auto t0 = Clock::now();
  const auto ud = ud_sample();
  const auto synthetic = generate_random_trees(1000, 2024, 1, 60);
  long checked = 0, wrong = 0;
  for (const auto* corpus : {&ud, &synthetic}) {
    const auto vocab = build_vocab({*corpus}, TemplateConfig{});
    for (const auto& tmpl : kTemplates)
      for (const auto& s : *corpus) {
        const auto m = mask(encode(s, vocab, tmpl));
        const auto h = heads_of(s);
        const auto l = labels_of(s);
        const auto r = decode(to_lexemes(fill(m, h, l)), s.size(), vocab, tmpl);
        ++checked;
        if (r.heads != h || r.labels != l || r.invalid_slots() != 0) ++wrong;
      }
  }
  const double secs = seconds_since(t0);
  return {wrong == 0 && ud.size() >= 500 && secs < 10.0,
          std::to_string(checked - wrong) + "/" + std::to_string(checked) + " sentence-encodings recovered (" +
              std::to_string(ud.size()) + " UD-style + 1000 random, 4 template variants), " + num(secs, "%.2f") +
              "s < 10s"};
}

Verdict length_invariant() {
  long checked = 0, unequal = 0;
  for (const auto& corpus : {ud_sample(), generate_random_trees(1000, 2024, 1, 60), generate_grammar_corpus(1100, 42)}) {
    const auto vocab = build_vocab({corpus}, TemplateConfig{});
    for (const auto& tmpl : kTemplates)
      for (const auto& s : corpus) {
        const auto d = encode(s, vocab, tmpl);
        ++checked;
        if (tokenize(mask(d), vocab).size() != tokenize(d, vocab).size()) ++unequal;
      }
  }
  return {unequal == 0, std::to_string(unequal) + " length mismatches over " + std::to_string(checked) + " encodings"};
}

Verdict loss_oracle() {
  double worst = 0;
  for (int V : {5, 64, 300}) {
    for (Arch arch : {Arch::encoder, Arch::decoder}) {
      auto b = ModelBundle::create(ModelConfig{.arch = arch, .layers = 1, .heads = 2, .model_dim = 8, .ff_dim = 8,
                                               .max_positions = 32, .vocab_size = V, .dropout = 0.0, .seed = 1});
      b.params.final_norm_gain.setZero();
      b.params.final_norm_bias.setZero();
      TokenSequence x, y;
      x.ids = {1, 2, 3, 4};
      y.ids = {4, 3, 2, 1};
      const double l = arch == Arch::encoder ? loss_mlm(b, x, y, LossScope::all_positions) : loss_autoregressive(b, x, y);
      worst = std::max(worst, std::abs(l - std::log(static_cast<double>(V))));
    }
  }
  // Three-token instance against a longhand softmax.
  const ModelConfig c{.arch = Arch::encoder, .layers = 2, .heads = 2, .model_dim = 8, .ff_dim = 12,
                      .max_positions = 8, .vocab_size = 6, .dropout = 0.0, .seed = 3};
  auto p = init_parameters<double>(c, 3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.5);
  visit_tensors(p, [&](const std::string&, Matrix<double>& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += n(rng);
  });
  TokenSequence x, y;
  x.ids = {0, 5, 2};
  y.ids = {1, 5, 3};
  const auto logits = forward(c, p, std::span<const int>(x.ids));
  long double expect = 0;
  for (int r = 0; r < 3; ++r) {
    long double z = 0;
    for (int k = 0; k < 6; ++k) z += std::exp(static_cast<long double>(logits(r, k)));
    expect += -(static_cast<long double>(logits(r, y.ids[r])) - std::log(z));
  }
  expect /= 3;
  const double got = loss_mlm(c, p, x, y, LossScope::all_positions);
  const double oracle_err = std::abs(got - static_cast<double>(expect));
  return {worst <= 1e-6 && oracle_err <= 1e-6,
          "uniform-logit |loss - ln V| max " + num(worst, "%.1e") + " (both losses, V in {5,64,300}); "
          "3-token oracle error " + num(oracle_err, "%.1e")};
}

Verdict gradient_check() {
  const auto t0 = Clock::now();
  const auto ok = grad_check(GradCheckConfig{});
  GradCheckConfig bad;
  bad.fault = GradFault::flip_gelu_derivative;
  const auto mutated = grad_check(bad);
  const double secs = seconds_since(t0);
  return {ok.passed && ok.worst_relative_error() < 1e-3 && !mutated.passed && secs < 120,
          "worst relative error " + num(ok.worst_relative_error(), "%.2e") + " over " +
              std::to_string(ok.tensors.size()) + " tensor checks (both losses); sign-flip mutation " +
              (mutated.passed ? "NOT detected" : "detected") + "; " + num(secs, "%.1f") + "s < 120s"};
}

Verdict overfit() {
  const auto t0 = Clock::now();
  const std::string cfg = SPT_SOURCE_DIR "/configs/overfit.json";
  const std::string data = SPT_DATA_DIR "/ud_sample/l01.conllu";
  const int code = cli("train --config '" + cfg + "' --train '" + data + "' -o overfit");
  const double secs = seconds_since(t0);
  if (code != 0) return {false, "train exited with " + std::to_string(code)};
  const auto vocab = load_vocab((kWork / "overfit/vocab.txt").string());
  const auto ckpt = load_checkpoint((kWork / "overfit/model.ckpt").string(), &vocab);
  const auto corpus = read_conllu_file(data);
  const auto pairs = make_training_pairs(corpus, vocab, ckpt.meta.tmpl);
  const double acc = slot_accuracy(ckpt.bundle, pairs, vocab);
  const auto& m = ckpt.bundle.config;
  return {acc == 1.0 && m.layers == 4 && m.model_dim == 128 && corpus.size() == 50 &&
              ckpt.meta.epochs_completed <= 300 && secs < 600,
          "slot accuracy " + num(acc) + " on " + std::to_string(corpus.size()) + " sentences after " +
              std::to_string(ckpt.meta.epochs_completed) + " epochs (" + std::to_string(m.layers) + " layers, dim " +
              std::to_string(m.model_dim) + "), " + num(secs, "%.0f") + "s < 600s"};
}

Verdict generalization() {
  const auto& r = grammar_run();
  const auto prev = score(r.test, as_parse_results(attach_to_previous(r.test)));
  const auto root = score(r.test, as_parse_results(attach_to_root(r.test)));
  const auto& base = r.table.rows.at(0);
  const double margin = std::min(base.uas - prev.uas, base.uas - root.uas);
  return {base.error.empty() && margin >= 0.10,
          "test UAS " + num(base.uas) + " vs attach-to-previous " + num(prev.uas) + " and attach-to-root " +
              num(root.uas) + " (margin " + num(margin * 100, "%.1f") + " points >= 10; 1000 train / 100 test, " +
              std::to_string(r.tc.epochs) + " epochs)"};
}

Verdict ablation_direction() {
  const auto& r = grammar_run();
  std::cout << r.table.to_text();
  const auto& base = r.table.rows.at(0);
  const auto& wo = r.table.rows.at(1);
  return {base.error.empty() && wo.error.empty() && wo.abs_prompts_in_input == 0 && wo.las <= base.las,
          "w/o P_abs LAS " + num(wo.las) + " vs base LAS " + num(base.las) + " (delta " +
              num(wo.delta_las * 100, "%+.2f") + "); abs prompts seen in w/o-P_abs inputs: " +
              std::to_string(wo.abs_prompts_in_input) + "; both runs " + num(r.seconds, "%.0f") + "s"};
}

Verdict constrained_decoding() {
  const auto corpus = generate_grammar_corpus(500, 77);
  const std::vector<Sentence> train(corpus.begin(), corpus.begin() + 300);
  const std::vector<Sentence> held(corpus.begin() + 300, corpus.end());
  TemplateConfig tmpl;
  const auto vocab = build_vocab({train}, tmpl);
  auto bundle = ModelBundle::create(ModelConfig{.arch = Arch::decoder, .layers = 2, .heads = 2, .model_dim = 32,
                                                .ff_dim = 64, .max_positions = 640, .vocab_size = vocab.size(),
                                                .dropout = 0.0, .seed = 9});
  TrainConfig tc;
  tc.learning_rate = 2e-3;
  tc.epochs = 3;
  spt::train(bundle, make_training_pairs(train, vocab, tmpl), vocab, tc, 9);

  const int per = tokens_per_unit(tmpl);
  long ok = 0;
  std::vector<ParseResult> parses;
  for (const auto& s : held) {
    const auto masked = encode_masked(s, vocab, tmpl);
    const auto in = to_lexemes(masked);
    const auto out = predict_decoder_constrained(bundle, masked, vocab);
    bool good = out.size() == in.size();
    for (std::size_t p = 0; good && p < in.size(); ++p) {
      const int slot = static_cast<int>(p) % per;
      const int id = vocab.prompt_id(out[p]);
      if (slot == 1) good = vocab.index_of(id) >= 0 && vocab.index_of(id) <= s.size();
      else if (slot == 2) good = id >= 0 && vocab.token_class(id) == TokenClass::label;
      else good = out[p] == in[p];
    }
    if (good) {
      const auto r = decode(out, s.size(), vocab, tmpl);
      good = r.scaffold_errors == 0 && unflatten(flatten(masked), vocab, tmpl) == masked;
      parses.push_back(r);
    }
    ok += good;
  }
  std::string quality;
  if (static_cast<long>(parses.size()) == static_cast<long>(held.size()))
    quality = "; decoder UAS " + num(score(held, parses).uas) + " after " + std::to_string(tc.epochs) + " epochs";
  return {ok == static_cast<long>(held.size()) && held.size() == 200,
          std::to_string(ok) + "/" + std::to_string(held.size()) +
              " generations with byte-equal scaffold and legal [HEAD]/[DEP] fills" + quality};
}

struct Tally {
  long n = 0, heads = 0, both = 0;
};

Verdict metric_oracle() {
  const auto& r = grammar_run();
  const auto base = attach_to_previous(r.test);
  std::mt19937_64 rng(31);
  int exact = 0, bounds_ok = 0;
  const auto labels = r.vocab.labels();
  for (int trial = 0; trial < 25; ++trial) {
    auto pred = trial % 2 ? r.test : base;
    std::bernoulli_distribution flip(0.04 * (trial + 1));
    for (auto& s : pred)
      for (auto& t : s.tokens) {
        if (flip(rng)) t.head = std::uniform_int_distribution<int>(0, s.size())(rng);
        if (flip(rng)) t.label = labels[std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng)];
      }
    ScoreOptions o;
    o.exclude_punct = trial % 3 == 0;
    const auto rep = score(r.test, as_parse_results(pred), o);
    Tally t;
    for (std::size_t s = 0; s < pred.size(); ++s)
      for (std::size_t k = 0; k < pred[s].tokens.size(); ++k) {
        const auto& g = r.test[s].tokens[k];
        const auto& p = pred[s].tokens[k];
        if (o.exclude_punct && g.label == "punct") continue;
        ++t.n;
        t.heads += g.head == p.head;
        t.both += g.head == p.head && g.label == p.label;
      }
    exact += rep.token_count == t.n && rep.uas == static_cast<double>(t.heads) / t.n &&
             rep.las == static_cast<double>(t.both) / t.n;
    bool b = rep.las <= rep.uas;
    for (const auto& row : rep.per_length_bucket) b = b && row.las <= row.uas;
    for (const auto& row : rep.per_index_bucket) b = b && row.las <= row.uas;
    bounds_ok += b;
  }
  return {exact == 25 && bounds_ok == 25, std::to_string(exact) + "/25 corrupted sets match the brute-force count exactly; LAS <= UAS on " +
                                              std::to_string(bounds_ok) + "/25 reports and all their buckets"};
}

Verdict bucket_analyses() {
  // Gold against itself, then a synthetic set with corrupted heads and an
  // overflow bucket of 65-80 word sentences.
  const std::string gold = SPT_DATA_DIR "/ud_sample/l07.conllu";
  std::vector<Sentence> mixed = generate_grammar_corpus(300, 5);
  const auto long_ones = generate_random_trees(5, 6, 65, 80);
  mixed.insert(mixed.end(), long_ones.begin(), long_ones.end());
  write_conllu_file((kWork / "mixed_gold.conllu").string(), mixed);
  std::mt19937_64 rng(2);
  auto pred = mixed;
  for (auto& s : pred)
    for (int k = 0; k < s.size(); ++k)
      if (std::bernoulli_distribution(0.3)(rng)) {
        // Any head but the token itself, so the file stays writable.
        const int h = std::uniform_int_distribution<int>(0, s.size() - 1)(rng);
        s.tokens[k].head = h >= k + 1 ? h + 1 : h;
      }
  write_conllu_file((kWork / "mixed_pred.conllu").string(), pred);

  std::string problems;
  for (const auto& [g, p] : {std::pair<std::string, std::string>{gold, gold},
                             {(kWork / "mixed_gold.conllu").string(), (kWork / "mixed_pred.conllu").string()}}) {
    if (cli("analyze -g '" + g + "' -p '" + p + "' --format json", kWork / "analyze.json") != 0) return {false, "analyze failed"};
    if (cli("analyze -g '" + g + "' -p '" + p + "'", kWork / "analyze.txt") != 0) return {false, "analyze failed"};
    const auto j = nlohmann::json::parse(slurp(kWork / "analyze.json"));
    const auto text = slurp(kWork / "analyze.txt");
    const auto gs = read_conllu_file(g);
    const auto ps = read_conllu_file(p);
    long sentences = 0, length_tokens = 0, indices = 0;
    const std::vector<std::string> ranges{"1-10", "11-20", "21-30", "31-40", "41-50", "51-60", "61-70"};
    for (std::size_t b = 0; b < j["per_length_bucket"].size(); ++b) {
      const auto& row = j["per_length_bucket"][b];
      if (b < ranges.size() && row["range"] != ranges[b]) problems += " length range " + row["range"].get<std::string>();
      sentences += row["count"].get<long>();
      length_tokens += row["scored_tokens"].get<long>();
      // Recount this bucket independently.
      long n = 0, h = 0;
      for (std::size_t s = 0; s < gs.size(); ++s) {
        const int len = gs[s].size();
        const int lo = row["lo"].get<int>(), hi = row["hi"].get<int>();
        if (len < lo || (hi >= 0 && len > hi)) continue;
        for (int k = 0; k < len; ++k) {
          ++n;
          h += gs[s].tokens[k].head == ps[s].tokens[k].head;
        }
      }
      if (n != row["scored_tokens"].get<long>() || (n > 0 && row["uas"].get<double>() != static_cast<double>(h) / n))
        problems += " length bucket " + row["range"].get<std::string>() + " recount differs";
    }
    for (std::size_t b = 0; b < j["per_index_bucket"].size(); ++b) {
      const auto& row = j["per_index_bucket"][b];
      if (b < ranges.size() && row["range"] != ranges[b]) problems += " index range " + row["range"].get<std::string>();
      indices += row["count"].get<long>();
    }
    if (sentences != j["sentence_count"].get<long>()) problems += " sentence counts do not sum";
    if (length_tokens != j["token_count"].get<long>()) problems += " length-bucket tokens do not sum";
    if (indices != j["token_count"].get<long>()) problems += " index counts do not sum";
    if (text.find("Sentence Length Range") == std::string::npos || text.find("# of Indices") == std::string::npos)
      problems += " text tables missing";
  }
  return {problems.empty(), problems.empty() ? "default length and index ranges (plus overflow row), per-bucket recounts match, "
                                               "bucket counts sum to totals on 2 corpora"
                                             : problems};
}

Verdict throughput() {
  const std::string args = "bench --checkpoint overfit/model.ckpt --vocab overfit/vocab.txt -i '" SPT_DATA_DIR
                           "/ud_sample/l02.conllu' --format json --batch-size 1 --min-seconds 2";
  // Words missing from the overfit vocabulary become <unk>; that is fine for timing.
  if (cli(args, kWork / "bench1.json") != 0 || cli(args, kWork / "bench2.json") != 0) return {false, "bench failed"};
  const auto a = nlohmann::json::parse(slurp(kWork / "bench1.json"));
  const auto b = nlohmann::json::parse(slurp(kWork / "bench2.json"));
  bool identity = true;
  for (const auto* j : {&a, &b})
    identity = identity && (*j)["sentences_per_second"].get<double>() ==
                               (*j)["total_sentences"].get<double>() / (*j)["wall_seconds"].get<double>();
  const double r1 = a["sentences_per_second"].get<double>(), r2 = b["sentences_per_second"].get<double>();
  const double ratio = r2 / r1;
  return {identity && a["batch_size"] == 1 && ratio >= 0.8 && ratio <= 1.2,
          "batch size 1: " + num(r1, "%.1f") + " and " + num(r2, "%.1f") + " sent/s (ratio " + num(ratio, "%.3f") +
              ", within +-20%); rate identity exact: " + (identity ? "yes" : "no")};
}

Verdict determinism() {
  const std::string data = SPT_DATA_DIR "/ud_sample/l06.conllu";
  std::ofstream(kWork / "det.json") << R"({"model": {"layers": 2, "heads": 2, "model_dim": 32, "ff_dim": 64},
    "train": {"batch_size": 8, "learning_rate": 2e-3, "epochs": 4}, "seed": 12})";
  std::vector<std::string> outputs{"vocab.txt", "vocab.txt.config.json", "encoded.txt", "masked.txt",
                                   "run/loss.csv", "run/model.ckpt", "run/resolved_config.json",
                                   "pred.conllu", "pred.conllu.config.json", "eval.txt", "eval.json",
                                   "analyze.txt"};
  auto run_all = [&](const std::string& dir) {
    const std::string d = "det_" + dir + "/";
    fs::create_directories(kWork / d);
    bool ok = cli("vocab build -i '" + data + "' -o " + d + "vocab.txt") == 0;
    ok = ok && cli("encode -i '" + data + "' --vocab " + d + "vocab.txt -o " + d + "encoded.txt") == 0;
    ok = ok && cli("encode --mask -i '" + data + "' --vocab " + d + "vocab.txt -o " + d + "masked.txt") == 0;
    ok = ok && cli("train --config det.json --train '" + data + "' --vocab " + d + "vocab.txt -o " + d + "run") == 0;
    ok = ok && cli("predict --checkpoint " + d + "run/model.ckpt --vocab " + d + "vocab.txt -i '" + data + "' -o " + d +
                   "pred.conllu --threads 2") == 0;
    ok = ok && cli("eval -g '" + data + "' -p " + d + "pred.conllu -o " + d + "eval.txt") == 0;
    ok = ok && cli("eval --format json -g '" + data + "' -p " + d + "pred.conllu -o " + d + "eval.json") == 0;
    ok = ok && cli("analyze -g '" + data + "' -p " + d + "pred.conllu -o " + d + "analyze.txt") == 0;
    return ok;
  };
  if (!run_all("a") || !run_all("b")) return {false, "a command failed"};
  int same = 0;
  std::string differing;
  for (const auto& f : outputs) {
    // Snapshots name their own directory; compare them with it normalised.
    auto a = slurp(kWork / ("det_a/" + f)), b = slurp(kWork / ("det_b/" + f));
    for (std::size_t p; (p = b.find("det_b/")) != std::string::npos;) b.replace(p, 6, "det_a/");
    if (a == b && !a.empty()) ++same;
    else differing += " " + f;
  }
  const bool seeded = slurp(kWork / "det_a/run/loss.csv") == slurp(kWork / "det_b/run/loss.csv");
  return {same == static_cast<int>(outputs.size()) && seeded,
          std::to_string(same) + "/" + std::to_string(outputs.size()) +
              " artifacts byte-identical across two runs of vocab/encode/train/predict/eval/analyze" +
              (differing.empty() ? "" : "; differ:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) only = argv[1];
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  std::cout << "Acceptance suite (work dir " << kWork.string() << ")" << std::endl;

  report("round-trip correctness", round_trip);
  report("length invariant", length_invariant);
  report("loss oracle", loss_oracle);
  report("gradient check", gradient_check);
  report("overfit capability", overfit);
  report("generalization", generalization);
  report("ablation direction (w/o P_abs LAS <= base LAS)", ablation_direction, false);
  report("constrained decoding", constrained_decoding);
  report("metric oracle", metric_oracle);
  report("bucket analyses", bucket_analyses);
  report("throughput", throughput);
  report("determinism", determinism);

  std::cout << (failures == 0 ? "all gating criteria passed" : std::to_string(failures) + " gating criteria failed");
  if (empirical_failures > 0) std::cout << "; " << empirical_failures << " non-gating criterion failed";
  std::cout << std::endl;
  return failures == 0 ? 0 : 1;
}
