// spt: command-line front end. Exit codes: 0 success, 2 input or usage
// error, 3 training or other runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spt/attention.hpp"
#include "spt/checkpoint.hpp"
#include "spt/codec.hpp"
#include "spt/config_json.hpp"
#include "spt/error.hpp"
#include "spt/eval.hpp"
#include "spt/grad_check.hpp"
#include "spt/predict.hpp"
#include "spt/prompt_vocab.hpp"
#include "spt/run_config.hpp"
#include "spt/synthetic.hpp"
#include "spt/train.hpp"
#include "spt/treebank.hpp"

namespace fs = std::filesystem;
using namespace spt;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kRuntimeError = 3;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ContractError("failed writing '" + path + "'");
}

// Provenance snapshot next to an output file: "<output>.config.json".
void write_snapshot(const std::string& output, const nlohmann::json& j) {
  if (output.empty() || output == "-") return;
  write_text(output + ".config.json", j.dump(2) + "\n");
}

std::vector<int> parse_edges(const std::string& csv) {
  std::vector<int> edges;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      edges.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ContractError("bucket edges must be comma-separated integers, got '" + csv + "'");
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i] < 1 || (i > 0 && edges[i] <= edges[i - 1]))
      throw ContractError("bucket edges must be positive and increasing");
  return edges;
}

/// Settings shared by every subcommand: an optional config file, a seed and
/// a thread cap. Precedence: defaults < file < SPT_SEED < flags.
struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--seed", seed, "Random seed (overrides the config and SPT_SEED)");
    cmd->add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);
  }

  RunConfig resolve() const {
    RunConfig rc;
    if (!config_path.empty()) {
      require_existing({{"config", config_path}});
      rc = load_run_config(config_path);
    }
    apply_seed_env(rc);
    if (seed) rc.seed = *seed;
    if (threads) rc.threads = *threads;
    return rc;
  }
};

// ---- vocab -----------------------------------------------------------------

struct VocabArgs {
  Common common;
  std::vector<std::string> inputs;
  std::string output;
  std::optional<int> max_index;
  std::optional<int> min_freq;
};

int cmd_vocab_build(const VocabArgs& a) {
  RunConfig rc = a.common.resolve();
  if (a.max_index) rc.tmpl.max_index = *a.max_index;
  if (a.min_freq) rc.min_word_freq = *a.min_freq;
  std::vector<std::vector<Sentence>> banks;
  for (const auto& p : a.inputs) {
    require_existing({{"treebank", p}});
    banks.push_back(read_conllu_file(p));
  }
  const PromptVocab vocab = build_vocab(banks, rc.tmpl, rc.min_word_freq);
  save_vocab(vocab, a.output);
  nlohmann::json snap = rc.to_json();
  snap["command"] = "vocab build";
  snap["inputs"] = a.inputs;
  write_snapshot(a.output, snap);
  std::cerr << "vocab: " << vocab.size() << " tokens, " << vocab.labels().size() << " labels, "
            << vocab.pos_tags().size() << " POS tags, " << vocab.words().size() << " words\n";
  return kOk;
}

int cmd_vocab_unify(const VocabArgs& a) {
  std::vector<PromptVocab> parts;
  for (const auto& p : a.inputs) {
    require_existing({{"vocab", p}});
    parts.push_back(load_vocab(p));
  }
  const PromptVocab global = unify_labels(parts);
  save_vocab(global, a.output);
  write_snapshot(a.output, {{"command", "vocab unify"}, {"inputs", a.inputs}});
  std::cerr << "unified " << parts.size() << " vocabularies: " << global.size() << " tokens, "
            << global.labels().size() << " labels\n";
  return kOk;
}

// ---- encode ----------------------------------------------------------------

struct EncodeArgs {
  Common common;
  std::string input, vocab, output;
  bool mask = false, ablate_abs = false, ablate_pos = false;
};

int cmd_encode(const EncodeArgs& a) {
  RunConfig rc = a.common.resolve();
  require_existing({{"treebank", a.input}, {"vocab", a.vocab}});
  const PromptVocab vocab = load_vocab(a.vocab);
  TemplateConfig tmpl = rc.tmpl;
  tmpl.max_index = vocab.max_index();
  if (a.ablate_abs) tmpl.use_abs = false;
  if (a.ablate_pos) tmpl.use_pos = false;
  std::string text;
  for (const auto& s : read_conllu_file(a.input)) {
    const PromptedSentence d = a.mask ? encode_masked(s, vocab, tmpl) : encode(s, vocab, tmpl);
    text += flatten(d);
    text += '\n';
  }
  write_text(a.output, text);
  return kOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string train_path, vocab, output_dir, resume;
  std::optional<int> epochs;
  std::optional<int> stop_after;
  std::optional<std::string> arch;
};

int cmd_train(const TrainArgs& a) {
  RunConfig rc = a.common.resolve();
  if (!a.train_path.empty()) rc.paths.train = a.train_path;
  if (!a.vocab.empty()) rc.paths.vocab = a.vocab;
  if (!a.output_dir.empty()) rc.paths.output_dir = a.output_dir;
  if (a.epochs) rc.train.epochs = *a.epochs;
  if (a.arch) rc.model.arch = parse_arch(*a.arch);
  if (rc.paths.output_dir.empty()) throw ContractError("output_dir is not set");
  require_existing({{"training treebank", rc.paths.train}});
  rc.train.validate();

  const auto corpus = read_conllu_file(rc.paths.train);
  fs::create_directories(rc.paths.output_dir);
  const fs::path out_dir(rc.paths.output_dir);

  PromptVocab vocab;
  if (!rc.paths.vocab.empty() && fs::exists(rc.paths.vocab)) {
    vocab = load_vocab(rc.paths.vocab);
  } else {
    vocab = build_vocab({corpus}, rc.tmpl, rc.min_word_freq);
    if (rc.paths.vocab.empty()) rc.paths.vocab = (out_dir / "vocab.txt").string();
    save_vocab(vocab, rc.paths.vocab);
  }
  rc.tmpl.max_index = vocab.max_index();
  rc.model.vocab_size = vocab.size();
  if (rc.paths.checkpoint.empty()) rc.paths.checkpoint = (out_dir / "model.ckpt").string();

  const auto pairs = make_training_pairs(corpus, vocab, rc.tmpl);
  CheckpointMeta meta;
  meta.tmpl = rc.tmpl;
  meta.fallback_label = most_frequent_label(corpus);

  ModelBundle bundle;
  TrainOptions opts;
  if (!a.resume.empty()) {
    require_existing({{"checkpoint", a.resume}});
    auto loaded = load_checkpoint(a.resume, &vocab);
    if (!(loaded.meta.tmpl == rc.tmpl)) throw ContractError("resumed checkpoint uses a different template");
    bundle = std::move(loaded.bundle);
    rc.model = bundle.config;
    opts.start_epoch = loaded.meta.epochs_completed;
    if (opts.start_epoch >= rc.train.epochs) throw ContractError("checkpoint already completed all epochs");
  } else {
    rc.model.seed = rc.seed;
    bundle = ModelBundle::create(rc.model);
  }

  nlohmann::json snap = rc.to_json();
  snap["command"] = "train";
  if (!a.resume.empty()) snap["resumed_from"] = a.resume;
  write_text((out_dir / "resolved_config.json").string(), snap.dump(2) + "\n");

  if (a.stop_after) opts.stop_epoch = *a.stop_after;
  std::string trace = "epoch,loss\n";
  int completed = opts.start_epoch;
  opts.on_epoch = [&](int epoch, double loss, const ModelBundle& b) {
    trace += std::to_string(epoch) + "," + fmt("%.9g", loss) + "\n";
    completed = epoch;
    std::cerr << "epoch " << epoch << " loss " << fmt("%.6f", loss) << "\n";
    if (rc.stop_at_accuracy && epoch % rc.accuracy_check_every == 0) {
      const double acc = slot_accuracy(b, pairs, vocab);
      std::cerr << "  slot accuracy " << fmt("%.4f", acc) << "\n";
      if (acc >= *rc.stop_at_accuracy) return false;
    }
    return true;
  };

  try {
    train(bundle, pairs, vocab, rc.train, rc.seed, opts);
  } catch (const TrainingError&) {
    write_text((out_dir / "loss.csv").string(), trace);
    throw;
  }
  write_text((out_dir / "loss.csv").string(), trace);
  meta.epochs_completed = completed;
  meta.extra = {{"seed", rc.seed}, {"train", rc.train}};
  save_checkpoint(rc.paths.checkpoint, bundle, vocab, meta);
  std::cerr << "checkpoint written to " << rc.paths.checkpoint << "\n";
  return kOk;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  Common common;
  std::string checkpoint, vocab, input, output;
  bool strict = false, unrestricted = false;
};

int cmd_predict(const PredictArgs& a) {
  RunConfig rc = a.common.resolve();
  require_existing({{"checkpoint", a.checkpoint}, {"vocab", a.vocab}, {"treebank", a.input}});
  const PromptVocab vocab = load_vocab(a.vocab);
  const auto ckpt = load_checkpoint(a.checkpoint, &vocab);
  const auto corpus = read_conllu_file(a.input);

  DecodeOptions dopts;
  dopts.policy = a.strict ? RepairPolicy::strict : RepairPolicy::to_root;
  dopts.fallback_label = ckpt.meta.fallback_label;
  PredictOptions popts;
  popts.restricted = !a.unrestricted;
  const auto parses = parse_corpus(ckpt.bundle, vocab, ckpt.meta.tmpl, corpus, dopts, popts, rc.threads);

  std::vector<Sentence> out;
  out.reserve(corpus.size());
  long invalid = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out.push_back(apply_parse(corpus[i], parses[i]));
    invalid += parses[i].invalid_slots();
  }
  write_text(a.output, write_conllu(out));
  nlohmann::json snap = rc.to_json();
  snap["command"] = "predict";
  snap["checkpoint"] = a.checkpoint;
  snap["vocab"] = a.vocab;
  snap["input"] = a.input;
  snap["strict"] = a.strict;
  snap["restricted"] = !a.unrestricted;
  write_snapshot(a.output, snap);
  std::cerr << "predicted " << out.size() << " sentences (" << invalid << " slots repaired)\n";
  return kOk;
}

// ---- eval / analyze --------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string gold, pred, output, format = "text";
  bool exclude_punct = false;
  std::string length_edges, index_edges;
};

EvalReport score_files(const EvalArgs& a, RunConfig& rc) {
  require_existing({{"gold treebank", a.gold}, {"predicted treebank", a.pred}});
  if (a.exclude_punct) rc.eval.exclude_punct = true;
  if (!a.length_edges.empty()) rc.eval.length_edges = parse_edges(a.length_edges);
  if (!a.index_edges.empty()) rc.eval.index_edges = parse_edges(a.index_edges);
  const auto gold = read_conllu_file(a.gold);
  const auto pred = read_conllu_file(a.pred);
  return score(gold, as_parse_results(pred), rc.eval.score_options());
}

int cmd_eval(const EvalArgs& a) {
  RunConfig rc = a.common.resolve();
  const EvalReport r = score_files(a, rc);
  write_text(a.output, a.format == "json" ? r.to_json().dump(2) + "\n" : r.to_text());
  return kOk;
}

int cmd_analyze(const EvalArgs& a) {
  RunConfig rc = a.common.resolve();
  const EvalReport r = score_files(a, rc);
  if (a.format == "json") {
    nlohmann::json j = r.to_json();
    write_text(a.output, j.dump(2) + "\n");
  } else {
    write_text(a.output, "Sentence length\n" + format_length_table(r.per_length_bucket, r) + "\nIndex range\n" +
                             format_index_table(r.per_index_bucket, r));
  }
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  Common common;
  std::string checkpoint, vocab, input, output, format = "text";
  int batch_size = 1;
  double min_seconds = 0.0;
};

int cmd_bench(const BenchArgs& a) {
  RunConfig rc = a.common.resolve();
  require_existing({{"checkpoint", a.checkpoint}, {"vocab", a.vocab}, {"treebank", a.input}});
  const PromptVocab vocab = load_vocab(a.vocab);
  const auto ckpt = load_checkpoint(a.checkpoint, &vocab);
  const auto data = read_conllu_file(a.input);
  BenchOptions o;
  o.batch_size = a.batch_size;
  o.threads = rc.threads;
  o.min_seconds = a.min_seconds;
  const SpeedReport r = benchmark_speed(ckpt.bundle, vocab, ckpt.meta.tmpl, data, o);
  write_text(a.output, a.format == "json" ? r.to_json().dump(2) + "\n" : r.to_text());
  return kOk;
}

// ---- extras ----------------------------------------------------------------

struct AttentionArgs {
  std::string checkpoint, vocab, input, output;
  int sentence = 1;
};

int cmd_attention(const AttentionArgs& a) {
  require_existing({{"checkpoint", a.checkpoint}, {"vocab", a.vocab}, {"treebank", a.input}});
  const PromptVocab vocab = load_vocab(a.vocab);
  const auto ckpt = load_checkpoint(a.checkpoint, &vocab);
  const auto corpus = read_conllu_file(a.input);
  if (a.sentence < 1 || a.sentence > static_cast<int>(corpus.size()))
    throw ContractError("--sentence must be between 1 and " + std::to_string(corpus.size()));
  const auto masked = encode_masked(corpus[a.sentence - 1], vocab, ckpt.meta.tmpl);
  write_text(a.output, export_attention(ckpt.bundle, masked, vocab).to_json().dump() + "\n");
  return kOk;
}

struct SynthArgs {
  Common common;
  std::string output, kind = "grammar", language = "syn";
  int count = 100;
  int max_words = 40;
  bool verb_final = false, postpositions = false, adjective_after = false;
};

int cmd_synth(const SynthArgs& a) {
  RunConfig rc = a.common.resolve();
  std::vector<Sentence> corpus;
  if (a.kind == "grammar") {
    GrammarOptions g;
    g.language = a.language;
    g.max_words = a.max_words;
    g.verb_final = a.verb_final;
    g.postpositions = a.postpositions;
    g.adjective_after = a.adjective_after;
    corpus = generate_grammar_corpus(a.count, rc.seed, g);
  } else {
    corpus = generate_random_trees(a.count, rc.seed, 1, a.max_words);
  }
  write_text(a.output, write_conllu(corpus));
  return kOk;
}

int cmd_gradcheck(bool inject_fault) {
  GradCheckConfig c;
  if (inject_fault) c.fault = GradFault::flip_gelu_derivative;
  const auto r = grad_check(c);
  for (const auto& t : r.tensors)
    std::cout << (t.passed ? "ok   " : "FAIL ") << t.loss << " " << t.tensor << " rel "
              << fmt("%.3e", t.max_relative_error) << "\n";
  std::cout << "worst relative error " << fmt("%.3e", r.worst_relative_error()) << ", zero-perturbation delta "
            << fmt("%g", r.zero_perturbation_delta) << "\n"
            << (r.passed ? "gradient check passed\n" : "gradient check FAILED\n");
  return r.passed ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured prompt-template dependency parsing"};
  app.require_subcommand(1);
  int status = kOk;

  VocabArgs vocab_args;
  auto* vocab = app.add_subcommand("vocab", "Build or unify prompt vocabularies");
  vocab->require_subcommand(1);
  auto* vbuild = vocab->add_subcommand("build", "Vocabulary from one or more treebanks");
  vocab_args.common.attach(vbuild);
  vbuild->add_option("-i,--input", vocab_args.inputs, "CoNLL-U treebank(s)")->required();
  vbuild->add_option("-o,--output", vocab_args.output, "Vocabulary file")->required();
  vbuild->add_option("--max-index", vocab_args.max_index, "Largest index prompt")->check(CLI::PositiveNumber);
  vbuild->add_option("--min-freq", vocab_args.min_freq, "Minimum word frequency")->check(CLI::PositiveNumber);
  vbuild->callback([&] { status = cmd_vocab_build(vocab_args); });
  auto* vunify = vocab->add_subcommand("unify", "Merge vocabularies into one global vocabulary");
  vunify->add_option("-i,--input", vocab_args.inputs, "Vocabulary files")->required();
  vunify->add_option("-o,--output", vocab_args.output, "Global vocabulary file")->required();
  vunify->callback([&] { status = cmd_vocab_unify(vocab_args); });

  EncodeArgs enc;
  auto* encode_cmd = app.add_subcommand("encode", "Write the prompt template of each sentence, one per line");
  enc.common.attach(encode_cmd);
  encode_cmd->add_option("-i,--input", enc.input, "CoNLL-U treebank")->required();
  encode_cmd->add_option("--vocab", enc.vocab, "Vocabulary file")->required();
  encode_cmd->add_option("-o,--output", enc.output, "Output file (default stdout)");
  encode_cmd->add_flag("--mask", enc.mask, "Emit the masked template");
  encode_cmd->add_flag("--ablate-abs", enc.ablate_abs, "Drop absolute-position prompts");
  encode_cmd->add_flag("--ablate-pos", enc.ablate_pos, "Drop POS prompts");
  encode_cmd->callback([&] { status = cmd_encode(enc); });

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model; writes checkpoint, loss.csv and resolved_config.json");
  tr.common.attach(train_cmd);
  train_cmd->add_option("--train", tr.train_path, "Training treebank (overrides config)");
  train_cmd->add_option("--vocab", tr.vocab, "Vocabulary file; built from the training data when missing");
  train_cmd->add_option("-o,--output-dir", tr.output_dir, "Output directory (overrides config)");
  train_cmd->add_option("--epochs", tr.epochs, "Epochs (overrides config)")->check(CLI::PositiveNumber);
  train_cmd->add_option("--arch", tr.arch, "encoder or decoder (overrides config)");
  train_cmd->add_option("--resume", tr.resume, "Continue from a checkpoint of the same run");
  train_cmd->add_option("--stop-after", tr.stop_after, "Stop after this epoch; the schedule still spans all epochs")
      ->check(CLI::PositiveNumber);
  train_cmd->callback([&] { status = cmd_train(tr); });

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Parse a treebank with a trained model");
  pr.common.attach(predict_cmd);
  predict_cmd->add_option("--checkpoint", pr.checkpoint, "Model checkpoint")->required();
  predict_cmd->add_option("--vocab", pr.vocab, "Vocabulary the model was trained with")->required();
  predict_cmd->add_option("-i,--input", pr.input, "CoNLL-U input (gold heads are ignored)")->required();
  predict_cmd->add_option("-o,--output", pr.output, "Predicted CoNLL-U (default stdout)");
  predict_cmd->add_flag("--strict", pr.strict, "Mark illegal slot predictions invalid instead of repairing");
  predict_cmd->add_flag("--unrestricted", pr.unrestricted, "Argmax over the whole vocabulary");
  predict_cmd->callback([&] { status = cmd_predict(pr); });

  EvalArgs ev;
  auto add_eval_options = [&](CLI::App* cmd) {
    ev.common.attach(cmd);
    cmd->add_option("-g,--gold", ev.gold, "Gold CoNLL-U")->required();
    cmd->add_option("-p,--pred", ev.pred, "Predicted CoNLL-U")->required();
    cmd->add_option("-o,--output", ev.output, "Report file (default stdout)");
    cmd->add_option("--format", ev.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--exclude-punct", ev.exclude_punct, "Skip tokens labelled punct");
    cmd->add_option("--length-edges", ev.length_edges, "Sentence-length bucket upper bounds, e.g. 10,20,30");
    cmd->add_option("--index-edges", ev.index_edges, "Index bucket upper bounds");
  };
  auto* eval_cmd = app.add_subcommand("eval", "UAS/LAS of predictions against gold");
  add_eval_options(eval_cmd);
  eval_cmd->callback([&] { status = cmd_eval(ev); });
  auto* analyze_cmd = app.add_subcommand("analyze", "UAS/LAS by sentence length and by token index");
  add_eval_options(analyze_cmd);
  analyze_cmd->callback([&] { status = cmd_analyze(ev); });

  BenchArgs be;
  auto* bench_cmd = app.add_subcommand("bench", "Parsing throughput in sentences per second");
  be.common.attach(bench_cmd);
  bench_cmd->add_option("--checkpoint", be.checkpoint, "Model checkpoint")->required();
  bench_cmd->add_option("--vocab", be.vocab, "Vocabulary file")->required();
  bench_cmd->add_option("-i,--input", be.input, "CoNLL-U data")->required();
  bench_cmd->add_option("-o,--output", be.output, "Report file (default stdout)");
  bench_cmd->add_option("--format", be.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  bench_cmd->add_option("--batch-size", be.batch_size, "Sentences per timed batch")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--min-seconds", be.min_seconds, "Repeat the data until this much time has passed");
  bench_cmd->callback([&] { status = cmd_bench(be); });

  AttentionArgs at;
  auto* attention_cmd = app.add_subcommand("attention", "Export attention maps and hidden-state similarity as JSON");
  attention_cmd->add_option("--checkpoint", at.checkpoint, "Encoder checkpoint")->required();
  attention_cmd->add_option("--vocab", at.vocab, "Vocabulary file")->required();
  attention_cmd->add_option("-i,--input", at.input, "CoNLL-U data")->required();
  attention_cmd->add_option("--sentence", at.sentence, "1-based sentence number");
  attention_cmd->add_option("-o,--output", at.output, "JSON file (default stdout)");
  attention_cmd->callback([&] { status = cmd_attention(at); });

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic treebank");
  sy.common.attach(synth_cmd);
  synth_cmd->add_option("-n,--count", sy.count, "Sentences")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--kind", sy.kind, "grammar or random")->check(CLI::IsMember({"grammar", "random"}));
  synth_cmd->add_option("--language", sy.language, "Language tag written to each sentence");
  synth_cmd->add_option("--max-words", sy.max_words, "Longest sentence")->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--verb-final", sy.verb_final, "SOV word order");
  synth_cmd->add_flag("--postpositions", sy.postpositions, "Adpositions follow their noun");
  synth_cmd->add_flag("--adjective-after", sy.adjective_after, "Adjectives follow their noun");
  synth_cmd->add_option("-o,--output", sy.output, "CoNLL-U file (default stdout)");
  synth_cmd->callback([&] { status = cmd_synth(sy); });

  bool inject_fault = false;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
  grad_cmd->add_flag("--inject-fault", inject_fault, "Corrupt one backward rule; the check must then fail");
  grad_cmd->callback([&] { status = cmd_gradcheck(inject_fault); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return status;
}
