#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "spt/prompt_vocab.hpp"
#include "spt/treebank.hpp"

using namespace spt;
using namespace spt::testing;
namespace fs = std::filesystem;

namespace {

const std::string kData = SPT_DATA_DIR "/ud_sample/";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Run {
  int code = -1;
  std::string out, err;
};

// Runs the CLI with `args` from inside `dir`; `env` is prefixed verbatim.
Run spt_cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" SPT_CLI_PATH "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const char* kTinyConfig = R"({
  "model": {"layers": 1, "heads": 2, "model_dim": 16, "ff_dim": 32, "dropout": 0.1},
  "train": {"batch_size": 8, "learning_rate": 3e-3, "epochs": 3},
  "seed": 4
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("vocab build lists the corpus labels, unify forms a superset") {
  const auto dir = scratch_dir("cli_vocab");
  REQUIRE(spt_cli(dir, "vocab build -i " + kData + "l01.conllu -o l01.vocab").code == 0);
  REQUIRE(spt_cli(dir, "vocab build -i " + kData + "l03.conllu -o l03.vocab").code == 0);
  CHECK(slurp(dir / "l01.vocab").find("\t[root]\tlabel\n") != std::string::npos);
  CHECK(fs::exists(dir / "l01.vocab.config.json"));

  REQUIRE(spt_cli(dir, "vocab unify -i l01.vocab -i l03.vocab -o both.vocab").code == 0);
  const auto a = load_vocab((dir / "l01.vocab").string());
  const auto b = load_vocab((dir / "l03.vocab").string());
  const auto u = load_vocab((dir / "both.vocab").string());
  for (const auto* v : {&a, &b})
    for (const auto& l : v->labels()) CHECK(u.label_id(l) >= 0);
  CHECK(u.labels().size() > a.labels().size());
}

TEST_CASE("twelve-language global vocabulary serves one model for every language") {
  const auto dir = scratch_dir("cli_global");
  std::string inputs, train_inputs;
  std::vector<Sentence> all;
  for (int k = 1; k <= 12; ++k) {
    char lang[8];
    std::snprintf(lang, sizeof lang, "l%02d", k);
    REQUIRE(spt_cli(dir, "vocab build -i " + kData + lang + ".conllu -o " + lang + ".vocab").code == 0);
    inputs += std::string(" -i ") + lang + ".vocab";
    auto part = read_conllu_file(kData + lang + ".conllu");
    all.insert(all.end(), part.begin(), part.end());
  }
  REQUIRE(spt_cli(dir, "vocab unify" + inputs + " -o global.vocab").code == 0);
  write_conllu_file((dir / "all.conllu").string(), all);
  write(dir / "tiny.json", kTinyConfig);
  const auto trained = spt_cli(dir, "train --config tiny.json --train all.conllu --vocab global.vocab --epochs 1 -o run");
  REQUIRE(trained.code == 0);
  for (int k = 1; k <= 12; ++k) {
    char lang[8];
    std::snprintf(lang, sizeof lang, "l%02d", k);
    CHECK(spt_cli(dir, "predict --checkpoint run/model.ckpt --vocab global.vocab -i " + kData + lang +
                           ".conllu -o " + lang + ".pred")
              .code == 0);
  }
}

TEST_CASE("encode writes one template line per sentence") {
  const auto dir = scratch_dir("cli_encode");
  write_conllu_file((dir / "fig.conllu").string(), {he_loves_his_rabbits(true)});
  REQUIRE(spt_cli(dir, "vocab build -i fig.conllu -o fig.vocab").code == 0);

  auto r = spt_cli(dir, "encode -i fig.conllu --vocab fig.vocab --ablate-pos");
  CHECK(r.code == 0);
  CHECK(r.out == "[1][2][nsubj]He [2][0][root]loves [3][4][poss]his [4][2][dobj]rabbits\n");
  r = spt_cli(dir, "encode -i fig.conllu --vocab fig.vocab --ablate-pos --mask");
  CHECK(r.out == "[1][HEAD][DEP]He [2][HEAD][DEP]loves [3][HEAD][DEP]his [4][HEAD][DEP]rabbits\n");
  r = spt_cli(dir, "encode -i fig.conllu --vocab fig.vocab --ablate-pos --ablate-abs");
  CHECK(r.out == "[2][nsubj]He [0][root]loves [4][poss]his [2][dobj]rabbits\n");
  r = spt_cli(dir, "encode -i fig.conllu --vocab fig.vocab -o fig.txt");
  CHECK(slurp(dir / "fig.txt") ==
        "[1][2][nsubj][PRON]He [2][0][root][VERB]loves [3][4][poss][PRON]his [4][2][dobj][NOUN]rabbits\n");

  const auto lines = spt_cli(dir, "encode -i " + kData + "l05.conllu --vocab fig.vocab");
  CHECK(lines.code == 2);  // unknown labels for this vocabulary

  REQUIRE(spt_cli(dir, "vocab build -i " + kData + "l05.conllu -o l05.vocab").code == 0);
  const auto ok = spt_cli(dir, "encode -i " + kData + "l05.conllu --vocab l05.vocab");
  CHECK(ok.code == 0);
  CHECK(std::count(ok.out.begin(), ok.out.end(), '\n') == 50);
}

TEST_CASE("over-length sentences exit with 2 and name the sentence") {
  const auto dir = scratch_dir("cli_long");
  REQUIRE(spt_cli(dir, "vocab build -i " + kData + "l02.conllu -o small.vocab --max-index 4").code == 0);
  const auto r = spt_cli(dir, "encode -i " + kData + "l02.conllu --vocab small.vocab");
  CHECK(r.code == 2);
  CHECK(r.err.find("l02-") != std::string::npos);
}

TEST_CASE("train, predict, eval, analyze and bench compose") {
  const auto dir = scratch_dir("cli_pipeline");
  write(dir / "tiny.json", kTinyConfig);
  const std::string train = "train --config tiny.json --train " + kData + "l04.conllu";
  REQUIRE(spt_cli(dir, train + " -o run1").code == 0);

  SUBCASE("artifacts and trace") {
    CHECK(fs::exists(dir / "run1/model.ckpt"));
    CHECK(fs::exists(dir / "run1/vocab.txt"));
    const auto trace = slurp(dir / "run1/loss.csv");
    CHECK(trace.rfind("epoch,loss\n1,", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 4);
    const auto snap = nlohmann::json::parse(slurp(dir / "run1/resolved_config.json"));
    CHECK(snap["seed"] == 4);
    CHECK(snap["train"]["epochs"] == 3);
    CHECK(snap["model"]["vocab_size"].get<int>() > 0);
  }

  SUBCASE("same config and seed give byte-identical artifacts") {
    REQUIRE(spt_cli(dir, train + " -o run2").code == 0);
    CHECK(slurp(dir / "run1/loss.csv") == slurp(dir / "run2/loss.csv"));
    CHECK(slurp(dir / "run1/model.ckpt") == slurp(dir / "run2/model.ckpt"));
    CHECK(slurp(dir / "run1/vocab.txt") == slurp(dir / "run2/vocab.txt"));
  }

  SUBCASE("the resolved config alone re-runs the command") {
    const auto trace = slurp(dir / "run1/loss.csv");
    const auto ckpt = slurp(dir / "run1/model.ckpt");
    fs::copy_file(dir / "run1/resolved_config.json", dir / "snapshot.json");
    REQUIRE(spt_cli(dir, "train --config snapshot.json").code == 0);
    CHECK(slurp(dir / "run1/loss.csv") == trace);
    CHECK(slurp(dir / "run1/model.ckpt") == ckpt);
  }

  SUBCASE("SPT_SEED and --seed override the config seed") {
    REQUIRE(spt_cli(dir, train + " -o run_env", "SPT_SEED=99").code == 0);
    CHECK(slurp(dir / "run_env/loss.csv") != slurp(dir / "run1/loss.csv"));
    CHECK(nlohmann::json::parse(slurp(dir / "run_env/resolved_config.json"))["seed"] == 99);
    REQUIRE(spt_cli(dir, train + " -o run_flag --seed 99").code == 0);
    CHECK(slurp(dir / "run_env/loss.csv") == slurp(dir / "run_flag/loss.csv"));
  }

  SUBCASE("a run split with --stop-after and --resume matches the straight run") {
    REQUIRE(spt_cli(dir, train + " -o half --stop-after 1").code == 0);
    const auto r = spt_cli(dir, train + " -o rest --resume half/model.ckpt --vocab half/vocab.txt");
    REQUIRE(r.code == 0);
    const auto straight = slurp(dir / "run1/loss.csv");
    const auto first = slurp(dir / "half/loss.csv");
    const auto rest = slurp(dir / "rest/loss.csv");
    CHECK(first + rest.substr(std::string("epoch,loss\n").size()) == straight);
    CHECK(slurp(dir / "rest/model.ckpt") == slurp(dir / "run1/model.ckpt"));
  }

  SUBCASE("predict output is valid eval input") {
    const std::string input = kData + "l04.conllu";
    const auto p = spt_cli(dir, "predict --checkpoint run1/model.ckpt --vocab run1/vocab.txt -i " + input + " -o pred.conllu");
    REQUIRE(p.code == 0);
    const auto gold = read_conllu_file(input);
    const auto pred = read_conllu_file((dir / "pred.conllu").string());
    REQUIRE(pred.size() == gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
      REQUIRE(pred[i].size() == gold[i].size());
      CHECK(pred[i].sent_id == gold[i].sent_id);
      for (int k = 0; k < gold[i].size(); ++k) {
        CHECK(pred[i].tokens[k].form == gold[i].tokens[k].form);
        CHECK(pred[i].tokens[k].pos == gold[i].tokens[k].pos);
      }
    }
    CHECK(fs::exists(dir / "pred.conllu.config.json"));

    const auto again = spt_cli(dir, "predict --checkpoint run1/model.ckpt --vocab run1/vocab.txt -i " + input +
                                        " -o pred2.conllu --threads 3");
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "pred.conllu") == slurp(dir / "pred2.conllu"));

    const auto e = spt_cli(dir, "eval -g " + input + " -p pred.conllu --format json");
    REQUIRE(e.code == 0);
    const auto report = nlohmann::json::parse(e.out);
    CHECK(report["token_count"].get<long>() > 0);
    CHECK(report["las"].get<double>() <= report["uas"].get<double>());

    const auto a = spt_cli(dir, "analyze -g " + input + " -p pred.conllu");
    REQUIRE(a.code == 0);
    CHECK(a.out.find("Sentence Length Range") != std::string::npos);
    CHECK(a.out.find("Index range") != std::string::npos);
    CHECK(a.out.find("61-70") != std::string::npos);
  }

  SUBCASE("bench reports a consistent rate") {
    const auto b = spt_cli(dir, "bench --checkpoint run1/model.ckpt --vocab run1/vocab.txt -i " + kData +
                                    "l04.conllu --format json");
    REQUIRE(b.code == 0);
    const auto j = nlohmann::json::parse(b.out);
    CHECK(j["batch_size"] == 1);
    CHECK(j["total_sentences"].get<long>() >= 50);
    CHECK(j["sentences_per_second"].get<double>() ==
          doctest::Approx(j["total_sentences"].get<double>() / j["wall_seconds"].get<double>()).epsilon(1e-12));
  }

  SUBCASE("a different vocabulary is refused") {
    REQUIRE(spt_cli(dir, "vocab build -i " + kData + "l09.conllu -o other.vocab").code == 0);
    const auto r = spt_cli(dir, "predict --checkpoint run1/model.ckpt --vocab other.vocab -i " + kData +
                                    "l04.conllu -o x.conllu");
    CHECK(r.code == 2);
    CHECK(r.err.find("vocabulary") != std::string::npos);
  }

  SUBCASE("attention export") {
    const auto r = spt_cli(dir, "attention --checkpoint run1/model.ckpt --vocab run1/vocab.txt -i " + kData +
                                    "l04.conllu --sentence 2");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["attention"].size() == 1);
    CHECK(j["cosine"].size() == 1);
  }
}

TEST_CASE("eval on the four-token example") {
  const auto dir = scratch_dir("cli_eval");
  const auto gold = he_loves_his_rabbits();
  auto pred = gold;
  pred.tokens[3].head = 3;
  pred.tokens[2].label = "det";
  write_conllu_file((dir / "gold.conllu").string(), {gold});
  write_conllu_file((dir / "pred.conllu").string(), {pred});
  const auto r = spt_cli(dir, "eval -g gold.conllu -p pred.conllu");
  CHECK(r.code == 0);
  CHECK(r.out.find("UAS = 75.00%") != std::string::npos);
  CHECK(r.out.find("LAS = 50.00%") != std::string::npos);

  write_conllu_file((dir / "short.conllu").string(), {sentence_of({{"Go", nullptr, 0, "root"}})});
  CHECK(spt_cli(dir, "eval -g gold.conllu -p short.conllu").code == 2);
  CHECK(spt_cli(dir, "analyze -g gold.conllu -p pred.conllu --length-edges 5,x").code == 2);
}

TEST_CASE("exit codes for usage, input and training failures") {
  const auto dir = scratch_dir("cli_codes");
  CHECK(spt_cli(dir, "").code == 2);
  CHECK(spt_cli(dir, "frobnicate").code == 2);
  CHECK(spt_cli(dir, "--help").code == 0);
  CHECK(spt_cli(dir, "eval -g missing.conllu -p missing.conllu").code == 2);
  CHECK(spt_cli(dir, "train --config missing.json").code == 2);
  write(dir / "bad.conllu", "1\tA\t_\tX\t_\t_\tnope\troot\n\n");
  CHECK(spt_cli(dir, "vocab build -i bad.conllu -o v").code == 2);

  write(dir / "diverge.json", R"({
    "model": {"layers": 1, "heads": 1, "model_dim": 8, "ff_dim": 8, "dropout": 0.0},
    "train": {"batch_size": 4, "learning_rate": 1e30, "epochs": 3, "grad_clip": null, "schedule": "constant"}
  })");
  const auto r = spt_cli(dir, "train --config diverge.json --train " + kData + "l01.conllu -o div");
  CHECK(r.code == 3);
  CHECK(r.err.find("epoch") != std::string::npos);
}

}
