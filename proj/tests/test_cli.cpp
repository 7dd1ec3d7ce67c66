#include "ong/cli.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ong/corpus.h"
#include "ong/rng.h"

using namespace ong;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<nlohmann::json> json_lines(const std::string& text) {
  std::vector<nlohmann::json> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] == '{') lines.push_back(nlohmann::json::parse(line));
  return lines;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ong_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string capture_binary(const std::string& args) {
  const std::string cmd = std::string(ONG_CLI_BINARY) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  pclose(pipe);
  return out;
}

const std::vector<std::string> kSmallTrain = {
    "--epochs", "2",  "--batch", "8",   "--tok-dim", "6",
    "--pos-dim", "4", "--hidden", "8",  "--gcn-dim", "6",
    "--seed",    "5"};

}  // namespace

TEST_CASE("cli gen-data writes a parseable deterministic corpus") {
  TempDir tmp;
  const std::string path = tmp.file("synth.tsv");
  auto r = run({"gen-data", "--n", "20", "--min-len", "4", "--max-len", "8",
                "--seed", "3", "--out", path});
  CHECK(r.code == 0);
  auto data = load_corpus_file(path);
  CHECK(data.size() == 20);

  const std::string path2 = tmp.file("synth2.tsv");
  run({"gen-data", "--n", "20", "--min-len", "4", "--max-len", "8", "--seed",
       "3", "--out", path2});
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("cli train/eval/predict/bucket-eval round-trip") {
  TempDir tmp;
  const std::string data = tmp.file("data.tsv");
  const std::string ckpt = tmp.file("model.ckpt");
  REQUIRE(run({"gen-data", "--n", "30", "--min-len", "4", "--max-len", "8",
               "--seed", "3", "--out", data})
              .code == 0);

  std::vector<std::string> train_args = {"train", "--data", data,
                                         "--dev-ratio", "0.2", "--out", ckpt};
  train_args.insert(train_args.end(), kSmallTrain.begin(), kSmallTrain.end());
  auto tr = run(train_args);
  CHECK(tr.code == 0);
  CHECK(fs::exists(ckpt));
  // resolved config plus one log line per epoch
  auto lines = json_lines(tr.out);
  REQUIRE(!lines.empty());
  CHECK(lines[0].contains("command"));
  int epoch_lines = 0;
  for (const auto& j : lines)
    if (j.contains("epoch") && j.contains("loss")) ++epoch_lines;
  CHECK(epoch_lines == 2);

  auto ev = run({"eval", "--ckpt", ckpt, "--data", data});
  CHECK(ev.code == 0);
  const auto ev_lines = json_lines(ev.out);
  bool saw_metrics = false;
  for (const auto& j : ev_lines)
    if (j.contains("f1") && j.contains("tp")) saw_metrics = true;
  CHECK(saw_metrics);

  auto pr = run({"predict", "--ckpt", ckpt, "--data", data});
  CHECK(pr.code == 0);
  int span_lines = 0;
  for (const auto& j : json_lines(pr.out))
    if (j.contains("spans")) ++span_lines;
  CHECK(span_lines == 30);

  auto bucket = run({"bucket-eval", "--ckpt", ckpt, "--data", data});
  CHECK(bucket.code == 0);
  std::vector<std::string> folds;
  for (const auto& j : json_lines(bucket.out))
    if (j.contains("fold")) folds.push_back(j["fold"].get<std::string>());
  CHECK(folds == std::vector<std::string>{"1", "2", "3", ">3"});
}

TEST_CASE("cli inspect dumps the adjacency bundle with exact field names") {
  TempDir tmp;
  const std::string data = tmp.file("data.tsv");
  {
    std::ofstream f(data);
    f << "a b c d\t-1 0 1 2\t1:1\t3:3\n";
  }
  auto r = run({"inspect", "--data", data, "--index", "0", "--seed", "4"});
  CHECK(r.code == 0);
  const auto lines = json_lines(r.out);
  REQUIRE(lines.size() >= 2);
  const auto& j = lines.back();
  for (const char* key : {"distances", "syn_scores", "adj_dep",
                          "adj_combined", "adj_opinion", "adj_other"})
    CHECK(j.contains(key));
  CHECK(j["distances"] == nlohmann::json({1, 0, 1, 2}));
  CHECK(j["adj_dep"].size() == 4);

  auto bad = run({"inspect", "--data", data, "--index", "7"});
  CHECK(bad.code == 2);
}

TEST_CASE("cli ablate emits one metrics line per requested variant") {
  TempDir tmp;
  const std::string data = tmp.file("data.tsv");
  REQUIRE(run({"gen-data", "--n", "16", "--min-len", "4", "--max-len", "7",
               "--seed", "8", "--out", data})
              .code == 0);
  std::vector<std::string> args = {"ablate", "--data", data, "--variant",
                                   "ong-kl", "--epochs", "1"};
  args.insert(args.end(), kSmallTrain.begin() + 2, kSmallTrain.end());
  auto r = run(args);
  CHECK(r.code == 0);
  int variant_lines = 0;
  for (const auto& j : json_lines(r.out))
    if (j.contains("variant")) {
      CHECK(j["variant"] == "ong-kl");
      CHECK(j.contains("f1"));
      ++variant_lines;
    }
  CHECK(variant_lines == 1);
}

TEST_CASE("every ablation mask is constructible from plain flags") {
  TempDir tmp;
  const std::string data = tmp.file("data.tsv");
  REQUIRE(run({"gen-data", "--n", "10", "--min-len", "4", "--max-len", "6",
               "--seed", "21", "--out", data})
              .code == 0);
  const std::vector<std::vector<std::string>> flag_sets = {
      {"--no-kl"},
      {"--no-onlstm"},
      {"--use-lstm"},
      {"--no-ad"},
      {"--no-at"},
      {"--no-reg"},
      {"--reg-pool", "maxpool"},
      {"--no-gcn"},
      {"--no-gcn", "--no-reg", "--no-kl"},
  };
  for (const auto& flags : flag_sets) {
    std::vector<std::string> args = {"train", "--data", data, "--epochs", "1"};
    args.insert(args.end(), kSmallTrain.begin() + 2, kSmallTrain.end());
    args.insert(args.end(), flags.begin(), flags.end());
    auto r = run(args);
    INFO("flags: ", flags[0]);
    CHECK(r.code == 0);
  }
}

TEST_CASE("cli exit codes distinguish usage and data errors") {
  CHECK(run({"train", "--bogus-flag"}).code == 1);
  CHECK(run({"no-such-command"}).code == 1);
  CHECK(run({"train", "--data", "/no/such/file.tsv"}).code == 2);
  CHECK(run({"ablate", "--data", "x", "--variant", "bogus"}).code == 1);
  TempDir tmp;
  const std::string bad = tmp.file("bad.tsv");
  {
    std::ofstream f(bad);
    f << "a b\t1 0\t0:0\t\n";
  }
  CHECK(run({"train", "--data", bad}).code == 2);
}

TEST_CASE("cli trains and evaluates with frozen sidecar vectors") {
  TempDir tmp;
  const std::string data = tmp.file("data.tsv");
  REQUIRE(run({"gen-data", "--n", "10", "--min-len", "4", "--max-len", "6",
               "--seed", "6", "--out", data})
              .code == 0);
  const auto corpus = load_corpus_file(data);

  const std::string vec = tmp.file("vectors.txt");
  {
    std::ofstream f(vec);
    const int dim = 5;
    f << corpus.size() << " " << dim << "\n";
    Rng rng(9);
    for (size_t e = 0; e < corpus.size(); ++e) {
      f << "EXAMPLE " << e << " " << corpus[e].size() << "\n";
      for (int i = 0; i < corpus[e].size(); ++i) {
        for (int j = 0; j < dim; ++j) f << rng.uniform(-1, 1) << " ";
        f << "\n";
      }
    }
  }

  const std::string ckpt = tmp.file("model.ckpt");
  std::vector<std::string> args = {"train",  "--data", data, "--embeddings",
                                   vec,      "--out",  ckpt, "--epochs",
                                   "1"};
  args.insert(args.end(), kSmallTrain.begin() + 2, kSmallTrain.end());
  CHECK(run(args).code == 0);
  CHECK(run({"eval", "--ckpt", ckpt, "--data", data, "--embeddings", vec})
            .code == 0);
  // the checkpointed model requires its sidecar features
  CHECK(run({"eval", "--ckpt", ckpt, "--data", data}).code == 2);
  // train+test with one sidecar but no test sidecar is rejected
  std::vector<std::string> bad = args;
  bad.push_back("--test");
  bad.push_back(data);
  CHECK(run(bad).code == 2);
}

TEST_CASE("cli reports divergence with exit code 3") {
  TempDir tmp;
  const std::string data = tmp.file("data.tsv");
  REQUIRE(run({"gen-data", "--n", "8", "--min-len", "4", "--max-len", "6",
               "--seed", "4", "--out", data})
              .code == 0);
  std::vector<std::string> args = {"train", "--data", data,
                                   "--epochs", "2", "--batch", "2",
                                   "--lr", "1e300"};
  args.insert(args.end(), kSmallTrain.begin() + 4, kSmallTrain.end());
  auto r = run(args);
  CHECK(r.code == 3);
}

TEST_CASE("cli config file supplies defaults that flags override") {
  TempDir tmp;
  const std::string data = tmp.file("data.tsv");
  REQUIRE(run({"gen-data", "--n", "12", "--min-len", "4", "--max-len", "6",
               "--seed", "2", "--out", data})
              .code == 0);
  const std::string cfg = tmp.file("cfg.json");
  {
    std::ofstream f(cfg);
    f << R"({"epochs": 1, "batch": 4, "tok-dim": 6, "pos-dim": 4,)"
      << R"( "hidden": 8, "gcn-dim": 6, "data": ")" << data << R"("})";
  }
  auto r = run({"train", "--config", cfg, "--seed", "3"});
  CHECK(r.code == 0);
  const auto lines = json_lines(r.out);
  REQUIRE(!lines.empty());
  CHECK(lines[0]["epochs"] == 1);
  CHECK(lines[0]["seed"] == 3);
  CHECK(lines[0]["model"]["tok_dim"] == 6);
}

TEST_CASE("cli --help output is frozen for every command") {
  std::string combined = capture_binary("--help");
  for (const char* cmd : {"train", "eval", "predict", "ablate", "gen-data",
                          "inspect", "bucket-eval"})
    combined += capture_binary(std::string(cmd) + " --help");

  const std::string golden_path =
      std::string(ONG_GOLDEN_DIR) + "/help.txt";
  std::ifstream golden(golden_path, std::ios::binary);
  REQUIRE_MESSAGE(golden.good(), "missing golden file ", golden_path);
  std::stringstream expected;
  expected << golden.rdbuf();
  CHECK(combined == expected.str());
}
