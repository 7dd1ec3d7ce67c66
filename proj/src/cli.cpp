#include "ong/cli.h"

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ong/json_io.h"
#include "ong/trainer.h"

namespace ong {

namespace {

struct CliConfig {
  TrainConfig train;
  std::string test_embeddings_path;
  std::string ckpt_path;
  std::string config_path;
  std::string variant;
  std::string reg_pool = "graph";
  bool no_kl = false, no_reg = false, no_gcn = false, no_onlstm = false,
       use_lstm = false, no_ad = false, no_at = false;
  int index = 0;

  // gen-data
  int n_sentences = 500;
  int min_len = 5;
  int max_len = 12;
  double p_adjacent = 0.8;
};

void apply_config_file(CliConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  Json j = Json::parse(in);
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("data", c.train.data_path);
  get("test", c.train.test_path);
  get("embeddings", c.train.embeddings_path);
  get("test-embeddings", c.test_embeddings_path);
  get("out", c.train.out_path);
  get("dev-ratio", c.train.dev_ratio);
  get("seed", c.train.seed);
  get("epochs", c.train.epochs);
  get("batch", c.train.batch);
  get("lr", c.train.lr);
  get("tok-dim", c.train.model.tok_dim);
  get("pos-dim", c.train.model.pos_dim);
  get("hidden", c.train.model.hidden);
  get("gcn-dim", c.train.model.gcn_dim);
  get("gcn-layers", c.train.model.gcn_layers);
  get("head-hidden", c.train.model.head_hidden);
  get("rmax", c.train.model.rmax);
  get("edge-hidden", c.train.model.edge_hidden);
  get("gamma", c.train.model.gamma);
  get("alpha", c.train.model.alpha);
  get("beta", c.train.model.beta);
  get("direct-a", c.train.model.direct_a);
  get("sep-reg-gcn", c.train.model.sep_reg_gcn);
  get("no-kl", c.no_kl);
  get("no-reg", c.no_reg);
  get("no-gcn", c.no_gcn);
  get("no-onlstm", c.no_onlstm);
  get("use-lstm", c.use_lstm);
  get("no-ad", c.no_ad);
  get("no-at", c.no_at);
  get("reg-pool", c.reg_pool);
  get("variant", c.variant);
}

AblationMask resolve_mask(const CliConfig& c) {
  AblationMask m;
  if (c.no_kl) m.use_kl = false;
  if (c.no_reg) m.use_reg = false;
  if (c.no_gcn) m.use_gcn = false;
  if (c.no_onlstm) m.use_onlstm = false;
  if (c.use_lstm) m.use_plain_lstm = true;
  if (c.no_ad) m.use_ad = false;
  if (c.no_at) m.use_at = false;
  m.reg_pool = c.reg_pool == "maxpool" ? AblationMask::RegPool::kMaxpool
                                       : AblationMask::RegPool::kGraph;
  m = m.normalized();
  m.validate();
  return m;
}

std::vector<Sentence> load_data(const std::string& path,
                                const std::string& embeddings_path,
                                int* sidecar_dim = nullptr) {
  if (path.empty()) throw DataError("no --data path given");
  auto data = load_corpus_file(path);
  if (!embeddings_path.empty()) {
    auto sv = load_sidecar(embeddings_path);
    attach_sidecar(data, sv);
    if (sidecar_dim) *sidecar_dim = sv.dim;
  }
  return data;
}

void print_resolved(std::ostream& out, const std::string& command,
                    const CliConfig& c) {
  Json j;
  j["command"] = command;
  j["data"] = c.train.data_path;
  j["test"] = c.train.test_path;
  j["embeddings"] = c.train.embeddings_path;
  j["out"] = c.train.out_path;
  j["ckpt"] = c.ckpt_path;
  j["dev_ratio"] = c.train.dev_ratio;
  j["seed"] = c.train.seed;
  j["epochs"] = c.train.epochs;
  j["batch"] = c.train.batch;
  j["lr"] = c.train.lr;
  j["model"] = c.train.model;
  out << j.dump() << "\n";
}

Metrics eval_state(ModelState& state, const std::vector<Sentence>& data) {
  return evaluate(state, data);
}

std::vector<Sentence> load_test_data(const CliConfig& c) {
  if (!c.train.embeddings_path.empty() && c.test_embeddings_path.empty())
    throw DataError(
        "--test with --embeddings needs --test-embeddings for the test "
        "corpus");
  return load_data(c.train.test_path, c.test_embeddings_path);
}

int cmd_train(CliConfig& c, std::ostream& out) {
  int sidecar_dim = 0;
  auto data = load_data(c.train.data_path, c.train.embeddings_path,
                        &sidecar_dim);
  c.train.model.sidecar_dim = sidecar_dim;
  print_resolved(out, "train", c);
  auto [train_data, dev_data] =
      split_train_dev(data, c.train.dev_ratio, c.train.seed);
  Checkpoint best = train(c.train, train_data, dev_data, &out);
  Json done;
  done["best_epoch"] = best.best_epoch;
  done["best_dev_f1"] = best.best_dev_f1;
  out << done.dump() << "\n";
  if (!c.train.out_path.empty())
    save_checkpoint(c.train.out_path, best.state, best.best_dev_f1,
                    best.best_epoch);
  if (!c.train.test_path.empty()) {
    auto test_data = load_test_data(c);
    out << Json(eval_state(best.state, test_data)).dump() << "\n";
  }
  return 0;
}

int cmd_eval(CliConfig& c, std::ostream& out) {
  print_resolved(out, "eval", c);
  Checkpoint ck = load_checkpoint(c.ckpt_path);
  auto data = load_data(c.train.data_path, c.train.embeddings_path);
  out << Json(eval_state(ck.state, data)).dump() << "\n";
  return 0;
}

int cmd_predict(CliConfig& c, std::ostream& out) {
  print_resolved(out, "predict", c);
  Checkpoint ck = load_checkpoint(c.ckpt_path);
  auto data = load_data(c.train.data_path, c.train.embeddings_path);
  for (size_t i = 0; i < data.size(); ++i) {
    Json j;
    j["index"] = i;
    Json spans = Json::array();
    for (const auto& sp : predict(ck.state, data[i]))
      spans.push_back(Json::array({sp.start, sp.end}));
    j["spans"] = spans;
    out << j.dump() << "\n";
  }
  return 0;
}

int cmd_ablate(CliConfig& c, std::ostream& out) {
  int sidecar_dim = 0;
  auto data = load_data(c.train.data_path, c.train.embeddings_path,
                        &sidecar_dim);
  c.train.model.sidecar_dim = sidecar_dim;
  print_resolved(out, "ablate", c);
  auto [train_data, dev_data] =
      split_train_dev(data, c.train.dev_ratio, c.train.seed);
  std::vector<Sentence> test_data;
  if (!c.train.test_path.empty()) test_data = load_test_data(c);

  std::vector<std::string> variants;
  if (!c.variant.empty())
    variants.push_back(c.variant);
  else
    variants = AblationMask::variant_names();

  for (const auto& name : variants) {
    TrainConfig run_cfg = c.train;
    run_cfg.model.mask = AblationMask::for_variant(name);
    Checkpoint best = train(run_cfg, train_data, dev_data, nullptr);
    const Metrics m = eval_state(
        best.state, test_data.empty() ? dev_data : test_data);
    Json j;
    j["variant"] = name;
    j["best_epoch"] = best.best_epoch;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["fn"] = m.fn;
    out << j.dump() << "\n";
  }
  return 0;
}

int cmd_gen_data(CliConfig& c, std::ostream& out) {
  print_resolved(out, "gen-data", c);
  SyntheticConfig g;
  g.n_sentences = c.n_sentences;
  g.min_len = c.min_len;
  g.max_len = c.max_len;
  g.seed = c.train.seed;
  g.p_adjacent = c.p_adjacent;
  auto data = gen_synthetic(g);
  if (c.train.out_path.empty())
    out << format_corpus(data);
  else
    write_corpus_file(c.train.out_path, data);
  return 0;
}

int cmd_inspect(CliConfig& c, std::ostream& out) {
  print_resolved(out, "inspect", c);
  auto data = load_data(c.train.data_path, c.train.embeddings_path);
  if (c.index < 0 || c.index >= static_cast<int>(data.size()))
    throw DataError("--index out of range");
  const Sentence& s = data[static_cast<size_t>(c.index)];

  std::optional<Checkpoint> ck;
  ModelState* state = nullptr;
  ModelState fresh;
  if (!c.ckpt_path.empty()) {
    ck = load_checkpoint(c.ckpt_path);
    state = &ck->state;
  } else {
    fresh = ModelState::create(c.train.model, Vocab::build(data),
                               c.train.seed);
    state = &fresh;
  }

  const DepTree tree(s.heads);
  const auto dist = tree_distances(tree, s.target_span);
  const Eigen::VectorXd syn = syntax_scores(dist);
  const Eigen::MatrixXd ad = dep_adjacency(tree);
  Eigen::MatrixXd at;
  if (state->has_edge() && !state->cfg.direct_a)
    at = target_importance_matrix(dist, state->edge);
  Eigen::MatrixXd a = ad;
  if (state->cfg.mask.use_gcn) {
    if (state->cfg.direct_a) {
      nn::Graph g;
      a = g.value(edge_scores(g, direct_adjacency_features(ad, dist),
                              s.size(), state->edge));
    } else if (state->cfg.mask.use_ad && state->cfg.mask.use_at) {
      a = combine_adjacency(ad, at, state->cfg.gamma);
    } else if (state->cfg.mask.use_at) {
      a = at;
    }
  }

  auto mat_json = [](const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };

  Json j;
  j["distances"] = dist;
  Json syn_json = Json::array();
  for (Eigen::Index i = 0; i < syn.size(); ++i) syn_json.push_back(syn(i));
  j["syn_scores"] = syn_json;
  j["adj_dep"] = mat_json(ad);
  j["adj_combined"] = mat_json(a);
  j["adj_opinion"] =
      mat_json(pruned_adjacency(a, tree, s.target_span, opinion_tokens(s)));
  j["adj_other"] =
      mat_json(pruned_adjacency(a, tree, s.target_span, other_tokens(s)));
  out << j.dump() << "\n";
  return 0;
}

int cmd_bucket_eval(CliConfig& c, std::ostream& out) {
  print_resolved(out, "bucket-eval", c);
  Checkpoint ck = load_checkpoint(c.ckpt_path);
  auto data = load_data(c.train.data_path, c.train.embeddings_path);
  auto folds = bucket_by_distance(data);
  for (const auto& key : bucket_keys()) {
    std::vector<Sentence> fold_data;
    for (int idx : folds[key])
      fold_data.push_back(data[static_cast<size_t>(idx)]);
    const Metrics m = eval_state(ck.state, fold_data);
    Json j;
    j["fold"] = key;
    j["examples"] = fold_data.size();
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["fn"] = m.fn;
    out << j.dump() << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CliConfig c;

  // config file defaults load before flag parsing; flags take precedence
  for (size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") c.config_path = args[i + 1];
  try {
    if (!c.config_path.empty()) apply_config_file(c, c.config_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Targeted opinion word extraction with syntax-guided "
               "ON-LSTM + GCN sequence labeling"};
  app.require_subcommand(1);
  std::string config_dummy;
  app.add_option("--config", config_dummy,
                 "JSON config file with flag defaults");

  auto add_data_flags = [&](CLI::App* cmd, bool with_embeddings = true) {
    cmd->add_option("--config", config_dummy,
                    "JSON config file with flag defaults");
    cmd->add_option("--data", c.train.data_path, "corpus file (tab format)");
    if (with_embeddings)
      cmd->add_option("--embeddings", c.train.embeddings_path,
                      "sidecar file of precomputed token vectors");
  };
  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--tok-dim", c.train.model.tok_dim,
                    "token embedding dimensions");
    cmd->add_option("--pos-dim", c.train.model.pos_dim,
                    "position embedding dimensions");
    cmd->add_option("--hidden", c.train.model.hidden, "recurrent hidden units");
    cmd->add_option("--gcn-dim", c.train.model.gcn_dim, "GCN layer width");
    cmd->add_option("--gcn-layers", c.train.model.gcn_layers,
                    "number of GCN layers");
    cmd->add_option("--gamma", c.train.model.gamma,
                    "adjacency combination weight");
    cmd->add_option("--alpha", c.train.model.alpha,
                    "consistency loss weight");
    cmd->add_option("--beta", c.train.model.beta,
                    "regularization loss weight");
    cmd->add_flag("--no-kl", c.no_kl, "drop the consistency loss");
    cmd->add_flag("--no-reg", c.no_reg, "drop the representation regularizer");
    cmd->add_flag("--no-gcn", c.no_gcn, "drop the GCN component");
    cmd->add_flag("--no-onlstm", c.no_onlstm,
                  "send the input vectors straight to the GCN");
    cmd->add_flag("--use-lstm", c.use_lstm,
                  "replace the ordered-neuron cell with a plain LSTM");
    cmd->add_flag("--no-ad", c.no_ad, "drop the dependency adjacency");
    cmd->add_flag("--no-at", c.no_at, "drop the learned target adjacency");
    cmd->add_option("--reg-pool", c.reg_pool,
                    "regularizer representation mode")
        ->check(CLI::IsMember({"graph", "maxpool"}));
  };
  auto add_train_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dev-ratio", c.train.dev_ratio,
                    "fraction of data held out for development");
    cmd->add_option("--seed", c.train.seed, "random seed");
    cmd->add_option("--epochs", c.train.epochs, "training epochs");
    cmd->add_option("--batch", c.train.batch, "mini-batch size");
    cmd->add_option("--lr", c.train.lr, "learning rate");
    cmd->add_option("--out", c.train.out_path, "checkpoint output path");
    cmd->add_option("--test", c.train.test_path, "test corpus file");
    cmd->add_option("--test-embeddings", c.test_embeddings_path,
                    "sidecar vectors for the test corpus");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  add_data_flags(train_cmd);
  add_train_flags(train_cmd);
  add_model_flags(train_cmd);

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  add_data_flags(eval_cmd);
  eval_cmd->add_option("--ckpt", c.ckpt_path, "checkpoint path");

  CLI::App* predict_cmd =
      app.add_subcommand("predict", "print predicted spans per example");
  add_data_flags(predict_cmd);
  predict_cmd->add_option("--ckpt", c.ckpt_path, "checkpoint path");

  CLI::App* ablate_cmd = app.add_subcommand(
      "ablate", "train+eval ablation variants, one metrics line each");
  add_data_flags(ablate_cmd);
  add_train_flags(ablate_cmd);
  add_model_flags(ablate_cmd);
  ablate_cmd->add_option("--variant", c.variant, "run a single named variant")
      ->check(CLI::IsMember(AblationMask::variant_names()));

  CLI::App* gen_cmd =
      app.add_subcommand("gen-data", "generate a synthetic corpus");
  gen_cmd->add_option("--config", config_dummy,
                      "JSON config file with flag defaults");
  gen_cmd->add_option("--n", c.n_sentences, "number of sentences");
  gen_cmd->add_option("--min-len", c.min_len, "minimum sentence length");
  gen_cmd->add_option("--max-len", c.max_len, "maximum sentence length");
  gen_cmd->add_option("--seed", c.train.seed, "random seed");
  gen_cmd->add_option("--p-adjacent", c.p_adjacent,
                      "probability a marker is attached to the target");
  gen_cmd->add_option("--out", c.train.out_path,
                      "output file (stdout when omitted)");

  CLI::App* inspect_cmd = app.add_subcommand(
      "inspect", "dump distances, scores and adjacencies for one example");
  add_data_flags(inspect_cmd);
  inspect_cmd->add_option("--index", c.index, "example index");
  inspect_cmd->add_option("--ckpt", c.ckpt_path,
                          "checkpoint for the learned adjacency");
  inspect_cmd->add_option("--seed", c.train.seed,
                          "seed for fresh parameters when no checkpoint");
  add_model_flags(inspect_cmd);

  CLI::App* bucket_cmd = app.add_subcommand(
      "bucket-eval", "evaluate per target-opinion distance fold");
  add_data_flags(bucket_cmd);
  bucket_cmd->add_option("--ckpt", c.ckpt_path, "checkpoint path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    c.train.model.mask = resolve_mask(c);
    if (train_cmd->parsed()) return cmd_train(c, out);
    if (eval_cmd->parsed()) return cmd_eval(c, out);
    if (predict_cmd->parsed()) return cmd_predict(c, out);
    if (ablate_cmd->parsed()) return cmd_ablate(c, out);
    if (gen_cmd->parsed()) return cmd_gen_data(c, out);
    if (inspect_cmd->parsed()) return cmd_inspect(c, out);
    if (bucket_cmd->parsed()) return cmd_bucket_eval(c, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ong
