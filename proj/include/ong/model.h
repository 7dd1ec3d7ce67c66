#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ong/corpus.h"
#include "ong/encoder.h"
#include "ong/gcn.h"
#include "ong/objective.h"
#include "ong/onlstm.h"
#include "ong/tree.h"

namespace ong {

struct ModelConfig {
  int tok_dim = 50;
  int pos_dim = 30;
  int hidden = 300;
  int gcn_dim = 200;
  int gcn_layers = 2;
  int head_hidden = 200;
  int rmax = 100;
  int edge_hidden = 0;   // 0 = single linear edge scorer
  int sidecar_dim = 0;   // > 0: frozen precomputed token vectors
  double gamma = 0.2;
  double alpha = 0.1;
  double beta = 0.1;
  bool direct_a = false;     // learn A from [a^d, distance features]
  bool sep_reg_gcn = false;  // separate GCN for the regularizer passes
  AblationMask mask;

  int x_dim() const {
    return (sidecar_dim > 0 ? sidecar_dim : tok_dim) + pos_dim;
  }
  int h_dim() const {
    return (mask.use_onlstm || mask.use_plain_lstm) ? hidden : x_dim();
  }
  int head_input_dim() const {
    return mask.use_gcn ? h_dim() + gcn_dim : h_dim();
  }
};

struct ModelState {
  ModelConfig cfg;
  Vocab vocab;
  EmbeddingTable emb;
  PositionTable pos;
  OnLstmParams rnn;
  EdgeScorerParams edge;
  GcnParams gcn;
  GcnParams reg_gcn;
  HeadParams head;

  static ModelState create(const ModelConfig& cfg, Vocab vocab,
                           std::uint64_t seed);

  bool has_emb() const { return cfg.sidecar_dim == 0; }
  bool has_rnn() const { return cfg.mask.use_onlstm || cfg.mask.use_plain_lstm; }
  bool has_edge() const {
    return cfg.mask.use_gcn && (cfg.mask.use_at || cfg.direct_a);
  }
  bool has_gcn() const { return cfg.mask.use_gcn; }
  bool has_reg_gcn() const {
    return cfg.sep_reg_gcn && cfg.mask.use_gcn && cfg.mask.use_reg &&
           cfg.mask.reg_pool == AblationMask::RegPool::kGraph;
  }

  // Trainable tensors, fixed order.
  std::vector<nn::Tensor*> parameters();
  std::map<std::string, nn::Tensor*> named_parameters();
};

// One example's tape plus handles into it.
struct SentenceForward {
  nn::Graph g;
  DepTree tree;
  std::vector<int> distances;
  nn::Var x, h_states, hbar, adj, logits, prob_rows;
  nn::Var s_model;
  nn::Var loss_pred_v, loss_kl_v, loss_reg_v, total;

  explicit SentenceForward(const std::vector<int>& heads) : tree(heads) {}
  LossBreakdown breakdown() const;
};

std::unique_ptr<SentenceForward> forward_sentence(const Sentence& s,
                                                  ModelState& state,
                                                  bool with_losses);

// Probability rows over {B, I, O} for each token.
Eigen::MatrixXd token_distributions(ModelState& state, const Sentence& s);

}  // namespace ong
