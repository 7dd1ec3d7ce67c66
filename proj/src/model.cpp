#include "ong/model.h"

namespace ong {

ModelState ModelState::create(const ModelConfig& cfg, Vocab vocab,
                              std::uint64_t seed) {
  cfg.mask.validate();
  ModelState st;
  st.cfg = cfg;
  st.vocab = std::move(vocab);
  Rng rng(seed);
  if (st.has_emb())
    st.emb = EmbeddingTable::create(st.vocab.size(), cfg.tok_dim, rng);
  st.pos = PositionTable::create(cfg.rmax, cfg.pos_dim, rng);
  if (st.has_rnn())
    st.rnn = OnLstmParams::create(cfg.x_dim(), cfg.hidden, rng);
  if (st.has_edge())
    st.edge = EdgeScorerParams::create(cfg.direct_a ? 6 : 5, cfg.edge_hidden,
                                       rng);
  if (st.has_gcn())
    st.gcn = GcnParams::create(cfg.h_dim(), cfg.gcn_dim, cfg.gcn_layers, rng);
  if (st.has_reg_gcn())
    st.reg_gcn = GcnParams::create(cfg.h_dim(), cfg.gcn_dim, cfg.gcn_layers,
                                   rng, "reg_gcn");
  st.head = HeadParams::create(cfg.head_input_dim(), cfg.head_hidden, rng);
  return st;
}

std::vector<nn::Tensor*> ModelState::parameters() {
  std::vector<nn::Tensor*> out;
  auto append = [&](std::vector<nn::Tensor*> v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  if (has_emb()) out.push_back(&emb.table);
  out.push_back(&pos.table);
  if (has_rnn())
    append(cfg.mask.use_onlstm ? rnn.tensors() : rnn.lstm_tensors());
  if (has_edge()) append(edge.tensors());
  if (has_gcn()) append(gcn.tensors());
  if (has_reg_gcn()) append(reg_gcn.tensors());
  append(head.tensors());
  return out;
}

std::map<std::string, nn::Tensor*> ModelState::named_parameters() {
  std::map<std::string, nn::Tensor*> out;
  for (nn::Tensor* t : parameters()) out[t->name] = t;
  return out;
}

LossBreakdown SentenceForward::breakdown() const {
  LossBreakdown b;
  b.pred = loss_pred_v.valid() ? g.scalar_value(loss_pred_v) : 0.0;
  b.kl = loss_kl_v.valid() ? g.scalar_value(loss_kl_v) : 0.0;
  b.reg = loss_reg_v.valid() ? g.scalar_value(loss_reg_v) : 0.0;
  b.total = total.valid() ? g.scalar_value(total) : 0.0;
  return b;
}

std::unique_ptr<SentenceForward> forward_sentence(const Sentence& s,
                                                  ModelState& state,
                                                  bool with_losses) {
  const ModelConfig& cfg = state.cfg;
  const AblationMask& mask = cfg.mask;
  const int n = s.size();
  auto fwd = std::make_unique<SentenceForward>(s.heads);
  nn::Graph& g = fwd->g;
  fwd->distances = tree_distances(fwd->tree, s.target_span);

  // token features
  nn::Var tok;
  if (cfg.sidecar_dim > 0) {
    if (!s.context_vectors)
      throw DataError("model expects sidecar token vectors");
    if (s.context_vectors->rows() != n ||
        s.context_vectors->cols() != cfg.sidecar_dim)
      throw DataError("sidecar vector shape does not match model config");
    tok = g.constant(*s.context_vectors);
  } else {
    std::vector<int> ids;
    ids.reserve(static_cast<size_t>(n));
    for (const auto& w : s.tokens) ids.push_back(state.vocab.id(w));
    tok = g.gather_rows(state.emb.table, std::move(ids));
  }
  std::vector<int> rows;
  rows.reserve(static_cast<size_t>(n));
  for (int r : relative_positions(n, s.target_span))
    rows.push_back(state.pos.row_for_offset(r));
  fwd->x = g.hconcat(tok, g.gather_rows(state.pos.table, std::move(rows)));

  // recurrent states
  if (mask.use_onlstm) {
    auto run = onlstm_run(g, fwd->x, state.rnn);
    fwd->h_states = run.states;
    fwd->s_model = model_scores(g, run.imp);
  } else if (mask.use_plain_lstm) {
    fwd->h_states = lstm_run(g, fwd->x, state.rnn);
  } else {
    fwd->h_states = fwd->x;
  }

  // adjacency and graph convolution
  if (mask.use_gcn) {
    const Eigen::MatrixXd ad = dep_adjacency(fwd->tree);
    if (cfg.direct_a) {
      fwd->adj = edge_scores(
          g, direct_adjacency_features(ad, fwd->distances), n, state.edge);
    } else if (mask.use_ad && mask.use_at) {
      fwd->adj = combine_adjacency(
          g, g.constant(ad),
          target_importance_matrix(g, fwd->distances, state.edge), cfg.gamma);
    } else if (mask.use_at) {
      fwd->adj = target_importance_matrix(g, fwd->distances, state.edge);
    } else {
      fwd->adj = g.constant(ad);
    }
    fwd->hbar = gcn_forward(g, fwd->h_states, fwd->adj, state.gcn);
  }

  nn::Var v = mask.use_gcn ? g.hconcat(fwd->h_states, fwd->hbar)
                           : fwd->h_states;
  fwd->logits = head_logits(g, v, state.head);
  fwd->prob_rows = g.softmax_rows(fwd->logits);

  if (with_losses) {
    const BioLabels gold = encode_bio(s.opinion_spans, n);
    std::vector<int> labels;
    labels.reserve(gold.size());
    for (Tag t : gold) labels.push_back(static_cast<int>(t));
    fwd->loss_pred_v = g.cross_entropy_rows(fwd->logits, std::move(labels));
    fwd->total = fwd->loss_pred_v;

    if (mask.use_kl) {
      nn::Var syn = g.constant(syntax_scores(fwd->distances));
      fwd->loss_kl_v = loss_kl(g, fwd->s_model, syn);
      fwd->total = g.add(fwd->total, g.scale(fwd->loss_kl_v, cfg.alpha));
    }
    if (mask.use_reg) {
      GcnParams& reg_params =
          state.has_reg_gcn() ? state.reg_gcn : state.gcn;
      fwd->loss_reg_v =
          regularize(g, fwd->h_states, fwd->hbar, fwd->adj, fwd->tree,
                     s.target_span, opinion_tokens(s), other_tokens(s),
                     reg_params, mask);
      fwd->total = g.add(fwd->total, g.scale(fwd->loss_reg_v, cfg.beta));
    }
  }
  return fwd;
}

Eigen::MatrixXd token_distributions(ModelState& state, const Sentence& s) {
  auto fwd = forward_sentence(s, state, false);
  return fwd->g.value(fwd->prob_rows);
}

}  // namespace ong
