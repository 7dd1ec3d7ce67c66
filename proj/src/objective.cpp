#include "ong/objective.h"

#include <cmath>
#include <stdexcept>

namespace ong {

AblationMask AblationMask::normalized() const {
  AblationMask m = *this;
  if (m.use_plain_lstm) m.use_onlstm = false;
  if (!m.use_onlstm) m.use_kl = false;
  if (!m.use_gcn) m.reg_pool = RegPool::kMaxpool;
  return m;
}

void AblationMask::validate() const {
  if (use_onlstm && use_plain_lstm)
    throw std::invalid_argument(
        "use_onlstm and use_plain_lstm are mutually exclusive");
  if (use_kl && !use_onlstm)
    throw std::invalid_argument("use_kl requires use_onlstm");
  if (use_reg && !use_gcn && reg_pool == RegPool::kGraph)
    throw std::invalid_argument("graph-pooled regularization requires a GCN");
  if (!use_ad && !use_at)
    throw std::invalid_argument("at least one adjacency source is required");
}

AblationMask AblationMask::for_variant(const std::string& name) {
  AblationMask m;
  if (name == "ong") {
    // full model
  } else if (name == "ong-kl") {
    m.use_kl = false;
  } else if (name == "ong-onlstm") {
    m.use_onlstm = false;
  } else if (name == "ong-wlstm") {
    m.use_plain_lstm = true;
  } else if (name == "ong-ad") {
    m.use_ad = false;
  } else if (name == "ong-at") {
    m.use_at = false;
  } else if (name == "ong-reg") {
    m.use_reg = false;
  } else if (name == "ong-mp-gcn") {
    m.reg_pool = RegPool::kMaxpool;
  } else if (name == "ong-gcn") {
    m.use_gcn = false;
  } else if (name == "ong-gcn-reg") {
    // syntax-free: prediction loss only
    m.use_gcn = false;
    m.use_reg = false;
    m.use_kl = false;
  } else {
    throw std::invalid_argument("unknown variant '" + name + "'");
  }
  m = m.normalized();
  m.validate();
  return m;
}

const std::vector<std::string>& AblationMask::variant_names() {
  static const std::vector<std::string> names = {
      "ong-kl",     "ong-onlstm", "ong-wlstm", "ong-ad",     "ong-at",
      "ong-reg",    "ong-mp-gcn", "ong-gcn",   "ong-gcn-reg"};
  return names;
}

HeadParams HeadParams::create(int input_dim, int hidden_dim, Rng& rng) {
  HeadParams p;
  const double b1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  p.w1 = nn::Tensor("head.w1", hidden_dim, input_dim);
  p.b1 = nn::Tensor("head.b1", hidden_dim, 1);
  p.w1.init_uniform(rng, -b1, b1);
  p.b1.init_uniform(rng, -b1, b1);
  const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  p.w2 = nn::Tensor("head.w2", 3, hidden_dim);
  p.b2 = nn::Tensor("head.b2", 3, 1);
  p.w2.init_uniform(rng, -b2, b2);
  p.b2.init_uniform(rng, -b2, b2);
  return p;
}

std::vector<nn::Tensor*> HeadParams::tensors() {
  return {&w1, &b1, &w2, &b2};
}

nn::Var head_logits(nn::Graph& g, nn::Var v, HeadParams& p) {
  nn::Var h = g.relu(g.linear_rows(v, g.param(p.w1), g.param(p.b1)));
  return g.linear_rows(h, g.param(p.w2), g.param(p.b2));
}

Eigen::MatrixXd predict_distributions(const Eigen::MatrixXd& h,
                                      const Eigen::MatrixXd& hbar,
                                      HeadParams& p,
                                      const AblationMask& mask) {
  nn::Graph g;
  nn::Var v = g.constant(h);
  if (mask.use_gcn) v = g.hconcat(v, g.constant(hbar));
  return g.value(g.softmax_rows(head_logits(g, v, p)));
}

double loss_pred(const Eigen::MatrixXd& dists, const BioLabels& gold) {
  if (dists.rows() != static_cast<Eigen::Index>(gold.size()))
    throw nn::ShapeError("loss_pred length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < dists.rows(); ++i)
    total -= std::log(
        dists(i, static_cast<int>(gold[static_cast<size_t>(i)])));
  return total / static_cast<double>(dists.rows());
}

double loss_kl(const Eigen::VectorXd& model, const Eigen::VectorXd& syn) {
  if (model.size() != syn.size())
    throw nn::ShapeError("loss_kl length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < model.size(); ++i)
    total += model(i) * std::log(model(i) / syn(i));
  return total;
}

nn::Var loss_kl(nn::Graph& g, nn::Var model, nn::Var syn) {
  return g.sum(g.mul(model, g.sub(g.log(model), g.log(syn))));
}

LossBreakdown total_loss(double pred, double kl, double reg, double alpha,
                         double beta, const AblationMask& mask) {
  LossBreakdown out;
  out.pred = pred;
  out.kl = kl;
  out.reg = reg;
  out.total = pred;
  if (mask.use_kl) out.total += alpha * kl;
  if (mask.use_reg) out.total += beta * reg;
  return out;
}

nn::Var regularize(nn::Graph& g, nn::Var h, nn::Var hbar, nn::Var a,
                   const DepTree& tree, Span target_span,
                   const std::set<int>& opinion_set,
                   const std::set<int>& other_set, GcnParams& gcn_params,
                   const AblationMask& mask) {
  if (!mask.use_reg)
    throw std::invalid_argument("regularize called with use_reg off");
  const int t = target_span.start;
  const bool graph_mode =
      mask.use_gcn && mask.reg_pool == AblationMask::RegPool::kGraph;

  nn::Var r_tar = g.row_as_col(mask.use_gcn ? hbar : h, t);
  nn::Var r_opn, r_oth;
  if (graph_mode) {
    if (!opinion_set.empty()) {
      nn::Var a_opn =
          g.mul(a, g.constant(pruned_mask(tree, target_span, opinion_set)));
      r_opn = g.row_as_col(gcn_forward(g, h, a_opn, gcn_params), t);
    }
    if (!other_set.empty()) {
      nn::Var a_oth =
          g.mul(a, g.constant(pruned_mask(tree, target_span, other_set)));
      r_oth = g.row_as_col(gcn_forward(g, h, a_oth, gcn_params), t);
    }
  } else {
    nn::Var src = mask.use_gcn ? hbar : h;
    if (!opinion_set.empty())
      r_opn = g.rowmax_pool(
          src, std::vector<int>(opinion_set.begin(), opinion_set.end()));
    if (!other_set.empty())
      r_oth = g.rowmax_pool(
          src, std::vector<int>(other_set.begin(), other_set.end()));
  }

  nn::Var loss = g.scalar(1.0);
  if (r_opn.valid()) loss = g.sub(loss, g.cosine(r_tar, r_opn));
  if (r_oth.valid()) loss = g.add(loss, g.cosine(r_tar, r_oth));
  return loss;
}

double regularize(const Eigen::MatrixXd& h, const Eigen::MatrixXd& hbar,
                  const Eigen::MatrixXd& a, const DepTree& tree,
                  Span target_span, const std::set<int>& opinion_set,
                  const std::set<int>& other_set, GcnParams& gcn_params,
                  const AblationMask& mask) {
  nn::Graph g;
  return g.scalar_value(regularize(g, g.constant(h), g.constant(hbar),
                                   g.constant(a), tree, target_span,
                                   opinion_set, other_set, gcn_params, mask));
}

}  // namespace ong
