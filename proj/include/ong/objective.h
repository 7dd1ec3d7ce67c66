#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "ong/corpus.h"
#include "ong/gcn.h"
#include "ong/nn.h"
#include "ong/tree.h"

namespace ong {

struct AblationMask {
  bool use_kl = true;
  bool use_reg = true;
  bool use_gcn = true;
  bool use_onlstm = true;
  bool use_plain_lstm = false;
  bool use_ad = true;
  bool use_at = true;
  enum class RegPool { kGraph, kMaxpool };
  RegPool reg_pool = RegPool::kGraph;

  // Applies the implications between flags: a plain LSTM replaces the
  // ON-LSTM, no ON-LSTM means no consistency loss, and no GCN forces
  // max-pooled regularization over the recurrent states.
  AblationMask normalized() const;
  void validate() const;

  // Named variants: ong, ong-kl, ong-onlstm, ong-wlstm, ong-ad, ong-at,
  // ong-reg, ong-mp-gcn, ong-gcn, ong-gcn-reg.
  static AblationMask for_variant(const std::string& name);
  static const std::vector<std::string>& variant_names();

  bool operator==(const AblationMask&) const = default;
};

// Two-layer feed-forward with a softmax over {B, I, O}.
struct HeadParams {
  nn::Tensor w1, b1, w2, b2;

  static HeadParams create(int input_dim, int hidden_dim, Rng& rng);
  std::vector<nn::Tensor*> tensors();
  int input_dim() const { return static_cast<int>(w1.value.cols()); }
};

nn::Var head_logits(nn::Graph& g, nn::Var v, HeadParams& p);

// Probability rows over {B, I, O}; V_i = [h_i, hbar_i], or [h_i] when the
// GCN is ablated.
Eigen::MatrixXd predict_distributions(const Eigen::MatrixXd& h,
                                      const Eigen::MatrixXd& hbar,
                                      HeadParams& p, const AblationMask& mask);

// Mean token negative log-likelihood of the gold labels.
double loss_pred(const Eigen::MatrixXd& dists, const BioLabels& gold);

// KL(model || syn).
double loss_kl(const Eigen::VectorXd& model, const Eigen::VectorXd& syn);
nn::Var loss_kl(nn::Graph& g, nn::Var model, nn::Var syn);

struct LossBreakdown {
  double pred = 0.0;
  double kl = 0.0;
  double reg = 0.0;
  double total = 0.0;
};

LossBreakdown total_loss(double pred, double kl, double reg, double alpha,
                         double beta, const AblationMask& mask);

// Triplet representation loss 1 - cos(R_tar, R_opn) + cos(R_tar, R_oth).
// Graph mode runs the shared GCN over the pruned adjacencies of `a`;
// max-pool mode pools rows of hbar (or of h when the GCN is ablated).
// Empty word sets drop their cosine term; zero-norm vectors contribute 0.
nn::Var regularize(nn::Graph& g, nn::Var h, nn::Var hbar, nn::Var a,
                   const DepTree& tree, Span target_span,
                   const std::set<int>& opinion_set,
                   const std::set<int>& other_set, GcnParams& gcn_params,
                   const AblationMask& mask);
double regularize(const Eigen::MatrixXd& h, const Eigen::MatrixXd& hbar,
                  const Eigen::MatrixXd& a, const DepTree& tree,
                  Span target_span, const std::set<int>& opinion_set,
                  const std::set<int>& other_set, GcnParams& gcn_params,
                  const AblationMask& mask);

}  // namespace ong
