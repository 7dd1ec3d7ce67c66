#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ong/nn.h"

namespace ong {

// Scores one (i, j) cell from distance features. hidden == 0 is a single
// linear layer before the sigmoid; hidden > 0 inserts one ReLU layer.
struct EdgeScorerParams {
  int feature_dim = 5;
  int hidden = 0;
  nn::Tensor w1, b1;  // hidden x feat (or 1 x feat when hidden == 0)
  nn::Tensor w2, b2;  // 1 x hidden, unused when hidden == 0

  static EdgeScorerParams create(int feature_dim, int hidden, Rng& rng);
  std::vector<nn::Tensor*> tensors();
};

struct GcnParams {
  std::vector<nn::Tensor> weights;  // layer k: out_dim x in_dim
  std::vector<nn::Tensor> biases;

  static GcnParams create(int input_dim, int layer_dim, int layers, Rng& rng,
                          const std::string& prefix = "gcn");
  std::vector<nn::Tensor*> tensors();
  int layers() const { return static_cast<int>(weights.size()); }
  int output_dim() const {
    return static_cast<int>(weights.back().value.rows());
  }
};

// Pairwise feature rows [d_i, d_j, d_i + d_j, |d_i - d_j|, d_i * d_j] in
// row-major cell order; distances enter as raw integers.
Eigen::MatrixXd distance_features(const std::vector<int>& distances);

// Adds a leading a^d_ij column for the direct-A variant.
Eigen::MatrixXd direct_adjacency_features(const Eigen::MatrixXd& adj_dep,
                                          const std::vector<int>& distances);

nn::Var edge_scores(nn::Graph& g, const Eigen::MatrixXd& features, int n,
                    EdgeScorerParams& p);
nn::Var target_importance_matrix(nn::Graph& g,
                                 const std::vector<int>& distances,
                                 EdgeScorerParams& p);
Eigen::MatrixXd target_importance_matrix(const std::vector<int>& distances,
                                         EdgeScorerParams& p);

Eigen::MatrixXd combine_adjacency(const Eigen::MatrixXd& ad,
                                  const Eigen::MatrixXd& at, double gamma);
nn::Var combine_adjacency(nn::Graph& g, nn::Var ad, nn::Var at, double gamma);

nn::Var gcn_forward(nn::Graph& g, nn::Var h0, nn::Var a, GcnParams& p);
Eigen::MatrixXd gcn_forward(const Eigen::MatrixXd& h0,
                            const Eigen::MatrixXd& a, GcnParams& p);

}  // namespace ong
