#include "ong/gcn.h"

#include <cmath>
#include <stdexcept>

namespace ong {

EdgeScorerParams EdgeScorerParams::create(int feature_dim, int hidden,
                                          Rng& rng) {
  EdgeScorerParams p;
  p.feature_dim = feature_dim;
  p.hidden = hidden;
  const double b1 = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  if (hidden == 0) {
    p.w1 = nn::Tensor("edge.w1", 1, feature_dim);
    p.b1 = nn::Tensor("edge.b1", 1, 1);
    p.w1.init_uniform(rng, -b1, b1);
    p.b1.init_uniform(rng, -b1, b1);
  } else {
    p.w1 = nn::Tensor("edge.w1", hidden, feature_dim);
    p.b1 = nn::Tensor("edge.b1", hidden, 1);
    p.w1.init_uniform(rng, -b1, b1);
    p.b1.init_uniform(rng, -b1, b1);
    const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    p.w2 = nn::Tensor("edge.w2", 1, hidden);
    p.b2 = nn::Tensor("edge.b2", 1, 1);
    p.w2.init_uniform(rng, -b2, b2);
    p.b2.init_uniform(rng, -b2, b2);
  }
  return p;
}

std::vector<nn::Tensor*> EdgeScorerParams::tensors() {
  if (hidden == 0) return {&w1, &b1};
  return {&w1, &b1, &w2, &b2};
}

GcnParams GcnParams::create(int input_dim, int layer_dim, int layers,
                            Rng& rng, const std::string& prefix) {
  if (layers < 1) throw std::invalid_argument("gcn needs at least one layer");
  GcnParams p;
  int in = input_dim;
  for (int k = 0; k < layers; ++k) {
    const double b = 1.0 / std::sqrt(static_cast<double>(in));
    nn::Tensor w(prefix + ".w" + std::to_string(k), layer_dim, in);
    nn::Tensor bias(prefix + ".b" + std::to_string(k), layer_dim, 1);
    w.init_uniform(rng, -b, b);
    bias.init_uniform(rng, -b, b);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(bias));
    in = layer_dim;
  }
  return p;
}

std::vector<nn::Tensor*> GcnParams::tensors() {
  std::vector<nn::Tensor*> out;
  for (size_t k = 0; k < weights.size(); ++k) {
    out.push_back(&weights[k]);
    out.push_back(&biases[k]);
  }
  return out;
}

Eigen::MatrixXd distance_features(const std::vector<int>& distances) {
  const int n = static_cast<int>(distances.size());
  Eigen::MatrixXd f(static_cast<Eigen::Index>(n) * n, 5);
  for (int i = 0; i < n; ++i) {
    const auto di = static_cast<double>(distances[static_cast<size_t>(i)]);
    for (int j = 0; j < n; ++j) {
      const auto dj = static_cast<double>(distances[static_cast<size_t>(j)]);
      const Eigen::Index r = static_cast<Eigen::Index>(i) * n + j;
      f(r, 0) = di;
      f(r, 1) = dj;
      f(r, 2) = di + dj;
      f(r, 3) = std::abs(di - dj);
      f(r, 4) = di * dj;
    }
  }
  return f;
}

Eigen::MatrixXd direct_adjacency_features(const Eigen::MatrixXd& adj_dep,
                                          const std::vector<int>& distances) {
  const auto n = static_cast<Eigen::Index>(distances.size());
  Eigen::MatrixXd base = distance_features(distances);
  Eigen::MatrixXd f(n * n, 6);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) f(i * n + j, 0) = adj_dep(i, j);
  f.rightCols(5) = base;
  return f;
}

nn::Var edge_scores(nn::Graph& g, const Eigen::MatrixXd& features, int n,
                    EdgeScorerParams& p) {
  if (features.cols() != p.feature_dim)
    throw nn::ShapeError("edge scorer feature width mismatch");
  nn::Var x = g.constant(features);
  nn::Var s = g.linear_rows(x, g.param(p.w1), g.param(p.b1));
  if (p.hidden > 0)
    s = g.linear_rows(g.relu(s), g.param(p.w2), g.param(p.b2));
  return g.vec_to_square(g.sigmoid(s), n);
}

nn::Var target_importance_matrix(nn::Graph& g,
                                 const std::vector<int>& distances,
                                 EdgeScorerParams& p) {
  return edge_scores(g, distance_features(distances),
                     static_cast<int>(distances.size()), p);
}

Eigen::MatrixXd target_importance_matrix(const std::vector<int>& distances,
                                         EdgeScorerParams& p) {
  nn::Graph g;
  return g.value(target_importance_matrix(g, distances, p));
}

Eigen::MatrixXd combine_adjacency(const Eigen::MatrixXd& ad,
                                  const Eigen::MatrixXd& at, double gamma) {
  if (ad.rows() != at.rows() || ad.cols() != at.cols())
    throw nn::ShapeError("combine_adjacency shape mismatch");
  return gamma * ad + (1.0 - gamma) * at;
}

nn::Var combine_adjacency(nn::Graph& g, nn::Var ad, nn::Var at, double gamma) {
  return g.add(g.scale(ad, gamma), g.scale(at, 1.0 - gamma));
}

nn::Var gcn_forward(nn::Graph& g, nn::Var h0, nn::Var a, GcnParams& p) {
  nn::Var h = h0;
  for (size_t k = 0; k < p.weights.size(); ++k) {
    nn::Var z = g.linear_rows(h, g.param(p.weights[k]), g.param(p.biases[k]));
    h = g.relu(g.gcn_aggregate(a, z));
  }
  return h;
}

Eigen::MatrixXd gcn_forward(const Eigen::MatrixXd& h0,
                            const Eigen::MatrixXd& a, GcnParams& p) {
  nn::Graph g;
  return g.value(gcn_forward(g, g.constant(h0), g.constant(a), p));
}

}  // namespace ong
