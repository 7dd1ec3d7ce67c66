#include "ong/tree.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace ong {

DepTree::DepTree(const std::vector<int>& heads) : heads_(heads) {
  Sentence probe;
  probe.tokens.assign(heads.size(), "_");
  probe.heads = heads;
  probe.target_span = {0, 0};
  validate_sentence(probe);

  n_ = static_cast<int>(heads.size());
  adj_.assign(static_cast<size_t>(n_), {});
  for (int i = 0; i < n_; ++i) {
    const int h = heads_[static_cast<size_t>(i)];
    if (h == kRootHead) {
      root_ = i;
    } else {
      adj_[static_cast<size_t>(i)].push_back(h);
      adj_[static_cast<size_t>(h)].push_back(i);
    }
  }
}

std::vector<int> tree_distances(const DepTree& tree, Span target_span) {
  const int n = tree.size();
  if (target_span.start < 0 || target_span.end >= n)
    throw std::out_of_range("target span out of range");
  std::vector<int> dist(static_cast<size_t>(n), -1);
  std::queue<int> q;
  for (int i = target_span.start; i <= target_span.end; ++i) {
    dist[static_cast<size_t>(i)] = 0;
    q.push(i);
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : tree.neighbors()[static_cast<size_t>(u)])
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        q.push(v);
      }
  }
  return dist;
}

int tree_distance_to_span(const DepTree& tree, int node, Span target_span) {
  return tree_distances(tree, target_span)[static_cast<size_t>(node)];
}

Eigen::VectorXd syntax_scores(const std::vector<int>& distances) {
  const auto n = static_cast<Eigen::Index>(distances.size());
  Eigen::VectorXd neg(n);
  for (Eigen::Index i = 0; i < n; ++i)
    neg(i) = -static_cast<double>(distances[static_cast<size_t>(i)]);
  const double m = neg.maxCoeff();
  Eigen::VectorXd e = (neg.array() - m).exp();
  return e / e.sum();
}

Eigen::MatrixXd dep_adjacency(const DepTree& tree) {
  const int n = tree.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : tree.neighbors()[static_cast<size_t>(i)]) a(i, j) = 1.0;
  return a;
}

std::set<int> path_nodes(const DepTree& tree, int from, int to) {
  const int n = tree.size();
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw std::out_of_range("path endpoint out of range");
  // climb the head chains: collect from->root, then walk to->root until the
  // chains meet
  std::vector<int> from_chain;
  std::vector<int> pos_in_chain(static_cast<size_t>(n), -1);
  for (int u = from;; u = tree.heads()[static_cast<size_t>(u)]) {
    pos_in_chain[static_cast<size_t>(u)] = static_cast<int>(from_chain.size());
    from_chain.push_back(u);
    if (u == tree.root()) break;
  }
  std::set<int> nodes;
  for (int u = to;; u = tree.heads()[static_cast<size_t>(u)]) {
    if (pos_in_chain[static_cast<size_t>(u)] >= 0) {
      for (int k = 0; k <= pos_in_chain[static_cast<size_t>(u)]; ++k)
        nodes.insert(from_chain[static_cast<size_t>(k)]);
      break;
    }
    nodes.insert(u);
  }
  return nodes;
}

Eigen::MatrixXd pruned_mask(const DepTree& tree, Span target_span,
                            const std::set<int>& word_set) {
  const int n = tree.size();
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(n, n);
  if (word_set.empty()) return mask;

  std::set<int> keep;
  for (int w : word_set) {
    // closest target-span token to w (smallest index on ties)
    auto best_path = path_nodes(tree, target_span.start, w);
    for (int t = target_span.start + 1; t <= target_span.end; ++t) {
      auto p = path_nodes(tree, t, w);
      if (p.size() < best_path.size()) best_path = std::move(p);
    }
    keep.insert(best_path.begin(), best_path.end());
  }
  for (int i : keep)
    for (int j : keep) mask(i, j) = 1.0;
  return mask;
}

Eigen::MatrixXd pruned_adjacency(const Eigen::MatrixXd& a, const DepTree& tree,
                                 Span target_span,
                                 const std::set<int>& word_set) {
  if (a.rows() != tree.size() || a.cols() != tree.size())
    throw std::invalid_argument("adjacency shape does not match tree");
  return a.cwiseProduct(pruned_mask(tree, target_span, word_set));
}

}  // namespace ong
