#pragma once

#include <Eigen/Dense>
#include <set>
#include <vector>

#include "ong/corpus.h"

namespace ong {

// Validated rooted dependency tree, treated as undirected for all distance
// and path computations.
class DepTree {
 public:
  explicit DepTree(const std::vector<int>& heads);

  int size() const { return n_; }
  int root() const { return root_; }
  const std::vector<int>& heads() const { return heads_; }
  const std::vector<std::vector<int>>& neighbors() const { return adj_; }

 private:
  int n_ = 0;
  int root_ = -1;
  std::vector<int> heads_;
  std::vector<std::vector<int>> adj_;
};

// Edge count from each token to the nearest target-span token (0 on the
// target itself), by multi-source BFS.
std::vector<int> tree_distances(const DepTree& tree, Span target_span);

int tree_distance_to_span(const DepTree& tree, int node, Span target_span);

// softmax(-d): strictly positive, sums to one, decreasing in distance
Eigen::VectorXd syntax_scores(const std::vector<int>& distances);

// Binary adjacency with self-loops; symmetric.
Eigen::MatrixXd dep_adjacency(const DepTree& tree);

// Node set of the unique tree path, endpoints inclusive.
std::set<int> path_nodes(const DepTree& tree, int from, int to);

// 0/1 mask of K x K where K unions the paths from the closest target-span
// token to each word in word_set.
Eigen::MatrixXd pruned_mask(const DepTree& tree, Span target_span,
                            const std::set<int>& word_set);

// Entries of `a` restricted to K x K, zero elsewhere; shapes preserved.
Eigen::MatrixXd pruned_adjacency(const Eigen::MatrixXd& a, const DepTree& tree,
                                 Span target_span,
                                 const std::set<int>& word_set);

}  // namespace ong
