#include "ong/tree.h"

#include <queue>

#include "doctest.h"
#include "ong/rng.h"

using namespace ong;

namespace {

// "All warranties honored by XYZ what I thought was a reputable company are
// disappointing" rooted at "disappointing".
const std::vector<int> kReviewHeads = {1, 13, 1,  4, 2, 7, 7,
                                       13, 11, 11, 11, 7, 13, -1};
constexpr int kWarranties = 1;
constexpr int kXyz = 4;
constexpr int kReputable = 10;
constexpr int kDisappointing = 13;

std::vector<int> random_heads(int n, Rng& rng) {
  // random attachment tree over a shuffled node order
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  rng.shuffle(order);
  std::vector<int> heads(static_cast<size_t>(n), kRootHead);
  for (int k = 1; k < n; ++k) {
    const int parent = order[static_cast<size_t>(
        rng.uniform_int(0, k - 1))];
    heads[static_cast<size_t>(order[static_cast<size_t>(k)])] = parent;
  }
  return heads;
}

// Floyd-Warshall all-pairs distances, independent of the BFS path.
std::vector<std::vector<int>> all_pairs_oracle(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(static_cast<size_t>(n),
                                  std::vector<int>(static_cast<size_t>(n), inf));
  for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)][static_cast<size_t>(i)] = 0;
  for (int i = 0; i < n; ++i)
    if (heads[static_cast<size_t>(i)] != kRootHead) {
      const int h = heads[static_cast<size_t>(i)];
      d[static_cast<size_t>(i)][static_cast<size_t>(h)] = 1;
      d[static_cast<size_t>(h)][static_cast<size_t>(i)] = 1;
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            std::min(d[static_cast<size_t>(i)][static_cast<size_t>(j)],
                     d[static_cast<size_t>(i)][static_cast<size_t>(k)] +
                         d[static_cast<size_t>(k)][static_cast<size_t>(j)]);
  return d;
}

// BFS parent reconstruction from `from`, then walk back from `to`.
std::set<int> path_oracle(const DepTree& tree, int from, int to) {
  std::vector<int> parent(static_cast<size_t>(tree.size()), -2);
  std::queue<int> q;
  q.push(from);
  parent[static_cast<size_t>(from)] = -1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : tree.neighbors()[static_cast<size_t>(u)])
      if (parent[static_cast<size_t>(v)] == -2) {
        parent[static_cast<size_t>(v)] = u;
        q.push(v);
      }
  }
  std::set<int> nodes;
  for (int u = to; u != -1; u = parent[static_cast<size_t>(u)]) nodes.insert(u);
  return nodes;
}

}  // namespace

TEST_CASE("DepTree validates and exposes undirected adjacency") {
  DepTree tree({-1, 0, 1});
  CHECK(tree.size() == 3);
  CHECK(tree.root() == 0);
  CHECK_THROWS_AS(DepTree({0, 1}), ParseError);
  CHECK_THROWS_AS(DepTree({-1, -1}), ParseError);
}

TEST_CASE("tree_distances matches the review-sentence tree") {
  DepTree tree(kReviewHeads);
  const auto d = tree_distances(tree, {kWarranties, kWarranties});
  CHECK(d[kWarranties] == 0);
  CHECK(d[kDisappointing] == 1);
  CHECK(d[kXyz] == 2);
  CHECK(d[kReputable] == 4);
}

TEST_CASE("tree_distances on a chain is symmetric around the target") {
  DepTree tree({-1, 0, 1});
  CHECK(tree_distances(tree, {1, 1}) == std::vector<int>{1, 0, 1});
}

TEST_CASE("tree_distances equals the all-pairs oracle") {
  Rng rng(21);
  for (int iter = 0; iter < 300; ++iter) {
    const int n = static_cast<int>(rng.uniform_int(1, 12));
    const auto heads = random_heads(n, rng);
    DepTree tree(heads);
    const auto oracle = all_pairs_oracle(heads);
    const int t = static_cast<int>(rng.uniform_int(0, n - 1));
    const auto d = tree_distances(tree, {t, t});
    for (int i = 0; i < n; ++i)
      CHECK(d[static_cast<size_t>(i)] ==
            oracle[static_cast<size_t>(i)][static_cast<size_t>(t)]);

    // multi-token spans take the minimum over span tokens
    if (n >= 2) {
      const int s = static_cast<int>(rng.uniform_int(0, n - 2));
      const auto ds = tree_distances(tree, {s, s + 1});
      for (int i = 0; i < n; ++i)
        CHECK(ds[static_cast<size_t>(i)] ==
              std::min(oracle[static_cast<size_t>(i)][static_cast<size_t>(s)],
                       oracle[static_cast<size_t>(i)]
                             [static_cast<size_t>(s + 1)]));
    }
  }
}

TEST_CASE("tree_distances changes by at most one across edges") {
  Rng rng(4);
  for (int iter = 0; iter < 50; ++iter) {
    const int n = static_cast<int>(rng.uniform_int(2, 12));
    const auto heads = random_heads(n, rng);
    DepTree tree(heads);
    const int t = static_cast<int>(rng.uniform_int(0, n - 1));
    const auto d = tree_distances(tree, {t, t});
    for (int i = 0; i < n; ++i)
      if (heads[static_cast<size_t>(i)] != kRootHead) {
        const int h = heads[static_cast<size_t>(i)];
        CHECK(std::abs(d[static_cast<size_t>(i)] - d[static_cast<size_t>(h)]) <=
              1);
      }
  }
}

TEST_CASE("syntax_scores matches closed forms") {
  const auto s2 = syntax_scores({1, 2});
  CHECK(s2(0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(s2(1) == doctest::Approx(0.2689414213699951).epsilon(1e-12));

  const auto s3 = syntax_scores({0, 1, 1});
  CHECK(s3(0) == doctest::Approx(0.5761168847658291).epsilon(1e-12));
  CHECK(s3(1) == doctest::Approx(0.2119415576170854).epsilon(1e-12));
  CHECK(s3(2) == doctest::Approx(0.2119415576170854).epsilon(1e-12));

  const auto u = syntax_scores({3, 3, 3, 3});
  for (int i = 0; i < 4; ++i) CHECK(u(i) == doctest::Approx(0.25));
}

TEST_CASE("syntax_scores sums to one and orders by distance") {
  Rng rng(17);
  for (int iter = 0; iter < 100; ++iter) {
    const int n = static_cast<int>(rng.uniform_int(1, 14));
    std::vector<int> d(static_cast<size_t>(n));
    for (auto& v : d) v = static_cast<int>(rng.uniform_int(0, 9));
    const auto s = syntax_scores(d);
    CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-6));
    for (int i = 0; i < n; ++i) {
      CHECK(s(i) > 0.0);
      for (int j = 0; j < n; ++j)
        if (d[static_cast<size_t>(i)] < d[static_cast<size_t>(j)])
          CHECK(s(i) > s(j));
    }
  }
}

TEST_CASE("dep_adjacency is symmetric with self-loops") {
  DepTree chain({-1, 0, 1});
  Eigen::MatrixXd a = dep_adjacency(chain);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 1, 0, 1, 1, 1, 0, 1, 1;
  CHECK(a == expected);

  DepTree single({-1});
  CHECK(dep_adjacency(single) == Eigen::MatrixXd::Identity(1, 1));

  Rng rng(3);
  for (int iter = 0; iter < 30; ++iter) {
    const int n = static_cast<int>(rng.uniform_int(1, 10));
    DepTree tree(random_heads(n, rng));
    Eigen::MatrixXd m = dep_adjacency(tree);
    CHECK(m == m.transpose().eval());
    for (int i = 0; i < n; ++i)
      CHECK(m.row(i).sum() ==
            doctest::Approx(1.0 + static_cast<double>(
                                      tree.neighbors()[static_cast<size_t>(i)]
                                          .size())));
  }
}

TEST_CASE("path_nodes covers chains, identity and the BFS oracle") {
  DepTree chain({-1, 0, 1, 2});
  CHECK(path_nodes(chain, 1, 3) == std::set<int>{1, 2, 3});
  CHECK(path_nodes(chain, 2, 2) == std::set<int>{2});

  Rng rng(31);
  for (int iter = 0; iter < 300; ++iter) {
    const int n = static_cast<int>(rng.uniform_int(1, 12));
    DepTree tree(random_heads(n, rng));
    const int a = static_cast<int>(rng.uniform_int(0, n - 1));
    const int b = static_cast<int>(rng.uniform_int(0, n - 1));
    CHECK(path_nodes(tree, a, b) == path_oracle(tree, a, b));
  }
}

TEST_CASE("pruned_adjacency keeps exactly the path nodes") {
  DepTree chain({-1, 0, 1, 2});
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(4, 4, 0.5);
  const auto pruned = pruned_adjacency(a, chain, {1, 1}, {3});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const bool kept = i >= 1 && j >= 1;
      CHECK(pruned(i, j) == (kept ? 0.5 : 0.0));
    }

  CHECK(pruned_adjacency(a, chain, {1, 1}, {}) == Eigen::MatrixXd::Zero(4, 4));

  // a path through every node retains the full matrix
  const auto full = pruned_adjacency(a, chain, {0, 0}, {3});
  CHECK(full == a);
}

TEST_CASE("pruned_adjacency matches the path-enumeration oracle") {
  Rng rng(13);
  for (int iter = 0; iter < 500; ++iter) {
    const int n = static_cast<int>(rng.uniform_int(1, 10));
    DepTree tree(random_heads(n, rng));
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(0.05, 1.0);
    const int t = static_cast<int>(rng.uniform_int(0, n - 1));
    std::set<int> words;
    for (int i = 0; i < n; ++i)
      if (rng.bernoulli(0.3)) words.insert(i);

    const auto pruned = pruned_adjacency(a, tree, {t, t}, words);

    std::set<int> keep;
    for (int w : words)
      for (int u : path_oracle(tree, t, w)) keep.insert(u);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double expect = keep.count(i) && keep.count(j) ? a(i, j) : 0.0;
        CHECK(pruned(i, j) == expect);
        CHECK(pruned(i, j) <= a(i, j));
      }

    // idempotence
    CHECK(pruned_adjacency(pruned, tree, {t, t}, words) == pruned);
  }
}
