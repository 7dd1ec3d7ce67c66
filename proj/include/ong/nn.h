#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ong/rng.h"

namespace ong::nn {

using Mat = Eigen::MatrixXd;

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trainable value with an accumulated gradient of the same shape.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;

  Tensor() = default;
  Tensor(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Mat::Zero(rows, cols)),
        grad(Mat::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }

  void init_uniform(Rng& rng, double lo, double hi) {
    for (Eigen::Index i = 0; i < value.rows(); ++i)
      for (Eigen::Index j = 0; j < value.cols(); ++j)
        value(i, j) = rng.uniform(lo, hi);
  }
};

struct Var {
  int i = -1;
  bool valid() const { return i >= 0; }
};

// Single-use reverse-mode tape. Values are computed eagerly as nodes are
// created; backward() walks the tape once and accumulates into node grads
// and, for param/gather leaves, into the referenced Tensor grads.
class Graph {
 public:
  Graph();
  ~Graph();
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Mat m);
  Var scalar(double v);
  Var param(Tensor& t);
  Var gather_rows(Tensor& t, std::vector<int> rows);

  Var affine(Var w, Var x, Var b);               // w*x + b
  Var affine2(Var w, Var x, Var u, Var h, Var b);  // w*x + u*h + b
  Var linear_rows(Var x, Var w, Var b);          // x*w^T + repeated b^T

  Var sigmoid(Var x);
  Var tanh(Var x);
  Var relu(Var x);
  Var log(Var x);

  Var softmax_vec(Var x);
  Var softmax_rows(Var x);
  Var cumsum_vec(Var x);
  Var one_minus(Var x);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double c);

  Var sum(Var x);         // 1x1
  Var dot(Var a, Var b);  // column vectors, 1x1

  Var stack_scalars(const std::vector<Var>& xs);  // n x 1
  Var stack_rows(const std::vector<Var>& cols);   // row i = cols[i]^T
  Var row_as_col(Var x, int row);
  Var hconcat(Var a, Var b);
  Var vec_to_square(Var v, int n);  // row-major: out(i,j) = v(i*n+j)

  // Row-normalized aggregation: out_i = sum_j a_ij z_j / sum_j a_ij, with
  // all-zero rows mapping to the zero vector.
  Var gcn_aggregate(Var a, Var z);

  // Mean over rows of -log softmax(logits)[label]; numerically fused.
  Var cross_entropy_rows(Var logits, std::vector<int> labels);

  // Guarded: exactly 0 (with no gradient) when either norm is below 1e-12.
  Var cosine(Var a, Var b);

  Var rowmax_pool(Var x, std::vector<int> rows);

  const Mat& value(Var v) const;
  const Mat& grad(Var v) const;
  double scalar_value(Var v) const;

  void backward(Var loss, double seed = 1.0);

  int size() const;

 private:
  struct Node;
  std::vector<std::unique_ptr<Node>> nodes_;
  bool ran_backward_ = false;

  Node& at(Var v);
  const Node& at(Var v) const;
  Var push(std::unique_ptr<Node> n);
};

}  // namespace ong::nn
