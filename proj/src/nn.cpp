#include "ong/nn.h"

#include <algorithm>
#include <cmath>

namespace ong::nn {

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

enum class Op {
  kConstant,
  kParam,
  kGatherRows,
  kAffine2,
  kLinearRows,
  kSigmoid,
  kTanh,
  kRelu,
  kLog,
  kSoftmaxVec,
  kSoftmaxRows,
  kCumsumVec,
  kOneMinus,
  kAdd,
  kSub,
  kMul,
  kScale,
  kSum,
  kDot,
  kStackScalars,
  kStackRows,
  kRowAsCol,
  kHconcat,
  kVecToSquare,
  kGcnAggregate,
  kCrossEntropyRows,
  kCosine,
  kRowmaxPool,
};

struct Graph::Node {
  Op op;
  Mat val;
  Mat grad;
  std::vector<int> args;
  std::vector<int> ints;  // labels / row ids / cached integer payloads
  double scalar = 0.0;
  Mat aux;  // cached forward quantities (probs, row sums, argmax rows, ...)
  Tensor* tensor = nullptr;

  explicit Node(Op o) : op(o) {}
};

Graph::Graph() = default;
Graph::~Graph() = default;

Graph::Node& Graph::at(Var v) {
  check(v.i >= 0 && v.i < static_cast<int>(nodes_.size()), "invalid var");
  return *nodes_[static_cast<size_t>(v.i)];
}

const Graph::Node& Graph::at(Var v) const {
  check(v.i >= 0 && v.i < static_cast<int>(nodes_.size()), "invalid var");
  return *nodes_[static_cast<size_t>(v.i)];
}

Var Graph::push(std::unique_ptr<Node> n) {
  n->grad = Mat::Zero(n->val.rows(), n->val.cols());
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

int Graph::size() const { return static_cast<int>(nodes_.size()); }

const Mat& Graph::value(Var v) const { return at(v).val; }
const Mat& Graph::grad(Var v) const { return at(v).grad; }

double Graph::scalar_value(Var v) const {
  const Mat& m = at(v).val;
  check(m.size() == 1, "scalar_value on non-scalar");
  return m(0, 0);
}

Var Graph::constant(Mat m) {
  auto n = std::make_unique<Node>(Op::kConstant);
  n->val = std::move(m);
  return push(std::move(n));
}

Var Graph::scalar(double v) { return constant(Mat::Constant(1, 1, v)); }

Var Graph::param(Tensor& t) {
  auto n = std::make_unique<Node>(Op::kParam);
  n->val = t.value;
  n->tensor = &t;
  return push(std::move(n));
}

Var Graph::gather_rows(Tensor& t, std::vector<int> rows) {
  auto n = std::make_unique<Node>(Op::kGatherRows);
  n->val.resize(static_cast<Eigen::Index>(rows.size()), t.value.cols());
  for (size_t k = 0; k < rows.size(); ++k) {
    check(rows[k] >= 0 && rows[k] < t.value.rows(), "gather row out of range");
    n->val.row(static_cast<Eigen::Index>(k)) = t.value.row(rows[k]);
  }
  n->tensor = &t;
  n->ints = std::move(rows);
  return push(std::move(n));
}

Var Graph::affine(Var w, Var x, Var b) {
  return affine2(w, x, Var{}, Var{}, b);
}

Var Graph::affine2(Var w, Var x, Var u, Var h, Var b) {
  const Mat& wv = at(w).val;
  const Mat& xv = at(x).val;
  const Mat& bv = at(b).val;
  check(xv.cols() == 1 && bv.cols() == 1, "affine expects column vectors");
  check(wv.cols() == xv.rows() && wv.rows() == bv.rows(), "affine shapes");
  auto n = std::make_unique<Node>(Op::kAffine2);
  n->val = wv * xv + bv;
  if (u.valid()) {
    const Mat& uv = at(u).val;
    const Mat& hv = at(h).val;
    check(uv.cols() == hv.rows() && uv.rows() == wv.rows() && hv.cols() == 1,
          "affine recurrent shapes");
    n->val += uv * hv;
    n->args = {w.i, x.i, u.i, h.i, b.i};
  } else {
    n->args = {w.i, x.i, b.i};
  }
  return push(std::move(n));
}

Var Graph::linear_rows(Var x, Var w, Var b) {
  const Mat& xv = at(x).val;
  const Mat& wv = at(w).val;
  const Mat& bv = at(b).val;
  check(wv.cols() == xv.cols(), "linear_rows input width");
  check(bv.cols() == 1 && bv.rows() == wv.rows(), "linear_rows bias");
  auto n = std::make_unique<Node>(Op::kLinearRows);
  n->val = (xv * wv.transpose()).rowwise() + bv.col(0).transpose();
  n->args = {x.i, w.i, b.i};
  return push(std::move(n));
}

Var Graph::sigmoid(Var x) {
  auto n = std::make_unique<Node>(Op::kSigmoid);
  n->val = at(x).val.unaryExpr(
      [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::tanh(Var x) {
  auto n = std::make_unique<Node>(Op::kTanh);
  n->val = at(x).val.array().tanh();
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::relu(Var x) {
  auto n = std::make_unique<Node>(Op::kRelu);
  n->val = at(x).val.cwiseMax(0.0);
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::log(Var x) {
  auto n = std::make_unique<Node>(Op::kLog);
  n->val = at(x).val.array().log();
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::softmax_vec(Var x) {
  const Mat& xv = at(x).val;
  check(xv.cols() == 1, "softmax_vec expects a column vector");
  auto n = std::make_unique<Node>(Op::kSoftmaxVec);
  const double m = xv.maxCoeff();
  Mat e = (xv.array() - m).exp();
  n->val = e / e.sum();
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::softmax_rows(Var x) {
  const Mat& xv = at(x).val;
  auto n = std::make_unique<Node>(Op::kSoftmaxRows);
  n->val.resizeLike(xv);
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    const double m = xv.row(i).maxCoeff();
    Eigen::RowVectorXd e = (xv.row(i).array() - m).exp();
    n->val.row(i) = e / e.sum();
  }
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::cumsum_vec(Var x) {
  const Mat& xv = at(x).val;
  check(xv.cols() == 1, "cumsum_vec expects a column vector");
  auto n = std::make_unique<Node>(Op::kCumsumVec);
  n->val.resizeLike(xv);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    acc += xv(i, 0);
    n->val(i, 0) = acc;
  }
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::one_minus(Var x) {
  auto n = std::make_unique<Node>(Op::kOneMinus);
  n->val = 1.0 - at(x).val.array();
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
  check(at(a).val.rows() == at(b).val.rows() &&
            at(a).val.cols() == at(b).val.cols(),
        "add shapes");
  auto n = std::make_unique<Node>(Op::kAdd);
  n->val = at(a).val + at(b).val;
  n->args = {a.i, b.i};
  return push(std::move(n));
}

Var Graph::sub(Var a, Var b) {
  check(at(a).val.rows() == at(b).val.rows() &&
            at(a).val.cols() == at(b).val.cols(),
        "sub shapes");
  auto n = std::make_unique<Node>(Op::kSub);
  n->val = at(a).val - at(b).val;
  n->args = {a.i, b.i};
  return push(std::move(n));
}

Var Graph::mul(Var a, Var b) {
  check(at(a).val.rows() == at(b).val.rows() &&
            at(a).val.cols() == at(b).val.cols(),
        "mul shapes");
  auto n = std::make_unique<Node>(Op::kMul);
  n->val = at(a).val.cwiseProduct(at(b).val);
  n->args = {a.i, b.i};
  return push(std::move(n));
}

Var Graph::scale(Var a, double c) {
  auto n = std::make_unique<Node>(Op::kScale);
  n->val = c * at(a).val;
  n->scalar = c;
  n->args = {a.i};
  return push(std::move(n));
}

Var Graph::sum(Var x) {
  auto n = std::make_unique<Node>(Op::kSum);
  n->val = Mat::Constant(1, 1, at(x).val.sum());
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::dot(Var a, Var b) {
  const Mat& av = at(a).val;
  const Mat& bv = at(b).val;
  check(av.cols() == 1 && bv.cols() == 1 && av.rows() == bv.rows(),
        "dot expects equal-length column vectors");
  auto n = std::make_unique<Node>(Op::kDot);
  n->val = Mat::Constant(1, 1, av.col(0).dot(bv.col(0)));
  n->args = {a.i, b.i};
  return push(std::move(n));
}

Var Graph::stack_scalars(const std::vector<Var>& xs) {
  auto n = std::make_unique<Node>(Op::kStackScalars);
  n->val.resize(static_cast<Eigen::Index>(xs.size()), 1);
  for (size_t k = 0; k < xs.size(); ++k) {
    check(at(xs[k]).val.size() == 1, "stack_scalars expects scalars");
    n->val(static_cast<Eigen::Index>(k), 0) = at(xs[k]).val(0, 0);
    n->args.push_back(xs[k].i);
  }
  return push(std::move(n));
}

Var Graph::stack_rows(const std::vector<Var>& cols) {
  check(!cols.empty(), "stack_rows needs at least one row");
  const auto d = at(cols[0]).val.rows();
  auto n = std::make_unique<Node>(Op::kStackRows);
  n->val.resize(static_cast<Eigen::Index>(cols.size()), d);
  for (size_t k = 0; k < cols.size(); ++k) {
    const Mat& c = at(cols[k]).val;
    check(c.cols() == 1 && c.rows() == d, "stack_rows column shapes");
    n->val.row(static_cast<Eigen::Index>(k)) = c.col(0).transpose();
    n->args.push_back(cols[k].i);
  }
  return push(std::move(n));
}

Var Graph::row_as_col(Var x, int row) {
  const Mat& xv = at(x).val;
  check(row >= 0 && row < xv.rows(), "row_as_col row out of range");
  auto n = std::make_unique<Node>(Op::kRowAsCol);
  n->val = xv.row(row).transpose();
  n->ints = {row};
  n->args = {x.i};
  return push(std::move(n));
}

Var Graph::hconcat(Var a, Var b) {
  const Mat& av = at(a).val;
  const Mat& bv = at(b).val;
  check(av.rows() == bv.rows(), "hconcat row counts");
  auto n = std::make_unique<Node>(Op::kHconcat);
  n->val.resize(av.rows(), av.cols() + bv.cols());
  n->val << av, bv;
  n->args = {a.i, b.i};
  return push(std::move(n));
}

Var Graph::vec_to_square(Var v, int sz) {
  const Mat& vv = at(v).val;
  check(vv.cols() == 1 && vv.rows() == static_cast<Eigen::Index>(sz) * sz,
        "vec_to_square length");
  auto n = std::make_unique<Node>(Op::kVecToSquare);
  n->val.resize(sz, sz);
  for (int i = 0; i < sz; ++i)
    for (int j = 0; j < sz; ++j) n->val(i, j) = vv(i * sz + j, 0);
  n->ints = {sz};
  n->args = {v.i};
  return push(std::move(n));
}

Var Graph::gcn_aggregate(Var a, Var z) {
  const Mat& av = at(a).val;
  const Mat& zv = at(z).val;
  check(av.rows() == av.cols() && av.rows() == zv.rows(),
        "gcn_aggregate shapes");
  auto n = std::make_unique<Node>(Op::kGcnAggregate);
  Eigen::VectorXd s = av.rowwise().sum();
  n->val.resize(zv.rows(), zv.cols());
  for (Eigen::Index i = 0; i < av.rows(); ++i) {
    if (s(i) == 0.0)
      n->val.row(i).setZero();
    else
      n->val.row(i) = (av.row(i) * zv) / s(i);
  }
  n->aux = s;
  n->args = {a.i, z.i};
  return push(std::move(n));
}

Var Graph::cross_entropy_rows(Var logits, std::vector<int> labels) {
  const Mat& lv = at(logits).val;
  check(static_cast<Eigen::Index>(labels.size()) == lv.rows(),
        "cross_entropy label count");
  auto n = std::make_unique<Node>(Op::kCrossEntropyRows);
  n->aux.resizeLike(lv);  // probabilities
  double total = 0.0;
  for (Eigen::Index i = 0; i < lv.rows(); ++i) {
    const int y = labels[static_cast<size_t>(i)];
    check(y >= 0 && y < lv.cols(), "cross_entropy label range");
    const double m = lv.row(i).maxCoeff();
    Eigen::RowVectorXd e = (lv.row(i).array() - m).exp();
    const double z = e.sum();
    n->aux.row(i) = e / z;
    total += m + std::log(z) - lv(i, y);
  }
  n->val = Mat::Constant(1, 1, total / static_cast<double>(lv.rows()));
  n->ints.assign(labels.begin(), labels.end());
  n->args = {logits.i};
  return push(std::move(n));
}

Var Graph::cosine(Var a, Var b) {
  const Mat& av = at(a).val;
  const Mat& bv = at(b).val;
  check(av.cols() == 1 && bv.cols() == 1 && av.rows() == bv.rows(),
        "cosine expects equal-length column vectors");
  auto n = std::make_unique<Node>(Op::kCosine);
  const double na = av.col(0).norm();
  const double nb = bv.col(0).norm();
  if (na < 1e-12 || nb < 1e-12) {
    n->val = Mat::Zero(1, 1);
    n->scalar = 0.0;
    n->ints = {0};  // guard tripped: no gradient
  } else {
    n->scalar = av.col(0).dot(bv.col(0)) / (na * nb);
    n->val = Mat::Constant(1, 1, n->scalar);
    n->ints = {1};
    n->aux = Mat(1, 2);
    n->aux(0, 0) = na;
    n->aux(0, 1) = nb;
  }
  n->args = {a.i, b.i};
  return push(std::move(n));
}

Var Graph::rowmax_pool(Var x, std::vector<int> rows) {
  const Mat& xv = at(x).val;
  check(!rows.empty(), "rowmax_pool needs at least one row");
  auto n = std::make_unique<Node>(Op::kRowmaxPool);
  n->val.resize(xv.cols(), 1);
  n->aux.resize(xv.cols(), 1);  // argmax source row per dimension
  for (Eigen::Index j = 0; j < xv.cols(); ++j) {
    int arg = rows[0];
    double best = xv(rows[0], j);
    for (size_t k = 1; k < rows.size(); ++k) {
      check(rows[k] >= 0 && rows[k] < xv.rows(), "rowmax_pool row range");
      if (xv(rows[k], j) > best) {
        best = xv(rows[k], j);
        arg = rows[k];
      }
    }
    n->val(j, 0) = best;
    n->aux(j, 0) = arg;
  }
  n->ints = std::move(rows);
  n->args = {x.i};
  return push(std::move(n));
}

void Graph::backward(Var loss, double seed) {
  check(!ran_backward_, "backward already ran on this graph");
  ran_backward_ = true;
  check(at(loss).val.size() == 1, "backward expects a scalar loss");
  at(loss).grad(0, 0) += seed;

  for (int k = loss.i; k >= 0; --k) {
    Node& n = *nodes_[static_cast<size_t>(k)];
    const Mat& g = n.grad;
    auto A = [&](int idx) -> Node& {
      return *nodes_[static_cast<size_t>(idx)];
    };
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kParam:
        n.tensor->grad += g;
        break;
      case Op::kGatherRows:
        for (size_t r = 0; r < n.ints.size(); ++r)
          n.tensor->grad.row(n.ints[r]) +=
              g.row(static_cast<Eigen::Index>(r));
        break;
      case Op::kAffine2: {
        Node& w = A(n.args[0]);
        Node& x = A(n.args[1]);
        w.grad.noalias() += g * x.val.transpose();
        x.grad.noalias() += w.val.transpose() * g;
        if (n.args.size() == 5) {
          Node& u = A(n.args[2]);
          Node& h = A(n.args[3]);
          u.grad.noalias() += g * h.val.transpose();
          h.grad.noalias() += u.val.transpose() * g;
          A(n.args[4]).grad += g;
        } else {
          A(n.args[2]).grad += g;
        }
        break;
      }
      case Op::kLinearRows: {
        Node& x = A(n.args[0]);
        Node& w = A(n.args[1]);
        Node& b = A(n.args[2]);
        x.grad.noalias() += g * w.val;
        w.grad.noalias() += g.transpose() * x.val;
        b.grad.col(0) += g.colwise().sum().transpose();
        break;
      }
      case Op::kSigmoid:
        A(n.args[0]).grad.array() +=
            g.array() * n.val.array() * (1.0 - n.val.array());
        break;
      case Op::kTanh:
        A(n.args[0]).grad.array() +=
            g.array() * (1.0 - n.val.array().square());
        break;
      case Op::kRelu:
        A(n.args[0]).grad.array() +=
            g.array() * (n.val.array() > 0.0).cast<double>();
        break;
      case Op::kLog:
        A(n.args[0]).grad.array() += g.array() / A(n.args[0]).val.array();
        break;
      case Op::kSoftmaxVec: {
        const double gp = (g.array() * n.val.array()).sum();
        A(n.args[0]).grad.array() += n.val.array() * (g.array() - gp);
        break;
      }
      case Op::kSoftmaxRows: {
        Node& x = A(n.args[0]);
        for (Eigen::Index i = 0; i < n.val.rows(); ++i) {
          const double gp = g.row(i).dot(n.val.row(i));
          x.grad.row(i).array() +=
              n.val.row(i).array() * (g.row(i).array() - gp);
        }
        break;
      }
      case Op::kCumsumVec: {
        Node& x = A(n.args[0]);
        double acc = 0.0;
        for (Eigen::Index i = n.val.rows() - 1; i >= 0; --i) {
          acc += g(i, 0);
          x.grad(i, 0) += acc;
        }
        break;
      }
      case Op::kOneMinus:
        A(n.args[0]).grad -= g;
        break;
      case Op::kAdd:
        A(n.args[0]).grad += g;
        A(n.args[1]).grad += g;
        break;
      case Op::kSub:
        A(n.args[0]).grad += g;
        A(n.args[1]).grad -= g;
        break;
      case Op::kMul:
        A(n.args[0]).grad.array() += g.array() * A(n.args[1]).val.array();
        A(n.args[1]).grad.array() += g.array() * A(n.args[0]).val.array();
        break;
      case Op::kScale:
        A(n.args[0]).grad += n.scalar * g;
        break;
      case Op::kSum:
        A(n.args[0]).grad.array() += g(0, 0);
        break;
      case Op::kDot:
        A(n.args[0]).grad += g(0, 0) * A(n.args[1]).val;
        A(n.args[1]).grad += g(0, 0) * A(n.args[0]).val;
        break;
      case Op::kStackScalars:
        for (size_t r = 0; r < n.args.size(); ++r)
          A(n.args[r]).grad(0, 0) += g(static_cast<Eigen::Index>(r), 0);
        break;
      case Op::kStackRows:
        for (size_t r = 0; r < n.args.size(); ++r)
          A(n.args[r]).grad.col(0) +=
              g.row(static_cast<Eigen::Index>(r)).transpose();
        break;
      case Op::kRowAsCol:
        A(n.args[0]).grad.row(n.ints[0]) += g.col(0).transpose();
        break;
      case Op::kHconcat: {
        Node& a = A(n.args[0]);
        Node& b = A(n.args[1]);
        a.grad += g.leftCols(a.val.cols());
        b.grad += g.rightCols(b.val.cols());
        break;
      }
      case Op::kVecToSquare: {
        const int sz = n.ints[0];
        Node& v = A(n.args[0]);
        for (int i = 0; i < sz; ++i)
          for (int j = 0; j < sz; ++j) v.grad(i * sz + j, 0) += g(i, j);
        break;
      }
      case Op::kGcnAggregate: {
        Node& a = A(n.args[0]);
        Node& z = A(n.args[1]);
        const Eigen::VectorXd& s = n.aux.col(0);
        for (Eigen::Index i = 0; i < a.val.rows(); ++i) {
          if (s(i) == 0.0) continue;
          const Eigen::RowVectorXd r = g.row(i) / s(i);
          z.grad.noalias() += a.val.row(i).transpose() * r;
          a.grad.row(i).noalias() +=
              (z.val * r.transpose()).transpose() -
              Eigen::RowVectorXd::Constant(a.val.cols(),
                                           r.dot(n.val.row(i)));
        }
        break;
      }
      case Op::kCrossEntropyRows: {
        Node& logits = A(n.args[0]);
        const double w = g(0, 0) / static_cast<double>(n.aux.rows());
        logits.grad += w * n.aux;
        for (Eigen::Index i = 0; i < n.aux.rows(); ++i)
          logits.grad(i, n.ints[static_cast<size_t>(i)]) -= w;
        break;
      }
      case Op::kCosine: {
        if (n.ints[0] == 0) break;  // zero-norm guard
        Node& a = A(n.args[0]);
        Node& b = A(n.args[1]);
        const double na = n.aux(0, 0);
        const double nb = n.aux(0, 1);
        const double c = n.scalar;
        const double gv = g(0, 0);
        a.grad += gv * (b.val / (na * nb) - c * a.val / (na * na));
        b.grad += gv * (a.val / (na * nb) - c * b.val / (nb * nb));
        break;
      }
      case Op::kRowmaxPool: {
        Node& x = A(n.args[0]);
        for (Eigen::Index j = 0; j < n.val.rows(); ++j)
          x.grad(static_cast<Eigen::Index>(n.aux(j, 0)), j) += g(j, 0);
        break;
      }
    }
  }
}

}  // namespace ong::nn
