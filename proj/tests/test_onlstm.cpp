#include "ong/onlstm.h"

#include "doctest.h"

using namespace ong;

TEST_CASE("cummax properties and closed forms") {
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(3);
  const auto c = cummax(zeros);
  CHECK(c(0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(c(1) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(c(2) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd one(1);
  one << -4.2;
  CHECK(cummax(one)(0) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd spread(2);
  spread << 10.0, -10.0;
  const auto cs = cummax(spread);
  CHECK(cs(0) == doctest::Approx(0.9999999979388464).epsilon(1e-12));
  CHECK(cs(1) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(8);
  for (int iter = 0; iter < 100; ++iter) {
    const int d = static_cast<int>(rng.uniform_int(1, 16));
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.uniform(-6, 6);
    const auto out = cummax(v);
    CHECK(out(0) > 0.0);
    for (int i = 1; i < d; ++i) CHECK(out(i) >= out(i - 1));
    CHECK(out(d - 1) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("model_scores is a shift-invariant softmax") {
  Eigen::VectorXd imp(2);
  imp << 2.0, 3.0;
  const auto s = model_scores(imp);
  CHECK(s(0) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  CHECK(s(1) == doctest::Approx(0.7310585786300049).epsilon(1e-12));

  Eigen::VectorXd shifted(2);
  shifted << 12.0, 13.0;
  const auto s2 = model_scores(shifted);
  CHECK(s2(0) == doctest::Approx(s(0)).epsilon(1e-12));
  CHECK(s2(1) == doctest::Approx(s(1)).epsilon(1e-12));

  const auto u = model_scores(Eigen::VectorXd::Constant(5, 1.3));
  for (int i = 0; i < 5; ++i) CHECK(u(i) == doctest::Approx(0.2));
}

TEST_CASE("onlstm_step degenerates at D=1 to a pass-through cell") {
  Rng rng(3);
  auto p = OnLstmParams::create(2, 1, rng);
  Eigen::VectorXd x(2), h(1), c(1);
  x << 0.3, -0.8;
  h << 0.4;
  c << -1.7;
  const auto out = onlstm_step(x, h, c, p);
  CHECK(out.master_f(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.c(0) == doctest::Approx(-1.7).epsilon(1e-12));
}

TEST_CASE("onlstm_step with zero parameters halves and carries the cell") {
  Rng rng(3);
  auto p = OnLstmParams::create(2, 4, rng);
  for (nn::Tensor* t : p.tensors()) t->value.setZero();
  Eigen::VectorXd x(2), h0 = Eigen::VectorXd::Zero(4);
  x << 1.0, -2.0;
  Eigen::VectorXd c_prev(4);
  c_prev << 1.0, -1.0, 0.5, 2.0;
  const auto out = onlstm_step(x, h0, c_prev, p);
  // f=i=o=0.5, chat=0, mf_k = (k+1)/4, mi_k = 1-(k+1)/4
  // f_bar = mf o (0.5 mi + 1 - mi), c = f_bar o c_prev, h = 0.5 tanh(c)
  for (int k = 0; k < 4; ++k) {
    const double mf = (k + 1) / 4.0;
    const double mi = 1.0 - mf;
    const double f_bar = mf * (0.5 * mi + 1.0 - mi);
    CHECK(out.c(k) == doctest::Approx(f_bar * c_prev(k)).epsilon(1e-12));
    CHECK(out.h(k) ==
          doctest::Approx(0.5 * std::tanh(out.c(k))).epsilon(1e-12));
  }
}

TEST_CASE("onlstm_run wires the recurrence") {
  Rng rng(11);
  auto p = OnLstmParams::create(3, 5, rng);

  Eigen::MatrixXd x1(1, 3);
  x1 << 0.2, -0.4, 0.9;
  auto out1 = onlstm_run(x1, p);
  CHECK(out1.states.rows() == 1);
  CHECK(out1.imp.size() == 1);

  // imp_i = 1 - sum_j master_f_ij exactly, and imp in [1-D, 1]
  Eigen::MatrixXd x(4, 3);
  x.setRandom();
  auto out = onlstm_run(x, p);
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXd mf = out.master_f.row(i).transpose();
    CHECK(out.imp(i) == 1.0 - mf.sum());
    CHECK(out.imp(i) >= 1.0 - 5.0);
    CHECK(out.imp(i) <= 1.0);
  }

  // order sensitivity: swapped rows change the states
  Eigen::MatrixXd sw = x;
  sw.row(0).swap(sw.row(1));
  auto out_sw = onlstm_run(sw, p);
  CHECK((out.states - out_sw.states).cwiseAbs().maxCoeff() > 1e-8);

  // first step matches the single-step API from the zero state
  const auto step =
      onlstm_step(x.row(0).transpose(), Eigen::VectorXd::Zero(5),
                  Eigen::VectorXd::Zero(5), p);
  CHECK((out.states.row(0).transpose() - step.h).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("full-sequence gradient of sum(H) matches finite differences") {
  Rng rng(77);
  auto p = OnLstmParams::create(3, 4, rng);
  Eigen::MatrixXd x(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-1, 1);

  auto eval = [&]() {
    nn::Graph g;
    auto run = onlstm_run(g, g.constant(x), p);
    return g.scalar_value(g.sum(run.states));
  };
  for (nn::Tensor* t : p.tensors()) t->zero_grad();
  {
    nn::Graph g;
    auto run = onlstm_run(g, g.constant(x), p);
    g.backward(g.sum(run.states));
  }
  const double h = 1e-5;
  for (nn::Tensor* t : p.tensors())
    for (Eigen::Index i = 0; i < t->value.rows(); ++i)
      for (Eigen::Index j = 0; j < t->value.cols(); ++j) {
        const double orig = t->value(i, j);
        t->value(i, j) = orig + h;
        const double up = eval();
        t->value(i, j) = orig - h;
        const double down = eval();
        t->value(i, j) = orig;
        const double fd = (up - down) / (2.0 * h);
        const double an = t->grad(i, j);
        const double err =
            std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
        INFO(t->name, "(", i, ",", j, ")");
        CHECK(err <= 1e-4);
      }
}

TEST_CASE("plain lstm_run ignores the master-gate parameters") {
  Rng rng(6);
  auto p = OnLstmParams::create(3, 4, rng);
  Eigen::MatrixXd x(3, 3);
  x.setRandom();
  nn::Graph g;
  auto states = lstm_run(g, g.constant(x), p);
  CHECK(g.value(states).rows() == 3);
  CHECK(g.value(states).cols() == 4);

  nn::Graph g2;
  p.wmf.value.setConstant(9.0);
  auto states2 = lstm_run(g2, g2.constant(x), p);
  CHECK(g.value(states) == g2.value(states2));
}
