#include "ong/onlstm.h"

#include <cmath>

namespace ong {

namespace {

nn::Tensor make_gate(const std::string& name, int rows, int cols,
                     double bound, Rng& rng) {
  nn::Tensor t(name, rows, cols);
  t.init_uniform(rng, -bound, bound);
  return t;
}

}  // namespace

OnLstmParams OnLstmParams::create(int input_dim, int hidden_dim, Rng& rng) {
  OnLstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const double b = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  auto triple = [&](const std::string& base, nn::Tensor& w, nn::Tensor& u,
                    nn::Tensor& bias) {
    w = make_gate("onlstm.w" + base, hidden_dim, input_dim, b, rng);
    u = make_gate("onlstm.u" + base, hidden_dim, hidden_dim, b, rng);
    bias = make_gate("onlstm.b" + base, hidden_dim, 1, b, rng);
  };
  triple("f", p.wf, p.uf, p.bf);
  triple("i", p.wi, p.ui, p.bi);
  triple("o", p.wo, p.uo, p.bo);
  triple("c", p.wc, p.uc, p.bc);
  triple("mf", p.wmf, p.umf, p.bmf);
  triple("mi", p.wmi, p.umi, p.bmi);
  return p;
}

std::vector<nn::Tensor*> OnLstmParams::tensors() {
  return {&wf, &uf, &bf, &wi,  &ui,  &bi,  &wo,  &uo,  &bo,
          &wc, &uc, &bc, &wmf, &umf, &bmf, &wmi, &umi, &bmi};
}

std::vector<nn::Tensor*> OnLstmParams::lstm_tensors() {
  return {&wf, &uf, &bf, &wi, &ui, &bi, &wo, &uo, &bo, &wc, &uc, &bc};
}

nn::Var cummax(nn::Graph& g, nn::Var v) {
  return g.cumsum_vec(g.softmax_vec(v));
}

OnLstmStepVars onlstm_step(nn::Graph& g, nn::Var x, nn::Var h_prev,
                           nn::Var c_prev, OnLstmParams& p) {
  auto gate = [&](nn::Tensor& w, nn::Tensor& u, nn::Tensor& b) {
    return g.affine2(g.param(w), x, g.param(u), h_prev, g.param(b));
  };
  nn::Var f = g.sigmoid(gate(p.wf, p.uf, p.bf));
  nn::Var i = g.sigmoid(gate(p.wi, p.ui, p.bi));
  nn::Var o = g.sigmoid(gate(p.wo, p.uo, p.bo));
  nn::Var chat = g.tanh(gate(p.wc, p.uc, p.bc));
  nn::Var mf = cummax(g, gate(p.wmf, p.umf, p.bmf));
  nn::Var mi = g.one_minus(cummax(g, gate(p.wmi, p.umi, p.bmi)));

  // f_bar = mf o (f o mi + 1 - mi); i_bar = mi o (i o mf + 1 - mf)
  nn::Var f_bar = g.mul(mf, g.add(g.mul(f, mi), g.one_minus(mi)));
  nn::Var i_bar = g.mul(mi, g.add(g.mul(i, mf), g.one_minus(mf)));
  nn::Var c = g.add(g.mul(f_bar, c_prev), g.mul(i_bar, chat));
  nn::Var h = g.mul(o, g.tanh(c));
  return {h, c, mf};
}

OnLstmRunVars onlstm_run(nn::Graph& g, nn::Var x_rows, OnLstmParams& p) {
  const auto n = g.value(x_rows).rows();
  nn::Var h = g.constant(nn::Mat::Zero(p.hidden_dim, 1));
  nn::Var c = h;
  OnLstmRunVars out;
  std::vector<nn::Var> hs;
  std::vector<nn::Var> imps;
  for (Eigen::Index t = 0; t < n; ++t) {
    auto step = onlstm_step(g, g.row_as_col(x_rows, static_cast<int>(t)), h,
                            c, p);
    h = step.h;
    c = step.c;
    hs.push_back(step.h);
    out.master_f.push_back(step.master_f);
    imps.push_back(g.sub(g.scalar(1.0), g.sum(step.master_f)));
  }
  out.states = g.stack_rows(hs);
  out.imp = g.stack_scalars(imps);
  return out;
}

nn::Var lstm_run(nn::Graph& g, nn::Var x_rows, OnLstmParams& p) {
  const auto n = g.value(x_rows).rows();
  nn::Var h = g.constant(nn::Mat::Zero(p.hidden_dim, 1));
  nn::Var c = h;
  std::vector<nn::Var> hs;
  for (Eigen::Index t = 0; t < n; ++t) {
    nn::Var x = g.row_as_col(x_rows, static_cast<int>(t));
    auto gate = [&](nn::Tensor& w, nn::Tensor& u, nn::Tensor& b) {
      return g.affine2(g.param(w), x, g.param(u), h, g.param(b));
    };
    nn::Var f = g.sigmoid(gate(p.wf, p.uf, p.bf));
    nn::Var i = g.sigmoid(gate(p.wi, p.ui, p.bi));
    nn::Var o = g.sigmoid(gate(p.wo, p.uo, p.bo));
    nn::Var chat = g.tanh(gate(p.wc, p.uc, p.bc));
    c = g.add(g.mul(f, c), g.mul(i, chat));
    h = g.mul(o, g.tanh(c));
    hs.push_back(h);
  }
  return g.stack_rows(hs);
}

nn::Var model_scores(nn::Graph& g, nn::Var imp) { return g.softmax_vec(imp); }

Eigen::VectorXd cummax(const Eigen::VectorXd& v) {
  nn::Graph g;
  return g.value(cummax(g, g.constant(v)));
}

Eigen::VectorXd model_scores(const Eigen::VectorXd& imp) {
  nn::Graph g;
  return g.value(model_scores(g, g.constant(imp)));
}

OnLstmStepValues onlstm_step(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& h_prev,
                             const Eigen::VectorXd& c_prev, OnLstmParams& p) {
  nn::Graph g;
  auto step = onlstm_step(g, g.constant(x), g.constant(h_prev),
                          g.constant(c_prev), p);
  return {g.value(step.h), g.value(step.c), g.value(step.master_f)};
}

OnLstmOutput onlstm_run(const Eigen::MatrixXd& x, OnLstmParams& p) {
  nn::Graph g;
  auto run = onlstm_run(g, g.constant(x), p);
  OnLstmOutput out;
  out.states = g.value(run.states);
  out.imp = g.value(run.imp);
  out.master_f.resize(x.rows(), p.hidden_dim);
  for (Eigen::Index t = 0; t < x.rows(); ++t)
    out.master_f.row(t) =
        g.value(run.master_f[static_cast<size_t>(t)]).col(0).transpose();
  return out;
}

}  // namespace ong
