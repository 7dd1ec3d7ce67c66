#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ong/nn.h"

namespace ong {

// Six gate triples (W, U, b): forget, input, output, candidate, master
// forget, master input. The plain-LSTM path uses only the first four.
struct OnLstmParams {
  int input_dim = 0;
  int hidden_dim = 0;
  nn::Tensor wf, uf, bf;
  nn::Tensor wi, ui, bi;
  nn::Tensor wo, uo, bo;
  nn::Tensor wc, uc, bc;
  nn::Tensor wmf, umf, bmf;
  nn::Tensor wmi, umi, bmi;

  static OnLstmParams create(int input_dim, int hidden_dim, Rng& rng);
  std::vector<nn::Tensor*> tensors();       // all six triples
  std::vector<nn::Tensor*> lstm_tensors();  // without the master gates
};

struct OnLstmStepVars {
  nn::Var h, c, master_f;
};

OnLstmStepVars onlstm_step(nn::Graph& g, nn::Var x, nn::Var h_prev,
                           nn::Var c_prev, OnLstmParams& p);

struct OnLstmRunVars {
  nn::Var states;                   // N x D
  nn::Var imp;                      // N x 1, imp_i = 1 - sum_j master_f_ij
  std::vector<nn::Var> master_f;    // per-step D x 1
};

OnLstmRunVars onlstm_run(nn::Graph& g, nn::Var x_rows, OnLstmParams& p);

// Standard LSTM over the same parameter block (master gates unused).
nn::Var lstm_run(nn::Graph& g, nn::Var x_rows, OnLstmParams& p);

nn::Var cummax(nn::Graph& g, nn::Var v);
nn::Var model_scores(nn::Graph& g, nn::Var imp);

// Value-level wrappers.
Eigen::VectorXd cummax(const Eigen::VectorXd& v);
Eigen::VectorXd model_scores(const Eigen::VectorXd& imp);

struct OnLstmStepValues {
  Eigen::VectorXd h, c, master_f;
};
OnLstmStepValues onlstm_step(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& h_prev,
                             const Eigen::VectorXd& c_prev, OnLstmParams& p);

struct OnLstmOutput {
  Eigen::MatrixXd states;    // N x D
  Eigen::VectorXd imp;       // N
  Eigen::MatrixXd master_f;  // N x D
};
OnLstmOutput onlstm_run(const Eigen::MatrixXd& x, OnLstmParams& p);

}  // namespace ong
