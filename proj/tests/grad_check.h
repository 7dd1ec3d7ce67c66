#pragma once

#include <string>
#include <vector>

#include "ong/model.h"

namespace ong::testutil {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst;  // "tensor(i,j)"
  long checked = 0;
};

// Central finite differences of the total loss against the analytic tape
// gradients, over every entry of every trainable tensor.
inline GradCheckResult grad_check_total_loss(ModelState& state,
                                             const Sentence& s,
                                             double h = 1e-5) {
  GradCheckResult res;
  auto params = state.parameters();
  for (nn::Tensor* t : params) t->zero_grad();
  {
    auto fwd = forward_sentence(s, state, true);
    fwd->g.backward(fwd->total);
  }
  auto eval = [&]() {
    auto fwd = forward_sentence(s, state, true);
    return fwd->g.scalar_value(fwd->total);
  };
  for (nn::Tensor* t : params) {
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
        const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
        const double err = std::abs(fd - an) / denom;
        ++res.checked;
        if (err > res.max_rel_err) {
          res.max_rel_err = err;
          res.worst = t->name + "(" + std::to_string(i) + "," +
                      std::to_string(j) + ")";
        }
      }
  }
  return res;
}

inline ModelConfig tiny_model_config() {
  ModelConfig cfg;
  cfg.tok_dim = 5;
  cfg.pos_dim = 4;
  cfg.hidden = 7;
  cfg.gcn_dim = 6;
  cfg.gcn_layers = 2;
  cfg.head_hidden = 5;
  cfg.rmax = 6;
  return cfg;
}

}  // namespace ong::testutil
