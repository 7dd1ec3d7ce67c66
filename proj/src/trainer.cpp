#include "ong/trainer.h"

#include <cmath>
#include <ostream>

#include "ong/json_io.h"

namespace ong {

namespace {

class Adam {
 public:
  Adam(std::vector<nn::Tensor*> params, double lr, double clip_norm)
      : params_(std::move(params)), lr_(lr), clip_norm_(clip_norm) {
    for (const nn::Tensor* t : params_) {
      m_.emplace_back(nn::Mat::Zero(t->value.rows(), t->value.cols()));
      v_.emplace_back(nn::Mat::Zero(t->value.rows(), t->value.cols()));
    }
  }

  void step() {
    if (clip_norm_ > 0.0) {
      double sq = 0.0;
      for (const nn::Tensor* t : params_) sq += t->grad.squaredNorm();
      const double norm = std::sqrt(sq);
      if (norm > clip_norm_) {
        const double s = clip_norm_ / norm;
        for (nn::Tensor* t : params_) t->grad *= s;
      }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, t_);
    const double bc2 = 1.0 - std::pow(kBeta2, t_);
    for (size_t k = 0; k < params_.size(); ++k) {
      nn::Tensor& p = *params_[k];
      m_[k] = kBeta1 * m_[k] + (1.0 - kBeta1) * p.grad;
      v_[k] = kBeta2 * v_[k].array() +
              (1.0 - kBeta2) * p.grad.array().square();
      const nn::Mat mhat = m_[k] / bc1;
      const nn::Mat vhat = v_[k] / bc2;
      p.value.array() -= lr_ * mhat.array() / (vhat.array().sqrt() + kEps);
      p.zero_grad();
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<nn::Tensor*> params_;
  double lr_;
  double clip_norm_;
  std::vector<nn::Mat> m_, v_;
  int t_ = 0;
};

}  // namespace

SpanSet predict(ModelState& state, const Sentence& s) {
  const Eigen::MatrixXd dists = token_distributions(state, s);
  BioLabels labels;
  labels.reserve(static_cast<size_t>(dists.rows()));
  for (Eigen::Index i = 0; i < dists.rows(); ++i) {
    Eigen::Index best = 0;
    dists.row(i).maxCoeff(&best);
    labels.push_back(static_cast<Tag>(best));
  }
  return decode_bio(labels);
}

Metrics evaluate(ModelState& state, const std::vector<Sentence>& data) {
  std::vector<SpanSet> predicted, gold;
  predicted.reserve(data.size());
  gold.reserve(data.size());
  for (const auto& s : data) {
    predicted.push_back(predict(state, s));
    gold.push_back(s.opinion_spans);
  }
  return score_spans(predicted, gold);
}

Checkpoint train(const TrainConfig& cfg,
                 const std::vector<Sentence>& train_data,
                 const std::vector<Sentence>& dev_data, std::ostream* log) {
  if (train_data.empty()) throw DataError("training data is empty");

  Vocab vocab = Vocab::build(train_data);
  ModelState state = ModelState::create(cfg.model, std::move(vocab), cfg.seed);
  Adam opt(state.parameters(), cfg.lr, cfg.clip_norm);
  Rng shuffle_rng(cfg.seed ^ 0x5deece66dULL);

  Checkpoint best;
  best.best_dev_f1 = -1.0;

  std::vector<int> order(train_data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    LossBreakdown epoch_loss;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(cfg.batch)) {
      const size_t end =
          std::min(order.size(), begin + static_cast<size_t>(cfg.batch));
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (size_t k = begin; k < end; ++k) {
        const Sentence& s = train_data[static_cast<size_t>(order[k])];
        auto fwd = forward_sentence(s, state, true);
        const LossBreakdown b = fwd->breakdown();
        if (!std::isfinite(b.total))
          throw DivergenceError("non-finite loss at epoch " +
                                std::to_string(epoch));
        epoch_loss.pred += b.pred;
        epoch_loss.kl += b.kl;
        epoch_loss.reg += b.reg;
        epoch_loss.total += b.total;
        fwd->g.backward(fwd->total, inv);
      }
      opt.step();
    }
    const double inv_n = 1.0 / static_cast<double>(train_data.size());
    epoch_loss.pred *= inv_n;
    epoch_loss.kl *= inv_n;
    epoch_loss.reg *= inv_n;
    epoch_loss.total *= inv_n;

    const Metrics dev = evaluate(state, dev_data);
    if (log) {
      Json line;
      line["epoch"] = epoch;
      line["loss"] = epoch_loss;
      line["dev"] = dev;
      *log << line.dump() << "\n";
    }
    if (dev.f1 > best.best_dev_f1) {
      best.state = state;
      best.best_dev_f1 = dev.f1;
      best.best_epoch = epoch;
    }
  }
  return best;
}

}  // namespace ong
