#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ong/checkpoint.h"
#include "ong/metrics.h"
#include "ong/model.h"

namespace ong {

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  ModelConfig model;
  int epochs = 10;
  int batch = 32;
  double lr = 1e-3;
  double clip_norm = 5.0;
  double dev_ratio = 0.2;
  std::uint64_t seed = 42;

  std::string data_path;
  std::string test_path;
  std::string embeddings_path;
  std::string out_path;
};

// Shuffled mini-batch training with gradient clipping and moment-based
// updates; returns the epoch snapshot with the best dev span F1. Writes one
// JSON line per epoch (loss breakdown + dev metrics) to `log` when given.
Checkpoint train(const TrainConfig& cfg, const std::vector<Sentence>& train_data,
                 const std::vector<Sentence>& dev_data,
                 std::ostream* log = nullptr);

SpanSet predict(ModelState& state, const Sentence& s);

Metrics evaluate(ModelState& state, const std::vector<Sentence>& data);

}  // namespace ong
