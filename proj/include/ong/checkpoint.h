#pragma once

#include <string>

#include "ong/model.h"

namespace ong {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  ModelState state;
  double best_dev_f1 = 0.0;
  int best_epoch = 0;
};

// Binary format: magic "ONGCKPT1", u64 length-prefixed JSON block (format
// version, config, vocabulary, best dev F1, epoch), then named tensors as
// (name, dtype tag, shape, row-major 64-bit floats).
void save_checkpoint(const std::string& path, ModelState& state,
                     double best_dev_f1, int best_epoch);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ong
