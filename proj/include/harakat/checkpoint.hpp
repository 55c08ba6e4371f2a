#pragma once

#include <memory>
#include <string>

#include "harakat/model.hpp"

namespace harakat {

// Counters and optimizer/rng state needed to resume or audit a run.
struct TrainState {
  int epoch = 0;
  int64_t step = 0;
  double best_wer = -1.0;  // < 0 = no dev evaluation yet
  int64_t adam_t = 0;
  std::string rng_state;
};

// Binary container: magic "TMTL", version, config text, vocab tables, the
// frozen pretrained table, named parameter blobs (u32 name length + UTF-8
// name + u32 rank + u32 dims + little-endian f32 data), train state.
void save_checkpoint(const std::string& path, const Model<float>& model,
                     const TrainState& state);

struct LoadedCheckpoint {
  std::unique_ptr<Model<float>> model;
  TrainState state;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace harakat
