#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "harakat/checkpoint.hpp"
#include "harakat/eval.hpp"
#include "harakat/model.hpp"

namespace harakat {

struct TrainParams {
  AdamHyper adam;       // lr 0.001, beta1 0.9, beta2 0.999, eps 1e-8
  int epochs = 20;
  int batch_size = 16;
  int threads = 1;      // >1: data-parallel over batch members
  bool save_checkpoints = true;
};

// Center-word predictions of one window.
struct WindowPrediction {
  std::vector<int> diac;  // per center-word char
  std::vector<int> seg;   // per center-word char; empty if SEG disabled
  int syn = -1;           // -1 if disabled
  int pos = -1;
};

WindowPrediction infer_window(Model<float>& model, const Window& w);

// Full-corpus evaluation; counts only the center word of each window.
// Read-only on the model, safe to parallelize.
EvalReport evaluate_dataset(Model<float>& model, const std::vector<LabeledSentence>& sentences,
                            int threads = 1);

struct TrainResult {
  EvalReport best_dev;
  EvalReport final_dev;
  std::string best_path;   // empty when checkpoints are disabled
  std::string final_path;
  TrainState state;
  std::vector<double> epoch_losses;  // mean combined train loss per epoch
};

// Epochs of shuffled batches with Adam updates and a dev evaluation per
// epoch. Keeps the best-dev-WER checkpoint alongside the final one.
TrainResult train(Model<float>& model, const std::vector<LabeledSentence>& train_sents,
                  const std::vector<LabeledSentence>& dev_sents, const TrainParams& params,
                  const std::string& out_dir, std::ostream* log = nullptr);

struct TrialsResult {
  std::vector<uint64_t> seeds;
  std::vector<EvalReport> reports;  // best-dev report per seed
  std::vector<double> wers;
  double mean_wer = 0;
  double sd_wer = 0;
};

// Independent full trainings, one per seed; persists per-seed WER scores for
// significance testing.
TrialsResult run_trials(const ModelConfig& base_cfg, const TrainParams& params,
                        const std::vector<LabeledSentence>& train_sents,
                        const std::vector<LabeledSentence>& dev_sents,
                        const PretrainedEmbeddings<float>& embeddings, const Vocab& vocab,
                        const std::vector<uint64_t>& seeds, const std::string& out_dir,
                        std::ostream* log = nullptr);

// "8.51 (±0.01)" formatting used by trial summaries.
std::string format_mean_sd(double mean, double sd);
double mean_of(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);

}  // namespace harakat
