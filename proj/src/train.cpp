#include "harakat/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

namespace harakat {

namespace {

int argmax_row(const Tensor<float>& t, int64_t r) {
  const float* row = t.row(r);
  int best = 0;
  for (int64_t j = 1; j < t.cols(); ++j)
    if (row[j] > row[best]) best = int(j);
  return best;
}

struct EvalAccum {
  LabelSeqs pred, gold;
  std::vector<std::string> skeletons;
  LabelSeqs seg_pred, seg_gold;
  int64_t syn_correct = 0, pos_correct = 0, word_total = 0;

  void merge(EvalAccum&& o) {
    auto app = [](auto& dst, auto& src) {
      dst.insert(dst.end(), std::make_move_iterator(src.begin()),
                 std::make_move_iterator(src.end()));
    };
    app(pred, o.pred);
    app(gold, o.gold);
    app(skeletons, o.skeletons);
    app(seg_pred, o.seg_pred);
    app(seg_gold, o.seg_gold);
    syn_correct += o.syn_correct;
    pos_correct += o.pos_correct;
    word_total += o.word_total;
  }
};

void eval_sentences(Model<float>& model, const std::vector<LabeledSentence>& sentences,
                    size_t lo, size_t hi, EvalAccum& acc) {
  for (size_t si = lo; si < hi; ++si) {
    auto windows = make_windows(sentences[si], model.vocab, model.cfg.window_radius, int(si));
    for (const Window& w : windows) {
      WindowPrediction p = infer_window(model, w);
      std::vector<int> gold_diac(
          w.diac_labels.begin() + w.center_char_begin,
          w.diac_labels.begin() + w.center_char_begin + w.center_char_len);
      acc.pred.push_back(p.diac);
      acc.gold.push_back(std::move(gold_diac));
      acc.skeletons.push_back(w.words[size_t(w.center_rel)]);
      ++acc.word_total;
      if (model.cfg.task_seg) {
        std::vector<int> gold_seg(
            w.seg_labels.begin() + w.center_char_begin,
            w.seg_labels.begin() + w.center_char_begin + w.center_char_len);
        acc.seg_pred.push_back(p.seg);
        acc.seg_gold.push_back(std::move(gold_seg));
      }
      if (model.cfg.task_syn) acc.syn_correct += p.syn == w.syn_labels[size_t(w.center_rel)];
      if (model.cfg.task_pos) acc.pos_correct += p.pos == w.pos_labels[size_t(w.center_rel)];
    }
  }
}

}  // namespace

WindowPrediction infer_window(Model<float>& model, const Window& w) {
  Tape<float> tape(/*training=*/false);
  Rng rng(0);
  auto out = model.forward(tape, w, rng);
  WindowPrediction p;
  const Tensor<float>& diac = tape.val(out.diac_logits);
  for (int k = 0; k < w.center_char_len; ++k)
    p.diac.push_back(argmax_row(diac, w.center_char_begin + k));
  if (model.cfg.task_seg) {
    const Tensor<float>& seg = tape.val(out.seg_logits);
    for (int k = 0; k < w.center_char_len; ++k)
      p.seg.push_back(argmax_row(seg, w.center_char_begin + k));
  }
  if (model.cfg.task_syn) p.syn = argmax_row(tape.val(out.syn_logits), w.center_rel);
  if (model.cfg.task_pos) p.pos = argmax_row(tape.val(out.pos_logits), w.center_rel);
  return p;
}

EvalReport evaluate_dataset(Model<float>& model, const std::vector<LabeledSentence>& sentences,
                            int threads) {
  EvalAccum acc;
  if (threads <= 1 || sentences.size() < 2) {
    eval_sentences(model, sentences, 0, sentences.size(), acc);
  } else {
    size_t n = sentences.size();
    size_t nw = std::min(size_t(threads), n);
    std::vector<EvalAccum> parts(nw);
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nw; ++t) {
      size_t lo = n * t / nw, hi = n * (t + 1) / nw;
      pool.emplace_back([&model, &sentences, lo, hi, &parts, t] {
        eval_sentences(model, sentences, lo, hi, parts[t]);
      });
    }
    for (auto& th : pool) th.join();
    for (auto& part : parts) acc.merge(std::move(part));
  }

  EvalReport r;
  r.words = int64_t(acc.pred.size());
  for (const auto& w : acc.pred) r.chars += int64_t(w.size());
  for (const auto& s : acc.skeletons) r.oov_words += !model.vocab.training_word_set.count(s);
  if (r.words > 0) {
    r.wer = word_error_rate(acc.pred, acc.gold);
    r.der = diacritic_error_rate(acc.pred, acc.gold);
    r.ler = last_diacritic_error_rate(acc.pred, acc.gold);
    r.lex = lex_error_rate(acc.pred, acc.gold);
    r.oov = oov_wer(acc.pred, acc.gold, acc.skeletons, model.vocab.training_word_set);
  }
  if (model.cfg.task_seg && r.chars > 0) {
    int64_t good = 0, total = 0;
    for (size_t w = 0; w < acc.seg_pred.size(); ++w)
      for (size_t k = 0; k < acc.seg_pred[w].size(); ++k) {
        good += acc.seg_pred[w][k] == acc.seg_gold[w][k];
        ++total;
      }
    r.seg_acc = 100.0 * double(good) / double(total);
  }
  if (model.cfg.task_syn && r.words > 0)
    r.syn_acc = 100.0 * double(acc.syn_correct) / double(acc.word_total);
  if (model.cfg.task_pos && r.words > 0)
    r.pos_acc = 100.0 * double(acc.pos_correct) / double(acc.word_total);
  return r;
}

namespace {

struct TaskLossSums {
  double total = 0, diac = 0, seg = 0, syn = 0, pos = 0;
  int64_t n = 0;
  void add(const TaskLossSums& o) {
    total += o.total;
    diac += o.diac;
    seg += o.seg;
    syn += o.syn;
    pos += o.pos;
    n += o.n;
  }
};

// Forward/backward for one batch member; gradients land in the sink scaled
// by 1/batch_size.
TaskLossSums process_member(Model<float>& model, const Window& w, uint64_t dropout_seed,
                            float inv_batch, GradSink<float>* sink) {
  Tape<float> tape(/*training=*/true, sink);
  Rng rng(dropout_seed);
  auto out = model.forward(tape, w, rng);

  std::vector<uint8_t> char_mask(w.char_ids.size(), 1);
  std::vector<uint8_t> word_mask(w.word_ids.size(), 1);
  TaskLossSums s;
  std::vector<int> losses;
  losses.push_back(masked_mean_ce(tape, out.diac_logits, w.diac_labels, char_mask));
  s.diac = double(tape.val(losses.back()).scalar());
  if (model.cfg.task_seg) {
    losses.push_back(masked_mean_ce(tape, out.seg_logits, w.seg_labels, char_mask));
    s.seg = double(tape.val(losses.back()).scalar());
  }
  if (model.cfg.task_syn) {
    losses.push_back(masked_mean_ce(tape, out.syn_logits, w.syn_labels, word_mask));
    s.syn = double(tape.val(losses.back()).scalar());
  }
  if (model.cfg.task_pos) {
    losses.push_back(masked_mean_ce(tape, out.pos_logits, w.pos_labels, word_mask));
    s.pos = double(tape.val(losses.back()).scalar());
  }
  int combined = add_scaled(tape, losses, 1.0f / float(losses.size()));
  s.total = double(tape.val(combined).scalar());
  s.n = 1;
  int scaled = add_scaled(tape, {combined}, inv_batch);
  tape.backward(scaled);
  return s;
}

std::string opt_str(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

TrainResult train(Model<float>& model, const std::vector<LabeledSentence>& train_sents,
                  const std::vector<LabeledSentence>& dev_sents, const TrainParams& params,
                  const std::string& out_dir, std::ostream* log) {
  if (params.save_checkpoints) std::filesystem::create_directories(out_dir);

  auto windows = make_all_windows(train_sents, model.vocab, model.cfg.window_radius);
  if (windows.empty()) throw EmptyCorpus("no training windows");

  Rng shuffle_stream(derive_seed(model.cfg.seed, 2));
  Rng dropout_stream(derive_seed(model.cfg.seed, 3));

  TrainResult result;
  TrainState state;
  zero_grads(model.registry.all());

  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    state.epoch = epoch;
    auto batches = make_batches(windows, params.batch_size, shuffle_stream.u64());
    TaskLossSums epoch_losses;

    for (const Batch& batch : batches) {
      std::vector<uint64_t> member_seeds(size_t(batch.size));
      for (auto& s : member_seeds) s = dropout_stream.u64();
      float inv_batch = 1.0f / float(batch.size);

      if (params.threads <= 1 || batch.size == 1) {
        for (int i = 0; i < batch.size; ++i)
          epoch_losses.add(process_member(model, batch.members[size_t(i)],
                                          member_seeds[size_t(i)], inv_batch, nullptr));
      } else {
        size_t nw = std::min(size_t(params.threads), size_t(batch.size));
        std::vector<std::unique_ptr<BufferedGradSink<float>>> sinks;
        for (size_t t = 0; t < nw; ++t)
          sinks.push_back(std::make_unique<BufferedGradSink<float>>(model.registry.all()));
        std::vector<TaskLossSums> sums(nw);
        std::vector<std::thread> pool;
        for (size_t t = 0; t < nw; ++t) {
          size_t lo = size_t(batch.size) * t / nw, hi = size_t(batch.size) * (t + 1) / nw;
          pool.emplace_back([&, t, lo, hi] {
            for (size_t i = lo; i < hi; ++i)
              sums[t].add(process_member(model, batch.members[i], member_seeds[i], inv_batch,
                                         sinks[t].get()));
          });
        }
        for (auto& th : pool) th.join();
        // Serialized reduction in thread order.
        for (size_t t = 0; t < nw; ++t) {
          sinks[t]->reduce_into(model.registry.all());
          epoch_losses.add(sums[t]);
        }
      }

      adam_step(model.registry.all(), params.adam, ++state.adam_t, model.cfg.grad_clip);
      ++state.step;
    }

    result.epoch_losses.push_back(epoch_losses.total /
                                  double(std::max<int64_t>(1, epoch_losses.n)));

    EvalReport dev;
    bool have_dev = !dev_sents.empty();
    if (have_dev) dev = evaluate_dataset(model, dev_sents, params.threads);

    if (log) {
      double n = double(std::max<int64_t>(1, epoch_losses.n));
      char buf[512];
      std::snprintf(buf, sizeof buf, "epoch=%d step=%lld loss=%.6f loss_diac=%.6f", epoch,
                    static_cast<long long>(state.step), epoch_losses.total / n,
                    epoch_losses.diac / n);
      *log << buf;
      if (model.cfg.task_seg) *log << " loss_seg=" << epoch_losses.seg / n;
      if (model.cfg.task_syn) *log << " loss_syn=" << epoch_losses.syn / n;
      if (model.cfg.task_pos) *log << " loss_pos=" << epoch_losses.pos / n;
      if (have_dev) {
        std::snprintf(buf, sizeof buf, " dev_wer=%.4f dev_der=%.4f dev_ler=%.4f dev_lex=%.4f",
                      dev.wer, dev.der, dev.ler, dev.lex);
        *log << buf << " dev_oov=" << opt_str(dev.oov);
      }
      *log << "\n" << std::flush;
    }

    if (have_dev && (state.best_wer < 0 || dev.wer < state.best_wer)) {
      state.best_wer = dev.wer;
      result.best_dev = dev;
      if (params.save_checkpoints) {
        result.best_path = out_dir + "/checkpoint_best.tmtl";
        state.rng_state = shuffle_stream.serialize();
        save_checkpoint(result.best_path, model, state);
      }
    }
    result.final_dev = dev;
  }

  state.rng_state = shuffle_stream.serialize();
  if (params.save_checkpoints) {
    result.final_path = out_dir + "/checkpoint_final.tmtl";
    save_checkpoint(result.final_path, model, state);
  }
  if (state.best_wer < 0) result.best_dev = result.final_dev;
  result.state = state;
  return result;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / double(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / double(xs.size() - 1));
}

std::string format_mean_sd(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (±%.2f)", mean, sd);
  return buf;
}

TrialsResult run_trials(const ModelConfig& base_cfg, const TrainParams& params,
                        const std::vector<LabeledSentence>& train_sents,
                        const std::vector<LabeledSentence>& dev_sents,
                        const PretrainedEmbeddings<float>& embeddings, const Vocab& vocab,
                        const std::vector<uint64_t>& seeds, const std::string& out_dir,
                        std::ostream* log) {
  if (seeds.size() < 2) throw ConfigError("run_trials needs at least 2 seeds");
  TrialsResult result;
  result.seeds = seeds;
  for (uint64_t seed : seeds) {
    ModelConfig cfg = base_cfg;
    cfg.seed = seed;
    Model<float> model(cfg, vocab, embeddings);
    std::string run_dir = out_dir + "/seed_" + std::to_string(seed);
    if (log) *log << "trial seed=" << seed << "\n";
    TrainResult tr = train(model, train_sents, dev_sents, params, run_dir, log);
    result.reports.push_back(tr.best_dev);
    result.wers.push_back(tr.best_dev.wer);
  }
  result.mean_wer = mean_of(result.wers);
  result.sd_wer = sample_sd(result.wers);

  if (params.save_checkpoints) {
    std::filesystem::create_directories(out_dir);
    std::ofstream scores(out_dir + "/scores_wer.txt");
    if (!scores) throw IoError("cannot write " + out_dir + "/scores_wer.txt");
    char buf[32];
    for (double w : result.wers) {
      std::snprintf(buf, sizeof buf, "%.6f\n", w);
      scores << buf;
    }
  }
  if (log) {
    auto summarize = [&](const char* name, auto pick) {
      std::vector<double> xs;
      for (const auto& r : result.reports) {
        auto v = pick(r);
        if (!v) return;  // NA for any seed: no aggregate
        xs.push_back(*v);
      }
      *log << "trials " << name << " " << format_mean_sd(mean_of(xs), sample_sd(xs)) << "\n";
    };
    auto some = [](double x) { return std::optional<double>(x); };
    summarize("WER", [&](const EvalReport& r) { return some(r.wer); });
    summarize("DER", [&](const EvalReport& r) { return some(r.der); });
    summarize("LER", [&](const EvalReport& r) { return some(r.ler); });
    summarize("Lex", [&](const EvalReport& r) { return some(r.lex); });
    summarize("OOV-WER", [&](const EvalReport& r) { return r.oov; });
  }
  return result;
}

}  // namespace harakat
