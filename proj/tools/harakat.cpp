// Command-line front end: prepare / train / eval / restore / significance.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "harakat/train.hpp"

using namespace harakat;

namespace {

struct TrainKv {
  TrainParams params;
  bool apply(const std::string& key, const std::string& value) {
    auto to_int = [&](const std::string& v) {
      try {
        return std::stoi(v);
      } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": \"" + v + "\"");
      }
    };
    auto to_dbl = [&](const std::string& v) {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": \"" + v + "\"");
      }
    };
    if (key == "epochs") params.epochs = to_int(value);
    else if (key == "batch_size") params.batch_size = to_int(value);
    else if (key == "lr") params.adam.lr = to_dbl(value);
    else if (key == "adam_beta1") params.adam.beta1 = to_dbl(value);
    else if (key == "adam_beta2") params.adam.beta2 = to_dbl(value);
    else if (key == "adam_eps") params.adam.eps = to_dbl(value);
    else if (key == "threads") params.threads = to_int(value);
    else return false;
    return true;
  }
};

void apply_kv_line(ModelConfig& cfg, TrainKv& train_kv, const std::string& key,
                   const std::string& value, bool* tasks_explicit) {
  if (key == "tasks" && tasks_explicit) *tasks_explicit = true;
  if (model_config_apply_kv(cfg, key, value)) return;
  if (train_kv.apply(key, value)) return;
  throw ConfigError("unknown config key \"" + key + "\"");
}

void load_config_file(const std::string& path, ModelConfig& cfg, TrainKv& train_kv,
                      bool* tasks_explicit) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(ln) + ": expected key=value");
    apply_kv_line(cfg, train_kv, line.substr(start, eq - start), line.substr(eq + 1),
                  tasks_explicit);
  }
}

void apply_overrides(const std::vector<std::string>& sets, ModelConfig& cfg, TrainKv& train_kv,
                     bool* tasks_explicit) {
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got \"" + s + "\"");
    apply_kv_line(cfg, train_kv, s.substr(0, eq), s.substr(eq + 1), tasks_explicit);
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<double> read_scores(const std::string& path) {
  std::vector<double> out;
  int ln = 0;
  for (const auto& line : read_lines(path)) {
    ++ln;
    if (line.empty()) continue;
    try {
      out.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(ln) + ": bad score \"" + line + "\"");
    }
  }
  if (out.size() < 2) throw ValidationError(path + ": need at least 2 scores");
  return out;
}

int cmd_prepare(const std::string& text, const std::string& pos, const std::string& seg,
                const std::string& out_dir, bool passivization, int min_count,
                const std::string& against_vocab) {
  auto sentences = parse_corpus(text, pos, seg, passivization);
  Vocab vocab = build_vocab(sentences, min_count, passivization);
  std::filesystem::create_directories(out_dir);
  save_dataset(out_dir + "/dataset.bin", {sentences});
  save_vocab(out_dir + "/vocab.bin", vocab);

  // OOV rate vs a training vocab when given, else vs this corpus (0%).
  Vocab ref = against_vocab.empty() ? vocab : load_vocab(against_vocab);
  int64_t words = 0, chars = 0, oov = 0;
  for (const auto& s : sentences) {
    for (const auto& w : s.words) {
      ++words;
      chars += int64_t(w.size());
      oov += !ref.training_word_set.count(w);
    }
  }
  std::printf("sentences %zu\n", sentences.size());
  std::printf("words %lld\n", static_cast<long long>(words));
  std::printf("chars %lld\n", static_cast<long long>(chars));
  std::printf("OOV rate %.2f%%\n", words ? 100.0 * double(oov) / double(words) : 0.0);
  return 0;
}

int cmd_train(const ModelConfig& cfg, const TrainParams& params, const std::string& train_dir,
              const std::string& dev_dir, const std::string& emb_path, const std::string& out_dir,
              const std::vector<uint64_t>& seeds) {
  Dataset train_ds = load_dataset(train_dir + "/dataset.bin");
  Vocab vocab = load_vocab(train_dir + "/vocab.bin");
  Dataset dev_ds;
  if (!dev_dir.empty()) dev_ds = load_dataset(dev_dir + "/dataset.bin");

  PretrainedEmbeddings<float> emb;
  if (!cfg.char_only) {
    if (emb_path.empty()) throw ConfigError("--emb is required unless char_only is set");
    emb = load_embeddings(emb_path);
  } else {
    emb.dim = cfg.word_emb_dim;
    emb.table = Tensor<float>({0, cfg.word_emb_dim});
  }

  std::filesystem::create_directories(out_dir);
  std::ofstream log(out_dir + "/train.log");
  if (!log) throw IoError("cannot write " + out_dir + "/train.log");
  struct Tee : std::ostream, std::streambuf {
    std::ostream &a, &b;
    Tee(std::ostream& x, std::ostream& y) : std::ostream(this), a(x), b(y) {}
    int overflow(int c) override {
      a.put(char(c));
      b.put(char(c));
      return c;
    }
  } tee(log, std::cerr);

  if (seeds.size() > 1) {
    auto trials = run_trials(cfg, params, train_ds.sentences, dev_ds.sentences, emb, vocab, seeds,
                             out_dir, &tee);
    std::printf("WER %s\n", format_mean_sd(trials.mean_wer, trials.sd_wer).c_str());
    for (size_t i = 0; i < trials.wers.size(); ++i)
      std::printf("seed %llu wer %.4f\n", static_cast<unsigned long long>(trials.seeds[i]),
                  trials.wers[i]);
    return 0;
  }

  ModelConfig run_cfg = cfg;
  if (!seeds.empty()) run_cfg.seed = seeds[0];
  Model<float> model(run_cfg, vocab, emb);
  auto result = train(model, train_ds.sentences, dev_ds.sentences, params, out_dir, &tee);
  std::printf("final checkpoint %s\n", result.final_path.c_str());
  if (!result.best_path.empty()) std::printf("best checkpoint %s\n", result.best_path.c_str());
  if (!dev_ds.sentences.empty()) {
    std::printf("best dev report:\n%s", result.best_dev.to_text().c_str());
  }
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& data_dir, int threads) {
  auto loaded = load_checkpoint(ckpt);
  Dataset ds = load_dataset(data_dir + "/dataset.bin");
  EvalReport report = evaluate_dataset(*loaded.model, ds.sentences, threads);
  std::fputs(report.to_text().c_str(), stdout);
  return 0;
}

int cmd_restore(const std::string& ckpt, const std::string& in_path,
                const std::string& out_path) {
  auto loaded = load_checkpoint(ckpt);
  auto lines = read_lines(in_path);

  // Everything is diacritized before anything is written: no partial output.
  std::vector<std::string> out_lines;
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    std::istringstream is(lines[ln]);
    std::vector<std::string> words;
    std::string w;
    while (is >> w) words.push_back(w);
    try {
      auto restored = loaded.model->predict(words);
      std::string joined;
      for (size_t i = 0; i < restored.size(); ++i) {
        if (i) joined += " ";
        joined += restored[i];
      }
      out_lines.push_back(std::move(joined));
    } catch (const ValidationError& e) {
      throw ValidationError(in_path + ":" + std::to_string(ln + 1) + ": " + e.what());
    }
  }
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  for (const auto& line : out_lines) out << line << "\n";
  return 0;
}

int cmd_significance(const std::string& a_path, const std::string& b_path, double alpha) {
  auto a = read_scores(a_path);
  auto b = read_scores(b_path);
  WelchResult r = welch_t_test(a, b, alpha);
  std::printf("t %.6f\n", r.t);
  std::printf("dof %.6f\n", r.dof);
  std::printf("p %.6g\n", r.p);
  std::printf("significant %s (alpha %.3g)\n", r.significant ? "yes" : "no", alpha);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harakat: multitask BiLSTM diacritic restoration"};
  app.require_subcommand(1);

  std::string kernel_backend = "auto";
  app.add_option("--kernels", kernel_backend, "Kernel backend: auto, scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // prepare
  auto* prep = app.add_subcommand("prepare", "Validate a corpus and serialize dataset + vocab");
  std::string text, pos, seg, out_dir, against_vocab;
  bool prep_pass = false;
  int min_count = 1;
  prep->add_option("text", text, "Diacritized text file")->required();
  prep->add_option("pos", pos, "Aligned POS tag file")->required();
  prep->add_option("seg", seg, "Aligned segmentation file ('+' between segments)")->required();
  prep->add_option("out", out_dir, "Output directory")->required();
  prep->add_flag("--passivization", prep_pass, "Expect VERB_ACT/VERB_PASS tags");
  prep->add_option("--min-count", min_count, "Word vocabulary frequency cutoff");
  prep->add_option("--vocab", against_vocab, "Existing vocab.bin for the OOV-rate statistic");

  // train
  auto* tr = app.add_subcommand("train", "Train a model (or several seeds)");
  std::string train_dir, dev_dir, emb_path, train_out = "run", config_path;
  std::vector<std::string> sets;
  std::string tasks_flag, seeds_flag;
  bool feed_seg_hidden = false, train_pass = false, char_only = false;
  int epochs_flag = -1, batch_flag = -1, threads_flag = -1;
  double lr_flag = -1;
  uint64_t seed_flag = 0;
  bool seed_given = false;
  tr->add_option("--train", train_dir, "Prepared training dataset directory")->required();
  tr->add_option("--dev", dev_dir, "Prepared development dataset directory");
  tr->add_option("--emb", emb_path, "Pretrained word vectors (.vec text format)");
  tr->add_option("--out", train_out, "Output directory");
  tr->add_option("--config", config_path, "key=value config file");
  tr->add_option("--set", sets, "Config override key=value (repeatable)");
  bool feed_labels_flag = true;
  tr->add_option("--tasks", tasks_flag, "Auxiliary tasks, e.g. seg,syn,pos or \"\"");
  auto* feed_opt = tr->add_flag("--feed-labels,!--no-feed-labels", feed_labels_flag,
                                "Feed task output distributions to the DIAC tower");
  tr->add_flag("--feed-seg-hidden", feed_seg_hidden, "Also feed the SEG tower's hidden layer");
  tr->add_flag("--passivization", train_pass, "Split VERB into active/passive tags");
  tr->add_flag("--char-only", char_only, "Character-only baseline (no word inputs)");
  tr->add_option("--epochs", epochs_flag, "Training epochs");
  tr->add_option("--batch-size", batch_flag, "Windows per optimizer step");
  tr->add_option("--lr", lr_flag, "Adam learning rate");
  tr->add_option("--threads", threads_flag, "Worker threads (1 = deterministic)");
  tr->add_option("--seed", seed_flag, "Master seed")->each([&](const std::string&) {
    seed_given = true;
  });
  tr->add_option("--seeds", seeds_flag, "Comma-separated seeds for multi-run trials");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a prepared dataset");
  std::string eval_ckpt, eval_data;
  int eval_threads = 1;
  ev->add_option("ckpt", eval_ckpt, "Checkpoint file")->required();
  ev->add_option("data", eval_data, "Prepared dataset directory")->required();
  ev->add_option("--threads", eval_threads, "Evaluation threads");

  // restore
  auto* rs = app.add_subcommand("restore", "Diacritize undiacritized text");
  std::string rs_ckpt, rs_in, rs_out;
  rs->add_option("ckpt", rs_ckpt, "Checkpoint file")->required();
  rs->add_option("input", rs_in, "Undiacritized input, one sentence per line")->required();
  rs->add_option("output", rs_out, "Diacritized output path")->required();

  // significance
  auto* sg = app.add_subcommand("significance", "Welch t-test between two score files");
  std::string sa, sb;
  double alpha = 0.05;
  sg->add_option("scores_a", sa, "Per-seed scores, one per line")->required();
  sg->add_option("scores_b", sb, "Per-seed scores, one per line")->required();
  sg->add_option("--alpha", alpha, "Significance level");

  CLI11_PARSE(app, argc, argv);

  try {
    if (kernel_backend == "scalar") kernels::set_backend(kernels::Backend::Scalar);
    else if (kernel_backend == "avx2") kernels::set_backend(kernels::Backend::Avx2);
    else kernels::set_backend_auto();

    if (prep->parsed())
      return cmd_prepare(text, pos, seg, out_dir, prep_pass, min_count, against_vocab);

    if (tr->parsed()) {
      ModelConfig cfg;
      TrainKv tkv;
      bool tasks_explicit = false;
      if (!config_path.empty()) load_config_file(config_path, cfg, tkv, &tasks_explicit);
      apply_overrides(sets, cfg, tkv, &tasks_explicit);
      if (tr->count("--tasks")) {
        model_config_apply_kv(cfg, "tasks", tasks_flag);
        tasks_explicit = true;
      }
      if (feed_opt->count()) cfg.feed_labels = feed_labels_flag;
      if (feed_seg_hidden) cfg.feed_seg_hidden = true;
      if (train_pass) cfg.passivization = true;
      if (char_only) {
        cfg.char_only = true;
        // Unless the task set was spelled out, char-only means the bare
        // character baseline.
        if (!tasks_explicit) cfg.task_seg = cfg.task_syn = cfg.task_pos = false;
      }
      if (epochs_flag >= 0) tkv.params.epochs = epochs_flag;
      if (batch_flag >= 0) tkv.params.batch_size = batch_flag;
      if (lr_flag >= 0) tkv.params.adam.lr = lr_flag;
      if (threads_flag >= 0) tkv.params.threads = threads_flag;
      if (seed_given) cfg.seed = seed_flag;
      cfg.validate();

      std::vector<uint64_t> seeds;
      if (!seeds_flag.empty()) {
        std::istringstream is(seeds_flag);
        std::string tok;
        while (std::getline(is, tok, ',')) {
          if (tok.empty()) continue;
          try {
            seeds.push_back(std::stoull(tok));
          } catch (const std::exception&) {
            throw ConfigError("bad seed \"" + tok + "\"");
          }
        }
      } else if (seed_given) {
        seeds.push_back(seed_flag);
      }
      return cmd_train(cfg, tkv.params, train_dir, dev_dir, emb_path, train_out, seeds);
    }

    if (ev->parsed()) return cmd_eval(eval_ckpt, eval_data, eval_threads);
    if (rs->parsed()) return cmd_restore(rs_ckpt, rs_in, rs_out);
    if (sg->parsed()) return cmd_significance(sa, sb, alpha);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
