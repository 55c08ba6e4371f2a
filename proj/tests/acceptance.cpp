// Acceptance suite: one criterion per number, one pass/fail line each.
// Usage: acceptance [n ...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "harakat/train.hpp"
#include "support/gradcheck.hpp"
#include "support/synthlang.hpp"

using namespace harakat;

namespace {

// ---------- shared helpers ----------

template <class Real>
PretrainedEmbeddings<Real> embeddings_for(const std::vector<std::string>& tokens, int dim,
                                          uint64_t seed) {
  auto content = synthlang::make_embedding_file(tokens, dim, seed);
  auto path = std::filesystem::temp_directory_path() / "harakat_acceptance.vec";
  std::ofstream(path) << content;
  return load_embeddings(path.string()).cast<Real>();
}

struct Data {
  std::vector<LabeledSentence> sentences;
  Vocab vocab;
};

Data make_data(int sentences, uint64_t seed, bool passivization = false, int min_words = 3,
               int max_words = 4) {
  auto corpus = synthlang::generate({.sentences = sentences,
                                     .min_words = min_words,
                                     .max_words = max_words,
                                     .seed = seed,
                                     .passivization = passivization});
  Data d;
  d.sentences = parse_corpus_lines(corpus.text, corpus.pos, corpus.seg, passivization);
  d.vocab = build_vocab(d.sentences, 1, passivization);
  return d;
}

double train_diac_char_accuracy(Model<float>& model, const std::vector<LabeledSentence>& sents) {
  return 100.0 - evaluate_dataset(model, sents, 2).der;
}

// ---------- criterion 1 ----------

bool criterion_gradients(std::string& detail) {
  double worst = 0;
  int checked = 0;

  for (uint64_t seed : {11u, 22u, 33u}) {
    Rng rng(seed);
    auto rnd = [&](std::vector<int64_t> shape, double s = 0.5) {
      Tensor<double> t(std::move(shape));
      for (auto& x : t.data) x = rng.uniform(-s, s);
      return t;
    };
    Rng crng(seed ^ 0xabc);

    {  // embedding rows -> CE
      Parameter<double> table("t", {6, 5});
      table.value = rnd({6, 5});
      std::vector<int> ids = {2, 5, 2, 0};
      std::vector<int> targets = {1, 0, 4, 3};
      std::vector<uint8_t> mask(4, 1);
      auto loss = [&] {
        Tape<double> t;
        return t.val(masked_mean_ce(t, embed_rows(t, table, ids), targets, mask)).scalar();
      };
      Tape<double> t;
      zero_grads<double>({&table});
      t.backward(masked_mean_ce(t, embed_rows(t, table, ids), targets, mask));
      auto res = gradcheck::check_params(loss, {&table}, 1000, crng);
      worst = std::max(worst, res.max_rel);
      checked += res.checked;
    }

    {  // dense affine -> CE
      Parameter<double> w("w", {4, 7}), b("b", {1, 4});
      w.value = rnd({4, 7});
      b.value = rnd({1, 4});
      Tensor<double> x = rnd({5, 7});
      std::vector<int> targets = {0, 1, 2, 3, 1};
      std::vector<uint8_t> mask = {1, 1, 0, 1, 1};
      auto loss = [&] {
        Tape<double> t;
        int y = affine_rows(t, t.add_input(x), w, b);
        return t.val(masked_mean_ce(t, y, targets, mask)).scalar();
      };
      Tape<double> t;
      int xn = t.add_input(x);
      zero_grads<double>({&w, &b});
      t.backward(masked_mean_ce(t, affine_rows(t, xn, w, b), targets, mask));
      auto res = gradcheck::check_params(loss, {&w, &b}, 1000, crng);
      gradcheck::check_array(loss, x.data.data(), t.grad(xn).data.data(), x.numel(), 1000, crng,
                             res);
      worst = std::max(worst, res.max_rel);
      checked += res.checked;
    }

    {  // single LSTM cell (1 step with initial state) -> CE
      LstmDirParams<double> w;
      w.wx = Parameter<double>("wx", {12, 4});
      w.wh = Parameter<double>("wh", {12, 3});
      w.b = Parameter<double>("b", {1, 12});
      w.wx.value = rnd({12, 4});
      w.wh.value = rnd({12, 3});
      w.b.value = rnd({1, 12});
      Tensor<double> x = rnd({1, 4}), h0 = rnd({1, 3}), c0 = rnd({1, 3});
      std::vector<int> targets = {1};
      std::vector<uint8_t> mask = {1};
      auto loss = [&] {
        Tape<double> t;
        int y = lstm(t, t.add_input(x), w, false, t.add_input(h0), t.add_input(c0));
        return t.val(masked_mean_ce(t, y, targets, mask)).scalar();
      };
      Tape<double> t;
      int xn = t.add_input(x), hn = t.add_input(h0), cn = t.add_input(c0);
      zero_grads<double>({&w.wx, &w.wh, &w.b});
      t.backward(masked_mean_ce(t, lstm(t, xn, w, false, hn, cn), targets, mask));
      auto res = gradcheck::check_params(loss, {&w.wx, &w.wh, &w.b}, 1000, crng);
      for (auto [tensor, node] : {std::pair{&x, xn}, {&h0, hn}, {&c0, cn}})
        gradcheck::check_array(loss, tensor->data.data(), t.grad(node).data.data(),
                               tensor->numel(), 1000, crng, res);
      worst = std::max(worst, res.max_rel);
      checked += res.checked;
    }

    {  // 3-layer stacked BiLSTM -> CE
      BiLstmStack<double> stack;
      for (int l = 0; l < 3; ++l) {
        int64_t d = l == 0 ? 3 : 4;
        BiLstmLayerParams<double> layer;
        for (auto* dir : {&layer.fwd, &layer.bwd}) {
          dir->wx = Parameter<double>("wx", {8, d});
          dir->wh = Parameter<double>("wh", {8, 2});
          dir->b = Parameter<double>("b", {1, 8});
          dir->wx.value = rnd({8, d});
          dir->wh.value = rnd({8, 2});
          dir->b.value = rnd({1, 8});
        }
        stack.layers.push_back(std::move(layer));
      }
      std::vector<Parameter<double>*> params;
      for (auto& layer : stack.layers)
        for (auto* dir : {&layer.fwd, &layer.bwd})
          for (auto* p : {&dir->wx, &dir->wh, &dir->b}) params.push_back(p);
      Tensor<double> x = rnd({5, 3});
      std::vector<int> targets = {0, 3, 2, 1, 0};
      std::vector<uint8_t> mask(5, 1);
      Rng drng(0);
      auto loss = [&] {
        Tape<double> t;
        int y = bilstm_forward(t, t.add_input(x), stack, 0.0, drng);
        return t.val(masked_mean_ce(t, y, targets, mask)).scalar();
      };
      Tape<double> t;
      zero_grads(params);
      t.backward(masked_mean_ce(t, bilstm_forward(t, t.add_input(x), stack, 0.0, drng), targets,
                                mask));
      auto res = gradcheck::check_params(loss, params, 8, crng);
      worst = std::max(worst, res.max_rel);
      checked += res.checked;
    }

    {  // softmax cross entropy on raw logits
      Tensor<double> x = rnd({4, 15}, 2.0);
      std::vector<int> targets = {14, 0, 7, 3};
      std::vector<uint8_t> mask = {1, 1, 1, 0};
      auto loss = [&] {
        Tape<double> t;
        return t.val(masked_mean_ce(t, t.add_input(x), targets, mask)).scalar();
      };
      Tape<double> t;
      int xn = t.add_input(x);
      t.backward(masked_mean_ce(t, xn, targets, mask));
      gradcheck::Result res;
      gradcheck::check_array(loss, x.data.data(), t.grad(xn).data.data(), x.numel(), 1000, crng,
                             res);
      worst = std::max(worst, res.max_rel);
      checked += res.checked;
    }

    {  // the full ALL-model graph on a micro window
      Data d = make_data(3, seed, false, 2, 3);
      ModelConfig cfg;
      cfg.char_emb_dim = 4;
      cfg.word_emb_dim = 4;
      cfg.hidden = 3;
      cfg.layers_main = 3;
      cfg.layers_seg = 1;
      cfg.dropout_hidden = 0.0;
      cfg.dropout_emb = 0.0;
      cfg.seed = seed;
      auto emb = embeddings_for<double>(d.vocab.words, cfg.word_emb_dim, seed);
      Model<double> model(cfg, d.vocab, emb);
      Window w = make_windows(d.sentences[0], d.vocab, cfg.window_radius)[0];
      auto loss = [&] {
        Tape<double> t(/*training=*/true);
        Rng r(0);
        auto out = model.forward(t, w, r);
        return t.val(model.loss(t, out, w)).scalar();
      };
      Tape<double> t(/*training=*/true);
      Rng r(0);
      auto out = model.forward(t, w, r);
      zero_grads(model.registry.all());
      t.backward(model.loss(t, out, w));
      auto res = gradcheck::check_params(loss, model.registry.all(), 4, crng);
      worst = std::max(worst, res.max_rel);
      checked += res.checked;
    }
  }

  char buf[160];
  std::snprintf(buf, sizeof buf, "max rel err %.3g over %d sampled coords, 3 seeds (tol 1e-4)",
                worst, checked);
  detail = buf;
  return worst <= 1e-4;
}

// ---------- criterion 2 ----------

bool criterion_round_trip(std::string& detail) {
  Rng rng(20260810);
  int mismatches = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    std::string word = synthlang::random_diacritized_word(rng);
    auto [skeleton, labels] = strip_diacritics(word);
    if (apply_diacritics(skeleton, labels) != word) ++mismatches;
  }
  // And through the corpus deriver: parse, then re-apply each word's labels.
  auto corpus = synthlang::generate({.sentences = 120, .seed = 8});
  auto sents = parse_corpus_lines(corpus.text, corpus.pos, corpus.seg);
  int words = n;
  for (size_t si = 0; si < sents.size(); ++si) {
    std::istringstream orig(corpus.text[si]);
    const auto& s = sents[si];
    for (size_t w = 0; w < s.words.size(); ++w) {
      std::string expect;
      orig >> expect;
      std::vector<DiacriticLabel> labels;
      for (size_t k = 0; k < s.words[w].size(); ++k)
        labels.push_back(DiacriticLabel(s.diac_labels[size_t(s.word_char_begin[w]) + k]));
      if (apply_diacritics(s.words[w], labels) != expect) ++mismatches;
      ++words;
    }
  }
  detail = std::to_string(mismatches) + " mismatches over " + std::to_string(words) + " words";
  return mismatches == 0;
}

// ---------- criterion 3 ----------

bool criterion_metric_oracles(std::string& detail) {
  Rng rng(31337);
  int bad = 0;

  for (int trial = 0; trial < 100; ++trial) {
    int n_words = 1 + int(rng.bounded(15));
    LabelSeqs gold, pred;
    std::vector<std::string> skeletons;
    std::unordered_set<std::string> training;
    for (int w = 0; w < n_words; ++w) {
      int len = 1 + int(rng.bounded(6));
      std::vector<int> g, p;
      for (int k = 0; k < len; ++k) {
        g.push_back(int(rng.bounded(15)));
        p.push_back(rng.uniform() < 0.3 ? int(rng.bounded(15)) : g.back());
      }
      gold.push_back(g);
      pred.push_back(p);
      std::string skel = "w" + std::to_string(w);
      skeletons.push_back(skel);
      if (rng.uniform() < 0.7) training.insert(skel);
    }

    // Brute-force recount (independent path: per-word label-string compare).
    int64_t words = 0, chars = 0, werr = 0, cerr = 0, lerr = 0, xerr = 0, oov = 0, oov_err = 0;
    for (int w = 0; w < n_words; ++w) {
      ++words;
      bool any = false, internal = false;
      for (size_t k = 0; k < gold[size_t(w)].size(); ++k) {
        ++chars;
        bool wrong = pred[size_t(w)][k] != gold[size_t(w)][k];
        cerr += wrong;
        any |= wrong;
        if (k + 1 < gold[size_t(w)].size()) internal |= wrong;
      }
      werr += any;
      lerr += pred[size_t(w)].back() != gold[size_t(w)].back();
      xerr += internal;
      if (!training.count(skeletons[size_t(w)])) {
        ++oov;
        oov_err += any;
      }
    }

    bad += word_error_rate(pred, gold) != 100.0 * double(werr) / double(words);
    bad += diacritic_error_rate(pred, gold) != 100.0 * double(cerr) / double(chars);
    bad += last_diacritic_error_rate(pred, gold) != 100.0 * double(lerr) / double(words);
    bad += lex_error_rate(pred, gold) != 100.0 * double(xerr) / double(words);
    auto ow = oov_wer(pred, gold, skeletons, training);
    if (oov == 0)
      bad += ow.has_value();
    else
      bad += !ow || *ow != 100.0 * double(oov_err) / double(oov);
  }

  // Welch against an adaptive-quadrature reference.
  auto t_pdf = [](double s, double dof) {
    double lg = std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2);
    return std::exp(lg) / std::sqrt(dof * M_PI) * std::pow(1.0 + s * s / dof, -(dof + 1) / 2);
  };
  auto simpson = [&](double a, double b, double dof, int n) {
    double h = (b - a) / n;
    double s = t_pdf(a, dof) + t_pdf(b, dof);
    for (int i = 1; i < n; ++i) s += t_pdf(a + i * h, dof) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  double max_p_diff = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    int na = 3 + int(rng.bounded(3)), nb = 3 + int(rng.bounded(3));
    for (int i = 0; i < na; ++i) a.push_back(rng.uniform(0.0, 10.0));
    for (int i = 0; i < nb; ++i) b.push_back(rng.uniform(0.0, 10.0));
    WelchResult r = welch_t_test(a, b);
    double t = std::fabs(r.t), acc = 0, lo = t;
    double upper = std::max(1e4, t * 1e3);
    while (lo < upper) {
      double hi = std::min(upper, lo * 2 + 1.0);
      acc += simpson(lo, hi, r.dof, 4000);
      lo = hi;
    }
    max_p_diff = std::max(max_p_diff, std::fabs(r.p - 2.0 * acc));
  }

  char buf[160];
  std::snprintf(buf, sizeof buf, "%d recount disagreements; welch p diff %.2g (tol 1e-6)", bad,
                max_p_diff);
  detail = buf;
  return bad == 0 && max_p_diff <= 1e-6;
}

// ---------- criterion 4 ----------

bool criterion_overfit(std::string& detail) {
  Data d = make_data(50, 404, false, 3, 4);
  ModelConfig cfg;
  cfg.char_emb_dim = 64;
  cfg.word_emb_dim = 64;
  cfg.hidden = 64;
  cfg.layers_main = 3;
  cfg.layers_seg = 1;
  cfg.dropout_hidden = 0.0;  // memorization harness: regularization off
  cfg.dropout_emb = 0.0;
  cfg.seed = 1;
  auto emb = embeddings_for<float>(synthlang::lexicon_skeletons(), cfg.word_emb_dim, 7);
  Model<float> model(cfg, d.vocab, emb);

  TrainParams tp;
  tp.adam.lr = 0.001;
  tp.batch_size = 4;  // more optimizer steps per epoch for the memorization run
  tp.epochs = 10;     // per chunk
  tp.threads = 2;
  tp.save_checkpoints = false;

  double acc = 0;
  int epochs = 0;
  for (; epochs < 200; epochs += tp.epochs) {
    train(model, d.sentences, {}, tp, "");
    acc = train_diac_char_accuracy(model, d.sentences);
    if (acc >= 99.0) break;
  }
  epochs = std::min(epochs + tp.epochs, 200);

  // An overfit model restores a training sentence exactly.
  bool restored_ok = false;
  if (acc >= 99.0) {
    const auto& s = d.sentences[0];
    std::vector<DiacriticLabel> labels;
    restored_ok = true;
    auto out = model.predict(s.words);
    for (size_t w = 0; w < s.words.size(); ++w) {
      std::string gold;
      for (size_t k = 0; k < s.words[w].size(); ++k) {
        gold.push_back(s.words[w][k]);
        gold += label_mark(DiacriticLabel(s.diac_labels[size_t(s.word_char_begin[w]) + k]));
      }
      restored_ok &= out[w] == gold;
    }
  }

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "train DIAC char acc %.2f%% after %d epochs (need >= 99 within 200); restore %s",
                acc, epochs, restored_ok ? "exact" : "failed");
  detail = buf;
  return acc >= 99.0 && restored_ok;
}

// ---------- criterion 5 ----------

bool criterion_loss_identity(std::string& detail) {
  Rng rng(55);
  Tensor<double> logits({6, 15});
  for (auto& x : logits.data) x = rng.uniform(-2.0, 2.0);
  std::vector<int> targets;
  for (int i = 0; i < 6; ++i) targets.push_back(int(rng.bounded(15)));
  std::vector<uint8_t> mask(6, 1);

  // Four tasks sharing one logits/targets fixture: the normalized sum must
  // equal the per-task loss.
  Tape<double> t;
  std::vector<int> losses;
  for (int task = 0; task < 4; ++task)
    losses.push_back(masked_mean_ce(t, t.add_input(logits), targets, mask));
  double per_task = t.val(losses[0]).scalar();
  double combined = t.val(add_scaled(t, losses, 0.25)).scalar();

  double diff = std::fabs(combined - per_task);
  char buf[120];
  std::snprintf(buf, sizeof buf, "|combined - per-task| = %.3g (tol 1e-6)", diff);
  detail = buf;
  return diff <= 1e-6;
}

// ---------- criterion 6 ----------

bool criterion_determinism(std::string& detail) {
  Data train_d = make_data(12, 606);
  Data dev_d = make_data(4, 607);
  ModelConfig cfg;
  cfg.char_emb_dim = 8;
  cfg.word_emb_dim = 8;
  cfg.hidden = 6;
  cfg.layers_main = 1;
  cfg.seed = 9;
  auto emb = embeddings_for<float>(synthlang::lexicon_skeletons(), cfg.word_emb_dim, 7);

  TrainParams tp;
  tp.epochs = 2;
  tp.batch_size = 8;
  tp.save_checkpoints = false;

  Model<float> m1(cfg, train_d.vocab, emb);
  train(m1, train_d.sentences, dev_d.sentences, tp, "");
  Model<float> m2(cfg, train_d.vocab, emb);
  train(m2, train_d.sentences, dev_d.sentences, tp, "");

  bool identical = true;
  for (size_t i = 0; i < m1.registry.all().size(); ++i)
    identical &= m1.registry.all()[i]->value.data == m2.registry.all()[i]->value.data;

  // Checkpoint round trip preserves dev metrics exactly.
  auto dir = std::filesystem::temp_directory_path() / "harakat_acceptance_c6";
  std::filesystem::create_directories(dir);
  auto path = (dir / "model.tmtl").string();
  save_checkpoint(path, m1, {});
  auto loaded = load_checkpoint(path);
  std::string before = evaluate_dataset(m1, dev_d.sentences).to_text();
  std::string after = evaluate_dataset(*loaded.model, dev_d.sentences).to_text();

  detail = std::string("params bit-identical: ") + (identical ? "yes" : "NO") +
           "; dev report preserved: " + (before == after ? "yes" : "NO");
  return identical && before == after;
}

// ---------- criterion 7 ----------

bool criterion_ablation_direction(std::string& detail) {
  Data train_d = make_data(2000, 7001, false, 3, 6);
  Data dev_d = make_data(300, 7002, false, 3, 6);
  auto emb = embeddings_for<float>(synthlang::lexicon_skeletons(), 64, 7);

  TrainParams tp;
  tp.adam.lr = 0.001;
  tp.batch_size = 16;
  tp.epochs = 2;
  tp.threads = 2;
  tp.save_checkpoints = false;

  auto run = [&](bool char_only, uint64_t seed) {
    ModelConfig cfg;
    cfg.char_emb_dim = 64;
    cfg.word_emb_dim = 64;
    cfg.hidden = 64;
    cfg.layers_main = 3;
    cfg.layers_seg = 1;
    cfg.seed = seed;
    if (char_only) {
      cfg.char_only = true;
      cfg.task_seg = cfg.task_syn = cfg.task_pos = false;
    }
    Model<float> model(cfg, train_d.vocab, emb);
    auto r = train(model, train_d.sentences, dev_d.sentences, tp, "");
    return r.best_dev.wer;
  };

  int wins = 0;
  double all_sum = 0, base_sum = 0;
  std::string per_seed;
  for (uint64_t seed : {1u, 2u, 3u}) {
    double wer_all = run(false, seed);
    double wer_base = run(true, seed);
    wins += wer_all <= wer_base;
    all_sum += wer_all;
    base_sum += wer_base;
    char buf[80];
    std::snprintf(buf, sizeof buf, " [seed %llu: ALL %.2f vs BASE %.2f]",
                  static_cast<unsigned long long>(seed), wer_all, wer_base);
    per_seed += buf;
  }

  char buf[240];
  std::snprintf(buf, sizeof buf, "ALL <= BASE(Char) in %d/3 seeds; mean %.2f vs %.2f;%s", wins,
                all_sum / 3, base_sum / 3, per_seed.c_str());
  detail = buf;
  return wins >= 2 && all_sum <= base_sum;
}

// ---------- criterion 8 ----------

bool criterion_ablation_matrix(std::string& detail) {
  Data plain = make_data(20, 808, false);
  Data pass = make_data(20, 808, true);
  auto emb = embeddings_for<float>(synthlang::lexicon_skeletons(), 16, 7);

  struct Case {
    bool seg, syn, pos, feed_labels, passivization, seg_hidden, char_only;
  };
  std::vector<Case> cases;
  for (int bits = 0; bits < 8; ++bits) {
    bool seg = bits & 1, syn = bits & 2, pos = bits & 4;
    if (!seg && !syn && !pos) continue;  // the 7 task subsets
    for (bool feed : {true, false})
      cases.push_back({seg, syn, pos, feed, false, false, false});
    if (pos) cases.push_back({seg, syn, pos, true, true, false, false});
    if (seg) cases.push_back({seg, syn, pos, true, false, true, false});
  }
  cases.push_back({false, false, false, true, false, false, false});  // BASE (WordToChar)
  cases.push_back({false, false, false, true, false, false, true});   // BASE (Char)

  TrainParams tp;
  tp.epochs = 1;
  tp.batch_size = 16;
  tp.save_checkpoints = false;

  int failures = 0;
  std::string first_error;
  for (const Case& c : cases) {
    try {
      ModelConfig cfg;
      cfg.char_emb_dim = 16;
      cfg.word_emb_dim = 16;
      cfg.hidden = 16;
      cfg.layers_main = 2;
      cfg.layers_seg = 1;
      cfg.task_seg = c.seg;
      cfg.task_syn = c.syn;
      cfg.task_pos = c.pos;
      cfg.feed_labels = c.feed_labels;
      cfg.passivization = c.passivization;
      cfg.feed_seg_hidden = c.seg_hidden;
      cfg.char_only = c.char_only;
      cfg.seed = 2;
      Data& d = c.passivization ? pass : plain;
      Model<float> model(cfg, d.vocab, emb);
      auto r = train(model, d.sentences, d.sentences, tp, "");
      const EvalReport& rep = r.final_dev;
      bool ok = rep.words > 0 && rep.wer >= 0 && rep.wer <= 100 && rep.der >= 0 &&
                rep.der <= 100 && rep.ler >= 0 && rep.ler <= 100 && rep.lex >= 0 &&
                rep.lex <= 100 && (!c.seg || rep.seg_acc.has_value()) &&
                (!c.syn || rep.syn_acc.has_value()) && (!c.pos || rep.pos_acc.has_value()) &&
                (c.seg || !rep.seg_acc.has_value());
      if (!ok) {
        ++failures;
        if (first_error.empty()) first_error = "malformed report";
      }
    } catch (const std::exception& e) {
      ++failures;
      if (first_error.empty()) first_error = e.what();
    }
  }

  char buf[240];
  std::snprintf(buf, sizeof buf, "%zu configurations, %d failures%s%s", cases.size(), failures,
                first_error.empty() ? "" : "; first: ", first_error.c_str());
  detail = buf;
  return failures == 0;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    bool (*run)(std::string&);
  };
  const Criterion criteria[] = {
      {1, "gradient-correctness", criterion_gradients},
      {2, "round-trip-pipeline", criterion_round_trip},
      {3, "metric-oracles", criterion_metric_oracles},
      {4, "overfitting", criterion_overfit},
      {5, "normalized-loss-identity", criterion_loss_identity},
      {6, "determinism-and-persistence", criterion_determinism},
      {7, "directional-ablation", criterion_ablation_direction},
      {8, "ablation-shape-matrix", criterion_ablation_matrix},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end())
      continue;
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d (%s): %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.c_str(), secs);
    std::fflush(stdout);
    failures += !ok;
  }
  return failures;
}
