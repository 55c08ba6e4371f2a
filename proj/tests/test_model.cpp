#include <doctest.h>

#include <cmath>

#include "harakat/model.hpp"
#include "support/gradcheck.hpp"
#include "support/synthlang.hpp"

using namespace harakat;

namespace {

template <class Real>
PretrainedEmbeddings<Real> test_embeddings(const std::vector<std::string>& tokens, int dim,
                                           uint64_t seed) {
  PretrainedEmbeddings<Real> emb;
  emb.dim = dim;
  emb.table = Tensor<Real>({int64_t(tokens.size()), dim});
  Rng rng(seed);
  for (size_t i = 0; i < tokens.size(); ++i) {
    emb.tokens.push_back(tokens[i]);
    emb.token_to_row[tokens[i]] = int(i);
    for (int d = 0; d < dim; ++d) emb.table.at(int64_t(i), d) = Real(rng.uniform(-0.5, 0.5));
  }
  return emb;
}

struct TinyData {
  std::vector<LabeledSentence> sentences;
  Vocab vocab;
};

TinyData tiny_data(bool passivization = false) {
  auto corpus = synthlang::generate(
      {.sentences = 6, .min_words = 2, .max_words = 4, .seed = 11, .passivization = passivization});
  TinyData d;
  d.sentences = parse_corpus_lines(corpus.text, corpus.pos, corpus.seg, passivization);
  d.vocab = build_vocab(d.sentences, 1, passivization);
  return d;
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.char_emb_dim = 5;
  cfg.word_emb_dim = 4;
  cfg.hidden = 3;
  cfg.layers_main = 2;
  cfg.layers_seg = 1;
  cfg.dropout_hidden = 0.0;
  cfg.dropout_emb = 0.0;
  cfg.window_radius = 10;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("diacritic tower input widths at full-scale dimensions") {
  ModelConfig cfg;  // defaults: 300/300/250, all tasks, feed_labels
  CHECK(cfg.diac_input_width() == 600 + 3 + 15 + 16);  // 634

  ModelConfig base = cfg;
  base.task_seg = base.task_syn = base.task_pos = false;
  CHECK(base.diac_input_width() == 600);  // WordToChar only

  ModelConfig hid = cfg;
  hid.feed_seg_hidden = true;
  CHECK(hid.diac_input_width() == 634 + 500);  // 1134

  ModelConfig chars = cfg;
  chars.task_seg = chars.task_syn = chars.task_pos = false;
  chars.char_only = true;
  CHECK(chars.diac_input_width() == 300);

  ModelConfig pass = cfg;
  pass.passivization = true;
  CHECK(pass.diac_input_width() == 635);

  ModelConfig nolabels = cfg;
  nolabels.feed_labels = false;
  CHECK(nolabels.diac_input_width() == 600);

  // CharToWord width: pretrained 300 + composed 2H 500 = 800.
  CHECK(cfg.word_emb_dim + 2 * cfg.hidden == 800);
}

TEST_CASE("config validation") {
  ModelConfig cfg = tiny_config();
  cfg.feed_seg_hidden = true;
  cfg.task_seg = false;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  ModelConfig cfg2 = tiny_config();
  cfg2.char_only = true;
  CHECK_THROWS_AS(cfg2.validate(), ConfigError);  // SYN/POS need word inputs
  cfg2.task_syn = cfg2.task_pos = false;
  CHECK_NOTHROW(cfg2.validate());

  ModelConfig cfg3 = tiny_config();
  cfg3.dropout_emb = 1.0;
  CHECK_THROWS_AS(cfg3.validate(), ConfigError);

  // Vocab tag count must match the passivization flag.
  auto d = tiny_data(false);
  ModelConfig cfg4 = tiny_config();
  cfg4.passivization = true;
  auto emb = test_embeddings<float>(d.vocab.words, cfg4.word_emb_dim, 1);
  CHECK_THROWS_AS(Model<float>(cfg4, d.vocab, emb), ConfigMismatch);
}

TEST_CASE("forward output shapes and ablation consistency") {
  auto d = tiny_data();
  ModelConfig all_cfg = tiny_config();
  auto emb = test_embeddings<float>(d.vocab.words, all_cfg.word_emb_dim, 1);
  Model<float> all_model(all_cfg, d.vocab, emb);

  auto windows = make_windows(d.sentences[0], d.vocab, all_cfg.window_radius);
  const Window& w = windows[0];

  Tape<float> t(/*training=*/false);
  Rng rng(0);
  auto out = all_model.forward(t, w, rng);
  CHECK(t.val(out.diac_logits).rows() == w.num_chars());
  CHECK(t.val(out.diac_logits).cols() == 15);
  CHECK(t.val(out.seg_probs).rows() == w.num_chars());
  CHECK(t.val(out.seg_probs).cols() == 3);
  CHECK(t.val(out.syn_probs).rows() == w.num_words());
  CHECK(t.val(out.syn_probs).cols() == 15);
  CHECK(t.val(out.pos_probs).cols() == 16);
  CHECK(t.val(out.seg_hidden).cols() == 2 * all_cfg.hidden);

  // Distributions sum to 1 per position.
  for (int64_t r = 0; r < t.val(out.seg_probs).rows(); ++r) {
    double s = 0;
    for (int64_t j = 0; j < 3; ++j) s += double(t.val(out.seg_probs).at(r, j));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-5));
  }

  // Disabling a task leaves the other towers' shapes untouched.
  ModelConfig no_pos = all_cfg;
  no_pos.task_pos = false;
  Model<float> ablated(no_pos, d.vocab, emb);
  CHECK(ablated.syn_tower.layers[0].fwd.wx.value.shape ==
        all_model.syn_tower.layers[0].fwd.wx.value.shape);
  CHECK(ablated.seg_head.w.value.shape == all_model.seg_head.w.value.shape);
  CHECK(ablated.diac_tower.layers[0].fwd.wx.value.shape[1] ==
        all_model.diac_tower.layers[0].fwd.wx.value.shape[1] - 16);

  Tape<float> t2(/*training=*/false);
  auto out2 = ablated.forward(t2, w, rng);
  CHECK(out2.pos_logits == -1);
  CHECK(t2.val(out2.diac_logits).rows() == w.num_chars());
}

TEST_CASE("loss is the task mean") {
  auto d = tiny_data();
  ModelConfig cfg = tiny_config();
  auto emb = test_embeddings<float>(d.vocab.words, cfg.word_emb_dim, 1);
  Model<float> model(cfg, d.vocab, emb);
  auto windows = make_windows(d.sentences[1], d.vocab, cfg.window_radius);
  const Window& w = windows[0];

  Tape<float> t(/*training=*/true);
  Rng rng(1);
  auto out = model.forward(t, w, rng);
  int loss = model.loss(t, out, w);

  std::vector<uint8_t> cmask(w.char_ids.size(), 1), wmask(w.word_ids.size(), 1);
  double manual = double(t.val(masked_mean_ce(t, out.diac_logits, w.diac_labels, cmask)).scalar());
  manual += double(t.val(masked_mean_ce(t, out.seg_logits, w.seg_labels, cmask)).scalar());
  manual += double(t.val(masked_mean_ce(t, out.syn_logits, w.syn_labels, wmask)).scalar());
  manual += double(t.val(masked_mean_ce(t, out.pos_logits, w.pos_labels, wmask)).scalar());
  CHECK(double(t.val(loss).scalar()) == doctest::Approx(manual / 4.0).epsilon(1e-6));

  // DIAC-only: loss equals the single cross entropy.
  ModelConfig solo = cfg;
  solo.task_seg = solo.task_syn = solo.task_pos = false;
  Model<float> solo_model(solo, d.vocab, emb);
  Tape<float> t2(/*training=*/true);
  auto out2 = solo_model.forward(t2, w, rng);
  int loss2 = solo_model.loss(t2, out2, w);
  double diac_only =
      double(t2.val(masked_mean_ce(t2, out2.diac_logits, w.diac_labels, cmask)).scalar());
  CHECK(double(t2.val(loss2).scalar()) == doctest::Approx(diac_only).epsilon(1e-7));
}

TEST_CASE("train and infer agree when dropout is zero; prediction is deterministic") {
  auto d = tiny_data();
  ModelConfig cfg = tiny_config();
  auto emb = test_embeddings<float>(d.vocab.words, cfg.word_emb_dim, 1);
  Model<float> model(cfg, d.vocab, emb);
  auto windows = make_windows(d.sentences[0], d.vocab, cfg.window_radius);
  const Window& w = windows[0];

  Tape<float> train_t(/*training=*/true), infer_t(/*training=*/false);
  Rng r1(5), r2(5);
  auto o1 = model.forward(train_t, w, r1);
  auto o2 = model.forward(infer_t, w, r2);
  CHECK(train_t.val(o1.diac_logits).data == infer_t.val(o2.diac_logits).data);

  auto p1 = model.predict(d.sentences[0].words);
  auto p2 = model.predict(d.sentences[0].words);
  CHECK(p1 == p2);
  CHECK(p1.size() == d.sentences[0].words.size());
  for (size_t i = 0; i < p1.size(); ++i) {
    auto [skel, labels] = strip_diacritics(p1[i]);
    CHECK(skel == d.sentences[0].words[i]);
  }
  CHECK(model.predict({}).empty());

  // Same seed and config build identical parameters.
  Model<float> clone(cfg, d.vocab, emb);
  for (size_t i = 0; i < model.registry.all().size(); ++i)
    CHECK(model.registry.all()[i]->value.data == clone.registry.all()[i]->value.data);
}

TEST_CASE("argmax prediction is invariant to positive logit scaling") {
  auto d = tiny_data();
  ModelConfig cfg = tiny_config();
  auto emb = test_embeddings<float>(d.vocab.words, cfg.word_emb_dim, 1);
  Model<float> model(cfg, d.vocab, emb);
  auto before = model.predict(d.sentences[2].words);
  for (auto& x : model.diac_head.w.value.data) x *= 3.0f;
  for (auto& x : model.diac_head.b.value.data) x *= 3.0f;
  CHECK(model.predict(d.sentences[2].words) == before);
}

TEST_CASE("hard label feeding at inference is well-formed") {
  auto d = tiny_data();
  ModelConfig cfg = tiny_config();
  cfg.hard_labels_infer = true;
  auto emb = test_embeddings<float>(d.vocab.words, cfg.word_emb_dim, 1);
  Model<float> model(cfg, d.vocab, emb);
  auto out = model.predict(d.sentences[0].words);
  CHECK(out.size() == d.sentences[0].words.size());
}

TEST_CASE("auxiliary label feeding carries gradient into the diacritic loss") {
  auto d = tiny_data();
  ModelConfig cfg = tiny_config();
  auto emb = test_embeddings<double>(d.vocab.words, cfg.word_emb_dim, 1);
  Model<double> model(cfg, d.vocab, emb);
  auto windows = make_windows(d.sentences[0], d.vocab, cfg.window_radius);
  const Window& w = windows[0];
  std::vector<uint8_t> cmask(w.char_ids.size(), 1);

  auto diac_loss = [&](Model<double>& m) {
    Tape<double> t(/*training=*/true);
    Rng rng(0);
    auto out = m.forward(t, w, rng);
    return t.val(masked_mean_ce(t, out.diac_logits, w.diac_labels, cmask)).scalar();
  };

  // Analytic gradient of the DIAC-only loss wrt a SYN tower weight.
  Tape<double> t(/*training=*/true);
  Rng rng(0);
  auto out = model.forward(t, w, rng);
  zero_grads(model.registry.all());
  t.backward(masked_mean_ce(t, out.diac_logits, w.diac_labels, cmask));

  Parameter<double>& wsyn = model.syn_tower.layers[0].fwd.wx;
  double g_max = 0;
  for (double g : wsyn.grad.data) g_max = std::max(g_max, std::fabs(g));
  CHECK(g_max > 0.0);  // distributions are differentiable inputs

  auto loss_fn = [&] { return diac_loss(model); };
  Rng crng(13);
  gradcheck::Result res;
  gradcheck::check_array(loss_fn, wsyn.value.data.data(), wsyn.grad.data.data(),
                         wsyn.value.numel(), 20, crng, res, 1e-5, 1e-4);
  CHECK(res.max_rel <= 1e-4);

  // Without label feeding there is no such path.
  ModelConfig nofeed = cfg;
  nofeed.feed_labels = false;
  Model<double> blocked(nofeed, d.vocab, emb);
  Tape<double> t2(/*training=*/true);
  auto out2 = blocked.forward(t2, w, rng);
  zero_grads(blocked.registry.all());
  t2.backward(masked_mean_ce(t2, out2.diac_logits, w.diac_labels, cmask));
  for (double g : blocked.syn_tower.layers[0].fwd.wx.grad.data) CHECK(g == 0.0);
}

TEST_CASE("full joint model gradients match finite differences") {
  auto d = tiny_data();
  ModelConfig cfg = tiny_config();
  cfg.feed_seg_hidden = true;  // widest configuration
  auto emb = test_embeddings<double>(d.vocab.words, cfg.word_emb_dim, 1);
  Model<double> model(cfg, d.vocab, emb);
  auto windows = make_windows(d.sentences[0], d.vocab, cfg.window_radius);
  const Window& w = windows[0];

  auto loss_fn = [&] {
    Tape<double> t(/*training=*/true);
    Rng rng(0);
    auto out = model.forward(t, w, rng);
    return t.val(model.loss(t, out, w)).scalar();
  };
  {
    Tape<double> t(/*training=*/true);
    Rng rng(0);
    auto out = model.forward(t, w, rng);
    zero_grads(model.registry.all());
    t.backward(model.loss(t, out, w));
  }
  Rng crng(17);
  auto res = gradcheck::check_params(loss_fn, model.registry.all(), 6, crng, 1e-5, 1e-4);
  CHECK(res.max_rel <= 1e-4);
  CHECK(res.checked > 100);
}
