#pragma once

#include <map>
#include <string>
#include <vector>

#include "harakat/nn.hpp"

namespace harakat {

// Hyperparameters and task toggles. Defaults are the full-scale settings;
// tests shrink dims but never change the structure.
struct ModelConfig {
  int char_emb_dim = 300;
  int word_emb_dim = 300;
  int hidden = 250;  // per direction
  int layers_main = 3;
  int layers_seg = 1;
  double dropout_hidden = 0.3;
  double dropout_emb = 0.5;
  int window_radius = 10;
  bool task_seg = true;
  bool task_syn = true;
  bool task_pos = true;
  bool feed_labels = true;
  bool feed_seg_hidden = false;
  bool passivization = false;
  bool char_only = false;         // diacritic tower sees only char embeddings
  bool hard_labels_infer = false; // feed argmax one-hots instead of distributions at inference
  double grad_clip = 0.0;         // 0 = off
  uint64_t seed = 1;

  int num_diac_classes() const { return kNumDiacriticLabels; }
  int num_seg_classes() const { return kNumSegLabels; }
  int num_pos_classes() const { return passivization ? 17 : 16; }
  int enabled_task_count() const { return 1 + task_seg + task_syn + task_pos; }

  // Width of the per-character input to the diacritic tower.
  int diac_input_width() const {
    int w = char_only ? char_emb_dim : char_emb_dim + word_emb_dim;
    if (feed_labels) {
      if (task_seg) w += num_seg_classes();
      if (task_syn) w += num_diac_classes();
      if (task_pos) w += num_pos_classes();
    }
    if (feed_seg_hidden && task_seg) w += 2 * hidden;
    return w;
  }

  void validate() const {
    if (char_emb_dim <= 0 || word_emb_dim <= 0 || hidden <= 0)
      throw ConfigError("dims must be positive");
    if (layers_main <= 0 || layers_seg <= 0) throw ConfigError("layer counts must be positive");
    if (dropout_hidden < 0 || dropout_hidden >= 1 || dropout_emb < 0 || dropout_emb >= 1)
      throw ConfigError("dropout must be in [0,1)");
    if (window_radius < 0) throw ConfigError("window radius must be >= 0");
    if (feed_seg_hidden && !task_seg)
      throw ConfigError("feed_seg_hidden requires the SEG task");
    if (char_only && (task_syn || task_pos))
      throw ConfigError("char_only excludes the word-level tasks (SYN, POS)");
  }
};

std::map<std::string, std::string> model_config_to_kv(const ModelConfig& c);
// Returns false if the key is unknown; throws ConfigError on a bad value.
bool model_config_apply_kv(ModelConfig& c, const std::string& key, const std::string& value);

// Joint model: a shared character embedding, the two cross-level input
// representations, one tower per task, and the diacritic tower fed by the
// auxiliary outputs.
template <class Real>
class Model {
 public:
  ModelConfig cfg;
  Vocab vocab;
  PretrainedEmbeddings<Real> pretrained;

  Parameter<Real> char_table;  // [chars, char_emb]
  Parameter<Real> word_unk;    // [1, word_emb] learned row for pretrained misses
  BiLstmStack<Real> composer;  // char-based word representation (1 layer)
  BiLstmStack<Real> seg_tower, syn_tower, pos_tower, diac_tower;
  DenseParams<Real> seg_head, syn_head, pos_head, diac_head;
  ParamRegistry<Real> registry;

  // The registry holds pointers into this object; fixed address for life.
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  Model(ModelConfig config, Vocab v, PretrainedEmbeddings<Real> pre)
      : cfg(std::move(config)), vocab(std::move(v)), pretrained(std::move(pre)) {
    cfg.validate();
    if (!cfg.char_only && pretrained.dim != cfg.word_emb_dim)
      throw DimensionMismatch("pretrained dim " + std::to_string(pretrained.dim) +
                              " vs word_emb_dim " + std::to_string(cfg.word_emb_dim));
    if (int(vocab.pos_tags.size()) != cfg.num_pos_classes())
      throw ConfigMismatch("vocab has " + std::to_string(vocab.pos_tags.size()) +
                           " POS tags, config expects " + std::to_string(cfg.num_pos_classes()));

    Rng rng(derive_seed(cfg.seed, /*stream=*/1));
    int64_t H = cfg.hidden;

    char_table = Parameter<Real>("", {int64_t(vocab.chars.size()), cfg.char_emb_dim});
    init_embedding(char_table.value, rng);
    registry.add(char_table, "char_table");

    if (!cfg.char_only) {
      word_unk = Parameter<Real>("", {1, cfg.word_emb_dim});
      init_embedding(word_unk.value, rng);
      registry.add(word_unk, "word_unk");
      composer = make_bilstm<Real>(cfg.char_emb_dim, H, 1, rng);
      register_bilstm(registry, composer, "composer");
    }
    if (cfg.task_seg) {
      seg_tower = make_bilstm<Real>(cfg.char_emb_dim, H, cfg.layers_seg, rng);
      register_bilstm(registry, seg_tower, "seg");
      seg_head = make_dense<Real>(2 * H, cfg.num_seg_classes(), rng);
      register_dense(registry, seg_head, "seg.head");
    }
    int64_t word_repr = cfg.word_emb_dim + 2 * H;  // CharToWord width
    if (cfg.task_syn) {
      syn_tower = make_bilstm<Real>(word_repr, H, cfg.layers_main, rng);
      register_bilstm(registry, syn_tower, "syn");
      syn_head = make_dense<Real>(2 * H, cfg.num_diac_classes(), rng);
      register_dense(registry, syn_head, "syn.head");
    }
    if (cfg.task_pos) {
      pos_tower = make_bilstm<Real>(word_repr, H, cfg.layers_main, rng);
      register_bilstm(registry, pos_tower, "pos");
      pos_head = make_dense<Real>(2 * H, cfg.num_pos_classes(), rng);
      register_dense(registry, pos_head, "pos.head");
    }
    diac_tower = make_bilstm<Real>(cfg.diac_input_width(), H, cfg.layers_main, rng);
    register_bilstm(registry, diac_tower, "diac");
    diac_head = make_dense<Real>(2 * H, cfg.num_diac_classes(), rng);
    register_dense(registry, diac_head, "diac.head");
  }

  struct Outputs {
    int seg_logits = -1, seg_probs = -1, seg_hidden = -1;
    int syn_logits = -1, syn_probs = -1;
    int pos_logits = -1, pos_probs = -1;
    int diac_logits = -1;
  };

  // Builds the joint graph for one window. rng drives dropout and is only
  // touched in training mode.
  Outputs forward(Tape<Real>& t, const Window& w, Rng& rng) {
    if ((cfg.task_syn || cfg.task_pos) && w.num_words() == 0)
      throw ConfigMismatch("window without word stream");
    Outputs out;
    Real emb_p = Real(cfg.dropout_emb);
    Real hid_p = Real(cfg.dropout_hidden);

    int ce = embed_rows(t, char_table, w.char_ids);
    ce = dropout(t, ce, emb_p, rng);

    int c2w = -1;  // CharToWord rows [n_words, word_emb + 2H]
    int pw = -1;   // pretrained rows [n_words, word_emb]
    if (!cfg.char_only) {
      std::vector<int64_t> rows(w.words.size());
      for (size_t i = 0; i < w.words.size(); ++i) rows[i] = pretrained.row_of(w.words[i]);
      pw = pretrained_rows(t, pretrained, word_unk, rows);
      pw = dropout(t, pw, emb_p, rng);

      std::vector<int> word_vecs;
      for (int i = 0; i < w.num_words(); ++i) {
        std::vector<int64_t> span(w.words[size_t(i)].size());
        for (size_t k = 0; k < span.size(); ++k)
          span[k] = w.word_char_begin[size_t(i)] + int64_t(k);
        int seq = gather_rows(t, ce, span);
        int f = lstm(t, seq, composer.layers[0].fwd, false);
        int b = lstm(t, seq, composer.layers[0].bwd, true);
        // Final state of each direction: last row of the forward scan,
        // first row of the backward scan.
        word_vecs.push_back(concat_cols(
            t, {take_row(t, f, int64_t(span.size()) - 1), take_row(t, b, 0)}));
      }
      c2w = concat_cols(t, {pw, stack_rows(t, word_vecs)});
    }

    if (cfg.task_seg) {
      out.seg_hidden = bilstm_forward(t, ce, seg_tower, hid_p, rng);
      out.seg_logits = affine_rows(t, out.seg_hidden, seg_head.w, seg_head.b);
      out.seg_probs = softmax_rows(t, out.seg_logits);
    }
    if (cfg.task_syn) {
      int h = bilstm_forward(t, c2w, syn_tower, hid_p, rng);
      out.syn_logits = affine_rows(t, h, syn_head.w, syn_head.b);
      out.syn_probs = softmax_rows(t, out.syn_logits);
    }
    if (cfg.task_pos) {
      int h = bilstm_forward(t, c2w, pos_tower, hid_p, rng);
      out.pos_logits = affine_rows(t, h, pos_head.w, pos_head.b);
      out.pos_probs = softmax_rows(t, out.pos_logits);
    }

    // Diacritic tower input: WordToChar (or plain char embeddings), then the
    // auxiliary output distributions broadcast per character.
    std::vector<int> blocks;
    if (cfg.char_only) {
      blocks.push_back(ce);
    } else {
      blocks.push_back(concat_cols(t, {ce, gather_rows(t, pw, w.word_of_char)}));
    }
    bool hard = cfg.hard_labels_infer && !t.training();
    if (cfg.feed_labels) {
      if (cfg.task_seg)
        blocks.push_back(hard ? onehot_argmax_rows(t, out.seg_logits) : out.seg_probs);
      if (cfg.task_syn) {
        int p = hard ? onehot_argmax_rows(t, out.syn_logits) : out.syn_probs;
        blocks.push_back(gather_rows(t, p, w.word_of_char));
      }
      if (cfg.task_pos) {
        int p = hard ? onehot_argmax_rows(t, out.pos_logits) : out.pos_probs;
        blocks.push_back(gather_rows(t, p, w.word_of_char));
      }
    }
    if (cfg.feed_seg_hidden && cfg.task_seg) blocks.push_back(out.seg_hidden);

    int diac_in = blocks.size() == 1 ? blocks[0] : concat_cols(t, blocks);
    int h = bilstm_forward(t, diac_in, diac_tower, hid_p, rng);
    out.diac_logits = affine_rows(t, h, diac_head.w, diac_head.b);
    return out;
  }

  // Combined loss: mean cross entropy per enabled task (including DIAC),
  // normalized by the number of tasks.
  int loss(Tape<Real>& t, const Outputs& out, const Window& w) {
    std::vector<uint8_t> char_mask(w.char_ids.size(), 1);
    std::vector<uint8_t> word_mask(w.word_ids.size(), 1);
    std::vector<int> losses;
    losses.push_back(masked_mean_ce(t, out.diac_logits, w.diac_labels, char_mask));
    if (cfg.task_seg) losses.push_back(masked_mean_ce(t, out.seg_logits, w.seg_labels, char_mask));
    if (cfg.task_syn) losses.push_back(masked_mean_ce(t, out.syn_logits, w.syn_labels, word_mask));
    if (cfg.task_pos) losses.push_back(masked_mean_ce(t, out.pos_logits, w.pos_labels, word_mask));
    return add_scaled(t, losses, Real(1) / Real(losses.size()));
  }

  // Inference: argmax diacritic labels for the center word of a window.
  // Ties break toward the lowest label id.
  std::vector<int> predict_center_labels(const Window& w, Outputs* outputs = nullptr) {
    Tape<Real> t(/*training=*/false);
    Rng rng(0);
    Outputs out = forward(t, w, rng);
    if (outputs) *outputs = out;
    const Tensor<Real>& logits = t.val(out.diac_logits);
    std::vector<int> labels;
    for (int k = 0; k < w.center_char_len; ++k) {
      const Real* row = logits.row(w.center_char_begin + k);
      int best = 0;
      for (int64_t j = 1; j < logits.cols(); ++j)
        if (row[j] > row[best]) best = int(j);
      labels.push_back(best);
    }
    return labels;
  }

  // Restores diacritics for a whole undiacritized sentence.
  std::vector<std::string> predict(const std::vector<std::string>& words) {
    if (words.empty()) return {};
    LabeledSentence s = sentence_from_plain_words(words);
    auto windows = make_windows(s, vocab, cfg.window_radius);
    std::vector<std::string> out;
    for (size_t i = 0; i < windows.size(); ++i) {
      auto ids = predict_center_labels(windows[i]);
      std::vector<DiacriticLabel> labels;
      for (int id : ids) labels.push_back(DiacriticLabel(id));
      out.push_back(apply_diacritics(s.words[i], labels));
    }
    return out;
  }
};

}  // namespace harakat
