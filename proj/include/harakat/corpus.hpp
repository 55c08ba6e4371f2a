#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "harakat/alphabet.hpp"
#include "harakat/common.hpp"
#include "harakat/tensor.hpp"

namespace harakat {

// SEG classes (IOB over characters; O only at boundary tokens).
enum SegLabel : int { SegB = 0, SegI = 1, SegO = 2 };
constexpr int kNumSegLabels = 3;

// The 16-tag set, alphabetical. With passivization VERB is replaced by
// VERB_ACT and VERB_PASS is appended (17 tags).
const std::vector<std::string>& pos_tagset(bool passivization);

// One parsed sentence with all four label streams aligned.
// chars holds the per-word characters plus a boundary token between words.
struct LabeledSentence {
  std::vector<std::string> words;        // skeletons
  std::vector<std::string> chars;        // single-char tokens or kBoundaryToken
  std::vector<int> diac_labels;          // per char, DiacriticLabel values
  std::vector<int> seg_labels;           // per char
  std::vector<int> syn_labels;           // per word, DiacriticLabel values
  std::vector<int> pos_labels;           // per word
  std::vector<int64_t> word_of_char;     // per char; -1 for boundary tokens
  std::vector<int> word_char_begin;      // char index of each word's first char
};

struct Vocab {
  std::vector<std::string> chars;  // [0]="<unk>", [1]="<w>", then observed
  std::vector<std::string> words;  // [0]="<unk>", then observed (freq >= min_count)
  std::vector<std::string> pos_tags;
  std::unordered_map<std::string, int> char_to_id;
  std::unordered_map<std::string, int> word_to_id;
  std::unordered_set<std::string> training_word_set;

  static constexpr int kUnkChar = 0;
  static constexpr int kBoundaryChar = 1;
  static constexpr int kUnkWord = 0;

  int char_id(const std::string& c) const {
    auto it = char_to_id.find(c);
    return it == char_to_id.end() ? kUnkChar : it->second;
  }
  int word_id(const std::string& w) const {
    auto it = word_to_id.find(w);
    return it == word_to_id.end() ? kUnkWord : it->second;
  }
};

// One training/eval unit: the span of words around a center word, with
// vocab-resolved inputs and the label streams restricted to the span.
struct Window {
  int sentence_index = -1;
  int center = 0;  // word index in the sentence
  int lo = 0, hi = 0;  // inclusive span

  std::vector<int> char_ids;           // span char stream incl. boundaries
  std::vector<int> diac_labels;        // per char
  std::vector<int> seg_labels;         // per char
  std::vector<int64_t> word_of_char;   // span-relative; -1 for boundaries
  std::vector<int> word_char_begin;    // span-relative start of each word

  std::vector<int> word_ids;           // per span word
  std::vector<std::string> words;      // skeletons (pretrained lookup, OOV)
  std::vector<int> syn_labels;         // per span word
  std::vector<int> pos_labels;         // per span word

  int center_rel = 0;        // center - lo
  int center_char_begin = 0; // span-relative
  int center_char_len = 0;

  int num_chars() const { return int(char_ids.size()); }
  int num_words() const { return int(word_ids.size()); }
};

// Fixed-size group of windows padded to common lengths. Masks distinguish
// real positions (1) from padding (0); padded label slots hold -1.
struct Batch {
  int size = 0;
  int max_chars = 0;
  int max_words = 0;
  std::vector<int> char_ids, diac_labels, seg_labels;   // [size * max_chars]
  std::vector<uint8_t> char_mask;
  std::vector<int> word_ids, syn_labels, pos_labels;    // [size * max_words]
  std::vector<uint8_t> word_mask;
  std::vector<Window> members;
};

// Frozen word vectors plus bookkeeping for the learned UNK row (the row
// itself lives in the model as a trainable parameter).
template <class Real>
struct PretrainedEmbeddings {
  int dim = 0;
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> token_to_row;
  Tensor<Real> table;  // [tokens, dim]

  int64_t row_of(const std::string& token) const {
    auto it = token_to_row.find(token);
    return it == token_to_row.end() ? -1 : it->second;
  }

  template <class Other>
  PretrainedEmbeddings<Other> cast() const {
    PretrainedEmbeddings<Other> out;
    out.dim = dim;
    out.tokens = tokens;
    out.token_to_row = token_to_row;
    out.table = table.template cast<Other>();
    return out;
  }
};

// text: one diacritized sentence per line. pos: aligned tag sequences.
// seg: aligned, '+' between segments of each word.
std::vector<LabeledSentence> parse_corpus(const std::string& text_path,
                                          const std::string& pos_path,
                                          const std::string& seg_path,
                                          bool passivization = false);

// Same derivation from in-memory lines (tests, generators).
std::vector<LabeledSentence> parse_corpus_lines(const std::vector<std::string>& text,
                                                const std::vector<std::string>& pos,
                                                const std::vector<std::string>& seg,
                                                bool passivization = false);

// Builds a sentence with NoMark/SegB-I labels from undiacritized words
// (inference input path).
LabeledSentence sentence_from_plain_words(const std::vector<std::string>& words);

Vocab build_vocab(const std::vector<LabeledSentence>& sentences, int min_count = 1,
                  bool passivization = false);

PretrainedEmbeddings<float> load_embeddings(const std::string& path);

std::vector<Window> make_windows(const LabeledSentence& sentence, const Vocab& vocab,
                                 int radius = 10, int sentence_index = -1);

std::vector<Window> make_all_windows(const std::vector<LabeledSentence>& sentences,
                                     const Vocab& vocab, int radius = 10);

std::vector<Batch> make_batches(std::vector<Window> windows, int batch_size, uint64_t seed);

// Dataset container serialization (cmd_prepare output).
struct Dataset {
  std::vector<LabeledSentence> sentences;
};
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);
void save_vocab(const std::string& path, const Vocab& v);
Vocab load_vocab(const std::string& path);

}  // namespace harakat
