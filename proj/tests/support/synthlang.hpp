#pragma once

#include <string>
#include <vector>

#include "harakat/common.hpp"

namespace synthlang {

// Rule-generated diacritic language for desk-scale experiments. Words are
// clitic+stem or bare stems built from a shared consonant lexicon; each
// character's diacritic is a deterministic function of its position inside
// its segment, the word's (hidden) POS state, and the previous word's POS.
// A third of the stems are POS-ambiguous, so character context alone
// underdetermines the diacritics while the SEG/POS/SYN streams pin them down.
struct Options {
  int sentences = 100;
  int min_words = 3;
  int max_words = 6;
  uint64_t seed = 1;
  bool passivization = false;  // verbs split into VERB_ACT/VERB_PASS tags
};

struct Corpus {
  std::vector<std::string> text;  // diacritized sentences
  std::vector<std::string> pos;
  std::vector<std::string> seg;   // '+'-delimited diacritized segments
};

Corpus generate(const Options& opt);

// Tokens of every word that can occur (for embedding-file construction).
std::vector<std::string> lexicon_skeletons();

// fastText-style .vec content with a header line; deterministic per seed.
// Words absent from `tokens` at lookup time exercise the UNK path.
std::string make_embedding_file(const std::vector<std::string>& tokens, int dim, uint64_t seed);

// A random well-formed diacritized word (round-trip property material):
// random base characters with a random label per character.
std::string random_diacritized_word(harakat::Rng& rng);

}  // namespace synthlang
