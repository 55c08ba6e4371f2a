#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "harakat/common.hpp"

namespace harakat {

// Per-character diacritic classes. The 14 marked classes cover the single
// marks a u i o K F N ~ and the valid shadda combinations; NoMark is the
// explicit class for characters that carry nothing, so every character has
// exactly one label.
enum class DiacriticLabel : int {
  Fatha = 0,        // a
  Damma,            // u
  Kasra,            // i
  Sukun,            // o
  Kasratan,         // K
  Fathatan,         // F
  Dammatan,         // N
  Shadda,           // ~
  ShaddaFatha,      // ~a
  ShaddaDamma,      // ~u
  ShaddaKasra,      // ~i
  ShaddaFathatan,   // ~F
  ShaddaKasratan,   // ~K
  ShaddaDammatan,   // ~N
  NoMark,           // (none)
};

constexpr int kNumDiacriticLabels = 15;

// Inter-word boundary token used in character streams.
inline constexpr const char* kBoundaryToken = "<w>";

bool is_diacritic_mark(char c);   // a u i o K F N ~
bool is_base_char(char c);        // Buckwalter letters, digits, punctuation
bool is_buckwalter_word(std::string_view word);  // base chars + marks only

// Serialized mark for a label, e.g. "~a"; empty for NoMark.
std::string_view label_mark(DiacriticLabel label);
// Short display name, "~a" style with "-" for NoMark (reports, logs).
std::string_view label_name(DiacriticLabel label);

// Splits a diacritized word into its consonant skeleton and one label per
// skeleton character. Accepts vowel-shadda marks in either order and
// canonicalizes; rejects anything that is not well-formed Buckwalter.
std::pair<std::string, std::vector<DiacriticLabel>> strip_diacritics(std::string_view word);

// Inverse of strip_diacritics; canonical order puts shadda before the vowel.
std::string apply_diacritics(std::string_view skeleton, const std::vector<DiacriticLabel>& labels);

// Label of the word-final base character (the syntactic-position proxy).
DiacriticLabel syntactic_label(std::string_view word);

}  // namespace harakat
