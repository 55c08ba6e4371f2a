#include "harakat/alphabet.hpp"

#include <array>
#include <cstring>

namespace harakat {

namespace {

// Buckwalter letters (qamus.org table), dagger alef ` and alef wasla {
// included, plus digits and sentence punctuation. '+' is deliberately absent:
// it is the segment separator in SEG companion files.
constexpr const char* kBaseChars =
    "'|>&<}AbptvjHxd*rzs$SDTZEg_fqklmnhwyY{`PJVG"
    "0123456789"
    ".,;:?!()\"-/%";

constexpr const char* kMarkChars = "auioKFN~";

std::array<bool, 256> build_set(const char* chars) {
  std::array<bool, 256> t{};
  for (const char* p = chars; *p; ++p) t[static_cast<unsigned char>(*p)] = true;
  return t;
}

const std::array<bool, 256> kBaseSet = build_set(kBaseChars);
const std::array<bool, 256> kMarkSet = build_set(kMarkChars);

// Marks for the 15 labels, canonical serialization order.
constexpr const char* kLabelMarks[kNumDiacriticLabels] = {
    "a", "u", "i", "o", "K", "F", "N", "~", "~a", "~u", "~i", "~F", "~K", "~N", ""};
constexpr const char* kLabelNames[kNumDiacriticLabels] = {
    "a", "u", "i", "o", "K", "F", "N", "~", "~a", "~u", "~i", "~F", "~K", "~N", "-"};

DiacriticLabel combine(bool shadda, char vowel) {
  if (!shadda) {
    switch (vowel) {
      case 'a': return DiacriticLabel::Fatha;
      case 'u': return DiacriticLabel::Damma;
      case 'i': return DiacriticLabel::Kasra;
      case 'o': return DiacriticLabel::Sukun;
      case 'K': return DiacriticLabel::Kasratan;
      case 'F': return DiacriticLabel::Fathatan;
      case 'N': return DiacriticLabel::Dammatan;
      case 0: return DiacriticLabel::NoMark;
    }
  } else {
    switch (vowel) {
      case 'a': return DiacriticLabel::ShaddaFatha;
      case 'u': return DiacriticLabel::ShaddaDamma;
      case 'i': return DiacriticLabel::ShaddaKasra;
      case 'F': return DiacriticLabel::ShaddaFathatan;
      case 'K': return DiacriticLabel::ShaddaKasratan;
      case 'N': return DiacriticLabel::ShaddaDammatan;
      case 0: return DiacriticLabel::Shadda;
      case 'o':
        throw MalformedWord("shadda combined with sukun");
    }
  }
  throw MalformedWord(std::string("unknown mark '") + vowel + "'");
}

}  // namespace

bool is_diacritic_mark(char c) { return kMarkSet[static_cast<unsigned char>(c)]; }
bool is_base_char(char c) { return kBaseSet[static_cast<unsigned char>(c)]; }

bool is_buckwalter_word(std::string_view word) {
  for (char c : word)
    if (!is_base_char(c) && !is_diacritic_mark(c)) return false;
  return true;
}

std::string_view label_mark(DiacriticLabel label) { return kLabelMarks[int(label)]; }
std::string_view label_name(DiacriticLabel label) { return kLabelNames[int(label)]; }

std::pair<std::string, std::vector<DiacriticLabel>> strip_diacritics(std::string_view word) {
  std::string skeleton;
  std::vector<DiacriticLabel> labels;
  bool shadda = false;
  char vowel = 0;

  auto flush = [&]() {
    if (!labels.empty()) labels.back() = combine(shadda, vowel);
    shadda = false;
    vowel = 0;
  };

  for (size_t i = 0; i < word.size(); ++i) {
    char c = word[i];
    if (is_base_char(c)) {
      flush();
      skeleton.push_back(c);
      labels.push_back(DiacriticLabel::NoMark);
    } else if (is_diacritic_mark(c)) {
      if (labels.empty())
        throw MalformedWord("diacritic with no preceding base character in \"" +
                            std::string(word) + "\"");
      if (c == '~') {
        if (shadda) throw MalformedWord("double shadda in \"" + std::string(word) + "\"");
        shadda = true;
      } else {
        if (vowel)
          throw MalformedWord("two vowel marks on one character in \"" + std::string(word) + "\"");
        vowel = c;
      }
    } else {
      throw MalformedWord("byte '" + std::string(1, c) + "' is not Buckwalter in \"" +
                          std::string(word) + "\"");
    }
  }
  flush();
  return {std::move(skeleton), std::move(labels)};
}

std::string apply_diacritics(std::string_view skeleton, const std::vector<DiacriticLabel>& labels) {
  if (skeleton.size() != labels.size())
    throw LengthMismatch("skeleton length " + std::to_string(skeleton.size()) +
                         " vs labels length " + std::to_string(labels.size()));
  std::string out;
  out.reserve(skeleton.size() * 2);
  for (size_t i = 0; i < skeleton.size(); ++i) {
    out.push_back(skeleton[i]);
    out += label_mark(labels[i]);
  }
  return out;
}

DiacriticLabel syntactic_label(std::string_view word) {
  auto [skeleton, labels] = strip_diacritics(word);
  if (labels.empty()) throw MalformedWord("empty word");
  return labels.back();
}

}  // namespace harakat
