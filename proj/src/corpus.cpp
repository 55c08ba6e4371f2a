#include "harakat/corpus.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace harakat {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& pos_tagset(bool passivization) {
  static const std::vector<std::string> base = {
      "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN",
      "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB"};
  static const std::vector<std::string> with_pass = [] {
    std::vector<std::string> t = base;
    t[15] = "VERB_ACT";
    t.push_back("VERB_PASS");
    return t;
  }();
  return passivization ? with_pass : base;
}

std::vector<LabeledSentence> parse_corpus_lines(const std::vector<std::string>& text,
                                                const std::vector<std::string>& pos,
                                                const std::vector<std::string>& seg,
                                                bool passivization) {
  if (text.size() != pos.size() || text.size() != seg.size())
    throw AlignmentError("line counts differ: text " + std::to_string(text.size()) +
                         ", pos " + std::to_string(pos.size()) + ", seg " +
                         std::to_string(seg.size()));

  const auto& tags = pos_tagset(passivization);
  std::unordered_map<std::string, int> tag_id;
  for (size_t i = 0; i < tags.size(); ++i) tag_id[tags[i]] = int(i);

  std::vector<LabeledSentence> sentences;
  for (size_t ln = 0; ln < text.size(); ++ln) {
    auto words = split_ws(text[ln]);
    auto pos_toks = split_ws(pos[ln]);
    auto seg_toks = split_ws(seg[ln]);
    if (words.empty() && pos_toks.empty() && seg_toks.empty()) continue;
    if (words.size() != pos_toks.size() || words.size() != seg_toks.size())
      throw AlignmentError("line " + std::to_string(ln + 1) + ": word counts differ (text " +
                           std::to_string(words.size()) + ", pos " +
                           std::to_string(pos_toks.size()) + ", seg " +
                           std::to_string(seg_toks.size()) + ")");

    LabeledSentence s;
    for (size_t w = 0; w < words.size(); ++w) {
      auto [skeleton, labels] = strip_diacritics(words[w]);
      if (skeleton.empty())
        throw MalformedWord("line " + std::to_string(ln + 1) + ": empty word");

      auto it = tag_id.find(pos_toks[w]);
      if (it == tag_id.end())
        throw UnknownPosTag("line " + std::to_string(ln + 1) + ": tag \"" + pos_toks[w] +
                            "\" not in the " + std::to_string(tags.size()) + "-tag set");

      // SEG stream from the '+'-delimited companion word.
      auto segments = split_on(seg_toks[w], '+');
      std::string seg_skeleton;
      std::vector<int> seg_stream;
      for (const auto& segment : segments) {
        if (segment.empty())
          throw AlignmentError("line " + std::to_string(ln + 1) + ": empty segment in \"" +
                               seg_toks[w] + "\"");
        auto [sk, _] = strip_diacritics(segment);
        for (size_t k = 0; k < sk.size(); ++k)
          seg_stream.push_back(k == 0 ? SegB : SegI);
        seg_skeleton += sk;
      }
      if (seg_skeleton != skeleton)
        throw AlignmentError("line " + std::to_string(ln + 1) + ": seg word \"" + seg_toks[w] +
                             "\" does not match \"" + words[w] + "\"");

      if (w > 0) {
        s.chars.push_back(kBoundaryToken);
        s.diac_labels.push_back(int(DiacriticLabel::NoMark));
        s.seg_labels.push_back(SegO);
        s.word_of_char.push_back(-1);
      }
      s.word_char_begin.push_back(int(s.chars.size()));
      for (size_t k = 0; k < skeleton.size(); ++k) {
        s.chars.push_back(std::string(1, skeleton[k]));
        s.diac_labels.push_back(int(labels[k]));
        s.seg_labels.push_back(seg_stream[k]);
        s.word_of_char.push_back(int64_t(w));
      }
      s.words.push_back(skeleton);
      s.syn_labels.push_back(int(labels.back()));
      s.pos_labels.push_back(it->second);
    }
    sentences.push_back(std::move(s));
  }
  return sentences;
}

std::vector<LabeledSentence> parse_corpus(const std::string& text_path,
                                          const std::string& pos_path,
                                          const std::string& seg_path,
                                          bool passivization) {
  return parse_corpus_lines(read_lines(text_path), read_lines(pos_path),
                            read_lines(seg_path), passivization);
}

LabeledSentence sentence_from_plain_words(const std::vector<std::string>& words) {
  LabeledSentence s;
  for (size_t w = 0; w < words.size(); ++w) {
    auto [skeleton, labels] = strip_diacritics(words[w]);  // tolerate stray marks
    if (skeleton.empty()) throw MalformedWord("empty word");
    if (w > 0) {
      s.chars.push_back(kBoundaryToken);
      s.diac_labels.push_back(int(DiacriticLabel::NoMark));
      s.seg_labels.push_back(SegO);
      s.word_of_char.push_back(-1);
    }
    s.word_char_begin.push_back(int(s.chars.size()));
    for (size_t k = 0; k < skeleton.size(); ++k) {
      s.chars.push_back(std::string(1, skeleton[k]));
      s.diac_labels.push_back(int(DiacriticLabel::NoMark));
      s.seg_labels.push_back(k == 0 ? SegB : SegI);
      s.word_of_char.push_back(int64_t(w));
    }
    s.words.push_back(skeleton);
    s.syn_labels.push_back(int(DiacriticLabel::NoMark));
    s.pos_labels.push_back(0);
  }
  return s;
}

Vocab build_vocab(const std::vector<LabeledSentence>& sentences, int min_count,
                  bool passivization) {
  if (sentences.empty()) throw EmptyCorpus("no sentences");

  std::map<std::string, int> char_count;  // ordered: deterministic ids
  std::map<std::string, int> word_count;
  for (const auto& s : sentences) {
    for (const auto& c : s.chars)
      if (c != kBoundaryToken) ++char_count[c];
    for (const auto& w : s.words) ++word_count[w];
  }
  if (word_count.empty()) throw EmptyCorpus("no words");

  Vocab v;
  v.chars = {"<unk>", kBoundaryToken};
  for (const auto& [c, n] : char_count) v.chars.push_back(c);
  for (size_t i = 0; i < v.chars.size(); ++i) v.char_to_id[v.chars[i]] = int(i);

  v.words = {"<unk>"};
  for (const auto& [w, n] : word_count) {
    v.training_word_set.insert(w);
    if (n >= min_count) v.words.push_back(w);
  }
  for (size_t i = 0; i < v.words.size(); ++i) v.word_to_id[v.words[i]] = int(i);

  v.pos_tags = pos_tagset(passivization);
  return v;
}

PretrainedEmbeddings<float> load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  PretrainedEmbeddings<float> emb;
  std::vector<std::vector<float>> rows;
  std::string line;
  size_t ln = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (first_content_line && toks.size() == 2) {
      // "count dim" header
      first_content_line = false;
      try {
        emb.dim = std::stoi(toks[1]);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(ln) + ": bad header");
      }
      if (emb.dim <= 0) throw ParseError("line " + std::to_string(ln) + ": bad header dim");
      continue;
    }
    first_content_line = false;

    if (toks.size() < 2) throw ParseError("line " + std::to_string(ln) + ": too few fields");
    const std::string& token = toks[0];
    int dim = int(toks.size()) - 1;
    if (emb.dim == 0) emb.dim = dim;
    if (dim != emb.dim)
      throw DimensionMismatch("line " + std::to_string(ln) + ": " + std::to_string(dim) +
                              " values, expected " + std::to_string(emb.dim));
    if (emb.token_to_row.count(token)) continue;  // first occurrence wins

    std::vector<float> vec(static_cast<size_t>(dim), 0.0f);
    for (int i = 0; i < dim; ++i) {
      try {
        vec[size_t(i)] = std::stof(toks[size_t(i) + 1]);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(ln) + ": bad float \"" + toks[size_t(i) + 1] +
                         "\"");
      }
    }
    emb.token_to_row[token] = int(rows.size());
    emb.tokens.push_back(token);
    rows.push_back(std::move(vec));
  }
  if (rows.empty()) throw ParseError("no vectors in " + path);

  emb.table = Tensor<float>({int64_t(rows.size()), int64_t(emb.dim)});
  for (size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), emb.table.row(int64_t(r)));
  return emb;
}

std::vector<Window> make_windows(const LabeledSentence& s, const Vocab& vocab, int radius,
                                 int sentence_index) {
  std::vector<Window> out;
  int n = int(s.words.size());
  for (int c = 0; c < n; ++c) {
    Window w;
    w.sentence_index = sentence_index;
    w.center = c;
    w.lo = std::max(0, c - radius);
    w.hi = std::min(n - 1, c + radius);

    // The span's char stream is a contiguous slice of the sentence stream.
    int cbegin = s.word_char_begin[size_t(w.lo)];
    int cend = s.word_char_begin[size_t(w.hi)] + int(s.words[size_t(w.hi)].size());
    for (int k = cbegin; k < cend; ++k) {
      w.char_ids.push_back(vocab.char_id(s.chars[size_t(k)]));
      w.diac_labels.push_back(s.diac_labels[size_t(k)]);
      w.seg_labels.push_back(s.seg_labels[size_t(k)]);
      int64_t wo = s.word_of_char[size_t(k)];
      w.word_of_char.push_back(wo < 0 ? -1 : wo - w.lo);
    }
    for (int i = w.lo; i <= w.hi; ++i) {
      w.word_char_begin.push_back(s.word_char_begin[size_t(i)] - cbegin);
      w.word_ids.push_back(vocab.word_id(s.words[size_t(i)]));
      w.words.push_back(s.words[size_t(i)]);
      w.syn_labels.push_back(s.syn_labels[size_t(i)]);
      w.pos_labels.push_back(s.pos_labels[size_t(i)]);
    }
    w.center_rel = c - w.lo;
    w.center_char_begin = s.word_char_begin[size_t(c)] - cbegin;
    w.center_char_len = int(s.words[size_t(c)].size());
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<Window> make_all_windows(const std::vector<LabeledSentence>& sentences,
                                     const Vocab& vocab, int radius) {
  std::vector<Window> out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    auto ws = make_windows(sentences[i], vocab, radius, int(i));
    for (auto& w : ws) out.push_back(std::move(w));
  }
  return out;
}

std::vector<Batch> make_batches(std::vector<Window> windows, int batch_size, uint64_t seed) {
  Rng rng(seed);
  shuffle(windows, rng);

  std::vector<Batch> out;
  for (size_t start = 0; start < windows.size(); start += size_t(batch_size)) {
    size_t end = std::min(windows.size(), start + size_t(batch_size));
    Batch b;
    b.size = int(end - start);
    for (size_t i = start; i < end; ++i) {
      b.max_chars = std::max(b.max_chars, windows[i].num_chars());
      b.max_words = std::max(b.max_words, windows[i].num_words());
    }
    b.char_ids.assign(size_t(b.size) * size_t(b.max_chars), 0);
    b.diac_labels.assign(size_t(b.size) * size_t(b.max_chars), -1);
    b.seg_labels.assign(size_t(b.size) * size_t(b.max_chars), -1);
    b.char_mask.assign(size_t(b.size) * size_t(b.max_chars), 0);
    b.word_ids.assign(size_t(b.size) * size_t(b.max_words), 0);
    b.syn_labels.assign(size_t(b.size) * size_t(b.max_words), -1);
    b.pos_labels.assign(size_t(b.size) * size_t(b.max_words), -1);
    b.word_mask.assign(size_t(b.size) * size_t(b.max_words), 0);

    for (size_t i = start; i < end; ++i) {
      const Window& w = windows[i];
      size_t mrow = i - start;
      size_t coff = mrow * size_t(b.max_chars);
      for (int k = 0; k < w.num_chars(); ++k) {
        b.char_ids[coff + size_t(k)] = w.char_ids[size_t(k)];
        b.diac_labels[coff + size_t(k)] = w.diac_labels[size_t(k)];
        b.seg_labels[coff + size_t(k)] = w.seg_labels[size_t(k)];
        b.char_mask[coff + size_t(k)] = 1;
      }
      size_t woff = mrow * size_t(b.max_words);
      for (int k = 0; k < w.num_words(); ++k) {
        b.word_ids[woff + size_t(k)] = w.word_ids[size_t(k)];
        b.syn_labels[woff + size_t(k)] = w.syn_labels[size_t(k)];
        b.pos_labels[woff + size_t(k)] = w.pos_labels[size_t(k)];
        b.word_mask[woff + size_t(k)] = 1;
      }
      b.members.push_back(std::move(windows[i]));
    }
    out.push_back(std::move(b));
  }
  return out;
}

// ---- dataset / vocab container io ------------------------------------------

namespace {

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  if (!is) throw CorruptCheckpoint("unexpected end of file");
  return v;
}
void write_str(std::ostream& os, const std::string& s) {
  write_u32(os, uint32_t(s.size()));
  os.write(s.data(), std::streamsize(s.size()));
}
std::string read_str(std::istream& is) {
  uint32_t n = read_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), std::streamsize(n));
  if (!is) throw CorruptCheckpoint("unexpected end of file");
  return s;
}

constexpr char kDatasetMagic[4] = {'T', 'M', 'D', 'S'};
constexpr char kVocabMagic[4] = {'T', 'M', 'V', 'C'};

void check_magic(std::istream& is, const char (&magic)[4], const char* what) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0)
    throw CorruptCheckpoint(std::string("bad magic in ") + what);
}

}  // namespace

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(kDatasetMagic, 4);
  write_u32(os, 1);  // version
  write_u32(os, uint32_t(ds.sentences.size()));
  for (const auto& s : ds.sentences) {
    write_u32(os, uint32_t(s.words.size()));
    for (size_t w = 0; w < s.words.size(); ++w) {
      write_str(os, s.words[w]);
      int begin = s.word_char_begin[w];
      for (size_t k = 0; k < s.words[w].size(); ++k) {
        os.put(char(s.diac_labels[size_t(begin) + k]));
        os.put(char(s.seg_labels[size_t(begin) + k]));
      }
      os.put(char(s.pos_labels[w]));
    }
  }
  if (!os) throw IoError("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  check_magic(is, kDatasetMagic, path.c_str());
  uint32_t version = read_u32(is);
  if (version != 1) throw VersionMismatch("dataset version " + std::to_string(version));

  Dataset ds;
  uint32_t n_sent = read_u32(is);
  for (uint32_t si = 0; si < n_sent; ++si) {
    uint32_t n_words = read_u32(is);
    LabeledSentence s;
    for (uint32_t w = 0; w < n_words; ++w) {
      std::string skeleton = read_str(is);
      if (skeleton.empty()) throw CorruptCheckpoint("empty word in dataset");
      if (w > 0) {
        s.chars.push_back(kBoundaryToken);
        s.diac_labels.push_back(int(DiacriticLabel::NoMark));
        s.seg_labels.push_back(SegO);
        s.word_of_char.push_back(-1);
      }
      s.word_char_begin.push_back(int(s.chars.size()));
      std::vector<DiacriticLabel> word_labels;
      for (size_t k = 0; k < skeleton.size(); ++k) {
        int diac = is.get();
        int seg = is.get();
        if (diac < 0 || seg < 0) throw CorruptCheckpoint("unexpected end of file");
        if (diac >= kNumDiacriticLabels || seg >= kNumSegLabels)
          throw CorruptCheckpoint("label out of range in dataset");
        s.chars.push_back(std::string(1, skeleton[k]));
        s.diac_labels.push_back(diac);
        s.seg_labels.push_back(seg);
        s.word_of_char.push_back(int64_t(w));
        word_labels.push_back(DiacriticLabel(diac));
      }
      int pos = is.get();
      if (pos < 0) throw CorruptCheckpoint("unexpected end of file");
      s.words.push_back(skeleton);
      s.syn_labels.push_back(int(word_labels.back()));
      s.pos_labels.push_back(pos);
    }
    ds.sentences.push_back(std::move(s));
  }
  return ds;
}

void save_vocab(const std::string& path, const Vocab& v) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(kVocabMagic, 4);
  write_u32(os, 1);
  auto write_list = [&](const std::vector<std::string>& xs) {
    write_u32(os, uint32_t(xs.size()));
    for (const auto& x : xs) write_str(os, x);
  };
  write_list(v.chars);
  write_list(v.words);
  write_list(v.pos_tags);
  std::vector<std::string> train_words(v.training_word_set.begin(), v.training_word_set.end());
  std::sort(train_words.begin(), train_words.end());
  write_list(train_words);
  if (!os) throw IoError("write failed: " + path);
}

Vocab load_vocab(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  check_magic(is, kVocabMagic, path.c_str());
  uint32_t version = read_u32(is);
  if (version != 1) throw VersionMismatch("vocab version " + std::to_string(version));

  Vocab v;
  auto read_list = [&]() {
    std::vector<std::string> xs(read_u32(is));
    for (auto& x : xs) x = read_str(is);
    return xs;
  };
  v.chars = read_list();
  v.words = read_list();
  v.pos_tags = read_list();
  for (const auto& w : read_list()) v.training_word_set.insert(w);
  for (size_t i = 0; i < v.chars.size(); ++i) v.char_to_id[v.chars[i]] = int(i);
  for (size_t i = 0; i < v.words.size(); ++i) v.word_to_id[v.words[i]] = int(i);
  return v;
}

}  // namespace harakat
