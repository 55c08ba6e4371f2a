#include "harakat/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace harakat {

namespace {

constexpr char kMagic[4] = {'T', 'M', 'T', 'L'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  if (!is) throw CorruptCheckpoint("truncated checkpoint");
  return v;
}
uint64_t read_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  if (!is) throw CorruptCheckpoint("truncated checkpoint");
  return v;
}
double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  if (!is) throw CorruptCheckpoint("truncated checkpoint");
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
  if (!is) throw CorruptCheckpoint("truncated checkpoint");
  return s;
}

void write_list(std::ostream& os, const std::vector<std::string>& xs) {
  write_u32(os, uint32_t(xs.size()));
  for (const auto& x : xs) write_str(os, x);
}
std::vector<std::string> read_list(std::istream& is) {
  std::vector<std::string> xs(read_u32(is));
  for (auto& x : xs) x = read_str(is);
  return xs;
}

void write_f32s(std::ostream& os, const float* data, int64_t n) {
  os.write(reinterpret_cast<const char*>(data), std::streamsize(n) * 4);
}
void read_f32s(std::istream& is, float* data, int64_t n) {
  is.read(reinterpret_cast<char*>(data), std::streamsize(n) * 4);
  if (!is) throw CorruptCheckpoint("truncated checkpoint");
}

void write_blob(std::ostream& os, const std::string& name, const Tensor<float>& t) {
  write_str(os, name);
  write_u32(os, uint32_t(t.shape.size()));
  for (int64_t d : t.shape) write_u32(os, uint32_t(d));
  write_f32s(os, t.data.data(), t.numel());
}

Tensor<float> read_blob(std::istream& is, std::string* name) {
  *name = read_str(is);
  uint32_t rank = read_u32(is);
  if (rank > 8) throw CorruptCheckpoint("blob rank " + std::to_string(rank));
  std::vector<int64_t> shape(rank);
  for (auto& d : shape) d = read_u32(is);
  Tensor<float> t(shape);
  read_f32s(is, t.data.data(), t.numel());
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model<float>& model,
                     const TrainState& state) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);

  std::ostringstream cfg;
  for (const auto& [k, v] : model_config_to_kv(model.cfg)) cfg << k << "=" << v << "\n";
  write_str(os, cfg.str());

  const Vocab& v = model.vocab;
  write_list(os, v.chars);
  write_list(os, v.words);
  write_list(os, v.pos_tags);
  std::vector<std::string> train_words(v.training_word_set.begin(), v.training_word_set.end());
  std::sort(train_words.begin(), train_words.end());
  write_list(os, train_words);

  write_list(os, model.pretrained.tokens);
  write_u32(os, uint32_t(model.pretrained.dim));
  write_f32s(os, model.pretrained.table.data.data(), model.pretrained.table.numel());

  // Value plus Adam moments per parameter, so a load continues bit-identically.
  const auto& params = model.registry.all();
  write_u32(os, uint32_t(params.size()));
  for (const auto* p : params) {
    write_blob(os, p->name, p->value);
    write_blob(os, p->name + ".adam_m", p->m);
    write_blob(os, p->name + ".adam_v", p->v);
  }

  write_u32(os, uint32_t(state.epoch));
  write_u64(os, uint64_t(state.step));
  write_f64(os, state.best_wer);
  write_u64(os, uint64_t(state.adam_t));
  write_str(os, state.rng_state);
  if (!os) throw IoError("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw CorruptCheckpoint("bad magic in " + path);
  uint32_t version = read_u32(is);
  if (version != kVersion)
    throw VersionMismatch("checkpoint version " + std::to_string(version) + ", expected " +
                          std::to_string(kVersion));

  ModelConfig cfg;
  std::istringstream cfg_in(read_str(is));
  std::string line;
  while (std::getline(cfg_in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw CorruptCheckpoint("bad config line: " + line);
    if (!model_config_apply_kv(cfg, line.substr(0, eq), line.substr(eq + 1)))
      throw CorruptCheckpoint("unknown config key: " + line.substr(0, eq));
  }

  Vocab v;
  v.chars = read_list(is);
  v.words = read_list(is);
  v.pos_tags = read_list(is);
  for (const auto& w : read_list(is)) v.training_word_set.insert(w);
  for (size_t i = 0; i < v.chars.size(); ++i) v.char_to_id[v.chars[i]] = int(i);
  for (size_t i = 0; i < v.words.size(); ++i) v.word_to_id[v.words[i]] = int(i);

  PretrainedEmbeddings<float> pre;
  pre.tokens = read_list(is);
  pre.dim = int(read_u32(is));
  pre.table = Tensor<float>({int64_t(pre.tokens.size()), int64_t(pre.dim)});
  read_f32s(is, pre.table.data.data(), pre.table.numel());
  for (size_t i = 0; i < pre.tokens.size(); ++i) pre.token_to_row[pre.tokens[i]] = int(i);

  LoadedCheckpoint out;
  out.model = std::make_unique<Model<float>>(cfg, std::move(v), std::move(pre));

  uint32_t n_params = read_u32(is);
  if (n_params != out.model->registry.all().size())
    throw CorruptCheckpoint("parameter count " + std::to_string(n_params) + ", expected " +
                            std::to_string(out.model->registry.all().size()));
  for (uint32_t i = 0; i < n_params; ++i) {
    Parameter<float>* p = out.model->registry.all()[i];
    for (int part = 0; part < 3; ++part) {
      std::string name;
      Tensor<float> t = read_blob(is, &name);
      std::string expected = p->name + (part == 1 ? ".adam_m" : part == 2 ? ".adam_v" : "");
      if (name != expected)
        throw CorruptCheckpoint("parameter \"" + name + "\", expected \"" + expected + "\"");
      if (p->value.shape != t.shape)
        throw CorruptCheckpoint("shape mismatch for parameter \"" + name + "\"");
      (part == 0 ? p->value : part == 1 ? p->m : p->v) = std::move(t);
    }
  }

  out.state.epoch = int(read_u32(is));
  out.state.step = int64_t(read_u64(is));
  out.state.best_wer = read_f64(is);
  out.state.adam_t = int64_t(read_u64(is));
  out.state.rng_state = read_str(is);
  return out;
}

}  // namespace harakat
