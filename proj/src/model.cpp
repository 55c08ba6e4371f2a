#include "harakat/model.hpp"

#include <sstream>

namespace harakat {

namespace {

std::string tasks_to_string(const ModelConfig& c) {
  std::string s;
  auto app = [&](const char* t) {
    if (!s.empty()) s += ",";
    s += t;
  };
  if (c.task_seg) app("seg");
  if (c.task_syn) app("syn");
  if (c.task_pos) app("pos");
  return s;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean for " + key + ": \"" + v + "\"");
}

int parse_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": \"" + v + "\"");
  }
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": \"" + v + "\"");
  }
}

}  // namespace

std::map<std::string, std::string> model_config_to_kv(const ModelConfig& c) {
  std::map<std::string, std::string> kv;
  auto num = [](double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  };
  kv["char_emb_dim"] = std::to_string(c.char_emb_dim);
  kv["word_emb_dim"] = std::to_string(c.word_emb_dim);
  kv["hidden"] = std::to_string(c.hidden);
  kv["layers_main"] = std::to_string(c.layers_main);
  kv["layers_seg"] = std::to_string(c.layers_seg);
  kv["dropout_hidden"] = num(c.dropout_hidden);
  kv["dropout_emb"] = num(c.dropout_emb);
  kv["window"] = std::to_string(c.window_radius);
  kv["tasks"] = tasks_to_string(c);
  kv["feed_labels"] = c.feed_labels ? "true" : "false";
  kv["feed_seg_hidden"] = c.feed_seg_hidden ? "true" : "false";
  kv["passivization"] = c.passivization ? "true" : "false";
  kv["char_only"] = c.char_only ? "true" : "false";
  kv["hard_labels_infer"] = c.hard_labels_infer ? "true" : "false";
  kv["grad_clip"] = num(c.grad_clip);
  kv["seed"] = std::to_string(c.seed);
  return kv;
}

bool model_config_apply_kv(ModelConfig& c, const std::string& key, const std::string& value) {
  if (key == "char_emb_dim") c.char_emb_dim = parse_int(value, key);
  else if (key == "word_emb_dim") c.word_emb_dim = parse_int(value, key);
  else if (key == "hidden") c.hidden = parse_int(value, key);
  else if (key == "layers_main") c.layers_main = parse_int(value, key);
  else if (key == "layers_seg") c.layers_seg = parse_int(value, key);
  else if (key == "dropout_hidden") c.dropout_hidden = parse_double(value, key);
  else if (key == "dropout_emb") c.dropout_emb = parse_double(value, key);
  else if (key == "window") c.window_radius = parse_int(value, key);
  else if (key == "tasks") {
    c.task_seg = c.task_syn = c.task_pos = false;
    std::string tok;
    std::istringstream is(value);
    while (std::getline(is, tok, ',')) {
      if (tok.empty()) continue;
      if (tok == "seg") c.task_seg = true;
      else if (tok == "syn") c.task_syn = true;
      else if (tok == "pos") c.task_pos = true;
      else throw ConfigError("unknown task \"" + tok + "\" (expected seg, syn, pos)");
    }
  } else if (key == "feed_labels") c.feed_labels = parse_bool(value, key);
  else if (key == "feed_seg_hidden") c.feed_seg_hidden = parse_bool(value, key);
  else if (key == "passivization") c.passivization = parse_bool(value, key);
  else if (key == "char_only") c.char_only = parse_bool(value, key);
  else if (key == "hard_labels_infer") c.hard_labels_infer = parse_bool(value, key);
  else if (key == "grad_clip") c.grad_clip = parse_double(value, key);
  else if (key == "seed") c.seed = uint64_t(std::stoull(value));
  else return false;
  return true;
}

}  // namespace harakat
