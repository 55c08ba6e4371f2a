#include "harakat/eval.hpp"

#include <cmath>
#include <cstdio>

namespace harakat {

namespace {

void check_aligned(const LabelSeqs& pred, const LabelSeqs& gold) {
  if (pred.size() != gold.size())
    throw AlignmentError("word counts differ: " + std::to_string(pred.size()) + " vs " +
                         std::to_string(gold.size()));
  for (size_t w = 0; w < pred.size(); ++w) {
    if (pred[w].size() != gold[w].size())
      throw AlignmentError("word " + std::to_string(w) + ": char counts differ");
    if (pred[w].empty()) throw AlignmentError("word " + std::to_string(w) + " is empty");
  }
}

bool word_wrong(const std::vector<int>& p, const std::vector<int>& g) {
  for (size_t k = 0; k < p.size(); ++k)
    if (p[k] != g[k]) return true;
  return false;
}

}  // namespace

double word_error_rate(const LabelSeqs& pred, const LabelSeqs& gold) {
  check_aligned(pred, gold);
  if (pred.empty()) return 0.0;
  int64_t wrong = 0;
  for (size_t w = 0; w < pred.size(); ++w) wrong += word_wrong(pred[w], gold[w]);
  return 100.0 * double(wrong) / double(pred.size());
}

double diacritic_error_rate(const LabelSeqs& pred, const LabelSeqs& gold) {
  check_aligned(pred, gold);
  int64_t wrong = 0, total = 0;
  for (size_t w = 0; w < pred.size(); ++w) {
    total += int64_t(pred[w].size());
    for (size_t k = 0; k < pred[w].size(); ++k) wrong += pred[w][k] != gold[w][k];
  }
  return total == 0 ? 0.0 : 100.0 * double(wrong) / double(total);
}

double last_diacritic_error_rate(const LabelSeqs& pred, const LabelSeqs& gold) {
  check_aligned(pred, gold);
  if (pred.empty()) return 0.0;
  int64_t wrong = 0;
  for (size_t w = 0; w < pred.size(); ++w) wrong += pred[w].back() != gold[w].back();
  return 100.0 * double(wrong) / double(pred.size());
}

double lex_error_rate(const LabelSeqs& pred, const LabelSeqs& gold) {
  check_aligned(pred, gold);
  if (pred.empty()) return 0.0;
  int64_t wrong = 0;
  for (size_t w = 0; w < pred.size(); ++w) {
    bool bad = false;
    for (size_t k = 0; k + 1 < pred[w].size(); ++k) bad |= pred[w][k] != gold[w][k];
    wrong += bad;
  }
  return 100.0 * double(wrong) / double(pred.size());
}

std::optional<double> oov_wer(const LabelSeqs& pred, const LabelSeqs& gold,
                              const std::vector<std::string>& skeletons,
                              const std::unordered_set<std::string>& training_word_set) {
  check_aligned(pred, gold);
  if (skeletons.size() != pred.size())
    throw AlignmentError("skeleton count differs from word count");
  int64_t oov = 0, wrong = 0;
  for (size_t w = 0; w < pred.size(); ++w) {
    if (training_word_set.count(skeletons[w])) continue;
    ++oov;
    wrong += word_wrong(pred[w], gold[w]);
  }
  if (oov == 0) return std::nullopt;
  return 100.0 * double(wrong) / double(oov);
}

// ---- Welch ------------------------------------------------------------------

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Continued fraction converges fast for x < (a+1)/(a+b+2); use the
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  double ln_front = a * std::log(x) + b * std::log(1.0 - x) -
                    (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)) - std::log(a);
  // Lentz's algorithm.
  const double tiny = 1e-300;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 300; ++i) {
    int m = i / 2;
    double numerator;
    if (i == 0)
      numerator = 1.0;
    else if (i % 2 == 0)
      numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    else
      numerator = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    d = 1.0 + numerator * d;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < tiny) c = tiny;
    f *= c * d;
    if (std::fabs(1.0 - c * d) < 1e-15) break;
  }
  return std::exp(ln_front) * (f - 1.0);
}

double student_t_two_tailed_p(double t, double dof) {
  double x = dof / (dof + t * t);
  return incomplete_beta(dof / 2.0, 0.5, x);
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha) {
  if (a.size() < 2 || b.size() < 2)
    throw ValidationError("welch_t_test needs at least 2 samples per side");
  auto mean = [](const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / double(xs.size());
  };
  auto var = [&](const std::vector<double>& xs, double m) {
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / double(xs.size() - 1);
  };
  double ma = mean(a), mb = mean(b);
  double va = var(a, ma), vb = var(b, mb);
  if (va == 0.0 && vb == 0.0) throw DegenerateVariance("both sample variances are zero");

  double na = double(a.size()), nb = double(b.size());
  double se2 = va / na + vb / nb;
  WelchResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.dof = se2 * se2 /
          ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
  r.p = student_t_two_tailed_p(std::fabs(r.t), r.dof);
  r.significant = r.p < alpha;
  return r;
}

std::string EvalReport::to_text() const {
  char buf[64];
  std::string out;
  auto line_i = [&](const char* k, int64_t v) {
    std::snprintf(buf, sizeof buf, "%s %lld\n", k, static_cast<long long>(v));
    out += buf;
  };
  auto line_f = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s %.4f\n", k, v);
    out += buf;
  };
  auto line_opt = [&](const char* k, const std::optional<double>& v) {
    if (v)
      line_f(k, *v);
    else
      out += std::string(k) + " NA\n";
  };
  line_i("words", words);
  line_i("chars", chars);
  line_i("oov_words", oov_words);
  line_f("wer", wer);
  line_f("der", der);
  line_f("ler", ler);
  line_f("lex", lex);
  line_opt("oov_wer", oov);
  line_opt("seg_acc", seg_acc);
  line_opt("pos_acc", pos_acc);
  line_opt("syn_acc", syn_acc);
  return out;
}

}  // namespace harakat
