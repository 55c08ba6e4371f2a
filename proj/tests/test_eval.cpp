#include <doctest.h>

#include <cmath>

#include "harakat/eval.hpp"

using namespace harakat;

namespace {

// Brute-force recount oracle, written independently of the implementations:
// renders each word's labels to a string and compares strings.
struct OracleCounts {
  int64_t words = 0, chars = 0;
  int64_t word_err = 0, char_err = 0, last_err = 0, lex_err = 0;
};

OracleCounts oracle_count(const LabelSeqs& pred, const LabelSeqs& gold) {
  OracleCounts c;
  for (size_t w = 0; w < pred.size(); ++w) {
    ++c.words;
    std::string ps, gs;
    for (size_t k = 0; k < pred[w].size(); ++k) {
      ++c.chars;
      ps += std::to_string(pred[w][k]) + ",";
      gs += std::to_string(gold[w][k]) + ",";
      if (pred[w][k] != gold[w][k]) ++c.char_err;
    }
    if (ps != gs) ++c.word_err;
    if (pred[w].back() != gold[w].back()) ++c.last_err;
    std::string pi, gi;  // everything but the final position
    for (size_t k = 0; k + 1 < pred[w].size(); ++k) {
      pi += std::to_string(pred[w][k]) + ",";
      gi += std::to_string(gold[w][k]) + ",";
    }
    if (pi != gi) ++c.lex_err;
  }
  return c;
}

LabelSeqs random_labels(Rng& rng, const std::vector<int>& lens, int classes) {
  LabelSeqs out;
  for (int len : lens) {
    std::vector<int> w(size_t(len), 0);
    for (auto& x : w) x = int(rng.bounded(uint64_t(classes)));
    out.push_back(std::move(w));
  }
  return out;
}

// Two-tailed p via adaptive Simpson quadrature of the t density; independent
// of the incomplete-beta route.
double t_pdf(double s, double dof) {
  double lg = std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2);
  return std::exp(lg) / std::sqrt(dof * M_PI) *
         std::pow(1.0 + s * s / dof, -(dof + 1) / 2);
}

double simpson(double a, double b, double dof, int n) {
  double h = (b - a) / n;
  double s = t_pdf(a, dof) + t_pdf(b, dof);
  for (int i = 1; i < n; ++i) s += t_pdf(a + i * h, dof) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double p_by_quadrature(double t, double dof) {
  t = std::fabs(t);
  // integrate the right tail on log-spaced panels out to where the tail is
  // negligible for dof >= 1
  double upper = std::max(1e4, t * 1e3);
  double acc = 0, lo = t;
  while (lo < upper) {
    double hi = std::min(upper, lo == 0 ? 1.0 : lo * 2 + 1.0);
    acc += simpson(lo, hi, dof, 4000);
    lo = hi;
  }
  return 2.0 * acc;
}

}  // namespace

TEST_CASE("metric examples") {
  LabelSeqs gold = {{1, 2, 3}, {4, 5}, {0, 0, 0, 0}, {7}};

  CHECK(word_error_rate(gold, gold) == 0.0);
  CHECK(diacritic_error_rate(gold, gold) == 0.0);

  // One word wrong out of four -> WER 25.
  LabelSeqs p1 = gold;
  p1[2][1] = 9;
  CHECK(word_error_rate(p1, gold) == 25.0);

  // 2 of 10 chars wrong -> DER 20.
  LabelSeqs p2 = gold;
  p2[0][0] = 9;
  p2[3][0] = 9;
  CHECK(diacritic_error_rate(p2, gold) == 20.0);

  // Word-internal error: LER 0, WER > 0, Lex counts it.
  CHECK(last_diacritic_error_rate(p1, gold) == 0.0);
  CHECK(lex_error_rate(p1, gold) == 25.0);

  // Final-char error in 1 of 2 words -> LER 50, Lex 0.
  LabelSeqs g2 = {{1, 2}, {3, 4}};
  LabelSeqs p3 = g2;
  p3[0][1] = 9;
  CHECK(last_diacritic_error_rate(p3, g2) == 50.0);
  CHECK(lex_error_rate(p3, g2) == 0.0);

  CHECK_THROWS_AS(word_error_rate(LabelSeqs{{1}}, gold), AlignmentError);
  CHECK_THROWS_AS(word_error_rate(LabelSeqs{{1, 2}, {4, 5}, {0, 0, 0, 0}, {7}}, gold),
                  AlignmentError);
}

TEST_CASE("oov wer") {
  LabelSeqs gold = {{1, 2}, {3}, {4, 5}};
  LabelSeqs pred = {{1, 2}, {9}, {4, 9}};
  std::vector<std::string> skel = {"ab", "c", "de"};
  std::unordered_set<std::string> training = {"ab", "de", "c"};

  CHECK(!oov_wer(pred, gold, skel, training).has_value());  // no OOV words

  training.erase("c");
  auto r = oov_wer(pred, gold, skel, training);
  REQUIRE(r.has_value());
  CHECK(*r == 100.0);  // the single OOV word is wrong

  training.erase("ab");
  r = oov_wer(pred, gold, skel, training);
  CHECK(*r == 50.0);

  pred = gold;
  CHECK(*oov_wer(pred, gold, skel, training) == 0.0);
}

TEST_CASE("metrics agree with the brute-force recount on random cases") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> lens;
    int n_words = 1 + int(rng.bounded(12));
    for (int i = 0; i < n_words; ++i) lens.push_back(1 + int(rng.bounded(6)));
    LabelSeqs gold = random_labels(rng, lens, 15);
    LabelSeqs pred = gold;
    // corrupt a random subset
    for (auto& w : pred)
      for (auto& x : w)
        if (rng.uniform() < 0.25) x = int(rng.bounded(15));

    OracleCounts c = oracle_count(pred, gold);
    CHECK(word_error_rate(pred, gold) == 100.0 * double(c.word_err) / double(c.words));
    CHECK(diacritic_error_rate(pred, gold) == 100.0 * double(c.char_err) / double(c.chars));
    CHECK(last_diacritic_error_rate(pred, gold) == 100.0 * double(c.last_err) / double(c.words));
    CHECK(lex_error_rate(pred, gold) == 100.0 * double(c.lex_err) / double(c.words));

    // Decomposition: a word counts toward WER iff it counts toward LER or Lex.
    CHECK(c.word_err <= c.last_err + c.lex_err);
    CHECK(c.word_err >= c.last_err);
    CHECK(c.word_err >= c.lex_err);
  }
}

TEST_CASE("welch t test") {
  // Identical samples (with internal variance): t = 0, not significant.
  std::vector<double> a = {1.0, 2.0, 3.0};
  auto r = welch_t_test(a, a);
  CHECK(r.t == 0.0);
  CHECK(!r.significant);

  // Extreme separation: significant.
  r = welch_t_test({1.0, 1.01, 0.99}, {5.0, 5.01, 4.99});
  CHECK(r.significant);
  CHECK(r.p < 1e-4);

  CHECK_THROWS_AS(welch_t_test({1.0, 1.0}, {2.0, 2.0}), DegenerateVariance);
  CHECK_THROWS_AS(welch_t_test({1.0}, {2.0, 3.0}), ValidationError);
}

TEST_CASE("welch t and p agree with the quadrature reference") {
  Rng rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    int na = 3 + int(rng.bounded(3)), nb = 3 + int(rng.bounded(3));
    for (int i = 0; i < na; ++i) a.push_back(rng.uniform(0.0, 10.0));
    for (int i = 0; i < nb; ++i) b.push_back(rng.uniform(0.0, 10.0));
    WelchResult r = welch_t_test(a, b);

    // Independent recompute of t and dof.
    auto mv = [](const std::vector<double>& xs) {
      double m = 0;
      for (double x : xs) m += x;
      m /= double(xs.size());
      double v = 0;
      for (double x : xs) v += (x - m) * (x - m);
      return std::pair{m, v / double(xs.size() - 1)};
    };
    auto [ma, va] = mv(a);
    auto [mb, vb] = mv(b);
    double se2 = va / na + vb / nb;
    double t_ref = (ma - mb) / std::sqrt(se2);
    double dof_ref =
        se2 * se2 / (va * va / (double(na) * na * (na - 1)) + vb * vb / (double(nb) * nb * (nb - 1)));
    CHECK(r.t == doctest::Approx(t_ref).epsilon(1e-12));
    CHECK(r.dof == doctest::Approx(dof_ref).epsilon(1e-12));
    CHECK(std::fabs(r.p - p_by_quadrature(r.t, r.dof)) <= 1e-6);
  }
}

TEST_CASE("eval report serialization is stable and handles NA") {
  EvalReport r;
  r.words = 4;
  r.chars = 10;
  r.oov_words = 0;
  r.wer = 25.0;
  r.der = 20.0;
  r.ler = 0.0;
  r.lex = 25.0;
  r.seg_acc = 90.0;
  CHECK(r.to_text() ==
        "words 4\nchars 10\noov_words 0\n"
        "wer 25.0000\nder 20.0000\nler 0.0000\nlex 25.0000\n"
        "oov_wer NA\nseg_acc 90.0000\npos_acc NA\nsyn_acc NA\n");
  CHECK(r.to_text() == r.to_text());  // byte-identical reruns
}
