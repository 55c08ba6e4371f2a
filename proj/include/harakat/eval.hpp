#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "harakat/common.hpp"

namespace harakat {

// Per-word predicted/gold diacritic label sequences. Metrics exclude
// boundary tokens by construction: only real words appear here.
using LabelSeqs = std::vector<std::vector<int>>;

// 100 * (#words with any wrong character label) / #words.
double word_error_rate(const LabelSeqs& pred, const LabelSeqs& gold);
// Character-level version; denominator is the total character count.
double diacritic_error_rate(const LabelSeqs& pred, const LabelSeqs& gold);
// 100 * (#words whose final character label is wrong) / #words.
double last_diacritic_error_rate(const LabelSeqs& pred, const LabelSeqs& gold);
// 100 * (#words with any wrong label among non-final characters) / #words.
double lex_error_rate(const LabelSeqs& pred, const LabelSeqs& gold);
// WER restricted to words whose skeleton is not in the training set;
// empty denominator reports NA (nullopt).
std::optional<double> oov_wer(const LabelSeqs& pred, const LabelSeqs& gold,
                              const std::vector<std::string>& skeletons,
                              const std::unordered_set<std::string>& training_word_set);

struct WelchResult {
  double t = 0;
  double dof = 0;
  double p = 1;
  bool significant = false;
};

// Unpaired two-tailed Welch test. Throws DegenerateVariance when both sample
// variances are zero.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha = 0.05);

// Regularized incomplete beta I_x(a, b) (continued fraction); exposed for the
// CLI and for cross-checks.
double incomplete_beta(double a, double b, double x);
double student_t_two_tailed_p(double t, double dof);

// One evaluation run; metric fields in percent. Aux accuracies are NA when
// the task is disabled; oov_wer is NA when no OOV word occurs.
struct EvalReport {
  int64_t words = 0;
  int64_t chars = 0;
  int64_t oov_words = 0;
  double wer = 0;
  double der = 0;
  double ler = 0;
  double lex = 0;
  std::optional<double> oov = {};
  std::optional<double> seg_acc = {};
  std::optional<double> pos_acc = {};
  std::optional<double> syn_acc = {};

  // Line-oriented serialization with fixed field order and formatting.
  std::string to_text() const;
};

}  // namespace harakat
