#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "harakat/tensor.hpp"

// Central-finite-difference checks. The caller runs forward+backward once to
// populate analytic gradients, then hands over a forward-only loss closure
// that re-reads the (perturbed) values.
namespace gradcheck {

struct Result {
  double max_rel = 0;
  int checked = 0;
};

inline double rel_err(double a, double b, double floor_) {
  return std::fabs(a - b) / std::max({floor_, std::fabs(a), std::fabs(b)});
}

inline void check_array(const std::function<double()>& loss_fn, double* value,
                        const double* analytic, int64_t n, int max_coords, harakat::Rng& rng,
                        Result& res, double eps = 1e-5, double floor_ = 1e-4) {
  std::vector<int64_t> coords;
  if (n <= max_coords) {
    for (int64_t i = 0; i < n; ++i) coords.push_back(i);
  } else {
    for (int c = 0; c < max_coords; ++c) coords.push_back(int64_t(rng.bounded(uint64_t(n))));
  }
  for (int64_t i : coords) {
    double save = value[i];
    value[i] = save + eps;
    double lp = loss_fn();
    value[i] = save - eps;
    double lm = loss_fn();
    value[i] = save;
    double fd = (lp - lm) / (2 * eps);
    res.max_rel = std::max(res.max_rel, rel_err(fd, analytic[i], floor_));
    ++res.checked;
  }
}

inline Result check_params(const std::function<double()>& loss_fn,
                           const std::vector<harakat::Parameter<double>*>& params,
                           int per_param, harakat::Rng& rng, double eps = 1e-5,
                           double floor_ = 1e-4) {
  Result res;
  for (auto* p : params)
    check_array(loss_fn, p->value.data.data(), p->grad.data.data(), p->value.numel(), per_param,
                rng, res, eps, floor_);
  return res;
}

}  // namespace gradcheck
