#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "harakat/common.hpp"

namespace harakat {

// Dense row-major tensor. Training runs with Real = float; the 64-bit mode
// used by the gradient checks instantiates Real = double.
template <class Real>
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<Real> data;

  Tensor() = default;
  explicit Tensor(std::vector<int64_t> s)
      : shape(std::move(s)), data(size_t(numel_of(shape)), Real(0)) {}

  static int64_t numel_of(const std::vector<int64_t>& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return s.empty() ? 0 : n;
  }

  static Tensor zeros(std::vector<int64_t> s) { return Tensor(std::move(s)); }

  int64_t numel() const { return int64_t(data.size()); }
  bool empty() const { return data.empty(); }

  // 2-D accessors; all tensors in this codebase are [rows, cols].
  int64_t rows() const { return shape.empty() ? 0 : shape[0]; }
  int64_t cols() const { return shape.size() < 2 ? (shape.empty() ? 0 : 1) : shape[1]; }
  Real* row(int64_t r) { return data.data() + r * cols(); }
  const Real* row(int64_t r) const { return data.data() + r * cols(); }

  Real& at(int64_t r, int64_t c) { return data[size_t(r * cols() + c)]; }
  Real at(int64_t r, int64_t c) const { return data[size_t(r * cols() + c)]; }

  Real scalar() const {
    if (numel() != 1) throw ShapeMismatch("scalar() on tensor of numel " + std::to_string(numel()));
    return data[0];
  }

  void zero() { std::fill(data.begin(), data.end(), Real(0)); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  template <class Other>
  Tensor<Other> cast() const {
    Tensor<Other> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = Other(data[i]);
    return out;
  }
};

// Trainable tensor with gradient and Adam moment buffers, all one shape.
template <class Real>
struct Parameter {
  std::string name;
  Tensor<Real> value;
  Tensor<Real> grad;
  Tensor<Real> m;
  Tensor<Real> v;
  bool trainable = true;
  int index = -1;  // slot in the owning model's registry

  Parameter() = default;
  Parameter(std::string n, std::vector<int64_t> shape)
      : name(std::move(n)), value(shape), grad(shape), m(shape), v(std::move(shape)) {}
};

}  // namespace harakat
