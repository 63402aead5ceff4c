#pragma once

#include <vector>

#include "symjet/linalg.hpp"

namespace symjet {

// Dense tensor value at a point: `rc` contravariant slots (0 or 1) followed by
// `ck` covariant slots. Index layout is row-major (out, in_1, ..., in_ck).
class TensorValue {
public:
  TensorValue() = default;
  TensorValue(int n, int rc, int ck)
      : n_(n), rc_(rc), ck_(ck), a_(size_for(n, rc, ck), 0.0) {}

  int dim() const { return n_; }
  int contra_rank() const { return rc_; }
  int cov_rank() const { return ck_; }

  double& at(const std::vector<int>& idx) { return a_[flat(idx)]; }
  double at(const std::vector<int>& idx) const { return a_[flat(idx)]; }

  std::vector<double>& raw() { return a_; }
  const std::vector<double>& raw() const { return a_; }

  // L applied to the contravariant slot; identity when rc = 0.
  TensorValue out_premul(const Mat& L) const;

  // Substitution on covariant slot s (0-based among covariant slots):
  // T'(..., u, ...) = T(..., K u, ...).
  TensorValue cov_compose(int s, const Mat& K) const;

  // Full frame change: L on the output, K on every covariant slot.
  TensorValue transform(const Mat& L, const Mat& K) const;

  TensorValue operator+(const TensorValue& o) const;
  TensorValue operator-(const TensorValue& o) const;
  TensorValue operator*(double s) const;

  double max_abs() const;

  // Full contraction against covariant arguments; returns a vector for rc = 1
  // and a 1-vector (scalar) for rc = 0.
  Vec apply(const std::vector<Vec>& args) const;

private:
  static size_t size_for(int n, int rc, int ck) {
    size_t s = 1;
    for (int i = 0; i < rc + ck; ++i) s *= static_cast<size_t>(n);
    return s;
  }
  size_t flat(const std::vector<int>& idx) const {
    size_t f = 0;
    for (int v : idx) f = f * static_cast<size_t>(n_) + static_cast<size_t>(v);
    return f;
  }

  int n_ = 0, rc_ = 0, ck_ = 0;
  std::vector<double> a_;
};

}  // namespace symjet
