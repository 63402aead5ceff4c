#pragma once

#include <array>

#include "symjet/expr.hpp"
#include "symjet/linalg.hpp"

namespace symjet {

// Truncated Taylor scalar of order <= 3 in n <= kMaxDim variables. Arithmetic
// is exact to machine precision (no truncation error in the carried blocks).
// Storage is capacity-bounded so the geodesic hot path stays allocation-free.
class TaylorScalar {
public:
  using VecC = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
  using MatC =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

  TaylorScalar() = default;
  TaylorScalar(int n, int order) : n_(n), order_(order) { set_zero(); }

  static TaylorScalar constant(int n, int order, double v) {
    TaylorScalar t(n, order);
    t.v_ = v;
    return t;
  }
  static TaylorScalar variable(int n, int order, int i, double xi) {
    TaylorScalar t(n, order);
    t.v_ = xi;
    if (order >= 1) t.g_[i] = 1.0;
    return t;
  }

  int dim() const { return n_; }
  int order() const { return order_; }

  double value() const { return v_; }
  double grad(int i) const { return g_[i]; }
  double hess(int i, int j) const { return h_(i, j); }
  double third(int i, int j, int k) const { return t_[static_cast<size_t>(i)](j, k); }

  Vec gradient() const { return g_.head(n_); }
  Mat hessian() const { return Mat(h_); }

  // d/dx_i as a Taylor scalar of one order less.
  TaylorScalar derivative(int i) const;

  // Copy carrying only blocks up to `order`.
  TaylorScalar truncated(int order) const;

  TaylorScalar operator+(const TaylorScalar& o) const;
  TaylorScalar operator-(const TaylorScalar& o) const;
  TaylorScalar operator*(const TaylorScalar& o) const;
  TaylorScalar operator/(const TaylorScalar& o) const;
  TaylorScalar operator-() const;
  TaylorScalar operator+(double c) const;
  TaylorScalar operator*(double c) const;

  TaylorScalar reciprocal() const;
  TaylorScalar pow_int(int k) const;
  TaylorScalar apply(Func f) const;

  // Chain rule through a univariate function given by derivative values at v_.
  TaylorScalar compose(double f0, double f1, double f2, double f3) const;

private:
  void set_zero();

  int n_ = 0;
  int order_ = 0;
  double v_ = 0.0;
  VecC g_;
  MatC h_;
  std::array<MatC, kMaxDim> t_;
};

// Evaluates a compiled tape in Taylor arithmetic at x, to the given order.
TaylorScalar taylor_eval(const Tape& tape, const Vec& x, int order);

}  // namespace symjet
