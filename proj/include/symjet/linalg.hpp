#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "symjet/errors.hpp"

namespace symjet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Largest supported chart dimension. Runtime-chosen per spec file, but the
// truncated-Taylor kernels use capacity-bounded storage sized by this.
inline constexpr int kMaxDim = 6;

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Vector-valued bilinear form B(a, b)^k = coef[k](i, j) a^i b^j.
class Bilin {
public:
  Bilin() = default;
  explicit Bilin(int n) : n_(n), coef_(n, Mat::Zero(n, n)) {}

  static Bilin zero(int n) { return Bilin(n); }

  int dim() const { return n_; }

  double& at(int k, int i, int j) { return coef_[k](i, j); }
  double at(int k, int i, int j) const { return coef_[k](i, j); }

  const Mat& comp(int k) const { return coef_[k]; }
  Mat& comp(int k) { return coef_[k]; }

  Vec operator()(const Vec& a, const Vec& b) const {
    Vec out(n_);
    for (int k = 0; k < n_; ++k) out[k] = a.dot(coef_[k] * b);
    return out;
  }

  // Matrix of b ↦ B(a, b).
  Mat left(const Vec& a) const {
    Mat out(n_, n_);
    for (int k = 0; k < n_; ++k) out.row(k) = a.transpose() * coef_[k];
    return out;
  }

  // Matrix of a ↦ B(a, b).
  Mat right(const Vec& b) const {
    Mat out(n_, n_);
    for (int k = 0; k < n_; ++k) out.row(k) = (coef_[k] * b).transpose();
    return out;
  }

  Bilin transposed() const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k) out.coef_[k] = coef_[k].transpose();
    return out;
  }

  // A · B(a, b).
  Bilin premul(const Mat& A) const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k)
      for (int m = 0; m < n_; ++m) out.coef_[k] += A(k, m) * coef_[m];
    return out;
  }

  // B(P a, Q b).
  Bilin compose(const Mat& P, const Mat& Q) const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k) out.coef_[k] = P.transpose() * coef_[k] * Q;
    return out;
  }

  Bilin operator+(const Bilin& o) const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k) out.coef_[k] = coef_[k] + o.coef_[k];
    return out;
  }
  Bilin operator-(const Bilin& o) const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k) out.coef_[k] = coef_[k] - o.coef_[k];
    return out;
  }
  Bilin operator*(double s) const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k) out.coef_[k] = coef_[k] * s;
    return out;
  }

  double max_abs() const {
    double m = 0;
    for (const Mat& c : coef_) m = std::max(m, symjet::max_abs(c));
    return m;
  }

  bool is_symmetric(double tol) const { return (*this - transposed()).max_abs() <= tol; }

private:
  int n_ = 0;
  std::vector<Mat> coef_;
};

// Vector-valued trilinear form C(a, b, c)^k = coef(k; i, j, l) a^i b^j c^l.
class Trilin {
public:
  Trilin() = default;
  explicit Trilin(int n) : n_(n), coef_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  static Trilin zero(int n) { return Trilin(n); }

  int dim() const { return n_; }

  double& at(int k, int i, int j, int l) { return coef_[idx(k, i, j, l)]; }
  double at(int k, int i, int j, int l) const { return coef_[idx(k, i, j, l)]; }

  Vec operator()(const Vec& a, const Vec& b, const Vec& c) const {
    Vec out = Vec::Zero(n_);
    for (int k = 0; k < n_; ++k) {
      double s = 0;
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int l = 0; l < n_; ++l) s += coef_[idx(k, i, j, l)] * a[i] * b[j] * c[l];
      out[k] = s;
    }
    return out;
  }

  // Argument permutation: result(a0, a1, a2) = C(a_{p0}, a_{p1}, a_{p2}),
  // so permuted(0, 2, 1) swaps the last two arguments.
  Trilin permuted(int p0, int p1, int p2) const {
    Trilin out(n_);
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int l = 0; l < n_; ++l) {
            const int a[3] = {i, j, l};
            out.coef_[out.idx(k, i, j, l)] = coef_[idx(k, a[p0], a[p1], a[p2])];
          }
    return out;
  }

  Trilin premul(const Mat& A) const {
    Trilin out(n_);
    for (int k = 0; k < n_; ++k)
      for (int m = 0; m < n_; ++m) {
        if (A(k, m) == 0.0) continue;
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j)
            for (int l = 0; l < n_; ++l)
              out.coef_[idx(k, i, j, l)] += A(k, m) * coef_[idx(m, i, j, l)];
      }
    return out;
  }

  // C(P a, Q b, R c).
  Trilin compose(const Mat& P, const Mat& Q, const Mat& R) const {
    Trilin out(n_);
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int l = 0; l < n_; ++l) {
            double s = 0;
            for (int a = 0; a < n_; ++a)
              for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c)
                  s += coef_[idx(k, a, b, c)] * P(a, i) * Q(b, j) * R(c, l);
            out.coef_[out.idx(k, i, j, l)] = s;
          }
    return out;
  }

  // Fix the first argument: returns B(b, c) = C(a, b, c).
  Bilin fix_first(const Vec& a) const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < n_; ++j)
        for (int l = 0; l < n_; ++l) {
          double s = 0;
          for (int i = 0; i < n_; ++i) s += coef_[idx(k, i, j, l)] * a[i];
          out.at(k, j, l) = s;
        }
    return out;
  }

  // Fix the last argument: returns B(a, b) = C(a, b, c).
  Bilin fix_last(const Vec& c) const {
    Bilin out(n_);
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          double s = 0;
          for (int l = 0; l < n_; ++l) s += coef_[idx(k, i, j, l)] * c[l];
          out.at(k, i, j) = s;
        }
    return out;
  }

  Trilin operator+(const Trilin& o) const {
    Trilin out(n_);
    for (size_t i = 0; i < coef_.size(); ++i) out.coef_[i] = coef_[i] + o.coef_[i];
    return out;
  }
  Trilin operator-(const Trilin& o) const {
    Trilin out(n_);
    for (size_t i = 0; i < coef_.size(); ++i) out.coef_[i] = coef_[i] - o.coef_[i];
    return out;
  }
  Trilin operator*(double s) const {
    Trilin out(n_);
    for (size_t i = 0; i < coef_.size(); ++i) out.coef_[i] = coef_[i] * s;
    return out;
  }

  double max_abs() const {
    double m = 0;
    for (double c : coef_) m = std::max(m, std::abs(c));
    return m;
  }

private:
  size_t idx(int k, int i, int j, int l) const {
    return ((static_cast<size_t>(k) * n_ + i) * n_ + j) * n_ + l;
  }
  int n_ = 0;
  std::vector<double> coef_;
};

// Vector-valued quadrilinear form, used for ∂²Γ and ∇R.
class Quadlin {
public:
  Quadlin() = default;
  explicit Quadlin(int n)
      : n_(n), coef_(static_cast<size_t>(n) * n * n * n * n, 0.0) {}

  int dim() const { return n_; }

  double& at(int k, int i, int j, int l, int m) { return coef_[idx(k, i, j, l, m)]; }
  double at(int k, int i, int j, int l, int m) const { return coef_[idx(k, i, j, l, m)]; }

  Vec operator()(const Vec& a, const Vec& b, const Vec& c, const Vec& d) const {
    Vec out = Vec::Zero(n_);
    for (int k = 0; k < n_; ++k) {
      double s = 0;
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int l = 0; l < n_; ++l)
            for (int m = 0; m < n_; ++m)
              s += coef_[idx(k, i, j, l, m)] * a[i] * b[j] * c[l] * d[m];
      out[k] = s;
    }
    return out;
  }

  // Fix the last argument: returns C(a, b, c) = Q(a, b, c, d).
  Trilin fix_last(const Vec& d) const {
    Trilin out(n_);
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int l = 0; l < n_; ++l) {
            double s = 0;
            for (int m = 0; m < n_; ++m) s += coef_[idx(k, i, j, l, m)] * d[m];
            out.at(k, i, j, l) = s;
          }
    return out;
  }

  double max_abs() const {
    double m = 0;
    for (double c : coef_) m = std::max(m, std::abs(c));
    return m;
  }

private:
  size_t idx(int k, int i, int j, int l, int m) const {
    return (((static_cast<size_t>(k) * n_ + i) * n_ + j) * n_ + l) * n_ + m;
  }
  int n_ = 0;
  std::vector<double> coef_;
};

// Nested multilinear builders.
// (a, b, c) ↦ P(Q(a, b), R c)
inline Trilin trilin_nest12(const Bilin& P, const Bilin& Q, const Mat& R) {
  int n = P.dim();
  Trilin out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = 0;
          for (int m = 0; m < n; ++m)
            for (int q = 0; q < n; ++q) s += P.at(k, m, q) * Q.at(m, i, j) * R(q, l);
          out.at(k, i, j, l) = s;
        }
  return out;
}

// (a, b, c) ↦ P(Q(a, c), S b)
inline Trilin trilin_nest13(const Bilin& P, const Bilin& Q, const Mat& S) {
  int n = P.dim();
  Trilin out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = 0;
          for (int m = 0; m < n; ++m)
            for (int q = 0; q < n; ++q) s += P.at(k, m, q) * Q.at(m, i, l) * S(q, j);
          out.at(k, i, j, l) = s;
        }
  return out;
}

// (a, b, c) ↦ P(S a, Q(b, c))
inline Trilin trilin_nest23(const Bilin& P, const Mat& S, const Bilin& Q) {
  int n = P.dim();
  Trilin out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = 0;
          for (int m = 0; m < n; ++m)
            for (int q = 0; q < n; ++q) s += P.at(k, m, q) * S(m, i) * Q.at(q, j, l);
          out.at(k, i, j, l) = s;
        }
  return out;
}

// Deterministic sampling helpers shared by tests and the verify suites.
inline Vec random_vec(std::mt19937& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Mat random_mat(std::mt19937& rng, int n, double scale = 1.0) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = random_vec(rng, n, scale).transpose();
  return m;
}

// Random matrix bounded away from singularity.
inline Mat random_invertible(std::mt19937& rng, int n, double scale = 1.0) {
  for (int tries = 0; tries < 64; ++tries) {
    Mat m = random_mat(rng, n, scale);
    if (std::abs(m.determinant()) > 0.1 * std::pow(scale, n)) return m;
  }
  return Mat::Identity(n, n);
}

inline Bilin random_bilin(std::mt19937& rng, int n, double scale = 1.0) {
  Bilin b(n);
  for (int k = 0; k < n; ++k) b.comp(k) = random_mat(rng, n, scale);
  return b;
}

inline Trilin random_trilin(std::mt19937& rng, int n, double scale = 1.0) {
  Trilin c(n);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) c.at(k, i, j, l) = u(rng);
  return c;
}

}  // namespace symjet
