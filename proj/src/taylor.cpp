#include "symjet/taylor.hpp"

#include <cmath>

namespace symjet {

void TaylorScalar::set_zero() {
  v_ = 0.0;
  if (order_ >= 1) g_ = VecC::Zero(n_);
  if (order_ >= 2) h_ = MatC::Zero(n_, n_);
  if (order_ >= 3)
    for (int i = 0; i < n_; ++i) t_[static_cast<size_t>(i)] = MatC::Zero(n_, n_);
}

TaylorScalar TaylorScalar::derivative(int i) const {
  if (order_ < 1) throw Error("derivative of an order-0 Taylor scalar");
  TaylorScalar out(n_, order_ - 1);
  out.v_ = g_[i];
  if (out.order_ >= 1) out.g_ = h_.col(i);
  if (out.order_ >= 2) out.h_ = t_[static_cast<size_t>(i)];
  return out;
}

TaylorScalar TaylorScalar::truncated(int order) const {
  if (order >= order_) return *this;
  TaylorScalar out(n_, order);
  out.v_ = v_;
  if (order >= 1) out.g_ = g_;
  if (order >= 2) out.h_ = h_;
  return out;
}

TaylorScalar TaylorScalar::operator+(const TaylorScalar& o) const {
  TaylorScalar out(n_, order_);
  out.v_ = v_ + o.v_;
  if (order_ >= 1) out.g_ = g_ + o.g_;
  if (order_ >= 2) out.h_ = h_ + o.h_;
  if (order_ >= 3)
    for (int i = 0; i < n_; ++i)
      out.t_[static_cast<size_t>(i)] = t_[static_cast<size_t>(i)] + o.t_[static_cast<size_t>(i)];
  return out;
}

TaylorScalar TaylorScalar::operator-(const TaylorScalar& o) const {
  TaylorScalar out(n_, order_);
  out.v_ = v_ - o.v_;
  if (order_ >= 1) out.g_ = g_ - o.g_;
  if (order_ >= 2) out.h_ = h_ - o.h_;
  if (order_ >= 3)
    for (int i = 0; i < n_; ++i)
      out.t_[static_cast<size_t>(i)] = t_[static_cast<size_t>(i)] - o.t_[static_cast<size_t>(i)];
  return out;
}

TaylorScalar TaylorScalar::operator*(const TaylorScalar& o) const {
  TaylorScalar out(n_, order_);
  out.v_ = v_ * o.v_;
  if (order_ >= 1) out.g_ = g_ * o.v_ + o.g_ * v_;
  if (order_ >= 2)
    out.h_ = h_ * o.v_ + o.h_ * v_ + g_ * o.g_.transpose() + o.g_ * g_.transpose();
  if (order_ >= 3) {
    // ∂³(uv): third on one factor, or a (2,1) split across the three indices.
    for (int i = 0; i < n_; ++i) {
      MatC& ti = out.t_[static_cast<size_t>(i)];
      ti = t_[static_cast<size_t>(i)] * o.v_ + o.t_[static_cast<size_t>(i)] * v_ +
           h_ * o.g_[i] + o.h_ * g_[i];
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          ti(j, k) += h_(i, j) * o.g_[k] + h_(i, k) * o.g_[j] + o.h_(i, j) * g_[k] +
                      o.h_(i, k) * g_[j];
    }
  }
  return out;
}

TaylorScalar TaylorScalar::operator/(const TaylorScalar& o) const {
  return *this * o.reciprocal();
}

TaylorScalar TaylorScalar::operator-() const {
  TaylorScalar out(n_, order_);
  out.v_ = -v_;
  if (order_ >= 1) out.g_ = -g_;
  if (order_ >= 2) out.h_ = -h_;
  if (order_ >= 3)
    for (int i = 0; i < n_; ++i) out.t_[static_cast<size_t>(i)] = -t_[static_cast<size_t>(i)];
  return out;
}

TaylorScalar TaylorScalar::operator+(double c) const {
  TaylorScalar out = *this;
  out.v_ += c;
  return out;
}

TaylorScalar TaylorScalar::operator*(double c) const {
  TaylorScalar out(n_, order_);
  out.v_ = v_ * c;
  if (order_ >= 1) out.g_ = g_ * c;
  if (order_ >= 2) out.h_ = h_ * c;
  if (order_ >= 3)
    for (int i = 0; i < n_; ++i) out.t_[static_cast<size_t>(i)] = t_[static_cast<size_t>(i)] * c;
  return out;
}

TaylorScalar TaylorScalar::compose(double f0, double f1, double f2, double f3) const {
  TaylorScalar out(n_, order_);
  out.v_ = f0;
  if (order_ >= 1) out.g_ = f1 * g_;
  if (order_ >= 2) out.h_ = f2 * (g_ * g_.transpose()) + f1 * h_;
  if (order_ >= 3) {
    for (int i = 0; i < n_; ++i) {
      MatC& ti = out.t_[static_cast<size_t>(i)];
      ti = f3 * g_[i] * (g_ * g_.transpose()) + f1 * t_[static_cast<size_t>(i)];
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          ti(j, k) += f2 * (h_(i, j) * g_[k] + h_(i, k) * g_[j] + h_(j, k) * g_[i]);
    }
  }
  return out;
}

TaylorScalar TaylorScalar::reciprocal() const {
  if (std::abs(v_) < 1e-300) throw NonSmoothPoint("division by zero in field evaluation");
  double r = 1.0 / v_;
  return compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

TaylorScalar TaylorScalar::pow_int(int k) const {
  if (k == 0) return constant(n_, order_, 1.0);
  if (k < 0) return pow_int(-k).reciprocal();
  TaylorScalar acc = *this;
  for (int i = 1; i < k; ++i) acc = acc * *this;
  return acc;
}

TaylorScalar TaylorScalar::apply(Func f) const {
  double u = v_;
  switch (f) {
    case Func::Sin: return compose(std::sin(u), std::cos(u), -std::sin(u), -std::cos(u));
    case Func::Cos: return compose(std::cos(u), -std::sin(u), -std::cos(u), std::sin(u));
    case Func::Exp: {
      double e = std::exp(u);
      return compose(e, e, e, e);
    }
    case Func::Log: {
      if (u <= 0.0) throw NonSmoothPoint("log of a non-positive value");
      double r = 1.0 / u;
      return compose(std::log(u), r, -r * r, 2.0 * r * r * r);
    }
    case Func::Sqrt: {
      if (u <= 0.0) throw NonSmoothPoint("sqrt of a non-positive value");
      double s = std::sqrt(u);
      return compose(s, 0.5 / s, -0.25 / (s * u), 0.375 / (s * u * u));
    }
    case Func::Atan: {
      double d = 1.0 + u * u;
      return compose(std::atan(u), 1.0 / d, -2.0 * u / (d * d),
                     (6.0 * u * u - 2.0) / (d * d * d));
    }
  }
  throw Error("unknown function");
}

TaylorScalar taylor_eval(const Tape& tape, const Vec& x, int order) {
  const int n = static_cast<int>(x.size());
  if (n > kMaxDim) throw Error("chart dimension exceeds supported maximum");
  thread_local std::vector<TaylorScalar> stack;
  stack.clear();
  for (const TapeOp& op : tape.ops()) {
    switch (op.k) {
      case TapeOp::K::Const:
        stack.push_back(TaylorScalar::constant(n, order, op.imm));
        break;
      case TapeOp::K::Var:
        stack.push_back(TaylorScalar::variable(n, order, op.var, x[op.var]));
        break;
      case TapeOp::K::Add: {
        TaylorScalar b = stack.back();
        stack.pop_back();
        stack.back() = stack.back() + b;
        break;
      }
      case TapeOp::K::Sub: {
        TaylorScalar b = stack.back();
        stack.pop_back();
        stack.back() = stack.back() - b;
        break;
      }
      case TapeOp::K::Mul: {
        TaylorScalar b = stack.back();
        stack.pop_back();
        stack.back() = stack.back() * b;
        break;
      }
      case TapeOp::K::Div: {
        TaylorScalar b = stack.back();
        stack.pop_back();
        stack.back() = stack.back() / b;
        break;
      }
      case TapeOp::K::Neg:
        stack.back() = -stack.back();
        break;
      case TapeOp::K::PowInt:
        stack.back() = stack.back().pow_int(op.exponent);
        break;
      case TapeOp::K::Call:
        stack.back() = stack.back().apply(op.func);
        break;
    }
  }
  if (stack.size() != 1) throw Error("malformed tape");
  return stack[0];
}

}  // namespace symjet
