#include "symjet/tensor.hpp"

namespace symjet {

namespace {

// Iterates all multi-indices of the given rank.
struct IndexIter {
  IndexIter(int n, int rank) : n_(n), idx_(static_cast<size_t>(rank), 0), done_(rank < 0) {}
  bool done() const { return done_; }
  const std::vector<int>& operator*() const { return idx_; }
  void next() {
    for (int i = static_cast<int>(idx_.size()) - 1; i >= 0; --i) {
      if (++idx_[static_cast<size_t>(i)] < n_) return;
      idx_[static_cast<size_t>(i)] = 0;
    }
    done_ = true;
  }
  int n_;
  std::vector<int> idx_;
  bool done_;
};

}  // namespace

TensorValue TensorValue::out_premul(const Mat& L) const {
  if (rc_ == 0) return *this;
  TensorValue out(n_, rc_, ck_);
  for (IndexIter it(n_, rc_ + ck_); !it.done(); it.next()) {
    std::vector<int> src = *it;
    double s = 0;
    for (int m = 0; m < n_; ++m) {
      src[0] = m;
      s += L((*it)[0], m) * at(src);
    }
    out.at(*it) = s;
  }
  return out;
}

TensorValue TensorValue::cov_compose(int s, const Mat& K) const {
  TensorValue out(n_, rc_, ck_);
  const int slot = rc_ + s;
  for (IndexIter it(n_, rc_ + ck_); !it.done(); it.next()) {
    std::vector<int> src = *it;
    double acc = 0;
    for (int m = 0; m < n_; ++m) {
      src[static_cast<size_t>(slot)] = m;
      acc += at(src) * K(m, (*it)[static_cast<size_t>(slot)]);
    }
    out.at(*it) = acc;
  }
  return out;
}

TensorValue TensorValue::transform(const Mat& L, const Mat& K) const {
  TensorValue out = out_premul(L);
  for (int s = 0; s < ck_; ++s) out = out.cov_compose(s, K);
  return out;
}

TensorValue TensorValue::operator+(const TensorValue& o) const {
  TensorValue out = *this;
  for (size_t i = 0; i < a_.size(); ++i) out.a_[i] += o.a_[i];
  return out;
}

TensorValue TensorValue::operator-(const TensorValue& o) const {
  TensorValue out = *this;
  for (size_t i = 0; i < a_.size(); ++i) out.a_[i] -= o.a_[i];
  return out;
}

TensorValue TensorValue::operator*(double s) const {
  TensorValue out = *this;
  for (double& v : out.a_) v *= s;
  return out;
}

double TensorValue::max_abs() const {
  double m = 0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

Vec TensorValue::apply(const std::vector<Vec>& args) const {
  Vec out = Vec::Zero(rc_ == 1 ? n_ : 1);
  for (IndexIter it(n_, rc_ + ck_); !it.done(); it.next()) {
    double w = at(*it);
    for (int s = 0; s < ck_; ++s) w *= args[static_cast<size_t>(s)][(*it)[static_cast<size_t>(rc_ + s)]];
    out[rc_ == 1 ? (*it)[0] : 0] += w;
  }
  return out;
}

}  // namespace symjet
