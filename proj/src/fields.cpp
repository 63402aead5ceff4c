#include "symjet/fields.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

namespace symjet {

// ---------------------------------------------------------------------------
// Domain

bool Domain::contains(const Vec& x, double margin) const {
  if (x.size() != n) return false;
  if (kind == Kind::Ball) return x.norm() <= radius - margin;
  for (int i = 0; i < n; ++i)
    if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
  return true;
}

Vec Domain::sample(std::mt19937& rng, double shrink) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if (kind == Kind::Ball) {
    for (;;) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = u(rng);
      if (x.norm() <= 1.0) return x * (radius * shrink);
    }
  }
  Vec x(n);
  for (int i = 0; i < n; ++i) {
    double c = 0.5 * (lo[i] + hi[i]);
    double r = 0.5 * (hi[i] - lo[i]) * shrink;
    x[i] = c + u(rng) * r;
  }
  return x;
}

Domain Domain::ball(int n, double radius) {
  Domain d;
  d.kind = Kind::Ball;
  d.n = n;
  d.radius = radius;
  return d;
}

Domain Domain::box(const Vec& lo, const Vec& hi) {
  Domain d;
  d.kind = Kind::Box;
  d.n = static_cast<int>(lo.size());
  d.lo = lo;
  d.hi = hi;
  return d;
}

// ---------------------------------------------------------------------------
// VectorField / ExprMap / TensorField

VectorField::VectorField(std::vector<Expr> comps, int n) : n_(n), exprs_(std::move(comps)) {
  tapes_.reserve(exprs_.size());
  for (const Expr& e : exprs_) tapes_.emplace_back(e);
}

VectorField VectorField::parse(const std::vector<std::string>& texts, int n) {
  std::vector<Expr> comps;
  comps.reserve(texts.size());
  for (const std::string& t : texts) comps.push_back(parse_expr(t, n));
  return VectorField(std::move(comps), n);
}

VectorField VectorField::constant(const Vec& v) {
  std::vector<Expr> comps;
  for (int i = 0; i < v.size(); ++i) {
    std::ostringstream s;
    s.precision(17);
    s << v[i];
    comps.push_back(parse_expr(s.str(), static_cast<int>(v.size())));
  }
  return VectorField(std::move(comps), static_cast<int>(v.size()));
}

Vec VectorField::value(const Vec& x) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) out[i] = tapes_[static_cast<size_t>(i)].eval(x.data());
  return out;
}

Mat VectorField::jacobian(const Vec& x) const {
  Mat out(n_, n_);
  for (int i = 0; i < n_; ++i)
    out.row(i) = taylor_eval(tapes_[static_cast<size_t>(i)], x, 1).gradient().transpose();
  return out;
}

ExprMap::ExprMap(std::vector<Expr> comps, int n) : n_(n), exprs_(std::move(comps)) {
  for (const Expr& e : exprs_) tapes_.emplace_back(e);
}

ExprMap ExprMap::parse(const std::vector<std::string>& texts, int n) {
  std::vector<Expr> comps;
  for (const std::string& t : texts) comps.push_back(parse_expr(t, n));
  return ExprMap(std::move(comps), n);
}

Vec ExprMap::value(const Vec& x) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) out[i] = tapes_[static_cast<size_t>(i)].eval(x.data());
  return out;
}

Mat ExprMap::jacobian(const Vec& x) const {
  Mat out(n_, n_);
  for (int i = 0; i < n_; ++i)
    out.row(i) = taylor_eval(tapes_[static_cast<size_t>(i)], x, 1).gradient().transpose();
  return out;
}

Bilin ExprMap::second(const Vec& x) const {
  Bilin out(n_);
  for (int k = 0; k < n_; ++k) out.comp(k) = taylor_eval(tapes_[static_cast<size_t>(k)], x, 2).hessian();
  return out;
}

Trilin ExprMap::third(const Vec& x) const {
  Trilin out(n_);
  for (int k = 0; k < n_; ++k) {
    TaylorScalar t = taylor_eval(tapes_[static_cast<size_t>(k)], x, 3);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int l = 0; l < n_; ++l) out.at(k, i, j, l) = t.third(i, j, l);
  }
  return out;
}

TensorField::TensorField(int n, int rc, int ck, std::vector<Expr> comps)
    : n_(n), rc_(rc), ck_(ck), exprs_(std::move(comps)) {
  for (const Expr& e : exprs_) tapes_.emplace_back(e);
}

TensorField TensorField::parse(int n, int rc, int ck, const std::vector<std::string>& comps) {
  std::vector<Expr> es;
  for (const std::string& t : comps) es.push_back(parse_expr(t, n));
  return TensorField(n, rc, ck, std::move(es));
}

TensorValue TensorField::value(const Vec& x) const {
  TensorValue out(n_, rc_, ck_);
  for (size_t i = 0; i < tapes_.size(); ++i) out.raw()[i] = tapes_[i].eval(x.data());
  return out;
}

TensorValue TensorField::dirderiv(const Vec& x, const Vec& d) const {
  TensorValue out(n_, rc_, ck_);
  for (size_t i = 0; i < tapes_.size(); ++i)
    out.raw()[i] = taylor_eval(tapes_[i], x, 1).gradient().dot(d);
  return out;
}

// ---------------------------------------------------------------------------
// Gamma providers

namespace {

class ChristoffelExprProvider final : public GammaProvider {
public:
  ChristoffelExprProvider(int n, std::vector<std::vector<std::vector<Expr>>> comps)
      : n_(n), exprs_(std::move(comps)) {
    tapes_.resize(static_cast<size_t>(n_));
    for (int k = 0; k < n_; ++k) {
      tapes_[static_cast<size_t>(k)].resize(static_cast<size_t>(n_));
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          tapes_[static_cast<size_t>(k)][static_cast<size_t>(i)].emplace_back(
              exprs_[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
  }

  int dim() const override { return n_; }
  int max_order() const override { return 2; }

  GammaJet jet(const Vec& x, int order) const override {
    GammaJet out;
    out.n = n_;
    out.order = order;
    out.G = Bilin(n_);
    if (order >= 1) out.dG = Trilin(n_);
    if (order >= 2) out.d2G = Quadlin(n_);
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          const Tape& tape = tapes_[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)];
          if (order == 0) {
            out.G.at(k, i, j) = tape.eval(x.data());
            continue;
          }
          TaylorScalar t = taylor_eval(tape, x, order);
          out.G.at(k, i, j) = t.value();
          for (int l = 0; l < n_; ++l) {
            out.dG.at(k, i, j, l) = t.grad(l);
            if (order >= 2)
              for (int m = 0; m < n_; ++m) out.d2G.at(k, i, j, l, m) = t.hess(l, m);
          }
        }
    return out;
  }

private:
  int n_;
  std::vector<std::vector<std::vector<Expr>>> exprs_;
  std::vector<std::vector<std::vector<Tape>>> tapes_;
};

// Levi-Civita coefficients of an expression-backed metric, evaluated through
// exact Taylor arithmetic (metric queried one order above the request).
class MetricExprProvider final : public GammaProvider {
public:
  MetricExprProvider(int n, std::vector<std::vector<Expr>> g) : n_(n), exprs_(std::move(g)) {
    tapes_.resize(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        tapes_[static_cast<size_t>(i)].emplace_back(exprs_[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  }

  int dim() const override { return n_; }
  int max_order() const override { return 2; }

  GammaJet jet(const Vec& x, int order) const override {
    if (order == 0) return jet_order0(x);
    const int gorder = order + 1;
    std::vector<TaylorScalar> g(static_cast<size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        TaylorScalar t = taylor_eval(tape(i, j), x, gorder);
        g[idx(i, j)] = t;
        g[idx(j, i)] = t;
      }

    // Inverse metric to order `order` via the geometric series around the
    // value part; the correction term has no constant part, so the series
    // terminates at the carried order.
    Mat G0(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) G0(i, j) = g[idx(i, j)].value();
    Eigen::FullPivLU<Mat> lu(G0);
    if (!lu.isInvertible()) throw DegenerateMetric("metric is singular at the query point");
    Mat inv0 = lu.inverse();

    std::vector<TaylorScalar> h = constmat(inv0, order);
    if (order >= 1) {
      std::vector<TaylorScalar> delta(static_cast<size_t>(n_ * n_));
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          delta[idx(i, j)] = g[idx(i, j)].truncated(order) + (-G0(i, j));
      std::vector<TaylorScalar> E = lmul(inv0, delta, order);
      std::vector<TaylorScalar> term = constmat(inv0, order);
      for (int p = 1; p <= order; ++p) {
        term = tmul(E, term, order);
        double sign = (p % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i < n_ * n_; ++i)
          h[static_cast<size_t>(i)] =
              h[static_cast<size_t>(i)] + term[static_cast<size_t>(i)] * sign;
      }
    }

    GammaJet out;
    out.n = n_;
    out.order = order;
    out.G = Bilin(n_);
    if (order >= 1) out.dG = Trilin(n_);
    if (order >= 2) out.d2G = Quadlin(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        for (int k = 0; k < n_; ++k) {
          TaylorScalar acc(n_, order);
          for (int l = 0; l < n_; ++l) {
            TaylorScalar term3 = g[idx(j, l)].derivative(i) + g[idx(i, l)].derivative(j) -
                                 g[idx(i, j)].derivative(l);
            acc = acc + h[idx(k, l)] * term3;
          }
          acc = acc * 0.5;
          fill(out, k, i, j, acc, order);
          if (i != j) fill(out, k, j, i, acc, order);
        }
      }
    return out;
  }

private:
  // Order-0 path on flat arrays; the value of Γ needs only g and ∂g.
  GammaJet jet_order0(const Vec& x) const {
    double val[kMaxDim][kMaxDim];
    double grad[kMaxDim][kMaxDim][kMaxDim];  // grad[l][i][j] = ∂_l g_ij
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        TaylorScalar t = taylor_eval(tape(i, j), x, 1);
        val[i][j] = val[j][i] = t.value();
        for (int l = 0; l < n_; ++l) grad[l][i][j] = grad[l][j][i] = t.grad(l);
      }
    Mat G0(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) G0(i, j) = val[i][j];
    Eigen::FullPivLU<Mat> lu(G0);
    if (!lu.isInvertible()) throw DegenerateMetric("metric is singular at the query point");
    Mat inv0 = lu.inverse();

    GammaJet out;
    out.n = n_;
    out.order = 0;
    out.G = Bilin(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j)
        for (int k = 0; k < n_; ++k) {
          double acc = 0;
          for (int l = 0; l < n_; ++l)
            acc += inv0(k, l) * (grad[i][j][l] + grad[j][i][l] - grad[l][i][j]);
          acc *= 0.5;
          out.G.at(k, i, j) = acc;
          if (i != j) out.G.at(k, j, i) = acc;
        }
    return out;
  }

  const Tape& tape(int i, int j) const {
    return tapes_[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  size_t idx(int i, int j) const { return static_cast<size_t>(i * n_ + j); }

  std::vector<TaylorScalar> constmat(const Mat& m, int order) const {
    std::vector<TaylorScalar> out(static_cast<size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out[idx(i, j)] = TaylorScalar::constant(n_, order, m(i, j));
    return out;
  }
  std::vector<TaylorScalar> lmul(const Mat& m, const std::vector<TaylorScalar>& a, int order) const {
    std::vector<TaylorScalar> out(static_cast<size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        TaylorScalar acc(n_, order);
        for (int l = 0; l < n_; ++l) acc = acc + a[idx(l, j)] * m(i, l);
        out[idx(i, j)] = acc;
      }
    return out;
  }
  std::vector<TaylorScalar> tmul(const std::vector<TaylorScalar>& a,
                                 const std::vector<TaylorScalar>& b, int order) const {
    std::vector<TaylorScalar> out(static_cast<size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        TaylorScalar acc(n_, order);
        for (int l = 0; l < n_; ++l) acc = acc + a[idx(i, l)] * b[idx(l, j)];
        out[idx(i, j)] = acc;
      }
    return out;
  }
  void fill(GammaJet& out, int k, int i, int j, const TaylorScalar& t, int order) const {
    out.G.at(k, i, j) = t.value();
    if (order >= 1)
      for (int l = 0; l < n_; ++l) {
        out.dG.at(k, i, j, l) = t.grad(l);
        if (order >= 2)
          for (int m = 0; m < n_; ++m) out.d2G.at(k, i, j, l, m) = t.hess(l, m);
      }
  }

  int n_;
  std::vector<std::vector<Expr>> exprs_;
  std::vector<std::vector<Tape>> tapes_;
};

class SwappedScaledProvider final : public GammaProvider {
public:
  SwappedScaledProvider(std::shared_ptr<const GammaProvider> inner, double scale)
      : inner_(std::move(inner)), scale_(scale) {}

  int dim() const override { return inner_->dim(); }
  int max_order() const override { return inner_->max_order(); }

  GammaJet jet(const Vec& x, int order) const override {
    GammaJet in = inner_->jet(x, order);
    const int n = in.n;
    GammaJet out;
    out.n = n;
    out.order = order;
    out.G = Bilin(n);
    if (order >= 1) out.dG = Trilin(n);
    if (order >= 2) out.d2G = Quadlin(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          out.G.at(k, i, j) = scale_ * in.G.at(k, j, i);
          if (order >= 1)
            for (int l = 0; l < n; ++l) {
              out.dG.at(k, i, j, l) = scale_ * in.dG.at(k, j, i, l);
              if (order >= 2)
                for (int m = 0; m < n; ++m)
                  out.d2G.at(k, i, j, l, m) = scale_ * in.d2G.at(k, j, i, l, m);
            }
        }
    return out;
  }

private:
  std::shared_ptr<const GammaProvider> inner_;
  double scale_;
};

class ClosureProvider final : public GammaProvider {
public:
  ClosureProvider(int n, std::function<Bilin(const Vec&)> fn, double h)
      : n_(n), fn_(std::move(fn)), h_(h) {}

  int dim() const override { return n_; }
  int max_order() const override { return 2; }

  GammaJet jet(const Vec& x, int order) const override {
    GammaJet out;
    out.n = n_;
    out.order = order;
    out.G = fn_(x);
    if (order >= 1) {
      out.dG = Trilin(n_);
      for (int l = 0; l < n_; ++l) {
        Vec xp = x, xm = x;
        xp[l] += h_;
        xm[l] -= h_;
        Bilin d = (fn_(xp) - fn_(xm)) * (1.0 / (2.0 * h_));
        for (int k = 0; k < n_; ++k)
          for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out.dG.at(k, i, j, l) = d.at(k, i, j);
      }
    }
    if (order >= 2) {
      out.d2G = Quadlin(n_);
      for (int l = 0; l < n_; ++l)
        for (int m = 0; m <= l; ++m) {
          Bilin d(n_);
          if (l == m) {
            Vec xp = x, xm = x;
            xp[l] += h_;
            xm[l] -= h_;
            d = (fn_(xp) + fn_(xm) - fn_(x) * 2.0) * (1.0 / (h_ * h_));
          } else {
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[l] += h_; xpp[m] += h_;
            xpm[l] += h_; xpm[m] -= h_;
            xmp[l] -= h_; xmp[m] += h_;
            xmm[l] -= h_; xmm[m] -= h_;
            d = (fn_(xpp) - fn_(xpm) - fn_(xmp) + fn_(xmm)) * (1.0 / (4.0 * h_ * h_));
          }
          for (int k = 0; k < n_; ++k)
            for (int i = 0; i < n_; ++i)
              for (int j = 0; j < n_; ++j) {
                out.d2G.at(k, i, j, l, m) = d.at(k, i, j);
                out.d2G.at(k, i, j, m, l) = d.at(k, i, j);
              }
        }
    }
    return out;
  }

private:
  int n_;
  std::function<Bilin(const Vec&)> fn_;
  double h_;
};

}  // namespace

std::shared_ptr<const GammaProvider> make_christoffel_provider(
    int n, std::vector<std::vector<std::vector<Expr>>> comps) {
  return std::make_shared<ChristoffelExprProvider>(n, std::move(comps));
}

std::shared_ptr<const GammaProvider> make_metric_provider(int n,
                                                          std::vector<std::vector<Expr>> g) {
  return std::make_shared<MetricExprProvider>(n, std::move(g));
}

std::shared_ptr<const GammaProvider> make_swapped_scaled_provider(
    std::shared_ptr<const GammaProvider> inner, double scale) {
  return std::make_shared<SwappedScaledProvider>(std::move(inner), scale);
}

std::shared_ptr<const GammaProvider> make_closure_provider(int n,
                                                           std::function<Bilin(const Vec&)> fn,
                                                           double h) {
  return std::make_shared<ClosureProvider>(n, std::move(fn), h);
}

// ---------------------------------------------------------------------------
// ManifoldSpec

std::shared_ptr<const GammaProvider> ManifoldSpec::connection_provider() const {
  switch (kind) {
    case ManifoldKind::Metric:
      return make_metric_provider(n, metric);
    case ManifoldKind::Christoffel:
      return make_christoffel_provider(n, gamma);
    case ManifoldKind::SymmetryJet:
      // Stored coefficients are Γs(v, d); the connection is Γ(d, v) = -1/2 Γs(v, d).
      return make_swapped_scaled_provider(make_christoffel_provider(n, gamma), -0.5);
  }
  throw Error("unknown manifold kind");
}

Mat ManifoldSpec::metric_value(const Vec& x) const {
  if (!has_metric()) throw Error("manifold '" + name + "' has no metric");
  Mat g(n, n);
  std::vector<double> xv(x.data(), x.data() + x.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = metric[static_cast<size_t>(i)][static_cast<size_t>(j)].eval(xv);
  return g;
}

TensorField ManifoldSpec::metric_field() const {
  if (!has_metric()) throw Error("manifold '" + name + "' has no metric");
  std::vector<Expr> comps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) comps.push_back(metric[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  return TensorField(n, 0, 2, std::move(comps));
}

// ---------------------------------------------------------------------------
// Restricted-TOML manifold files

namespace {

using TomlValue = std::variant<double, std::string, std::vector<double>>;
using TomlTable = std::map<std::string, TomlValue>;

struct TomlDoc {
  std::map<std::string, TomlTable> tables;
};

struct TomlLexer {
  explicit TomlLexer(const std::string& s) : s(s) {}
  const std::string& s;
  size_t pos = 0;

  void skip_space() {
    for (;;) {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos < s.size() && s[pos] == '#') {
        while (pos < s.size() && s[pos] != '\n') ++pos;
        continue;
      }
      return;
    }
  }
  bool eof() {
    skip_space();
    return pos >= s.size();
  }
  char peek() {
    skip_space();
    return s[pos];
  }
  void expect(char c) {
    skip_space();
    if (pos >= s.size() || s[pos] != c)
      throw ValidationError(std::string("expected '") + c + "' in manifold file");
    ++pos;
  }
  std::string ident() {
    skip_space();
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (start == pos) throw ValidationError("expected identifier in manifold file");
    return s.substr(start, pos - start);
  }
  std::string string_lit() {
    expect('"');
    size_t start = pos;
    while (pos < s.size() && s[pos] != '"') ++pos;
    if (pos >= s.size()) throw ValidationError("unterminated string in manifold file");
    std::string out = s.substr(start, pos - start);
    ++pos;
    return out;
  }
  double number() {
    skip_space();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ValidationError("expected number in manifold file");
    pos += static_cast<size_t>(end - begin);
    return v;
  }
  TomlValue value() {
    skip_space();
    if (pos >= s.size()) throw ValidationError("expected value in manifold file");
    char c = s[pos];
    if (c == '"') return string_lit();
    if (c == '[') {
      ++pos;
      std::vector<double> arr;
      skip_space();
      if (pos < s.size() && s[pos] == ']') {
        ++pos;
        return arr;
      }
      for (;;) {
        arr.push_back(number());
        skip_space();
        if (pos < s.size() && s[pos] == ',') {
          ++pos;
          continue;
        }
        expect(']');
        return arr;
      }
    }
    return number();
  }
};

TomlDoc parse_toml_subset(const std::string& text) {
  TomlDoc doc;
  TomlLexer lex(text);
  std::string section;
  while (!lex.eof()) {
    if (lex.peek() == '[') {
      lex.expect('[');
      section = lex.ident();
      lex.expect(']');
      doc.tables[section];  // ensure present
      continue;
    }
    std::string key = lex.ident();
    lex.expect('=');
    if (section.empty()) throw ValidationError("key '" + key + "' outside any table");
    doc.tables[section][key] = lex.value();
  }
  return doc;
}

double get_number(const TomlTable& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) throw ValidationError("missing key '" + key + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw ValidationError("key '" + key + "' must be a number");
}

std::string get_string(const TomlTable& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) throw ValidationError("missing key '" + key + "'");
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  throw ValidationError("key '" + key + "' must be a string");
}

}  // namespace

ManifoldSpec parse_manifold(const std::string& text) {
  TomlDoc doc = parse_toml_subset(text);
  if (!doc.tables.count("manifold")) throw ValidationError("missing [manifold] table");
  const TomlTable& man = doc.tables["manifold"];

  ManifoldSpec spec;
  spec.name = man.count("name") ? get_string(man, "name") : "manifold";
  double dim = get_number(man, "dim");
  spec.n = static_cast<int>(dim);
  if (spec.n < 1 || spec.n > kMaxDim || spec.n != dim)
    throw ValidationError("dim must be an integer in [1, " + std::to_string(kMaxDim) + "]");

  std::string kind = get_string(man, "kind");
  if (kind == "metric")
    spec.kind = ManifoldKind::Metric;
  else if (kind == "christoffel")
    spec.kind = ManifoldKind::Christoffel;
  else if (kind == "symmetry_jet")
    spec.kind = ManifoldKind::SymmetryJet;
  else
    throw ValidationError("kind must be metric, christoffel, or symmetry_jet");

  if (man.count("normal_radius")) spec.normal_radius = get_number(man, "normal_radius");
  if (man.count("signature")) spec.riemannian = get_string(man, "signature") == "riemannian";

  if (!doc.tables.count("domain")) throw ValidationError("missing [domain] table");
  const TomlTable& dom = doc.tables["domain"];
  std::string dtype = get_string(dom, "type");
  if (dtype == "ball") {
    double r = get_number(dom, "radius");
    if (r <= 0) throw ValidationError("domain radius must be positive");
    spec.domain = Domain::ball(spec.n, r);
  } else if (dtype == "box") {
    auto get_arr = [&](const std::string& key) {
      auto it = dom.find(key);
      if (it == dom.end()) throw ValidationError("missing key '" + key + "'");
      const auto* a = std::get_if<std::vector<double>>(&it->second);
      if (!a || static_cast<int>(a->size()) != spec.n)
        throw ValidationError("'" + key + "' must be an array of length dim");
      Vec v(spec.n);
      for (int i = 0; i < spec.n; ++i) v[i] = (*a)[static_cast<size_t>(i)];
      return v;
    };
    Vec lo = get_arr("lo"), hi = get_arr("hi");
    for (int i = 0; i < spec.n; ++i)
      if (!(lo[i] < hi[i])) throw ValidationError("domain box is empty");
    spec.domain = Domain::box(lo, hi);
  } else {
    throw ValidationError("domain type must be ball or box");
  }

  if (!doc.tables.count("fields")) throw ValidationError("missing [fields] table");
  const TomlTable& fields = doc.tables["fields"];

  auto parse_field = [&](const std::string& key) {
    std::string text = get_string(fields, key);
    try {
      return parse_expr(text, spec.n);
    } catch (const SyntaxError& e) {
      throw ValidationError("field '" + key + "': " + e.what());
    }
  };

  if (spec.kind == ManifoldKind::Metric) {
    spec.metric.assign(static_cast<size_t>(spec.n), std::vector<Expr>(static_cast<size_t>(spec.n)));
    std::vector<std::string> missing, asymmetric;
    for (int i = 0; i < spec.n; ++i)
      for (int j = i; j < spec.n; ++j) {
        std::string kij = "g" + std::to_string(i + 1) + std::to_string(j + 1);
        std::string kji = "g" + std::to_string(j + 1) + std::to_string(i + 1);
        bool has_ij = fields.count(kij), has_ji = fields.count(kji);
        if (!has_ij && !has_ji) {
          missing.push_back(kij);
          continue;
        }
        Expr e = parse_field(has_ij ? kij : kji);
        if (i != j && has_ij && has_ji) {
          Expr other = parse_field(kji);
          if (!e.structurally_equal(other)) asymmetric.push_back(kij + "/" + kji);
        }
        spec.metric[static_cast<size_t>(i)][static_cast<size_t>(j)] = e;
        spec.metric[static_cast<size_t>(j)][static_cast<size_t>(i)] = e;
      }
    if (!missing.empty()) {
      std::string msg = "missing metric components:";
      for (const auto& k : missing) msg += " " + k;
      throw ValidationError(msg);
    }
    if (!asymmetric.empty()) {
      std::string msg = "asymmetric metric components:";
      for (const auto& k : asymmetric) msg += " " + k;
      throw ValidationError(msg);
    }
  } else {
    const char prefix = spec.kind == ManifoldKind::Christoffel ? 'G' : 'S';
    Expr zero = parse_expr("0", spec.n);
    spec.gamma.assign(
        static_cast<size_t>(spec.n),
        std::vector<std::vector<Expr>>(static_cast<size_t>(spec.n),
                                       std::vector<Expr>(static_cast<size_t>(spec.n), zero)));
    for (int k = 0; k < spec.n; ++k)
      for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.n; ++j) {
          std::string key = std::string(1, prefix) + std::to_string(k + 1) + "_" +
                            std::to_string(i + 1) + std::to_string(j + 1);
          if (fields.count(key))
            spec.gamma[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)] =
                parse_field(key);
        }
  }

  // Reject field keys that do not belong to the declared kind.
  for (const auto& [key, value] : fields) {
    (void)value;
    char c = key.empty() ? '?' : key[0];
    char want = spec.kind == ManifoldKind::Metric        ? 'g'
                : spec.kind == ManifoldKind::Christoffel ? 'G'
                                                         : 'S';
    if (c != want)
      throw ValidationError("field '" + key + "' does not match manifold kind '" + kind + "'");
  }

  // Light nondegeneracy probe for metric specs.
  if (spec.kind == ManifoldKind::Metric) {
    std::mt19937 rng(12345);
    for (int t = 0; t < 5; ++t) {
      Vec x = spec.domain.sample(rng);
      Mat g = spec.metric_value(x);
      double det = g.determinant();
      if (std::abs(det) < 1e-12) throw ValidationError("metric is degenerate inside the domain");
      if (spec.riemannian) {
        Eigen::SelfAdjointEigenSolver<Mat> es(g);
        if (es.eigenvalues().minCoeff() <= 0)
          throw ValidationError("metric is not positive definite inside the domain");
      }
    }
  }

  return spec;
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

ManifoldSpec christoffel_spec(const std::string& name, int n, const Domain& dom,
                              const std::vector<std::vector<std::vector<std::string>>>& comps,
                              double normal_radius) {
  ManifoldSpec spec;
  spec.name = name;
  spec.n = n;
  spec.kind = ManifoldKind::Christoffel;
  spec.domain = dom;
  spec.normal_radius = normal_radius;
  spec.gamma.assign(static_cast<size_t>(n),
                    std::vector<std::vector<Expr>>(static_cast<size_t>(n),
                                                   std::vector<Expr>(static_cast<size_t>(n))));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        spec.gamma[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)] =
            parse_expr(comps[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)], n);
  return spec;
}

ManifoldSpec conformal_metric_spec(const std::string& name, const std::string& denom) {
  ManifoldSpec spec;
  spec.name = name;
  spec.n = 2;
  spec.kind = ManifoldKind::Metric;
  spec.domain = Domain::ball(2, 0.9);
  spec.normal_radius = 0.5;
  std::string f = "4/(" + denom + ")^2";
  Expr diag = parse_expr(f, 2);
  Expr zero = parse_expr("0", 2);
  spec.metric = {{diag, zero}, {zero, diag}};
  return spec;
}

// Random degree-2 polynomial in n variables with coefficients in (-scale, scale).
std::string random_poly(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::ostringstream s;
  s << fmt(u(rng));
  for (int i = 0; i < n; ++i) s << " + " << fmt(u(rng)) << "*x" << (i + 1);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      s << " + " << fmt(u(rng)) << "*x" << (i + 1) << "*x" << (j + 1);
  return s.str();
}

ManifoldSpec poly_random_spec(const std::string& name, int n, unsigned seed, bool torsion) {
  std::mt19937 rng(seed);
  std::vector<std::vector<std::vector<std::string>>> comps(
      static_cast<size_t>(n),
      std::vector<std::vector<std::string>>(static_cast<size_t>(n),
                                            std::vector<std::string>(static_cast<size_t>(n))));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        std::string p = random_poly(rng, n, 0.25);
        comps[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)] = p;
        comps[static_cast<size_t>(k)][static_cast<size_t>(j)][static_cast<size_t>(i)] = p;
      }
  if (torsion) {
    // Add an antisymmetric polynomial part.
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          std::string p = random_poly(rng, n, 0.2);
          auto& cij = comps[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)];
          auto& cji = comps[static_cast<size_t>(k)][static_cast<size_t>(j)][static_cast<size_t>(i)];
          cij = cij + " + (" + p + ")";
          cji = cji + " - (" + p + ")";
        }
  }
  Vec lo = Vec::Constant(n, -1.0), hi = Vec::Constant(n, 1.0);
  return christoffel_spec(name, n, Domain::box(lo, hi), comps, 0.5);
}

ManifoldSpec flat_torsion_spec(const std::string& name, double c) {
  std::vector<std::vector<std::vector<std::string>>> comps(
      2, std::vector<std::vector<std::string>>(2, std::vector<std::string>(2, "0")));
  comps[0][0][1] = fmt(c);
  comps[0][1][0] = fmt(-c);
  return christoffel_spec(name, 2, Domain::ball(2, 10.0), comps, 5.0);
}

bool parse_builtin_call(const std::string& name, const std::string& prefix, unsigned* seed) {
  if (name == prefix) {
    *seed = 42;
    return true;
  }
  if (name.size() > prefix.size() + 2 && name.compare(0, prefix.size(), prefix) == 0 &&
      name[prefix.size()] == '(' && name.back() == ')') {
    std::string inner = name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
    try {
      *seed = static_cast<unsigned>(std::stoul(inner));
      return true;
    } catch (...) {
      return false;
    }
  }
  return false;
}

}  // namespace

bool is_builtin_manifold(const std::string& name) {
  unsigned seed;
  if (name.rfind("euclidean_", 0) == 0) return true;
  if (name == "sphere_stereo" || name == "poincare_disk" || name == "flat_torsion_c") return true;
  if (name.rfind("flat_torsion_", 0) == 0) return true;
  if (parse_builtin_call(name, "poly_random", &seed)) return true;
  if (parse_builtin_call(name, "poly_random3", &seed)) return true;
  if (parse_builtin_call(name, "poly_random_tors", &seed)) return true;
  return false;
}

ManifoldSpec load_manifold(const std::string& name_or_path) {
  const std::string& name = name_or_path;
  if (name.rfind("euclidean_", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(name.substr(10));
    } catch (...) {
      throw ValidationError("bad euclidean dimension in '" + name + "'");
    }
    if (n < 1 || n > kMaxDim) throw ValidationError("bad euclidean dimension in '" + name + "'");
    std::vector<std::vector<std::vector<std::string>>> comps(
        static_cast<size_t>(n),
        std::vector<std::vector<std::string>>(static_cast<size_t>(n),
                                              std::vector<std::string>(static_cast<size_t>(n), "0")));
    return christoffel_spec(name, n, Domain::ball(n, 10.0), comps, 5.0);
  }
  if (name == "sphere_stereo") return conformal_metric_spec(name, "1 + x1^2 + x2^2");
  if (name == "poincare_disk") return conformal_metric_spec(name, "1 - x1^2 - x2^2");
  if (name == "flat_torsion_c") return flat_torsion_spec(name, 0.5);
  if (name.rfind("flat_torsion_", 0) == 0) {
    try {
      double c = std::stod(name.substr(13));
      return flat_torsion_spec(name, c);
    } catch (const std::exception&) {
      throw ValidationError("bad torsion constant in '" + name + "'");
    }
  }
  unsigned seed;
  if (parse_builtin_call(name, "poly_random_tors", &seed))
    return poly_random_spec(name, 2, seed, /*torsion=*/true);
  if (parse_builtin_call(name, "poly_random3", &seed))
    return poly_random_spec(name, 3, seed, /*torsion=*/false);
  if (parse_builtin_call(name, "poly_random", &seed))
    return poly_random_spec(name, 2, seed, /*torsion=*/false);

  std::ifstream in(name);
  if (!in) throw IoError("cannot open manifold spec '" + name + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifold(buf.str());
}

// ---------------------------------------------------------------------------
// Finite-difference jet oracle

FdJet fd_jet_oracle(const std::function<Vec(const Vec&)>& map, const Vec& x, int order, double h,
                    bool richardson, const Domain* dom) {
  if (h <= 0) throw Error("fd_jet_oracle requires h > 0");
  const int n = static_cast<int>(x.size());

  auto probe = [&](const Vec& p) {
    if (dom && !dom->contains(p)) throw StencilOutOfDomain("finite-difference stencil left the domain");
    return map(p);
  };

  auto single = [&](double step) {
    FdJet out;
    out.n = n;
    out.order = order;
    out.J = Mat(n, n);
    std::vector<Vec> fp(static_cast<size_t>(n)), fm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      fp[static_cast<size_t>(i)] = probe(xp);
      fm[static_cast<size_t>(i)] = probe(xm);
      out.J.col(i) = (fp[static_cast<size_t>(i)] - fm[static_cast<size_t>(i)]) / (2.0 * step);
    }
    if (order >= 2) {
      out.H = Bilin(n);
      Vec f0 = probe(x);
      for (int i = 0; i < n; ++i) {
        Vec dii = (fp[static_cast<size_t>(i)] + fm[static_cast<size_t>(i)] - 2.0 * f0) / (step * step);
        for (int k = 0; k < n; ++k) out.H.at(k, i, i) = dii[k];
      }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          Vec xpp = x, xpm = x, xmp = x, xmm = x;
          xpp[i] += step; xpp[j] += step;
          xpm[i] += step; xpm[j] -= step;
          xmp[i] -= step; xmp[j] += step;
          xmm[i] -= step; xmm[j] -= step;
          Vec dij = (probe(xpp) - probe(xpm) - probe(xmp) + probe(xmm)) / (4.0 * step * step);
          for (int k = 0; k < n; ++k) {
            out.H.at(k, i, j) = dij[k];
            out.H.at(k, j, i) = dij[k];
          }
        }
    }
    return out;
  };

  FdJet a = single(h);
  if (!richardson) return a;
  FdJet b = single(h / 2.0);
  FdJet out = b;
  out.J = (4.0 * b.J - a.J) / 3.0;
  if (order >= 2) out.H = (b.H * 4.0 - a.H) * (1.0 / 3.0);
  return out;
}

}  // namespace symjet
