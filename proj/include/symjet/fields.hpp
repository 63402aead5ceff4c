#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "symjet/expr.hpp"
#include "symjet/linalg.hpp"
#include "symjet/taylor.hpp"
#include "symjet/tensor.hpp"

namespace symjet {

struct Domain {
  enum class Kind { Ball, Box };
  Kind kind = Kind::Ball;
  int n = 0;
  double radius = 1.0;  // Ball
  Vec lo, hi;           // Box

  bool contains(const Vec& x, double margin = 0.0) const;
  // Uniform sample in the domain shrunk toward its center by `shrink`.
  Vec sample(std::mt19937& rng, double shrink = 0.7) const;
  static Domain ball(int n, double radius);
  static Domain box(const Vec& lo, const Vec& hi);
};

// Expression-backed scalar field with exact truncated-Taylor queries.
class ScalarField {
public:
  ScalarField() = default;
  ScalarField(Expr e, int n) : n_(n), expr_(std::move(e)), tape_(expr_) {}
  static ScalarField parse(const std::string& text, int n) {
    return ScalarField(parse_expr(text, n), n);
  }

  int dim() const { return n_; }
  const Expr& expr() const { return expr_; }
  double operator()(const Vec& x) const {
    return tape_.eval(x.data());
  }
  TaylorScalar taylor(const Vec& x, int order) const { return taylor_eval(tape_, x, order); }

private:
  int n_ = 0;
  Expr expr_;
  Tape tape_;
};

// Expression-backed vector field on the chart.
class VectorField {
public:
  VectorField() = default;
  VectorField(std::vector<Expr> comps, int n);
  static VectorField parse(const std::vector<std::string>& texts, int n);
  static VectorField constant(const Vec& v);

  int dim() const { return n_; }
  Vec value(const Vec& x) const;
  Mat jacobian(const Vec& x) const;

private:
  int n_ = 0;
  std::vector<Expr> exprs_;
  std::vector<Tape> tapes_;
};

// Expression-backed map chart -> chart; used to manufacture holonomic jets.
class ExprMap {
public:
  ExprMap() = default;
  ExprMap(std::vector<Expr> comps, int n);
  static ExprMap parse(const std::vector<std::string>& texts, int n);

  int dim() const { return n_; }
  Vec value(const Vec& x) const;
  Mat jacobian(const Vec& x) const;
  Bilin second(const Vec& x) const;   // D²f(v, d), symmetric
  Trilin third(const Vec& x) const;   // D³f, totally symmetric

private:
  int n_ = 0;
  std::vector<Expr> exprs_;
  std::vector<Tape> tapes_;
};

// Christoffel coefficients and their derivatives at a point.
// Conventions: G(d, v)^k = Γ^k_{ij} d^i v^j,  dG(d, v, e) = ∂_e Γ(d, v),
// d2G(d, v, e, f) = ∂_f ∂_e Γ(d, v).
struct GammaJet {
  int n = 0;
  int order = 0;
  Bilin G;
  Trilin dG;
  Quadlin d2G;
};

// Source of Christoffel data for a chart. Implementations are immutable.
class GammaProvider {
public:
  virtual ~GammaProvider() = default;
  virtual int dim() const = 0;
  virtual int max_order() const = 0;
  virtual GammaJet jet(const Vec& x, int order) const = 0;
  Bilin gamma(const Vec& x) const { return jet(x, 0).G; }
};

std::shared_ptr<const GammaProvider> make_christoffel_provider(
    int n, std::vector<std::vector<std::vector<Expr>>> comps);
std::shared_ptr<const GammaProvider> make_metric_provider(
    int n, std::vector<std::vector<Expr>> g);
// Coefficient view B'(a, b) = scale * B(b, a) of another provider; used for the
// symmetry-jet <-> connection coefficient correspondence (exact, powers of two).
std::shared_ptr<const GammaProvider> make_swapped_scaled_provider(
    std::shared_ptr<const GammaProvider> inner, double scale);
// Closure escape hatch: derivative blocks come from central differences.
std::shared_ptr<const GammaProvider> make_closure_provider(
    int n, std::function<Bilin(const Vec&)> fn, double h);

// Expression-backed tensor field of type (rc <= 1, ck).
class TensorField {
public:
  TensorField() = default;
  TensorField(int n, int rc, int ck, std::vector<Expr> comps);
  static TensorField parse(int n, int rc, int ck, const std::vector<std::string>& comps);

  int dim() const { return n_; }
  int contra_rank() const { return rc_; }
  int cov_rank() const { return ck_; }
  TensorValue value(const Vec& x) const;
  TensorValue dirderiv(const Vec& x, const Vec& d) const;

private:
  int n_ = 0, rc_ = 0, ck_ = 0;
  std::vector<Expr> exprs_;
  std::vector<Tape> tapes_;
};

enum class ManifoldKind { Metric, Christoffel, SymmetryJet };

struct ManifoldSpec {
  std::string name;
  int n = 0;
  ManifoldKind kind = ManifoldKind::Christoffel;
  Domain domain;
  double normal_radius = 0.5;
  bool riemannian = true;  // signature flag for metric validation

  // Exactly one of these is populated, per `kind`.
  std::vector<std::vector<Expr>> metric;                // g_{ij}
  std::vector<std::vector<std::vector<Expr>>> gamma;    // Γ^k_{ij} or Γs^k_{ij}

  // Christoffel provider of the induced affine connection.
  std::shared_ptr<const GammaProvider> connection_provider() const;
  bool has_metric() const { return kind == ManifoldKind::Metric; }
  Mat metric_value(const Vec& x) const;
  TensorField metric_field() const;  // the (0,2) field, for covariant-derivative checks
};

// Parses the restricted-TOML manifold format.
ManifoldSpec parse_manifold(const std::string& text);
// Accepts a builtin name ("euclidean_2", "sphere_stereo", "poincare_disk",
// "flat_torsion_c", "flat_torsion_<c>", "poly_random[(seed)]",
// "poly_random3[(seed)]", "poly_random_tors[(seed)]") or a file path.
ManifoldSpec load_manifold(const std::string& name_or_path);
bool is_builtin_manifold(const std::string& name);

// Central-difference jet of a chart map; error O(h^2), or O(h^4) with
// Richardson extrapolation across steps h and h/2.
struct FdJet {
  int n = 0;
  int order = 1;
  Mat J;
  Bilin H;
};
FdJet fd_jet_oracle(const std::function<Vec(const Vec&)>& map, const Vec& x, int order, double h,
                    bool richardson = false, const Domain* dom = nullptr);

}  // namespace symjet
