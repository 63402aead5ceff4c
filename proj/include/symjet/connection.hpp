#pragma once

#include <memory>
#include <string>

#include "symjet/fields.hpp"
#include "symjet/jets.hpp"
#include "symjet/linalg.hpp"
#include "symjet/tangent.hpp"
#include "symjet/tensor.hpp"

namespace symjet {

// Affine connection on a chart: Christoffel coefficient field with
// (∇_d v)^k = ∂v^k·d + Γ^k(d, v), Taylor-queryable to order 2.
class ConnectionField {
public:
  ConnectionField() = default;
  ConnectionField(std::shared_ptr<const GammaProvider> prov, Domain dom, std::string name = "");
  static ConnectionField from_manifold(const ManifoldSpec& spec);

  int dim() const { return dom_.n; }
  const Domain& domain() const { return dom_; }
  const std::string& name() const { return name_; }
  const std::shared_ptr<const GammaProvider>& provider() const { return prov_; }

  Bilin gamma(const Vec& x) const;
  GammaJet gamma_jet(const Vec& x, int order) const;

private:
  void check_domain(const Vec& x) const;
  std::shared_ptr<const GammaProvider> prov_;
  Domain dom_;
  std::string name_;
};

// The field x ↦ 𝔰(x): (1,1)-jets over -I with bilinear part Γs, stored with
// the convention Γs(v, d) on (p-slot vector v, direction d).
class SymmetryJetField {
public:
  SymmetryJetField() = default;
  SymmetryJetField(std::shared_ptr<const GammaProvider> prov, Domain dom, std::string name = "");
  static SymmetryJetField from_manifold(const ManifoldSpec& spec);

  int dim() const { return dom_.n; }
  const Domain& domain() const { return dom_; }
  const std::string& name() const { return name_; }
  const std::shared_ptr<const GammaProvider>& provider() const { return prov_; }

  Bilin gamma_s(const Vec& x) const;
  GammaJet gamma_s_jet(const Vec& x, int order) const;

  // 𝔰(x) as a (1,1)-jet.
  Jet11 at(const Vec& x) const;
  // First jet of the section, as a homomorphism of T³M (not a (1,1,1)-jet:
  // its faces differ, but it satisfies the vertical identities).
  Jet111 j1(const Vec& x) const;
  // Holonomic on the sampled point set iff the connection is torsionless.
  Holonomy classify_at(const Vec& x, double tol = kJetTolAlgebraic) const;

private:
  void check_domain(const Vec& x) const;
  std::shared_ptr<const GammaProvider> prov_;
  Domain dom_;
  std::string name_;
};

// The correspondence Γs(v, d) = -2 Γ(d, v); exact in both directions.
SymmetryJetField sjet_from_connection(const ConnectionField& c);
ConnectionField connection_from_sjet(const SymmetryJetField& s);

// The projection T²M → TM defined by a connection: e.s12 + Γ(e.s2, e.s1).
Vec tilde_nabla(const ConnectionField& c, const T2Elem& e);

// ∇_d V at x, and the two jet-level routes it must agree with.
Vec covariant_derivative(const ConnectionField& c, const VectorField& V, const Vec& x,
                         const Vec& d);
struct CovRoutes {
  Vec direct;       // ∂V·d + Γ(d, V)
  Vec via_pi;       // ½ π(V_*d, thick-minus 𝔰·V_*d)
  Vec via_bracket;  // ½ [d-const, V + pushforward of V through 𝔰]
};
CovRoutes covariant_derivative_routes(const SymmetryJetField& s, const VectorField& V,
                                      const Vec& x, const Vec& d);

// Affine extensions: the unique affine (1,1)- and (1,1,1)-jets over ξ.
Jet11 affine_extension(const ConnectionField& c, const Jet1& xi);
Jet111 affine_extension3(const ConnectionField& c, const Jet1& xi);

// Torsion as the holonomy defect of the symmetry jet (any fiber representative).
Vec torsion_from_sjet(const SymmetryJetField& s, const Vec& x, const Vec& X, const Vec& Y);
// Defect form for a general 1-jet: π(S(ξ)·e, κ(S(ξ))·e) with p(e)=Y, p*(e)=X.
Vec torsion_defect(const ConnectionField& c, const Jet1& xi, const Vec& X, const Vec& Y);

// Curvature from the first jet of the symmetry jet (quarter commutator).
Vec curvature_sjet(const SymmetryJetField& s, const Vec& x, const Vec& X, const Vec& Y,
                   const Vec& Z);
// Curvature from the order-3 affine extension of a homothety a·I, a ∉ {0,±1}.
Vec curvature_homothety(const ConnectionField& c, double a, const Vec& x, const Vec& X,
                        const Vec& Y, const Vec& Z, double torsion_tol = 1e-9);

// Order-3 holonomy defects of 𝕊(ξ). The value is the raw top-slot difference;
// hypothesis_met reports whether the stated preconditions held, in which case
// the value equals the corresponding ∇T- / R-preservation defect.
struct DefectResult {
  Vec value;
  bool hypothesis_met = false;
};
DefectResult residual_dT_defect(const ConnectionField& c, const Jet1& xi, const Vec& X,
                                const Vec& Y, const Vec& Z, double tol = 1e-9);
DefectResult residual_R_defect(const ConnectionField& c, const Jet1& xi, const Vec& X,
                               const Vec& Y, const Vec& Z, double tol = 1e-9);

// Classical tensor-calculus oracle. Conventions: T(u,v) = Γ(u,v) - Γ(v,u);
// R(X,Y,Z) = R(X,Y)Z = ∂_XΓ(Y,Z) - ∂_YΓ(X,Z) + Γ(X,Γ(Y,Z)) - Γ(Y,Γ(X,Z));
// dT(d,u,v) = (∇_d T)(u,v); dR(d,X,Y,Z) = (∇_d R)(X,Y)Z.
struct TensorValueSet {
  Bilin T;
  Trilin R;
  Trilin dT;
  Quadlin dR;
};
TensorValueSet classical_tensors(const ConnectionField& c, const Vec& x);

// Covariant derivative on tensor bundles through the symmetry-jet action,
// and the classical formula it must agree with.
TensorValue tensor_covariant_derivative(const SymmetryJetField& s, const TensorField& Q,
                                        const Vec& x, const Vec& d);
TensorValue classical_tensor_derivative(const ConnectionField& c, const TensorField& Q,
                                        const Vec& x, const Vec& d);

// Levi-Civita coefficients at a point, by the classical closed form and by the
// symmetric linear solve, with the uniqueness certificate (operator rank).
struct LeviCivitaResult {
  Bilin gamma;         // closed form
  Bilin gamma_solved;  // from the linear system g(S(d,u),v) + g(u,S(d,v)) = ∂_d g(u,v)
  int rank = 0;
  int expected_rank = 0;
  bool unique = false;
};
LeviCivitaResult levi_civita(const ManifoldSpec& metric_spec, const Vec& x);
// Rank of the pairing operator A ↦ h(A·,·) + h(·,A·) on symmetric A for a
// constant nondegenerate symmetric h.
int levi_civita_operator_rank(const Mat& h);

// Tangent vectors to the 1-jet groupoid at ξ, encoded as (source velocity u,
// target velocity v, linear-part velocity Λ).
struct GrpdTangent {
  Vec u, v;
  Mat Lam;
};
// The involution whose -1 eigenspace cuts out the affine plane D(S(ξ)).
GrpdTangent psi_involution(const SymmetryJetField& s, const Jet1& xi, const GrpdTangent& t);
// Tangent to D(S(ξ)) over source velocity w.
GrpdTangent affine_plane_tangent(const ConnectionField& c, const Jet1& xi, const Vec& w);

// Preservation residuals and the integrability verdict.
double preservation_residual(const Jet1& xi, const TensorValue& Qx, const TensorValue& Qy);
struct IntegrabilityReport {
  double torsion_residual = 0;
  double curvature_residual = 0;
  double kappa_defect = 0;  // coefficient defect of κ(𝕊(ξ)) vs 𝕊(ξ)
  bool integrable = false;
};
IntegrabilityReport integrability_check(const ConnectionField& c, const Jet1& xi,
                                        double tol = 1e-8);

// Derivative of the preservation residual along the affine plane, compared
// with the ∇Q-preservation defect plus the residual-proportional corrections.
struct TangencyCheck {
  TensorValue lhs;  // d/dt of the residual along the lift
  TensorValue rhs;  // ξ(∇_Z Q) defect plus correction terms
  double residual = 0;
};
TangencyCheck preservation_derivative_check(const ConnectionField& c, const Jet1& xi,
                                            const Vec& Z, double fd_h = 1e-5);

// Lie-algebroid connection data: σ^β(X) = (X, 0, Γ_x(X,·)) and the invariant
// plane map φ_σ(ξ, X) = (X, ξX, ξΓ_x(X,·) - Γ_y(ξX, ξ·)).
GrpdTangent algebroid_sigma(const SymmetryJetField& s, const Vec& x, const Vec& X);
GrpdTangent phi_sigma(const SymmetryJetField& s, const Jet1& xi, const Vec& X);

}  // namespace symjet
