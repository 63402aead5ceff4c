#pragma once

#include "symjet/fields.hpp"
#include "symjet/linalg.hpp"

namespace symjet {

// Coordinate elements of the second tangent bundle. Slot semantics: an element
// is d/dt|0 of a path of tangent vectors (γ(t), w(t)); then s1 = w(0) (the
// fiber point read by p), s2 = γ'(0) (the direction read by p*), s12 = w'(0).
// Projections are component reads, never computed.
struct T2Elem {
  Vec base, s1, s2, s12;

  int dim() const { return static_cast<int>(base.size()); }
  static T2Elem make(Vec x, Vec a, Vec b, Vec v) {
    return T2Elem{std::move(x), std::move(a), std::move(b), std::move(v)};
  }
  static T2Elem zero(const Vec& x) {
    int n = static_cast<int>(x.size());
    return {x, Vec::Zero(n), Vec::Zero(n), Vec::Zero(n)};
  }
};

enum class VB2 { p, pstar };

// Default componentwise tolerance for fiber matching. Exact bit equality is
// not required because inputs may come from ODE integration.
inline constexpr double kFiberTol = 1e-12;

T2Elem t2_combine(VB2 st, double a, const T2Elem& e1, double b, const T2Elem& e2,
                  double tol = kFiberTol);
T2Elem t2_scale(VB2 st, double a, const T2Elem& e);
// m_{-1} ∘ m_{-1*}: negates s1 and s2, keeps s12.
T2Elem t2_thick_minus(const T2Elem& e);

T2Elem t2_kappa(const T2Elem& e);

// Affine difference on a fiber of P = p × p*.
Vec t2_pi(const T2Elem& e1, const T2Elem& e2, double tol = kFiberTol);
// Affine translate A_e(V): the parameterization of the P-fiber through e.
T2Elem t2_affine_translate(const T2Elem& e, const Vec& v);

// Inclusions and projections.
T2Elem t2_i(const Vec& x, const Vec& X);                       // (x; X, 0, 0)
T2Elem t2_istar(const Vec& x, const Vec& X);                   // (x; 0, X, 0)
T2Elem t2_ivert(const Vec& x, const Vec& V);                   // (x; 0, 0, V)
T2Elem t2_Ip(const Vec& x, const Vec& X1, const Vec& X2);      // (x; 0, X1, X2)
T2Elem t2_Ipstar(const Vec& x, const Vec& X1, const Vec& X2);  // (x; X1, 0, X2)
T2Elem t2_e(const T2Elem& e);
T2Elem t2_estar(const T2Elem& e);

// Pushforward of a vector field: Y_{*x} X = (x; Y(x), X, DY(x)·X).
T2Elem pushforward(const VectorField& Y, const Vec& x, const Vec& X);

// Lie bracket through the canonical involution: [X, Y]_x = π(Y_*X, κ(X_*Y)).
Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& x);

// Coordinate elements of the third tangent bundle; slots are indexed by the
// nonempty subsets of {1,2,3}.
struct T3Elem {
  Vec base, s1, s2, s3, s12, s13, s23, s123;

  int dim() const { return static_cast<int>(base.size()); }
  static T3Elem zero(const Vec& x) {
    int n = static_cast<int>(x.size());
    Vec z = Vec::Zero(n);
    return {x, z, z, z, z, z, z, z};
  }
};

enum class VB3 { p, pstar, pstarstar };
enum class Invol3 { kappa, kappa_star, kappa_prime };

// Projections onto T²M (component reads).
T2Elem t3_p(const T3Elem& E);           // (base; s1, s2, s12)
T2Elem t3_pstar(const T3Elem& E);       // (base; s1, s3, s13)
T2Elem t3_pstarstar(const T3Elem& E);   // (base; s2, s3, s23)

T3Elem t3_combine(VB3 st, double a, const T3Elem& E1, double b, const T3Elem& E2,
                  double tol = kFiberTol);
T3Elem t3_scale(VB3 st, double a, const T3Elem& E);

// Slot relabeling by the index transpositions (2 3), (1 2), (1 3).
T3Elem t3_involution(const T3Elem& E, Invol3 which);

// Horizontal zero-section inclusions of T²M and the matching projections.
T3Elem t3_i(const T2Elem& z);
T3Elem t3_istar(const T2Elem& z);
T3Elem t3_istarstar(const T2Elem& z);
T3Elem t3_e(const T3Elem& E);
T3Elem t3_estar(const T3Elem& E);
T3Elem t3_estarstar(const T3Elem& E);

// Vertical inclusions.
enum class T3Include {
  I,              // TM ↪ T³M: only s123
  ivert_p,        // i^p_{0_TM}
  ivert_p_diff,   // (i^p_{0_M})_*
  ivert_pstar,    // i^{p*}_{0_*TM}
  Ip,             // 𝓘_p
  Ip_star,        // 𝓘*_p
  Ipstar,         // 𝓘_{p*}
  Ipstar_star,    // 𝓘*_{p*}
  Ipss,           // 𝓘_{p**}
  Ipss_star       // 𝓘*_{p**}
};
T3Elem t3_I(const Vec& x, const Vec& V);
T3Elem t3_include(T3Include kind, const T2Elem& a);
T3Elem t3_include2(T3Include kind, const T2Elem& a, const T2Elem& b, double tol = kFiberTol);

// Affine difference maps.
Vec t3_Pi(const T3Elem& E1, const T3Elem& E2, double tol = kFiberTol);
Vec t3_Pi_single(const T3Elem& E, double tol = kFiberTol);
T3Elem t3_A_P(const T3Elem& E, const Vec& v, int variant, double tol = kFiberTol);

T2Elem t3_Pi_partial(int which, const T3Elem& E1, const T3Elem& E2, double tol = kFiberTol);
T3Elem t3_A_Pi(int which, const T3Elem& E, const T2Elem& u, double tol = kFiberTol);

}  // namespace symjet
