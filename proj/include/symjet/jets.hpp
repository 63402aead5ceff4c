#pragma once

#include "symjet/fields.hpp"
#include "symjet/linalg.hpp"
#include "symjet/tangent.hpp"

namespace symjet {

// Default tolerances: algebraic data compares at 1e-12, ODE-produced jets at
// 1e-9. Both are arguments everywhere they matter.
inline constexpr double kJetTolAlgebraic = 1e-12;
inline constexpr double kJetTolOde = 1e-9;

// 1-jet of a local diffeomorphism: an invertible linear map between tangent
// spaces, with source and target chart points.
struct Jet1 {
  Vec x, y;
  Mat L;

  int dim() const { return static_cast<int>(x.size()); }
  static Jet1 identity(const Vec& x) {
    return {x, x, Mat::Identity(x.size(), x.size())};
  }
  static Jet1 minus_identity(const Vec& x) {
    return {x, x, -Mat::Identity(x.size(), x.size())};
  }
};

Jet1 compose(const Jet1& a, const Jet1& b, double tol = kJetTolAlgebraic);
Jet1 inverse(const Jet1& j);
Vec act(const Jet1& j, const Vec& v);

// Homomorphism of T²M. An honest (1,1)-jet acts on the vertical inclusion by
// its p-part; `vert` stores the actual vertical action so elements like
// m_{-1}∘m_{-1*} stay representable, flagged by is_jet().
// Bilinear convention: B(v, d) = value on (p-slot vector v, direction d).
struct Jet11 {
  Vec x, y;
  Mat L1, L2;
  Bilin B;
  Mat vert;

  int dim() const { return static_cast<int>(x.size()); }

  static Jet11 jet(Vec x, Vec y, Mat L1, Mat L2, Bilin B);
  static Jet11 hom(Vec x, Vec y, Mat L1, Mat L2, Bilin B, Mat vert);
  static Jet11 identity(const Vec& x);
  // The homomorphism m_{-1} ∘ m_{-1*}: both linear parts -I but vertical +I.
  static Jet11 thick_minus(const Vec& x);

  bool is_jet(double tol = kJetTolAlgebraic) const {
    return (vert - L1).cwiseAbs().maxCoeff() <= tol;
  }
};

enum class Holonomy { nonholonomic, semiholonomic, holonomic };

T2Elem act(const Jet11& j, const T2Elem& e, double tol = kJetTolAlgebraic);
Jet11 compose(const Jet11& a, const Jet11& b, double tol = kJetTolAlgebraic);
Jet11 inverse(const Jet11& j);
Jet11 jet_kappa(const Jet11& j);
Holonomy classify(const Jet11& j, double tol = kJetTolAlgebraic);
Jet1 bounce(const Jet11& j);
// Bilinear difference of two jets over equal first-order faces.
Bilin jet_difference(const Jet11& a, const Jet11& b, double tol = kJetTolAlgebraic);
// Second-derivative transform of g∘f∘h for f over the identity.
Bilin conjugate_d2(const Jet11& f2, const Jet11& g2, const Jet11& h2,
                   double tol = kJetTolAlgebraic);
// Holonomic 2-jet of an expression map.
Jet11 jet2_of_map(const ExprMap& f, const Vec& x);

// Homomorphism of T³M. The primary data (L1..L3, B12, B13, B23, C) matches a
// (1,1,1)-jet; the extended blocks keep general homomorphisms (first jets of
// symmetry-jet sections and their involutions) in the same representation.
struct Jet111 {
  Vec x, y;
  Mat L1, L2, L3;
  Bilin B12, B13, B23;
  Trilin C;
  // Extended coefficients: actions on the s12/s13/s23/s123 slots and the mixed
  // bilinear blocks pairing (s12, s3), (s13, s2), (s1, s23).
  Mat V12, V13, V23, V123;
  Bilin G12_3, G13_2, G1_23;

  int dim() const { return static_cast<int>(x.size()); }

  static Jet111 jet(Vec x, Vec y, Mat L1, Mat L2, Mat L3, Bilin B12, Bilin B13, Bilin B23,
                    Trilin C);
  static Jet111 identity(const Vec& x);

  // Whether the extended coefficients match the (1,1,1)-jet pattern.
  bool is_jet111(double tol = kJetTolAlgebraic) const;
  // Def of the subgroupoid with coinciding projections: all faces equal.
  bool faces_coincide(double tol = kJetTolAlgebraic) const;

  Jet11 face_p() const { return Jet11::hom(x, y, L1, L2, B12, V12); }
  Jet11 face_pstar() const { return Jet11::hom(x, y, L1, L3, B13, V13); }
  Jet11 face_pstarstar() const { return Jet11::hom(x, y, L2, L3, B23, V23); }
};

T3Elem act(const Jet111& j, const T3Elem& E, double tol = kJetTolAlgebraic);
Jet111 compose(const Jet111& a, const Jet111& b, double tol = kJetTolAlgebraic);
Jet111 inverse(const Jet111& j);
// Conjugation by the canonical involutions; well defined on all homomorphisms.
// When `is_jet_out` is given it reports whether the input satisfied the face
// precondition making the result a (1,1,1)-jet again.
Jet111 jet111_involution(const Jet111& j, Invol3 which, double tol = kJetTolAlgebraic,
                         bool* is_jet_out = nullptr);
// Trilinear difference of two jets over equal faces.
Trilin jet111_difference(const Jet111& a, const Jet111& b, double tol = kJetTolAlgebraic);
// Holonomic 3-jet of an expression map.
Jet111 jet3_of_map(const ExprMap& f, const Vec& x);

}  // namespace symjet
