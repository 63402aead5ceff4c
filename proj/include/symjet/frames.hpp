#pragma once

#include "symjet/connection.hpp"

namespace symjet {

// 1-frame at a chart point: the 1-jet at 0 of a map ℝⁿ → chart.
struct Frame1 {
  Vec x;
  Mat F;

  int dim() const { return static_cast<int>(x.size()); }
  Frame1 gl_act(const Mat& A) const { return {x, F * A}; }
};

// 1-jet of a section of the frame bundle, mirroring the (1,1)-jet layout:
// F is the frame, G the derivative of the base frame family, H the bilinear
// block with H(v, u) = value on (frame argument v, family direction u).
// Holonomic 2-frame ⇔ F = G and H symmetric.
struct Frame11 {
  Vec x;
  Mat F, G;
  Bilin H;

  int dim() const { return static_cast<int>(x.size()); }
  Frame11 gl_act(const Mat& A) const { return {x, F * A, G * A, H.compose(A, A)}; }
  bool holonomic(double tol = kJetTolAlgebraic) const {
    return (F - G).cwiseAbs().maxCoeff() <= tol && H.is_symmetric(tol);
  }
};

// Derived left action of (1,1)-jets on frame-section jets.
Frame11 act(const Jet11& xi, const Frame11& j, double tol = kJetTolAlgebraic);

// The unique affine section value over a 1-frame: H(v, u) = -Γ_x(F u, F v).
Frame11 admissible_section(const ConnectionField& c, const Frame1& e);

// Simple transitivity: the unique (1,1)-jet carrying j1 to j2.
Jet11 solve_m(const Frame11& j1, const Frame11& j2);

// 𝔰(x) = m(s(e_x), s(-e_x)); independent of the frame choice.
Jet11 sjet_from_admissible(const ConnectionField& c, const Frame1& e);

// Holonomic solve for the unique 2-frame s over f1 with 𝔰(x)·s = s·(-I),
// via the second-derivative conjugation identity. Requires a holonomic
// symmetry jet at the base point.
Frame11 holonomic_solve(const SymmetryJetField& s, const Frame1& f1,
                        double tol = kJetTolAlgebraic);

}  // namespace symjet
