#include "symjet/frames.hpp"

#include <cmath>

namespace symjet {

namespace {

Mat frame_inverse(const Mat& F) {
  double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
  if (std::abs(F.determinant()) <= 1e-12 * std::pow(scale, F.rows()))
    throw SingularFrame("singular frame");
  return F.inverse();
}

// A frame-section jet is a (1,1)-jet with source chart ℝⁿ based at 0.
Jet11 as_jet(const Frame11& j) {
  return Jet11::jet(Vec::Zero(j.dim()), j.x, j.F, j.G, j.H);
}

Frame11 as_frame(const Jet11& j) { return Frame11{j.y, j.L1, j.L2, j.B}; }

}  // namespace

Frame11 act(const Jet11& xi, const Frame11& j, double tol) {
  if ((j.x - xi.x).cwiseAbs().maxCoeff() > tol)
    throw BasePointMismatch("frame action: section jet not at the source of the jet");
  Bilin H = j.H.premul(xi.L1) + xi.B.compose(j.F, j.G);
  return Frame11{xi.y, xi.L1 * j.F, xi.L2 * j.G, std::move(H)};
}

Frame11 admissible_section(const ConnectionField& c, const Frame1& e) {
  Bilin H = c.gamma(e.x).transposed().compose(e.F, e.F) * -1.0;
  return Frame11{e.x, e.F, e.F, std::move(H)};
}

Jet11 solve_m(const Frame11& j1, const Frame11& j2) {
  Mat F1i = frame_inverse(j1.F);
  Mat G1i = frame_inverse(j1.G);
  Mat L1 = j2.F * F1i;
  Mat L2 = j2.G * G1i;
  Bilin B = (j2.H - j1.H.premul(L1)).compose(F1i, G1i);
  return Jet11::jet(j1.x, j2.x, std::move(L1), std::move(L2), std::move(B));
}

Jet11 sjet_from_admissible(const ConnectionField& c, const Frame1& e) {
  Frame11 plus = admissible_section(c, e);
  Frame11 minus = admissible_section(c, Frame1{e.x, -e.F});
  return solve_m(plus, minus);
}

Frame11 holonomic_solve(const SymmetryJetField& s, const Frame1& f1, double tol) {
  const int n = f1.dim();
  Jet11 sx = s.at(f1.x);
  if (classify(sx, tol) != Holonomy::holonomic)
    throw PreconditionFailed("holonomic_solve requires a holonomic symmetry jet");

  // Conjugate the symmetry jet back to ℝⁿ through any holonomic extension of
  // the frame; with η = θ₁⁻¹·𝔰·θ₁ over -I, the correction jet θ over the
  // identity must satisfy η·θ = θ·(-I), i.e. d²θ = ½ d²η.
  Jet11 theta1 = as_jet(Frame11{f1.x, f1.F, f1.F, Bilin(n)});
  Jet11 eta = compose(inverse(theta1), compose(sx, theta1, tol), tol);
  Jet11 theta = Jet11::jet(Vec::Zero(n), Vec::Zero(n), Mat::Identity(n, n), Mat::Identity(n, n),
                           eta.B * 0.5);
  return as_frame(compose(theta1, theta, tol));
}

}  // namespace symjet
