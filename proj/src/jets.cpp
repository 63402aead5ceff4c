#include "symjet/jets.hpp"

#include <cmath>

namespace symjet {

namespace {

bool close(const Vec& a, const Vec& b, double tol) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}
bool close(const Mat& a, const Mat& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

Mat checked_inverse(const Mat& m, const char* what) {
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double det = m.determinant();
  if (std::abs(det) <= 1e-12 * std::pow(scale, m.rows()))
    throw SingularJet(what);
  return m.inverse();
}

}  // namespace

// ---------------------------------------------------------------------------
// Jet1

Jet1 compose(const Jet1& a, const Jet1& b, double tol) {
  if (!close(a.x, b.y, tol)) throw ChainMismatch("Jet1 composition: source/target mismatch");
  return {b.x, a.y, a.L * b.L};
}

Jet1 inverse(const Jet1& j) {
  return {j.y, j.x, checked_inverse(j.L, "Jet1 inverse: singular linear part")};
}

Vec act(const Jet1& j, const Vec& v) { return j.L * v; }

// ---------------------------------------------------------------------------
// Jet11

Jet11 Jet11::jet(Vec x, Vec y, Mat L1, Mat L2, Bilin B) {
  Mat vert = L1;
  return Jet11{std::move(x), std::move(y), std::move(L1), std::move(L2), std::move(B),
               std::move(vert)};
}

Jet11 Jet11::hom(Vec x, Vec y, Mat L1, Mat L2, Bilin B, Mat vert) {
  return Jet11{std::move(x), std::move(y), std::move(L1), std::move(L2), std::move(B),
               std::move(vert)};
}

Jet11 Jet11::identity(const Vec& x) {
  int n = static_cast<int>(x.size());
  return jet(x, x, Mat::Identity(n, n), Mat::Identity(n, n), Bilin(n));
}

Jet11 Jet11::thick_minus(const Vec& x) {
  int n = static_cast<int>(x.size());
  return hom(x, x, -Mat::Identity(n, n), -Mat::Identity(n, n), Bilin(n), Mat::Identity(n, n));
}

T2Elem act(const Jet11& j, const T2Elem& e, double tol) {
  if (!close(e.base, j.x, tol)) throw BasePointMismatch("Jet11 action: element not at the source");
  return {j.y, j.L1 * e.s1, j.L2 * e.s2, j.vert * e.s12 + j.B(e.s1, e.s2)};
}

Jet11 compose(const Jet11& a, const Jet11& b, double tol) {
  if (!close(a.x, b.y, tol)) throw ChainMismatch("Jet11 composition: source/target mismatch");
  Bilin bl = b.B.premul(a.vert) + a.B.compose(b.L1, b.L2);
  return Jet11::hom(b.x, a.y, a.L1 * b.L1, a.L2 * b.L2, std::move(bl), a.vert * b.vert);
}

Jet11 inverse(const Jet11& j) {
  Mat L1i = checked_inverse(j.L1, "Jet11 inverse: singular p-part");
  Mat L2i = checked_inverse(j.L2, "Jet11 inverse: singular p*-part");
  Mat vi = checked_inverse(j.vert, "Jet11 inverse: singular vertical part");
  Bilin bi = j.B.compose(L1i, L2i).premul(-vi);
  return Jet11::hom(j.y, j.x, std::move(L1i), std::move(L2i), std::move(bi), std::move(vi));
}

Jet11 jet_kappa(const Jet11& j) {
  return Jet11::hom(j.x, j.y, j.L2, j.L1, j.B.transposed(), j.vert);
}

Holonomy classify(const Jet11& j, double tol) {
  double scale = std::max(1.0, std::max(j.L1.cwiseAbs().maxCoeff(), j.B.max_abs()));
  if (!close(j.L1, j.L2, tol * scale)) return Holonomy::nonholonomic;
  if (!j.B.is_symmetric(tol * scale)) return Holonomy::semiholonomic;
  return Holonomy::holonomic;
}

Jet1 bounce(const Jet11& j) { return {j.x, j.y, j.L2}; }

Bilin jet_difference(const Jet11& a, const Jet11& b, double tol) {
  if (!close(a.x, b.x, tol) || !close(a.y, b.y, tol) || !close(a.L1, b.L1, tol) ||
      !close(a.L2, b.L2, tol) || !close(a.vert, b.vert, tol))
    throw FaceMismatch("jet_difference: first-order faces differ");
  return a.B - b.B;
}

Bilin conjugate_d2(const Jet11& f2, const Jet11& g2, const Jet11& h2, double tol) {
  int n = f2.dim();
  Mat I = Mat::Identity(n, n);
  if (!close(f2.x, f2.y, tol) || !close(f2.L1, I, tol) || classify(f2, tol) != Holonomy::holonomic)
    throw PreconditionFailed("conjugate_d2: f must be a holonomic 2-jet over the identity");
  if (!close(h2.y, f2.x, tol) || !close(g2.x, f2.x, tol) || !close(g2.y, h2.x, tol) ||
      !close(g2.L1, checked_inverse(h2.L1, "conjugate_d2: singular h"), tol))
    throw PreconditionFailed("conjugate_d2: g must invert h to first order");
  Jet11 gh = compose(g2, h2, tol);
  return f2.B.compose(h2.L1, h2.L1).premul(g2.L1) + gh.B;
}

Jet11 jet2_of_map(const ExprMap& f, const Vec& x) {
  Mat L = f.jacobian(x);
  return Jet11::jet(x, f.value(x), L, L, f.second(x));
}

// ---------------------------------------------------------------------------
// Jet111

Jet111 Jet111::jet(Vec x, Vec y, Mat L1, Mat L2, Mat L3, Bilin B12, Bilin B13, Bilin B23,
                   Trilin C) {
  Jet111 j;
  j.x = std::move(x);
  j.y = std::move(y);
  j.V12 = L1;
  j.V13 = L1;
  j.V23 = L2;
  j.V123 = L1;
  j.G12_3 = B13;
  j.G13_2 = B12;
  j.G1_23 = B12;
  j.L1 = std::move(L1);
  j.L2 = std::move(L2);
  j.L3 = std::move(L3);
  j.B12 = std::move(B12);
  j.B13 = std::move(B13);
  j.B23 = std::move(B23);
  j.C = std::move(C);
  return j;
}

Jet111 Jet111::identity(const Vec& x) {
  int n = static_cast<int>(x.size());
  Mat I = Mat::Identity(n, n);
  return jet(x, x, I, I, I, Bilin(n), Bilin(n), Bilin(n), Trilin(n));
}

bool Jet111::is_jet111(double tol) const {
  return close(V12, L1, tol) && close(V13, L1, tol) && close(V23, L2, tol) &&
         close(V123, L1, tol) && (G12_3 - B13).max_abs() <= tol &&
         (G13_2 - B12).max_abs() <= tol && (G1_23 - B12).max_abs() <= tol;
}

bool Jet111::faces_coincide(double tol) const {
  return close(L1, L2, tol) && close(L1, L3, tol) && (B12 - B13).max_abs() <= tol &&
         (B12 - B23).max_abs() <= tol;
}

T3Elem act(const Jet111& j, const T3Elem& E, double tol) {
  if (!close(E.base, j.x, tol)) throw BasePointMismatch("Jet111 action: element not at the source");
  T3Elem out;
  out.base = j.y;
  out.s1 = j.L1 * E.s1;
  out.s2 = j.L2 * E.s2;
  out.s3 = j.L3 * E.s3;
  out.s12 = j.V12 * E.s12 + j.B12(E.s1, E.s2);
  out.s13 = j.V13 * E.s13 + j.B13(E.s1, E.s3);
  out.s23 = j.V23 * E.s23 + j.B23(E.s2, E.s3);
  out.s123 = j.V123 * E.s123 + j.C(E.s1, E.s2, E.s3) + j.G12_3(E.s12, E.s3) +
             j.G13_2(E.s13, E.s2) + j.G1_23(E.s1, E.s23);
  return out;
}

Jet111 compose(const Jet111& a, const Jet111& b, double tol) {
  if (!close(a.x, b.y, tol)) throw ChainMismatch("Jet111 composition: source/target mismatch");
  Jet111 out;
  out.x = b.x;
  out.y = a.y;
  out.L1 = a.L1 * b.L1;
  out.L2 = a.L2 * b.L2;
  out.L3 = a.L3 * b.L3;
  out.V12 = a.V12 * b.V12;
  out.V13 = a.V13 * b.V13;
  out.V23 = a.V23 * b.V23;
  out.V123 = a.V123 * b.V123;
  out.B12 = b.B12.premul(a.V12) + a.B12.compose(b.L1, b.L2);
  out.B13 = b.B13.premul(a.V13) + a.B13.compose(b.L1, b.L3);
  out.B23 = b.B23.premul(a.V23) + a.B23.compose(b.L2, b.L3);
  out.G12_3 = b.G12_3.premul(a.V123) + a.G12_3.compose(b.V12, b.L3);
  out.G13_2 = b.G13_2.premul(a.V123) + a.G13_2.compose(b.V13, b.L2);
  out.G1_23 = b.G1_23.premul(a.V123) + a.G1_23.compose(b.L1, b.V23);
  out.C = b.C.premul(a.V123) + a.C.compose(b.L1, b.L2, b.L3) + trilin_nest12(a.G12_3, b.B12, b.L3) +
          trilin_nest13(a.G13_2, b.B13, b.L2) + trilin_nest23(a.G1_23, b.L1, b.B23);
  return out;
}

Jet111 inverse(const Jet111& j) {
  Jet111 out;
  out.x = j.y;
  out.y = j.x;
  out.L1 = checked_inverse(j.L1, "Jet111 inverse: singular L1");
  out.L2 = checked_inverse(j.L2, "Jet111 inverse: singular L2");
  out.L3 = checked_inverse(j.L3, "Jet111 inverse: singular L3");
  out.V12 = checked_inverse(j.V12, "Jet111 inverse: singular V12");
  out.V13 = checked_inverse(j.V13, "Jet111 inverse: singular V13");
  out.V23 = checked_inverse(j.V23, "Jet111 inverse: singular V23");
  out.V123 = checked_inverse(j.V123, "Jet111 inverse: singular V123");
  out.B12 = j.B12.compose(out.L1, out.L2).premul(-out.V12);
  out.B13 = j.B13.compose(out.L1, out.L3).premul(-out.V13);
  out.B23 = j.B23.compose(out.L2, out.L3).premul(-out.V23);
  out.G12_3 = j.G12_3.compose(out.V12, out.L3).premul(-out.V123);
  out.G13_2 = j.G13_2.compose(out.V13, out.L2).premul(-out.V123);
  out.G1_23 = j.G1_23.compose(out.L1, out.V23).premul(-out.V123);
  out.C = j.C.compose(out.L1, out.L2, out.L3).premul(-out.V123) -
          trilin_nest12(out.G12_3, j.B12.compose(out.L1, out.L2), Mat::Identity(j.dim(), j.dim())) -
          trilin_nest13(out.G13_2, j.B13.compose(out.L1, out.L3), Mat::Identity(j.dim(), j.dim())) -
          trilin_nest23(out.G1_23, Mat::Identity(j.dim(), j.dim()), j.B23.compose(out.L2, out.L3));
  return out;
}

Jet111 jet111_involution(const Jet111& j, Invol3 which, double tol, bool* is_jet_out) {
  Jet111 out;
  out.x = j.x;
  out.y = j.y;
  bool face_ok = false;
  switch (which) {
    case Invol3::kappa:
      out.L1 = j.L1;
      out.L2 = j.L3;
      out.L3 = j.L2;
      out.B12 = j.B13;
      out.V12 = j.V13;
      out.B13 = j.B12;
      out.V13 = j.V12;
      out.B23 = j.B23.transposed();
      out.V23 = j.V23;
      out.C = j.C.permuted(0, 2, 1);
      out.G12_3 = j.G13_2;
      out.G13_2 = j.G12_3;
      out.G1_23 = j.G1_23;
      out.V123 = j.V123;
      face_ok = close(j.L1, j.L2, tol) && close(j.V12, j.V13, tol) &&
                (j.B12 - j.B13).max_abs() <= tol;
      break;
    case Invol3::kappa_star:
      out.L1 = j.L2;
      out.L2 = j.L1;
      out.L3 = j.L3;
      out.B12 = j.B12.transposed();
      out.V12 = j.V12;
      out.B13 = j.B23;
      out.V13 = j.V23;
      out.B23 = j.B13;
      out.V23 = j.V13;
      out.C = j.C.permuted(1, 0, 2);
      out.G12_3 = j.G12_3;
      out.G13_2 = j.G1_23.transposed();
      out.G1_23 = j.G13_2.transposed();
      out.V123 = j.V123;
      face_ok = close(j.L2, j.L3, tol) && close(j.V13, j.V23, tol) &&
                (j.B13 - j.B23).max_abs() <= tol;
      break;
    case Invol3::kappa_prime: {
      bool a = false, b = false, c = false;
      Jet111 tmp = jet111_involution(j, Invol3::kappa_star, tol, &a);
      tmp = jet111_involution(tmp, Invol3::kappa, tol, &b);
      out = jet111_involution(tmp, Invol3::kappa_star, tol, &c);
      face_ok = a && b && c;
      break;
    }
  }
  if (is_jet_out) *is_jet_out = face_ok && out.is_jet111(tol);
  return out;
}

Trilin jet111_difference(const Jet111& a, const Jet111& b, double tol) {
  bool faces_equal = close(a.x, b.x, tol) && close(a.y, b.y, tol) &&
                     close(a.L1, b.L1, tol) && close(a.L2, b.L2, tol) &&
                     close(a.L3, b.L3, tol) && (a.B12 - b.B12).max_abs() <= tol &&
                     (a.B13 - b.B13).max_abs() <= tol && (a.B23 - b.B23).max_abs() <= tol;
  if (!faces_equal) throw FaceMismatch("jet111_difference: faces differ");
  return a.C - b.C;
}

Jet111 jet3_of_map(const ExprMap& f, const Vec& x) {
  Mat L = f.jacobian(x);
  Bilin B = f.second(x);
  return Jet111::jet(x, f.value(x), L, L, L, B, B, B, f.third(x));
}

}  // namespace symjet
