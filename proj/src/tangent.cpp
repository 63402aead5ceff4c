#include "symjet/tangent.hpp"

namespace symjet {

namespace {

bool close(const Vec& a, const Vec& b, double tol) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

void check_fiber(bool ok, const char* what) {
  if (!ok) throw FiberMismatch(what);
}

}  // namespace

// ---------------------------------------------------------------------------
// T²M

T2Elem t2_combine(VB2 st, double a, const T2Elem& e1, double b, const T2Elem& e2, double tol) {
  check_fiber(close(e1.base, e2.base, tol), "t2_combine: base points differ");
  if (st == VB2::p) {
    check_fiber(close(e1.s1, e2.s1, tol), "t2_combine: p-fiber (s1) differs");
    return {e1.base, e1.s1, a * e1.s2 + b * e2.s2, a * e1.s12 + b * e2.s12};
  }
  check_fiber(close(e1.s2, e2.s2, tol), "t2_combine: p*-fiber (s2) differs");
  return {e1.base, a * e1.s1 + b * e2.s1, e1.s2, a * e1.s12 + b * e2.s12};
}

T2Elem t2_scale(VB2 st, double a, const T2Elem& e) { return t2_combine(st, a, e, 0.0, e); }

T2Elem t2_thick_minus(const T2Elem& e) {
  return t2_scale(VB2::p, -1.0, t2_scale(VB2::pstar, -1.0, e));
}

T2Elem t2_kappa(const T2Elem& e) { return {e.base, e.s2, e.s1, e.s12}; }

Vec t2_pi(const T2Elem& e1, const T2Elem& e2, double tol) {
  check_fiber(close(e1.base, e2.base, tol) && close(e1.s1, e2.s1, tol) &&
                  close(e1.s2, e2.s2, tol),
              "t2_pi: elements are not in a common p×p* fiber");
  return e1.s12 - e2.s12;
}

T2Elem t2_affine_translate(const T2Elem& e, const Vec& v) {
  // A_e(v) = e + (e(e) +* i^p_0(v)); reduces to shifting s12.
  return t2_combine(VB2::p, 1.0, e, 1.0,
                    t2_combine(VB2::pstar, 1.0, t2_e(e), 1.0, t2_ivert(e.base, v)));
}

T2Elem t2_i(const Vec& x, const Vec& X) {
  Vec z = Vec::Zero(x.size());
  return {x, X, z, z};
}
T2Elem t2_istar(const Vec& x, const Vec& X) {
  Vec z = Vec::Zero(x.size());
  return {x, z, X, z};
}
T2Elem t2_ivert(const Vec& x, const Vec& V) {
  Vec z = Vec::Zero(x.size());
  return {x, z, z, V};
}
T2Elem t2_Ip(const Vec& x, const Vec& X1, const Vec& X2) {
  return {x, Vec::Zero(x.size()), X1, X2};
}
T2Elem t2_Ipstar(const Vec& x, const Vec& X1, const Vec& X2) {
  return {x, X1, Vec::Zero(x.size()), X2};
}
T2Elem t2_e(const T2Elem& e) { return t2_i(e.base, e.s1); }
T2Elem t2_estar(const T2Elem& e) { return t2_istar(e.base, e.s2); }

T2Elem pushforward(const VectorField& Y, const Vec& x, const Vec& X) {
  return {x, Y.value(x), X, Y.jacobian(x) * X};
}

Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& x) {
  T2Elem yx = pushforward(Y, x, X.value(x));
  T2Elem xy = pushforward(X, x, Y.value(x));
  return t2_pi(yx, t2_kappa(xy));
}

// ---------------------------------------------------------------------------
// T³M

T2Elem t3_p(const T3Elem& E) { return {E.base, E.s1, E.s2, E.s12}; }
T2Elem t3_pstar(const T3Elem& E) { return {E.base, E.s1, E.s3, E.s13}; }
T2Elem t3_pstarstar(const T3Elem& E) { return {E.base, E.s2, E.s3, E.s23}; }

T3Elem t3_combine(VB3 st, double a, const T3Elem& E1, double b, const T3Elem& E2, double tol) {
  check_fiber(close(E1.base, E2.base, tol), "t3_combine: base points differ");
  T3Elem out = E1;
  switch (st) {
    case VB3::p:
      check_fiber(close(E1.s1, E2.s1, tol) && close(E1.s2, E2.s2, tol) &&
                      close(E1.s12, E2.s12, tol),
                  "t3_combine: p-fiber (s1, s2, s12) differs");
      out.s3 = a * E1.s3 + b * E2.s3;
      out.s13 = a * E1.s13 + b * E2.s13;
      out.s23 = a * E1.s23 + b * E2.s23;
      break;
    case VB3::pstar:
      check_fiber(close(E1.s1, E2.s1, tol) && close(E1.s3, E2.s3, tol) &&
                      close(E1.s13, E2.s13, tol),
                  "t3_combine: p*-fiber (s1, s3, s13) differs");
      out.s2 = a * E1.s2 + b * E2.s2;
      out.s12 = a * E1.s12 + b * E2.s12;
      out.s23 = a * E1.s23 + b * E2.s23;
      break;
    case VB3::pstarstar:
      check_fiber(close(E1.s2, E2.s2, tol) && close(E1.s3, E2.s3, tol) &&
                      close(E1.s23, E2.s23, tol),
                  "t3_combine: p**-fiber (s2, s3, s23) differs");
      out.s1 = a * E1.s1 + b * E2.s1;
      out.s12 = a * E1.s12 + b * E2.s12;
      out.s13 = a * E1.s13 + b * E2.s13;
      break;
  }
  out.s123 = a * E1.s123 + b * E2.s123;
  return out;
}

T3Elem t3_scale(VB3 st, double a, const T3Elem& E) { return t3_combine(st, a, E, 0.0, E); }

T3Elem t3_involution(const T3Elem& E, Invol3 which) {
  T3Elem out = E;
  switch (which) {
    case Invol3::kappa:  // (2 3)
      out.s2 = E.s3;
      out.s3 = E.s2;
      out.s12 = E.s13;
      out.s13 = E.s12;
      break;
    case Invol3::kappa_star:  // (1 2)
      out.s1 = E.s2;
      out.s2 = E.s1;
      out.s13 = E.s23;
      out.s23 = E.s13;
      break;
    case Invol3::kappa_prime:  // (1 3)
      out.s1 = E.s3;
      out.s3 = E.s1;
      out.s12 = E.s23;
      out.s23 = E.s12;
      break;
  }
  return out;
}

T3Elem t3_i(const T2Elem& z) {
  T3Elem out = T3Elem::zero(z.base);
  out.s1 = z.s1;
  out.s2 = z.s2;
  out.s12 = z.s12;
  return out;
}
T3Elem t3_istar(const T2Elem& z) {
  T3Elem out = T3Elem::zero(z.base);
  out.s1 = z.s1;
  out.s3 = z.s2;
  out.s13 = z.s12;
  return out;
}
T3Elem t3_istarstar(const T2Elem& z) {
  T3Elem out = T3Elem::zero(z.base);
  out.s2 = z.s1;
  out.s3 = z.s2;
  out.s23 = z.s12;
  return out;
}
T3Elem t3_e(const T3Elem& E) { return t3_i(t3_p(E)); }
T3Elem t3_estar(const T3Elem& E) { return t3_istar(t3_pstar(E)); }
T3Elem t3_estarstar(const T3Elem& E) { return t3_istarstar(t3_pstarstar(E)); }

T3Elem t3_I(const Vec& x, const Vec& V) {
  T3Elem out = T3Elem::zero(x);
  out.s123 = V;
  return out;
}

T3Elem t3_include(T3Include kind, const T2Elem& a) {
  T3Elem out = T3Elem::zero(a.base);
  switch (kind) {
    case T3Include::I:
      // For the TM inclusion use t3_I; accept a vertical T² element here.
      out.s123 = a.s12;
      return out;
    case T3Include::ivert_p:
      out.s1 = a.s1;
      out.s23 = a.s2;
      out.s123 = a.s12;
      return out;
    case T3Include::ivert_p_diff:
      out.s3 = a.s2;
      out.s12 = a.s1;
      out.s123 = a.s12;
      return out;
    case T3Include::ivert_pstar:
      out.s2 = a.s2;
      out.s13 = a.s1;
      out.s123 = a.s12;
      return out;
    default:
      throw Error("t3_include: this inclusion takes two arguments");
  }
}

T3Elem t3_include2(T3Include kind, const T2Elem& a, const T2Elem& b, double tol) {
  switch (kind) {
    case T3Include::Ip:  // i_*(a) + ivert_p(b), p-fibers of a and b agree
      return t3_combine(VB3::p, 1.0, t3_istar(a), 1.0, t3_include(T3Include::ivert_p, b), tol);
    case T3Include::Ip_star:  // i_**(a) + ivert_pstar(b), a.s1 = b.s2
      return t3_combine(VB3::p, 1.0, t3_istarstar(a), 1.0,
                        t3_include(T3Include::ivert_pstar, b), tol);
    case T3Include::Ipstar:  // i(a) +* ivert_p(b)
      return t3_combine(VB3::pstar, 1.0, t3_i(a), 1.0, t3_include(T3Include::ivert_p, b), tol);
    case T3Include::Ipstar_star:  // i_**(a) +* ivert_p_diff(b)
      return t3_combine(VB3::pstar, 1.0, t3_istarstar(a), 1.0,
                        t3_include(T3Include::ivert_p_diff, b), tol);
    case T3Include::Ipss:  // i(a) +** ivert_pstar(b)
      return t3_combine(VB3::pstarstar, 1.0, t3_i(a), 1.0,
                        t3_include(T3Include::ivert_pstar, b), tol);
    case T3Include::Ipss_star:  // i_*(a) +** ivert_p_diff(b)
      return t3_combine(VB3::pstarstar, 1.0, t3_istar(a), 1.0,
                        t3_include(T3Include::ivert_p_diff, b), tol);
    default:
      throw Error("t3_include2: this inclusion takes one argument");
  }
}

Vec t3_Pi(const T3Elem& E1, const T3Elem& E2, double tol) {
  check_fiber(close(E1.base, E2.base, tol) && close(E1.s1, E2.s1, tol) &&
                  close(E1.s2, E2.s2, tol) && close(E1.s3, E2.s3, tol) &&
                  close(E1.s12, E2.s12, tol) && close(E1.s13, E2.s13, tol) &&
                  close(E1.s23, E2.s23, tol),
              "t3_Pi: elements are not in a common p×p*×p** fiber");
  return E1.s123 - E2.s123;
}

Vec t3_Pi_single(const T3Elem& E, double tol) { return t3_Pi(E, t3_e(E), tol); }

T3Elem t3_A_P(const T3Elem& E, const Vec& v, int variant, double tol) {
  const Vec& x = E.base;
  T3Elem iv = t3_I(x, v);
  auto add = [&](VB3 st, const T3Elem& a, const T3Elem& b) {
    return t3_combine(st, 1.0, a, 1.0, b, tol);
  };
  switch (variant) {
    case 0: return add(VB3::p, E, add(VB3::pstar, t3_e(E), add(VB3::pstarstar, t3_estar(t3_e(E)), iv)));
    case 1: return add(VB3::p, E, add(VB3::pstarstar, t3_e(E), add(VB3::pstar, t3_estarstar(t3_e(E)), iv)));
    case 2: return add(VB3::pstar, E, add(VB3::p, t3_estar(E), add(VB3::pstarstar, t3_e(t3_estar(E)), iv)));
    case 3: return add(VB3::pstar, E, add(VB3::pstarstar, t3_estar(E), add(VB3::p, t3_estarstar(t3_estar(E)), iv)));
    case 4: return add(VB3::pstarstar, E, add(VB3::p, t3_estarstar(E), add(VB3::pstar, t3_e(t3_estarstar(E)), iv)));
    case 5: return add(VB3::pstarstar, E, add(VB3::pstar, t3_estarstar(E), add(VB3::p, t3_estar(t3_estarstar(E)), iv)));
    default: throw Error("t3_A_P: variant must be in 0..5");
  }
}

T2Elem t3_Pi_partial(int which, const T3Elem& E1, const T3Elem& E2, double tol) {
  auto pi2 = [&](const T3Elem& A, const T3Elem& B) {
    check_fiber(close(A.base, B.base, tol) && close(A.s1, B.s1, tol) &&
                    close(A.s2, B.s2, tol) && close(A.s3, B.s3, tol) &&
                    close(A.s13, B.s13, tol) && close(A.s23, B.s23, tol),
                "t3_Pi_partial: elements are not in a common fiber");
    return T2Elem{A.base, A.s12 - B.s12, A.s3, A.s123 - B.s123};
  };
  switch (which) {
    case 2:
      return pi2(E1, E2);
    case 1:
      // Conjugate through the involution that carries the p*×p** fibration to p×p*.
      return t2_kappa(pi2(t3_involution(E1, Invol3::kappa_prime),
                          t3_involution(E2, Invol3::kappa_prime)));
    case 3:
      return pi2(t3_involution(E1, Invol3::kappa), t3_involution(E2, Invol3::kappa));
    default:
      throw Error("t3_Pi_partial: which must be 1, 2 or 3");
  }
}

T3Elem t3_A_Pi(int which, const T3Elem& E, const T2Elem& u, double tol) {
  switch (which) {
    case 1:
      // E + (e(E) +* ivert_p(u)); u lies in the p-fiber over s1.
      check_fiber(close(u.s1, E.s1, tol), "t3_A_Pi: argument p-fiber mismatch");
      return t3_combine(VB3::p, 1.0, E, 1.0,
                        t3_combine(VB3::pstar, 1.0, t3_e(E), 1.0,
                                   t3_include(T3Include::ivert_p, u), tol),
                        tol);
    case 2:
      // E +* (e*(E) +** (i^p_0)_*(u)); u lies in the p*-fiber over s3.
      check_fiber(close(u.s2, E.s3, tol), "t3_A_Pi: argument p*-fiber mismatch");
      return t3_combine(VB3::pstar, 1.0, E, 1.0,
                        t3_combine(VB3::pstarstar, 1.0, t3_estar(E), 1.0,
                                   t3_include(T3Include::ivert_p_diff, u), tol),
                        tol);
    case 3:
      // E +** (e**(E) + i^{p*}(u)); u lies in the p*-fiber over s2.
      check_fiber(close(u.s2, E.s2, tol), "t3_A_Pi: argument p*-fiber mismatch");
      return t3_combine(VB3::pstarstar, 1.0, E, 1.0,
                        t3_combine(VB3::p, 1.0, t3_estarstar(E), 1.0,
                                   t3_include(T3Include::ivert_pstar, u), tol),
                        tol);
    default:
      throw Error("t3_A_Pi: which must be 1, 2 or 3");
  }
}

}  // namespace symjet
