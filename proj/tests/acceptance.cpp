// Acceptance harness: runs every acceptance criterion at its pinned tolerance
// and prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "symjet/flows.hpp"
#include "symjet/frames.hpp"
#include "symjet/suites.hpp"

using namespace symjet;

namespace {

using Clock = std::chrono::steady_clock;

double vmax(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Criterion {
  int idx;
  const char* label;
  double tol;
  std::function<double()> run;
};

const std::vector<const char*> kAllBuiltins = {
    "euclidean_2", "sphere_stereo",   "poincare_disk",  "flat_torsion_c",
    "poly_random", "poly_random_tors", "poly_random3"};
const std::vector<const char*> kTorsionless = {"euclidean_2", "sphere_stereo", "poincare_disk",
                                               "poly_random"};

ManifoldSpec const_coeff_spec(const Bilin& G) {
  int n = G.dim();
  ManifoldSpec spec;
  spec.name = "const_coeff";
  spec.n = n;
  spec.kind = ManifoldKind::SymmetryJet;
  spec.domain = Domain::ball(n, 10.0);
  spec.gamma.assign(static_cast<size_t>(n),
                    std::vector<std::vector<Expr>>(static_cast<size_t>(n),
                                                   std::vector<Expr>(static_cast<size_t>(n))));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::ostringstream s;
        s.precision(17);
        s << G.at(k, i, j);
        spec.gamma[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)] =
            parse_expr(s.str(), n);
      }
  return spec;
}

// 1. Coefficient round trip, 20 seeds x 20 points, exact to 1e-13.
double criterion_roundtrip() {
  double worst = 0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    ManifoldSpec man = load_manifold("poly_random(" + std::to_string(seed) + ")");
    ConnectionField c = ConnectionField::from_manifold(man);
    ConnectionField back = connection_from_sjet(sjet_from_connection(c));
    SymmetryJetField s = sjet_from_connection(c);
    SymmetryJetField sback = sjet_from_connection(connection_from_sjet(s));
    std::mt19937 rng(seed);
    for (int t = 0; t < 20; ++t) {
      Vec x = man.domain.sample(rng);
      worst = std::max(worst, (c.gamma(x) - back.gamma(x)).max_abs());
      worst = std::max(worst, (s.gamma_s(x) - sback.gamma_s(x)).max_abs());
    }
  }
  return worst;
}

// 2. Numeric 2-jet of the geodesic symmetry equals the symmetry jet.
double criterion_symmetry_2jet() {
  auto start = Clock::now();
  double worst = 0;
  for (const char* name : kTorsionless) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    SymmetryJetField s = sjet_from_connection(c);
    FlowOpts opts{1e-3, 1e-12, 50, man.normal_radius};
    std::mt19937 rng(42);
    for (int t = 0; t < 5; ++t) {
      Vec x = man.domain.sample(rng, 0.4);
      Jet11 nj = numeric_symmetry_2jet(c, x, opts, 1e-3);
      worst = std::max(worst, (nj.B - s.gamma_s(x)).max_abs());
      // The linear part carries a tighter 1e-6 budget; scale it into the
      // shared 1e-4 tolerance.
      double lres = (nj.L1 + Mat::Identity(man.n, man.n)).cwiseAbs().maxCoeff();
      worst = std::max(worst, lres * 1e2);
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs >= 10.0) return 1e308;  // runtime budget is part of the criterion
  return worst;
}

// 3. Curvature from the symmetry jet equals the classical oracle; the
//    constant-coefficient case matches the hand expansion exactly.
double criterion_curvature() {
  double worst = 0;
  for (const char* name : kAllBuiltins) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    SymmetryJetField s = sjet_from_connection(c);
    std::mt19937 rng(42);
    int n = man.n;
    for (int t = 0; t < 20; ++t) {
      Vec x = man.domain.sample(rng);
      TensorValueSet ts = classical_tensors(c, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Vec X = Vec::Unit(n, i), Y = Vec::Unit(n, j), Z = Vec::Unit(n, k);
            worst = std::max(worst, vmax(curvature_sjet(s, x, X, Y, Z) - ts.R(X, Y, Z)));
          }
    }
  }

  // Hand-expanded constant-coefficient case at the tighter tolerance: scale
  // its residual into the shared 1e-9 budget by the ratio 1e-9 / 1e-13.
  std::mt19937 rng(7);
  Bilin G = random_bilin(rng, 2);
  G = (G + G.transposed()) * 0.5;
  ManifoldSpec spec = const_coeff_spec(G);
  ConnectionField c = ConnectionField::from_manifold(spec);
  SymmetryJetField s = SymmetryJetField::from_manifold(spec);
  Bilin g = c.gamma(Vec::Zero(2));
  double worst_const = 0;
  for (int t = 0; t < 20; ++t) {
    Vec x = random_vec(rng, 2);
    Vec X = random_vec(rng, 2), Y = random_vec(rng, 2), Z = random_vec(rng, 2);
    Vec expect = g(X, g(Y, Z)) - g(Y, g(X, Z));
    worst_const = std::max(worst_const, vmax(curvature_sjet(s, x, X, Y, Z) - expect));
  }
  return std::max(worst, worst_const * (1e-9 / 1e-13));
}

// 4. Torsion from the symmetry jet equals the classical oracle.
double criterion_torsion() {
  double worst = 0;
  for (const char* name : kAllBuiltins) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    SymmetryJetField s = sjet_from_connection(c);
    std::mt19937 rng(42);
    int n = man.n;
    for (int t = 0; t < 20; ++t) {
      Vec x = man.domain.sample(rng);
      TensorValueSet ts = classical_tensors(c, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Vec X = Vec::Unit(n, i), Y = Vec::Unit(n, j);
          worst = std::max(worst, vmax(torsion_from_sjet(s, x, X, Y) - ts.T(X, Y)));
        }
    }
  }
  // Pinned fixture value T(e1, e2) = 2 c e1 with c = 1/2.
  ManifoldSpec ft = load_manifold("flat_torsion_c");
  SymmetryJetField s = SymmetryJetField::from_manifold(ft);
  Vec T = torsion_from_sjet(s, Vec::Zero(2), Vec::Unit(2, 0), Vec::Unit(2, 1));
  Vec expect(2);
  expect << 1.0, 0.0;
  return std::max(worst, vmax(T - expect));
}

// 5. The affine extension is a groupoid morphism through the symmetry jet,
//    and its holonomy defect is the torsion-preservation defect.
double criterion_extension_morphism() {
  double worst = 0;
  for (const char* name : {"poly_random_tors", "sphere_stereo", "flat_torsion_c"}) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    SymmetryJetField s = sjet_from_connection(c);
    std::mt19937 rng(42);
    int n = man.n;
    for (int t = 0; t < 20; ++t) {
      Vec x = man.domain.sample(rng), y = man.domain.sample(rng), z = man.domain.sample(rng);
      Jet1 a{y, z, random_invertible(rng, n)};
      Jet1 b{x, y, random_invertible(rng, n)};
      worst = std::max(worst, jet_difference(affine_extension(c, compose(a, b)),
                                             compose(affine_extension(c, a),
                                                     affine_extension(c, b)))
                                  .max_abs());
      worst = std::max(
          worst, jet_difference(affine_extension(c, Jet1::minus_identity(x)), s.at(x)).max_abs());

      Jet1 xi{x, y, random_invertible(rng, n)};
      TensorValueSet tx = classical_tensors(c, x);
      TensorValueSet ty = classical_tensors(c, y);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Vec X = Vec::Unit(n, i), Y = Vec::Unit(n, j);
          Vec defect = torsion_defect(c, xi, X, Y);
          Vec rhs = xi.L * tx.T(X, Y) - ty.T(xi.L * X, xi.L * Y);
          worst = std::max(worst, vmax(defect - rhs));
        }
    }
  }
  return worst;
}

// 6. Homothety route to the curvature, independent of the scale.
double criterion_homothety() {
  double worst = 0;
  for (const char* name : kTorsionless) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    SymmetryJetField s = sjet_from_connection(c);
    std::mt19937 rng(42);
    int n = man.n;
    for (int t = 0; t < 10; ++t) {
      Vec x = man.domain.sample(rng);
      TensorValueSet ts = classical_tensors(c, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Vec X = Vec::Unit(n, i), Y = Vec::Unit(n, j), Z = Vec::Unit(n, k);
            Vec ref = ts.R(X, Y, Z);
            Vec via18 = curvature_sjet(s, x, X, Y, Z);
            for (double a : {2.0, 3.0, 0.5}) {
              Vec via = curvature_homothety(c, a, x, X, Y, Z);
              worst = std::max(worst, vmax(via - ref));
              worst = std::max(worst, vmax(via - via18));
            }
          }
    }
  }
  return worst;
}

// 7. Order-3 defects equal the classical covariant-derivative defects for
//    torsion-preserving jets.
double criterion_order3_defects() {
  double worst = 0;
  for (const char* name : {"flat_torsion_c", "poly_random_tors"}) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    std::mt19937 rng(42);
    int n = man.n;
    for (int t = 0; t < 10; ++t) {
      Vec x = man.domain.sample(rng), y = man.domain.sample(rng);
      Jet1 xi = torsion_preserving_jet(c, x, y, 0.7 + 0.05 * t, rng);
      TensorValueSet tx = classical_tensors(c, x);
      TensorValueSet ty = classical_tensors(c, y);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            Vec X = Vec::Unit(n, i), Y = Vec::Unit(n, j), Z = Vec::Unit(n, k);
            DefectResult dT = residual_dT_defect(c, xi, X, Y, Z);
            if (!dT.hypothesis_met) return 1e308;
            Vec rhs = xi.L * tx.dT(Z, Y, X) - ty.dT(xi.L * Z, xi.L * Y, xi.L * X);
            worst = std::max(worst, vmax(dT.value - rhs));
            DefectResult dR = residual_R_defect(c, xi, X, Y, Z);
            if (!dR.hypothesis_met) return 1e308;
            Vec rhsR = xi.L * tx.R(X, Y, Z) - ty.R(xi.L * X, xi.L * Y, xi.L * Z);
            worst = std::max(worst, vmax(dR.value - rhsR));
          }
    }
  }
  return worst;
}

// 8. Lift identity and velocity integration.
double criterion_lifts() {
  double worst = 0;
  for (const char* name : kAllBuiltins) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    std::mt19937 rng(42);
    int n = man.n;
    double h = 1e-3;

    Vec x = man.domain.sample(rng, 0.35), y = man.domain.sample(rng, 0.35);
    Jet1 xi{x, y, random_invertible(rng, n)};
    Vec X = random_vec(rng, n, 0.12);
    DensePath gamma = geodesic_path(c, x, X, 1.0, h);
    std::vector<LiftSample> lift = affine_lift(c, xi, gamma, h);
    TransportFrame tau = parallel_transport_frame(c, gamma, h);
    auto v = [&](double t) { return Vec(xi.L * (tau.at(t).inverse() * gamma.vel(t))); };
    VelocityIntegration vi = path_from_velocity(c, y, v, 1.0, h);
    for (const LiftSample& ls : lift) {
      Mat rhs = vi.frame.at(ls.t) * xi.L * tau.at(ls.t).inverse();
      worst = std::max(worst, max_abs(Mat(ls.jet.L - rhs)));
    }

    // Constant fiber velocity reproduces the geodesic at the tighter budget.
    VelocityIntegration ci = path_from_velocity(c, x, [&](double) { return X; }, 1.0, h);
    double cworst = 0;
    for (double t : {0.25, 0.5, 0.75, 1.0})
      cworst = std::max(cworst, vmax(ci.path.pos(t) - gamma.pos(t)));
    worst = std::max(worst, cworst * (1e-6 / 1e-8));
  }
  return worst;
}

// 9. Locally symmetric leaf test on the round sphere.
double criterion_leaves() {
  ManifoldSpec man = load_manifold("sphere_stereo");
  ConnectionField c = ConnectionField::from_manifold(man);
  FlowOpts opts{1e-3, 1e-12, 50, man.normal_radius};
  double worst = 0;
  std::mt19937 rng(42);
  for (int t = 0; t < 2; ++t) {
    Vec x = man.domain.sample(rng, 0.15);
    Jet1 rot = sphere_rotation_jet(x, 0.35 + 0.15 * t, 0.4 + 0.5 * t);
    double res = leaf_residual(c, rot, opts);
    IntegrabilityReport ok = integrability_check(c, rot);
    if (!(res <= 1e-4) || !ok.integrable) return 1e308;
    worst = std::max(worst, res * (1e-9 / 1e-4));

    Jet1 bad = rot;
    bad.L *= 1.08;
    double bad_res = leaf_residual(c, bad, opts);
    IntegrabilityReport nok = integrability_check(c, bad);
    if (!(bad_res >= 1e-2) || nok.integrable) return 1e308;
  }
  return worst;  // residuals folded into a 1e-9-scale score
}

// 10. Metric connection: parallel metric, exactly symmetric coefficients,
//     full-rank uniqueness operator for both signatures.
double criterion_levi_civita() {
  double worst = 0;
  std::mt19937 rng(42);
  for (const char* name : {"sphere_stereo", "poincare_disk"}) {
    ManifoldSpec man = load_manifold(name);
    SymmetryJetField s = SymmetryJetField::from_manifold(man);
    ConnectionField c = ConnectionField::from_manifold(man);
    TensorField g = man.metric_field();
    for (int t = 0; t < 10; ++t) {
      Vec x = man.domain.sample(rng);
      Vec d = random_vec(rng, 2);
      worst = std::max(worst,
                       tensor_covariant_derivative(s, g, x, d).max_abs() * (1e-12 / 1e-10));
      LeviCivitaResult lc = levi_civita(man, x);
      if ((lc.gamma - lc.gamma.transposed()).max_abs() != 0.0) return 1e308;  // T = 0 exact
      if (!lc.unique) return 1e308;
      worst = std::max(worst, (lc.gamma - c.gamma(x)).max_abs());
      worst = std::max(worst, (lc.gamma - lc.gamma_solved).max_abs());
    }
  }
  int checked = 0;
  for (int n : {2, 3}) {
    for (int t = 0; t < 10; ++t) {
      Mat A = random_invertible(rng, n);
      Mat h = A.transpose() * A;
      if (levi_civita_operator_rank(h) != n * n * (n + 1) / 2) return 1e308;
      ++checked;
      Mat hl = h;
      hl.col(0) *= -1;
      hl.row(0) *= -1;
      hl = 0.5 * (hl + hl.transpose());
      if (std::abs(hl.determinant()) > 1e-8) {
        if (levi_civita_operator_rank(hl) != n * n * (n + 1) / 2) return 1e308;
        ++checked;
      }
    }
  }
  if (checked < 20) return 1e308;
  return worst;
}

// 11. Frame-bundle triangle.
double criterion_frames() {
  double worst = 0;
  for (const char* name : {"poly_random_tors", "sphere_stereo", "poly_random"}) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    SymmetryJetField s = sjet_from_connection(c);
    std::mt19937 rng(42);
    int n = man.n;
    bool torsionless = connection_is_torsionless(c, man, rng);
    for (int t = 0; t < 10; ++t) {
      Vec x = man.domain.sample(rng);
      Frame1 f{x, random_invertible(rng, n)};
      Mat A = random_invertible(rng, n);
      Frame11 lhs = admissible_section(c, f.gl_act(A));
      Frame11 rhs = admissible_section(c, f).gl_act(A);
      worst = std::max(worst, (lhs.H - rhs.H).max_abs() * (1e-12 / 1e-13));

      Jet11 sj = sjet_from_admissible(c, f);
      worst = std::max(worst, jet_difference(sj, s.at(x)).max_abs());
      Bilin back = sj.B.transposed() * -0.5;
      worst = std::max(worst, (back - c.gamma(x)).max_abs());
      Jet11 other = sjet_from_admissible(c, Frame1{x, random_invertible(rng, n)});
      worst = std::max(worst, jet_difference(sj, other).max_abs() * (1e-12 / 1e-13));

      if (torsionless) {
        Frame11 solved = holonomic_solve(s, f);
        worst = std::max(worst, (solved.H - admissible_section(c, f).H).max_abs());
      }
    }
  }
  return worst;
}

// 12. Structural conformance of the tower calculus, 100 random instances each.
double criterion_conformance() {
  std::mt19937 rng(42);
  int n = 2;
  double worst = 0;
  auto rt3 = [&](const Vec& x) {
    T3Elem e = T3Elem::zero(x);
    e.s1 = random_vec(rng, n);
    e.s2 = random_vec(rng, n);
    e.s3 = random_vec(rng, n);
    e.s12 = random_vec(rng, n);
    e.s13 = random_vec(rng, n);
    e.s23 = random_vec(rng, n);
    e.s123 = random_vec(rng, n);
    return e;
  };
  auto t2d = [](const T2Elem& a, const T2Elem& b) {
    return std::max({vmax(a.s1 - b.s1), vmax(a.s2 - b.s2), vmax(a.s12 - b.s12)});
  };
  auto t3d = [](const T3Elem& a, const T3Elem& b) {
    return std::max({vmax(a.s1 - b.s1), vmax(a.s2 - b.s2), vmax(a.s3 - b.s3),
                     vmax(a.s12 - b.s12), vmax(a.s13 - b.s13), vmax(a.s23 - b.s23),
                     vmax(a.s123 - b.s123)});
  };

  for (int t = 0; t < 100; ++t) {
    Vec x = random_vec(rng, n);

    // Second-level involution relations.
    T2Elem e{x, random_vec(rng, n), random_vec(rng, n), random_vec(rng, n)};
    worst = std::max(worst, t2d(t2_kappa(t2_kappa(e)), e));
    T2Elem f = e;
    f.s2 = random_vec(rng, n);
    f.s12 = random_vec(rng, n);
    worst = std::max(worst, t2d(t2_kappa(t2_combine(VB2::p, 1, e, 1, f)),
                                t2_combine(VB2::pstar, 1, t2_kappa(e), 1, t2_kappa(f))));

    // Third-level projection relations and the top difference invariance.
    T3Elem E = rt3(x);
    worst = std::max(worst, t2d(t3_p(t3_involution(E, Invol3::kappa)), t3_pstar(E)));
    worst = std::max(worst, t2d(t3_pstar(t3_involution(E, Invol3::kappa)), t3_p(E)));
    worst = std::max(worst, t2d(t3_pstarstar(t3_involution(E, Invol3::kappa)),
                                t2_kappa(t3_pstarstar(E))));
    worst = std::max(worst, t2d(t3_p(t3_involution(E, Invol3::kappa_star)), t2_kappa(t3_p(E))));
    worst = std::max(worst, t2d(t3_pstar(t3_involution(E, Invol3::kappa_star)), t3_pstarstar(E)));
    worst = std::max(worst,
                     t2d(t3_pstarstar(t3_involution(E, Invol3::kappa_star)), t3_pstar(E)));
    worst = std::max(worst, t2d(t3_p(t3_involution(E, Invol3::kappa_prime)),
                                t2_kappa(t3_pstarstar(E))));
    worst = std::max(worst,
                     t2d(t3_pstar(t3_involution(E, Invol3::kappa_prime)), t2_kappa(t3_pstar(E))));
    worst = std::max(worst,
                     t2d(t3_pstarstar(t3_involution(E, Invol3::kappa_prime)), t2_kappa(t3_p(E))));
    T3Elem E2 = E;
    E2.s123 = random_vec(rng, n);
    for (Invol3 o : {Invol3::kappa, Invol3::kappa_star, Invol3::kappa_prime})
      worst = std::max(worst, vmax(t3_Pi(t3_involution(E, o), t3_involution(E2, o)) -
                                   t3_Pi(E, E2)));

    // Bracket through the involution equals the coordinate bracket.
    std::uniform_real_distribution<double> u(-1, 1);
    std::ostringstream c1, c2, c3, c4;
    c1.precision(17);
    c2.precision(17);
    c3.precision(17);
    c4.precision(17);
    c1 << u(rng) << " + " << u(rng) << "*x1 + " << u(rng) << "*x2^2";
    c2 << u(rng) << " + " << u(rng) << "*x1*x2";
    c3 << u(rng) << " + " << u(rng) << "*x2 + " << u(rng) << "*x1^2";
    c4 << u(rng) << " + " << u(rng) << "*x1";
    VectorField Xf = VectorField::parse({c1.str(), c2.str()}, n);
    VectorField Yf = VectorField::parse({c3.str(), c4.str()}, n);
    Vec p = random_vec(rng, n, 0.5);
    Vec coord = Yf.jacobian(p) * Xf.value(p) - Xf.jacobian(p) * Yf.value(p);
    worst = std::max(worst, vmax(lie_bracket(Xf, Yf, p) - coord));

    // Second-derivative conjugation against plain composition.
    Bilin Bf = random_bilin(rng, n);
    Bf = (Bf + Bf.transposed()) * 0.5;
    Jet11 jf = Jet11::jet(x, x, Mat::Identity(n, n), Mat::Identity(n, n), Bf);
    Mat Hl = random_invertible(rng, n);
    Jet11 jh = Jet11::hom(random_vec(rng, n), x, Hl, Hl, random_bilin(rng, n), Hl);
    Jet11 jg = Jet11::jet(x, jh.x, Hl.inverse(), Hl.inverse(), random_bilin(rng, n));
    Bilin viaconj = conjugate_d2(jf, jg, jh);
    Bilin viacomp = compose(jg, compose(jf, jh)).B;
    worst = std::max(worst, (viaconj - viacomp).max_abs());

    // Vertical identities of the order-3 action.
    Jet111 j3 = Jet111::jet(x, random_vec(rng, n), random_invertible(rng, n),
                            random_invertible(rng, n), random_invertible(rng, n),
                            random_bilin(rng, n), random_bilin(rng, n), random_bilin(rng, n),
                            random_trilin(rng, n));
    T2Elem v{x, random_vec(rng, n), random_vec(rng, n), random_vec(rng, n)};
    worst = std::max(worst, t3d(act(j3, t3_include(T3Include::ivert_p, v)),
                                t3_include(T3Include::ivert_p, act(j3.face_p(), v))));
    worst = std::max(worst, t3d(act(j3, t3_include(T3Include::ivert_p_diff, v)),
                                t3_include(T3Include::ivert_p_diff, act(j3.face_pstar(), v))));
    worst = std::max(worst, t3d(act(j3, t3_include(T3Include::ivert_pstar, v)),
                                t3_include(T3Include::ivert_pstar, act(j3.face_p(), v))));

    // Composition versus iterated action.
    Vec y = random_vec(rng, n), z = random_vec(rng, n);
    Jet111 a = Jet111::jet(y, z, random_invertible(rng, n), random_invertible(rng, n),
                           random_invertible(rng, n), random_bilin(rng, n), random_bilin(rng, n),
                           random_bilin(rng, n), random_trilin(rng, n));
    Jet111 b = Jet111::jet(x, y, random_invertible(rng, n), random_invertible(rng, n),
                           random_invertible(rng, n), random_bilin(rng, n), random_bilin(rng, n),
                           random_bilin(rng, n), random_trilin(rng, n));
    T3Elem Ein = rt3(x);
    worst = std::max(worst, t3d(act(compose(a, b), Ein), act(a, act(b, Ein))));
  }
  return worst;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "coefficient round trip between symmetry jets and connections", 1e-13,
       criterion_roundtrip},
      {2, "numeric geodesic-symmetry 2-jet equals the symmetry jet", 1e-4,
       criterion_symmetry_2jet},
      {3, "curvature via the symmetry-jet commutator equals the classical oracle", 1e-9,
       criterion_curvature},
      {4, "torsion via the holonomy defect equals the classical oracle", 1e-12,
       criterion_torsion},
      {5, "affine extension is a symmetry-jet morphism with torsion-defect holonomy", 1e-12,
       criterion_extension_morphism},
      {6, "homothety extensions recover the curvature independently of the scale", 1e-9,
       criterion_homothety},
      {7, "order-3 holonomy defects equal the covariant-derivative defects", 1e-9,
       criterion_order3_defects},
      {8, "affine lifts equal transport conjugations; velocity integration", 1e-6,
       criterion_lifts},
      {9, "rotation jets give leaves on the round sphere; perturbations do not", 1e-9,
       criterion_leaves},
      {10, "metric connection: parallel metric, symmetric, unique", 1e-10,
       criterion_levi_civita},
      {11, "frame-bundle triangle closes and is equivariant", 1e-12, criterion_frames},
      {12, "structural conformance of the tower calculus", 1e-12, criterion_conformance},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = Clock::now();
    double residual;
    try {
      residual = c.run();
    } catch (const std::exception& e) {
      residual = 1e308;
      std::fprintf(stderr, "criterion %02d raised: %s\n", c.idx, e.what());
    }
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    bool pass = residual <= c.tol;
    failures += pass ? 0 : 1;
    std::printf("criterion %02d [%s] residual %.3e <= %.0e (%5.2f s)  %s\n", c.idx,
                pass ? "PASS" : "FAIL", residual, c.tol, secs, c.label);
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
