#include <doctest.h>

#include <random>
#include <thread>

#include "symjet/connection.hpp"
#include "symjet/suites.hpp"

using namespace symjet;

namespace {

std::mt19937 rng(21);

ManifoldSpec const_sjet_spec(const Bilin& G) {
  // Symmetry-jet manifold with constant coefficients.
  int n = G.dim();
  ManifoldSpec spec;
  spec.name = "const_sjet";
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

}  // namespace

TEST_CASE("point reflections induce the flat connection") {
  // s_x(y) = 2x - y has vanishing second derivative: zero coefficient field.
  ManifoldSpec spec = const_sjet_spec(Bilin(2));
  ConnectionField c = ConnectionField::from_manifold(spec);
  SymmetryJetField s = SymmetryJetField::from_manifold(spec);
  Vec x = random_vec(rng, 2);
  CHECK(c.gamma(x).max_abs() == 0.0);
  CHECK(s.classify_at(x) == Holonomy::holonomic);
}

TEST_CASE("constant symmetry-jet coefficients give the expected connection") {
  int n = 2;
  Bilin G = random_bilin(rng, n);
  Bilin Gsym = (G + G.transposed()) * 0.5;
  ManifoldSpec spec = const_sjet_spec(Gsym);
  ConnectionField c = ConnectionField::from_manifold(spec);
  Vec x = random_vec(rng, n);
  // Γ(d, v) = -1/2 G(v, d); symmetric G gives a torsionless connection.
  Vec d = random_vec(rng, n), v = random_vec(rng, n);
  CHECK(max_abs(Vec(c.gamma(x)(d, v) + 0.5 * Gsym(v, d))) == 0.0);
  CHECK(classical_tensors(c, x).T.max_abs() == 0.0);

  // An antisymmetric part shows up as torsion, matching the defect route.
  ManifoldSpec spec2 = const_sjet_spec(G);
  ConnectionField c2 = ConnectionField::from_manifold(spec2);
  SymmetryJetField s2 = SymmetryJetField::from_manifold(spec2);
  TensorValueSet ts = classical_tensors(c2, x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec X = Vec::Unit(n, i), Y = Vec::Unit(n, j);
      CHECK(max_abs(Vec(torsion_from_sjet(s2, x, X, Y) - ts.T(X, Y))) <= 1e-15);
    }
}

TEST_CASE("round trips between coefficients are exact") {
  ManifoldSpec man = load_manifold("poly_random_tors(17)");
  ConnectionField c = ConnectionField::from_manifold(man);
  SymmetryJetField s = sjet_from_connection(c);
  ConnectionField c2 = connection_from_sjet(s);
  for (int t = 0; t < 20; ++t) {
    Vec x = man.domain.sample(rng);
    CHECK((c.gamma(x) - c2.gamma(x)).max_abs() == 0.0);
  }
  // A torsionless connection yields a symmetric (holonomic) symmetry jet.
  ManifoldSpec sym = load_manifold("poly_random(17)");
  SymmetryJetField ss = sjet_from_connection(ConnectionField::from_manifold(sym));
  Vec x = sym.domain.sample(rng);
  CHECK(ss.gamma_s(x).is_symmetric(1e-15));
  CHECK(ss.classify_at(x) == Holonomy::holonomic);
}

TEST_CASE("the bundle projection defined by the connection") {
  ManifoldSpec man = load_manifold("poly_random(2)");
  ConnectionField c = ConnectionField::from_manifold(man);
  Vec x = man.domain.sample(rng);
  int n = 2;

  // Verticals map to their fiber coordinate.
  Vec V = random_vec(rng, n);
  CHECK(max_abs(Vec(tilde_nabla(c, t2_ivert(x, V)) - V)) == 0.0);

  // Flat chart: the projection reads the mixed slot.
  ManifoldSpec flat = load_manifold("euclidean_2");
  ConnectionField cf = ConnectionField::from_manifold(flat);
  T2Elem e{Vec::Zero(2), random_vec(rng, 2), random_vec(rng, 2), random_vec(rng, 2)};
  CHECK(max_abs(Vec(tilde_nabla(cf, e) - e.s12)) == 0.0);

  // Horizontal elements are the kernel.
  Vec s1 = random_vec(rng, n), s2 = random_vec(rng, n);
  T2Elem h{x, s1, s2, -c.gamma(x)(s2, s1)};
  CHECK(max_abs(tilde_nabla(c, h)) <= 1e-16);

  Vec outside = Vec::Constant(n, 50.0);
  CHECK_THROWS_AS(tilde_nabla(c, t2_ivert(outside, V)), DomainError);
}

TEST_CASE("second covariant derivative through the partial affine difference") {
  // Reconstruct ∇_X ∇_Y Z from the section jet, first on a constant-coefficient
  // chart against the hand formula, then against the classical oracle.
  int n = 2;
  Bilin G = random_bilin(rng, n);
  ManifoldSpec spec = const_sjet_spec(G);
  SymmetryJetField s = SymmetryJetField::from_manifold(spec);
  ConnectionField c = ConnectionField::from_manifold(spec);
  Vec x = random_vec(rng, n);

  auto second_cov = [&](const Vec& X, const Vec& Y, const Vec& Z) {
    Jet111 l = s.j1(x);
    T3Elem E = T3Elem::zero(x);
    E.s1 = Z;
    E.s2 = Y;
    E.s3 = X;
    T3Elem E2 = t3_scale(VB3::pstar, -1.0, t3_scale(VB3::pstarstar, -1.0, act(l, E)));
    T2Elem U = t3_Pi_partial(2, E, E2);
    T2Elem W = t2_scale(VB2::pstar, 0.5, U);
    return Vec(0.5 * t2_pi(W, t2_thick_minus(act(s.at(x), W))));
  };

  for (int t = 0; t < 5; ++t) {
    Vec X = random_vec(rng, n), Y = random_vec(rng, n), Z = random_vec(rng, n);
    Bilin g = c.gamma(x);
    Vec expect = g(X, g(Y, Z));  // constant coefficients, constant extensions
    CHECK(max_abs(Vec(second_cov(X, Y, Z) - expect)) <= 1e-14);
  }

  // Varying coefficients: ∇_X ∇_Y Z = (∂_X Γ)(Y, Z) + Γ(X, Γ(Y, Z)).
  ManifoldSpec man = load_manifold("poly_random_tors(9)");
  SymmetryJetField s2 = SymmetryJetField::from_manifold(man);
  ConnectionField c2 = ConnectionField::from_manifold(man);
  Vec p = man.domain.sample(rng);
  auto second_cov2 = [&](const Vec& X, const Vec& Y, const Vec& Z) {
    Jet111 l = s2.j1(p);
    T3Elem E = T3Elem::zero(p);
    E.s1 = Z;
    E.s2 = Y;
    E.s3 = X;
    T3Elem E2 = t3_scale(VB3::pstar, -1.0, t3_scale(VB3::pstarstar, -1.0, act(l, E)));
    T2Elem U = t3_Pi_partial(2, E, E2, 1e-9);
    T2Elem W = t2_scale(VB2::pstar, 0.5, U);
    return Vec(0.5 * t2_pi(W, t2_thick_minus(act(s2.at(p), W)), 1e-9));
  };
  GammaJet gj = c2.gamma_jet(p, 1);
  for (int t = 0; t < 5; ++t) {
    Vec X = random_vec(rng, n), Y = random_vec(rng, n), Z = random_vec(rng, n);
    Vec expect = gj.dG.permuted(1, 2, 0)(X, Y, Z) + gj.G(X, gj.G(Y, Z));
    CHECK(max_abs(Vec(second_cov2(X, Y, Z) - expect)) <= 1e-13);
  }
}

TEST_CASE("covariant derivative routes and the Leibniz rule") {
  ManifoldSpec man = load_manifold("poly_random_tors(23)");
  ConnectionField c = ConnectionField::from_manifold(man);
  SymmetryJetField s = sjet_from_connection(c);
  int n = 2;

  VectorField V = VectorField::parse({"0.3 + 0.4*x1 - 0.2*x2^2", "0.1*x1*x2 - 0.5"}, n);
  ScalarField f = ScalarField::parse("0.7 + 0.2*x1 - 0.3*x2", n);

  for (int t = 0; t < 10; ++t) {
    Vec x = man.domain.sample(rng);
    Vec d = random_vec(rng, n);
    CovRoutes r = covariant_derivative_routes(s, V, x, d);
    CHECK(max_abs(Vec(r.direct - r.via_pi)) <= 1e-15);
    CHECK(max_abs(Vec(r.direct - r.via_bracket)) <= 1e-15);

    // Leibniz in the argument, with the product field assembled explicitly.
    TaylorScalar ft = f.taylor(x, 1);
    Vec prod_rule = ft.gradient().dot(d) * V.value(x) +
                    ft.value() * covariant_derivative(c, V, x, d);
    Vec direct = ft.value() * (V.jacobian(x) * d) + ft.gradient().dot(d) * V.value(x) +
                 c.gamma(x)(d, ft.value() * V.value(x));
    CHECK(max_abs(Vec(direct - prod_rule)) <= 1e-15);

    // Flat constant case.
    ConnectionField cf = ConnectionField::from_manifold(load_manifold("euclidean_2"));
    VectorField cv = VectorField::constant(random_vec(rng, n));
    CHECK(max_abs(covariant_derivative(cf, cv, Vec::Zero(2), d)) == 0.0);
  }
}

TEST_CASE("affine extensions at order two") {
  ManifoldSpec man = load_manifold("poly_random_tors(31)");
  ConnectionField c = ConnectionField::from_manifold(man);
  SymmetryJetField s = sjet_from_connection(c);
  int n = 2;
  Vec x = man.domain.sample(rng), y = man.domain.sample(rng);

  // Flat connection: extensions have no bilinear part.
  ConnectionField cf = ConnectionField::from_manifold(load_manifold("euclidean_2"));
  Jet1 xif{Vec::Zero(2), Vec::Ones(2), random_invertible(rng, 2)};
  CHECK(affine_extension(cf, xif).B.max_abs() == 0.0);

  // Extension of -I is the symmetry jet.
  Jet11 S = affine_extension(c, Jet1::minus_identity(x));
  CHECK(jet_difference(S, s.at(x)).max_abs() == 0.0);

  // Morphism property on random composable pairs.
  Vec z = man.domain.sample(rng);
  Jet1 a{y, z, random_invertible(rng, n)};
  Jet1 b{x, y, random_invertible(rng, n)};
  CHECK(jet_difference(affine_extension(c, compose(a, b)),
                       compose(affine_extension(c, a), affine_extension(c, b)))
            .max_abs() <= 1e-13);
}

TEST_CASE("affine extensions at order three") {
  ManifoldSpec man = load_manifold("poly_random_tors(37)");
  ConnectionField c = ConnectionField::from_manifold(man);
  SymmetryJetField s = sjet_from_connection(c);
  int n = 2;

  // Flat case: trivial trilinear part.
  ConnectionField cf = ConnectionField::from_manifold(load_manifold("euclidean_2"));
  Jet1 xif{Vec::Zero(2), Vec::Ones(2), random_invertible(rng, 2)};
  Jet111 Sf = affine_extension3(cf, xif);
  CHECK(Sf.C.max_abs() == 0.0);
  CHECK(Sf.faces_coincide());

  Vec x = man.domain.sample(rng), y = man.domain.sample(rng), z = man.domain.sample(rng);
  Jet1 a{y, z, random_invertible(rng, n)};
  Jet1 b{x, y, random_invertible(rng, n)};
  Jet111 lhs = affine_extension3(c, compose(a, b));
  Jet111 rhs = compose(affine_extension3(c, a), affine_extension3(c, b));
  CHECK(jet111_difference(lhs, rhs, 1e-10).max_abs() <= 1e-10);

  // Commutation with the section jet.
  Jet1 xi{x, y, random_invertible(rng, n)};
  Jet111 S3 = affine_extension3(c, xi);
  Jet111 left = compose(s.j1(y), S3);
  Jet111 right = compose(S3, s.j1(x));
  CHECK((left.C - right.C).max_abs() <= 1e-11);
  CHECK((left.B12 - right.B12).max_abs() <= 1e-12);
  CHECK((left.G13_2 - right.G13_2).max_abs() <= 1e-12);
}

TEST_CASE("curvature and torsion fixtures at distinguished points") {
  // Sphere at the origin: R(e1,e2)e2 = 4 e1, T = 0, parallel curvature.
  ManifoldSpec sph = load_manifold("sphere_stereo");
  ConnectionField c = ConnectionField::from_manifold(sph);
  SymmetryJetField s = sjet_from_connection(c);
  Vec o = Vec::Zero(2);
  Vec e1 = Vec::Unit(2, 0), e2 = Vec::Unit(2, 1);
  TensorValueSet ts = classical_tensors(c, o);
  CHECK(max_abs(Vec(ts.R(e1, e2, e2) - 4.0 * e1)) <= 1e-12);
  CHECK(ts.T.max_abs() == 0.0);
  CHECK(ts.dR.max_abs() <= 1e-11);
  CHECK(max_abs(Vec(curvature_sjet(s, o, e1, e2, e2) - 4.0 * e1)) <= 1e-12);

  // Hyperbolic disk at the origin via the homothety route: R(e1,e2)e2 = -4 e1.
  ManifoldSpec disk = load_manifold("poincare_disk");
  ConnectionField cd = ConnectionField::from_manifold(disk);
  CHECK(max_abs(Vec(curvature_homothety(cd, 2.0, o, e1, e2, e2) + 4.0 * e1)) <= 1e-12);

  // Torsion fixture: T(e1, e2) = 2c e1 and a pure product curvature term.
  ManifoldSpec ft = load_manifold("flat_torsion_c");
  ConnectionField cft = ConnectionField::from_manifold(ft);
  SymmetryJetField sft = sjet_from_connection(cft);
  TensorValueSet tf = classical_tensors(cft, o);
  CHECK(max_abs(Vec(tf.T(e1, e2) - 2.0 * 0.5 * e1)) == 0.0);
  CHECK(max_abs(Vec(torsion_from_sjet(sft, o, e1, e2) - 2.0 * 0.5 * e1)) == 0.0);
  Bilin g = cft.gamma(o);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Vec X = Vec::Unit(2, i), Y = Vec::Unit(2, j), Z = Vec::Unit(2, k);
        Vec expect = g(X, g(Y, Z)) - g(Y, g(X, Z));
        CHECK(max_abs(Vec(tf.R(X, Y, Z) - expect)) == 0.0);
      }

  // Scale guards of the homothety route.
  CHECK_THROWS_AS(curvature_homothety(cd, 1.0, o, e1, e2, e2), BadScalar);
  CHECK_THROWS_AS(curvature_homothety(cft, 2.0, o, e1, e2, e2), TorsionNotZero);
}

TEST_CASE("order-3 defects against preservation defects on an isometry jet") {
  ManifoldSpec sph = load_manifold("sphere_stereo");
  ConnectionField c = ConnectionField::from_manifold(sph);
  Vec x(2);
  x << 0.2, -0.1;
  Jet1 xi = sphere_rotation_jet(x, 0.7, 0.3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Vec X = Vec::Unit(2, i), Y = Vec::Unit(2, j), Z = Vec::Unit(2, k);
        DefectResult r30 = residual_R_defect(c, xi, X, Y, Z);
        CHECK(r30.hypothesis_met);
        CHECK(max_abs(r30.value) <= 1e-9);
        DefectResult r24 = residual_dT_defect(c, xi, X, Y, Z);
        CHECK(r24.hypothesis_met);
        CHECK(max_abs(r24.value) <= 1e-9);
      }
}

TEST_CASE("tensor covariant derivatives") {
  // Flat connection, constant tensor: zero.
  ManifoldSpec flat = load_manifold("euclidean_2");
  SymmetryJetField sf = SymmetryJetField::from_manifold(flat);
  TensorField Q = TensorField::parse(2, 0, 2, {"1", "0.5", "0.5", "2"});
  TensorValue r = tensor_covariant_derivative(sf, Q, Vec::Zero(2), Vec::Unit(2, 0));
  CHECK(r.max_abs() == 0.0);

  // The metric is parallel for its own connection.
  ManifoldSpec sph = load_manifold("sphere_stereo");
  SymmetryJetField s = SymmetryJetField::from_manifold(sph);
  TensorField g = sph.metric_field();
  for (int t = 0; t < 5; ++t) {
    Vec x = sph.domain.sample(rng);
    Vec d = random_vec(rng, 2);
    CHECK(tensor_covariant_derivative(s, g, x, d).max_abs() <= 1e-10);
  }

  // Random (0,2) field against the classical formula.
  ManifoldSpec man = load_manifold("poly_random_tors(8)");
  SymmetryJetField sm = SymmetryJetField::from_manifold(man);
  ConnectionField cm = ConnectionField::from_manifold(man);
  TensorField Q2 = TensorField::parse(
      2, 0, 2, {"x1 + 0.2*x2", "0.3*x1*x2", "1 - 0.1*x2^2", "0.4 + x1^2"});
  for (int t = 0; t < 5; ++t) {
    Vec x = man.domain.sample(rng);
    Vec d = random_vec(rng, 2);
    TensorValue a = tensor_covariant_derivative(sm, Q2, x, d);
    TensorValue b = classical_tensor_derivative(cm, Q2, x, d);
    CHECK((a - b).max_abs() <= 1e-14);
  }
}

TEST_CASE("existence and uniqueness of the metric connection") {
  // Identity metric: vanishing coefficients.
  std::string flat_metric = "[manifold] name=\"em\" dim=2 kind=\"metric\"\n"
                            "[domain] type=\"ball\" radius=2\n"
                            "[fields] g11=\"1\" g12=\"0\" g22=\"1\"\n";
  ManifoldSpec em = parse_manifold(flat_metric);
  LeviCivitaResult lc = levi_civita(em, Vec::Zero(2));
  CHECK(lc.gamma.max_abs() == 0.0);
  CHECK(lc.gamma_solved.max_abs() <= 1e-14);
  CHECK(lc.unique);

  // Conformal factor critical at the origin: coefficients vanish there.
  ManifoldSpec sph = load_manifold("sphere_stereo");
  LeviCivitaResult lcs = levi_civita(sph, Vec::Zero(2));
  CHECK(lcs.gamma.max_abs() <= 1e-15);

  // Both routes agree off the origin, the solved system has full rank, and
  // the result is torsionless and metric-parallel.
  for (int t = 0; t < 5; ++t) {
    Vec x = sph.domain.sample(rng);
    LeviCivitaResult l = levi_civita(sph, x);
    CHECK((l.gamma - l.gamma_solved).max_abs() <= 1e-13);
    CHECK(l.rank == l.expected_rank);
    CHECK((l.gamma - l.gamma.transposed()).max_abs() == 0.0);
  }

  // Rank certificate for random nondegenerate metrics of both signatures.
  for (int n : {2, 3}) {
    for (int t = 0; t < 10; ++t) {
      Mat A = random_invertible(rng, n);
      Mat h = A.transpose() * A;  // positive definite
      CHECK(levi_civita_operator_rank(h) == n * n * (n + 1) / 2);
      Mat lorentz = h;
      lorentz.col(0) *= -1;
      lorentz.row(0) *= -1;  // flip one eigenvalue direction
      Mat hl = 0.5 * (lorentz + lorentz.transpose());
      if (std::abs(hl.determinant()) > 1e-6)
        CHECK(levi_civita_operator_rank(hl) == n * n * (n + 1) / 2);
    }
  }

  CHECK_THROWS_AS(levi_civita(load_manifold("euclidean_2"), Vec::Zero(2)), Error);
}

TEST_CASE("preservation residuals and the integrability verdict") {
  // The identity jet preserves everything.
  ManifoldSpec man = load_manifold("poly_random_tors(41)");
  ConnectionField c = ConnectionField::from_manifold(man);
  Vec x = man.domain.sample(rng);
  IntegrabilityReport id = integrability_check(c, Jet1::identity(x));
  CHECK(id.torsion_residual == 0.0);
  CHECK(id.curvature_residual == 0.0);
  CHECK(id.integrable);

  // Sphere rotations lie in the integrability locus and have κ-invariant
  // order-3 extensions; perturbations break both.
  ManifoldSpec sph = load_manifold("sphere_stereo");
  ConnectionField cs = ConnectionField::from_manifold(sph);
  Vec p(2);
  p << 0.15, 0.2;
  Jet1 rot = sphere_rotation_jet(p, 0.9, 1.1);
  IntegrabilityReport ok = integrability_check(cs, rot);
  CHECK(ok.integrable);
  CHECK(ok.curvature_residual <= 1e-12);
  CHECK(ok.kappa_defect <= 1e-12);

  Jet1 bad = rot;
  bad.L(0, 0) *= 1.05;
  IntegrabilityReport nok = integrability_check(cs, bad);
  CHECK_FALSE(nok.integrable);
  CHECK(nok.curvature_residual > 1e-3);
  CHECK(nok.kappa_defect > 1e-3);

  // Odd-order tensors cannot be preserved by -I unless they vanish.
  ManifoldSpec ft = load_manifold("flat_torsion_c");
  ConnectionField cf = ConnectionField::from_manifold(ft);
  Vec o = Vec::Zero(2);
  IntegrabilityReport mi = integrability_check(cf, Jet1::minus_identity(o));
  TensorValueSet ts = classical_tensors(cf, o);
  CHECK(mi.torsion_residual == doctest::Approx(2.0 * ts.T.max_abs()).epsilon(1e-12));
  CHECK_FALSE(mi.integrable);
}

TEST_CASE("the residual derivative along the affine plane") {
  ManifoldSpec man = load_manifold("poly_random_tors(43)");
  ConnectionField c = ConnectionField::from_manifold(man);
  for (int t = 0; t < 5; ++t) {
    Vec x = man.domain.sample(rng), y = man.domain.sample(rng);
    Jet1 xi{x, y, random_invertible(rng, 2)};
    TangencyCheck tc = preservation_derivative_check(c, xi, random_vec(rng, 2));
    CHECK(tc.residual <= 1e-8);
  }
}

TEST_CASE("the classical oracle satisfies the curvature identities") {
  // Antisymmetry and both Bianchi identities on a random torsionless field;
  // these pin the oracle's own index arrangement independently.
  ManifoldSpec man = load_manifold("poly_random(71)");
  ConnectionField c = ConnectionField::from_manifold(man);
  int n = 2;
  for (int t = 0; t < 10; ++t) {
    Vec x = man.domain.sample(rng);
    TensorValueSet ts = classical_tensors(c, x);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Vec X = Vec::Unit(n, i), Y = Vec::Unit(n, j), Z = Vec::Unit(n, k);
          CHECK(max_abs(Vec(ts.R(X, Y, Z) + ts.R(Y, X, Z))) <= 1e-14);
          CHECK(max_abs(Vec(ts.R(X, Y, Z) + ts.R(Y, Z, X) + ts.R(Z, X, Y))) <= 1e-13);
          for (int l = 0; l < n; ++l) {
            Vec W = Vec::Unit(n, l);
            Vec bianchi2 = ts.dR(X, Y, Z, W) + ts.dR(Y, Z, X, W) + ts.dR(Z, X, Y, W);
            CHECK(max_abs(bianchi2) <= 1e-12);
          }
        }
  }

  // Dimension three as well.
  ManifoldSpec m3 = load_manifold("poly_random3(71)");
  ConnectionField c3 = ConnectionField::from_manifold(m3);
  Vec x = m3.domain.sample(rng);
  TensorValueSet t3 = classical_tensors(c3, x);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 5; ++t) {
    Vec X = random_vec(rng, 3), Y = random_vec(rng, 3), Z = random_vec(rng, 3),
        W = random_vec(rng, 3);
    CHECK(max_abs(Vec(t3.R(X, Y, Z) + t3.R(Y, Z, X) + t3.R(Z, X, Y))) <= 1e-12);
    CHECK(max_abs(Vec(t3.dR(X, Y, Z, W) + t3.dR(Y, Z, X, W) + t3.dR(Z, X, Y, W))) <= 1e-11);
  }
}

TEST_CASE("constant-curvature identities hold away from the chart origin") {
  // Unit-curvature round metric: R(X,Y)Z = g(Y,Z)X - g(X,Z)Y everywhere,
  // and the curvature is parallel; similarly with K = -1 on the disk.
  for (auto [name, K] : std::vector<std::pair<const char*, double>>{{"sphere_stereo", 1.0},
                                                                    {"poincare_disk", -1.0}}) {
    ManifoldSpec man = load_manifold(name);
    ConnectionField c = ConnectionField::from_manifold(man);
    SymmetryJetField s = sjet_from_connection(c);
    for (int t = 0; t < 10; ++t) {
      Vec x = man.domain.sample(rng);
      Mat g = man.metric_value(x);
      TensorValueSet ts = classical_tensors(c, x);
      for (int tt = 0; tt < 3; ++tt) {
        Vec X = random_vec(rng, 2), Y = random_vec(rng, 2), Z = random_vec(rng, 2);
        Vec expect = K * (Y.dot(g * Z) * X - X.dot(g * Z) * Y);
        CHECK(max_abs(Vec(ts.R(X, Y, Z) - expect)) <= 1e-10);
        CHECK(max_abs(Vec(curvature_sjet(s, x, X, Y, Z) - expect)) <= 1e-10);
      }
      CHECK(ts.dR.max_abs() <= 1e-9);
      CHECK(ts.dT.max_abs() <= 1e-12);
    }
  }
}

TEST_CASE("field queries and jet operations are safe under concurrent use") {
  ManifoldSpec man = load_manifold("sphere_stereo");
  ConnectionField c = ConnectionField::from_manifold(man);
  SymmetryJetField s = sjet_from_connection(c);
  Vec x(2);
  x << 0.2, -0.15;
  Vec e1 = Vec::Unit(2, 0), e2 = Vec::Unit(2, 1);
  Vec reference = curvature_sjet(s, x, e1, e2, e2);

  std::vector<std::thread> workers;
  std::vector<double> drift(4, 0.0);
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      double worst = 0;
      for (int t = 0; t < 200; ++t) {
        Vec r = curvature_sjet(s, x, e1, e2, e2);
        worst = std::max(worst, max_abs(Vec(r - reference)));
        Jet11 S = affine_extension(c, Jet1::minus_identity(x));
        worst = std::max(worst, jet_difference(S, s.at(x)).max_abs());
      }
      drift[static_cast<size_t>(w)] = worst;
    });
  }
  for (std::thread& t : workers) t.join();
  for (double d : drift) CHECK(d == 0.0);
}
