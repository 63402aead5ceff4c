#include "symjet/connection.hpp"

#include <cmath>

namespace symjet {

namespace {

Mat minus_id(int n) { return -Mat::Identity(n, n); }

TensorValue tv_from_bilin(const Bilin& B) {
  int n = B.dim();
  TensorValue out(n, 1, 2);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.at({k, i, j}) = B.at(k, i, j);
  return out;
}

TensorValue tv_from_trilin(const Trilin& T) {
  int n = T.dim();
  TensorValue out(n, 1, 3);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) out.at({k, i, j, l}) = T.at(k, i, j, l);
  return out;
}

double jet111_max_diff(const Jet111& a, const Jet111& b) {
  double m = 0;
  m = std::max(m, max_abs(Mat(a.L1 - b.L1)));
  m = std::max(m, max_abs(Mat(a.L2 - b.L2)));
  m = std::max(m, max_abs(Mat(a.L3 - b.L3)));
  m = std::max(m, (a.B12 - b.B12).max_abs());
  m = std::max(m, (a.B13 - b.B13).max_abs());
  m = std::max(m, (a.B23 - b.B23).max_abs());
  m = std::max(m, (a.C - b.C).max_abs());
  m = std::max(m, max_abs(Mat(a.V12 - b.V12)));
  m = std::max(m, max_abs(Mat(a.V13 - b.V13)));
  m = std::max(m, max_abs(Mat(a.V23 - b.V23)));
  m = std::max(m, max_abs(Mat(a.V123 - b.V123)));
  m = std::max(m, (a.G12_3 - b.G12_3).max_abs());
  m = std::max(m, (a.G13_2 - b.G13_2).max_abs());
  m = std::max(m, (a.G1_23 - b.G1_23).max_abs());
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Field wrappers

ConnectionField::ConnectionField(std::shared_ptr<const GammaProvider> prov, Domain dom,
                                 std::string name)
    : prov_(std::move(prov)), dom_(std::move(dom)), name_(std::move(name)) {}

ConnectionField ConnectionField::from_manifold(const ManifoldSpec& spec) {
  return ConnectionField(spec.connection_provider(), spec.domain, spec.name);
}

void ConnectionField::check_domain(const Vec& x) const {
  if (!dom_.contains(x))
    throw DomainError("connection query outside the chart domain of '" + name_ + "'");
}

Bilin ConnectionField::gamma(const Vec& x) const {
  check_domain(x);
  return prov_->gamma(x);
}

GammaJet ConnectionField::gamma_jet(const Vec& x, int order) const {
  check_domain(x);
  return prov_->jet(x, order);
}

SymmetryJetField::SymmetryJetField(std::shared_ptr<const GammaProvider> prov, Domain dom,
                                   std::string name)
    : prov_(std::move(prov)), dom_(std::move(dom)), name_(std::move(name)) {}

SymmetryJetField SymmetryJetField::from_manifold(const ManifoldSpec& spec) {
  if (spec.kind == ManifoldKind::SymmetryJet)
    return SymmetryJetField(make_christoffel_provider(spec.n, spec.gamma), spec.domain, spec.name);
  return sjet_from_connection(ConnectionField::from_manifold(spec));
}

void SymmetryJetField::check_domain(const Vec& x) const {
  if (!dom_.contains(x))
    throw DomainError("symmetry-jet query outside the chart domain of '" + name_ + "'");
}

Bilin SymmetryJetField::gamma_s(const Vec& x) const {
  check_domain(x);
  return prov_->gamma(x);
}

GammaJet SymmetryJetField::gamma_s_jet(const Vec& x, int order) const {
  check_domain(x);
  return prov_->jet(x, order);
}

Jet11 SymmetryJetField::at(const Vec& x) const {
  int n = dim();
  return Jet11::jet(x, x, minus_id(n), minus_id(n), gamma_s(x));
}

Jet111 SymmetryJetField::j1(const Vec& x) const {
  int n = dim();
  GammaJet gs = gamma_s_jet(x, 1);
  // The jet factory's extended-coefficient pattern is exactly the one this
  // section jet carries; the faces still differ (p-face 𝔰(x), others m_{-1*}).
  return Jet111::jet(x, x, minus_id(n), minus_id(n), Mat::Identity(n, n), gs.G, Bilin(n),
                     Bilin(n), gs.dG);
}

Holonomy SymmetryJetField::classify_at(const Vec& x, double tol) const {
  return classify(at(x), tol);
}

SymmetryJetField sjet_from_connection(const ConnectionField& c) {
  return SymmetryJetField(make_swapped_scaled_provider(c.provider(), -2.0), c.domain(), c.name());
}

ConnectionField connection_from_sjet(const SymmetryJetField& s) {
  return ConnectionField(make_swapped_scaled_provider(s.provider(), -0.5), s.domain(), s.name());
}

// ---------------------------------------------------------------------------
// The projection ∇̃ and covariant derivatives

Vec tilde_nabla(const ConnectionField& c, const T2Elem& e) {
  return e.s12 + c.gamma(e.base)(e.s2, e.s1);
}

Vec covariant_derivative(const ConnectionField& c, const VectorField& V, const Vec& x,
                         const Vec& d) {
  return V.jacobian(x) * d + c.gamma(x)(d, V.value(x));
}

CovRoutes covariant_derivative_routes(const SymmetryJetField& s, const VectorField& V,
                                      const Vec& x, const Vec& d) {
  CovRoutes out;
  ConnectionField c = connection_from_sjet(s);
  out.direct = covariant_derivative(c, V, x, d);

  Jet11 sx = s.at(x);
  T2Elem vd = pushforward(V, x, d);

  // ½ π(V_* d, thick-minus(𝔰 · V_* d)).
  out.via_pi = 0.5 * t2_pi(vd, t2_thick_minus(act(sx, vd)));

  // Bracket route: W = pushforward of V through the symmetry, W_*(d) =
  // m_{-1}(𝔰 · V_* d); then ∇ = ½ [const-d, V + W]. Since (V + W)(x) = 0,
  // the κ-leg of the bracket formula is κ(d_*(0_x)) = (x; 0, d, 0).
  T2Elem wd = t2_scale(VB2::p, -1.0, act(sx, vd));
  T2Elem sumd = t2_combine(VB2::pstar, 1.0, vd, 1.0, wd);
  out.via_bracket = 0.5 * t2_pi(sumd, t2_kappa(t2_i(x, d)));
  return out;
}

// ---------------------------------------------------------------------------
// Affine extensions

Jet11 affine_extension(const ConnectionField& c, const Jet1& xi) {
  Bilin gx = c.gamma(xi.x);
  Bilin gy = c.gamma(xi.y);
  Bilin B = gx.transposed().premul(xi.L) - gy.transposed().compose(xi.L, xi.L);
  return Jet11::jet(xi.x, xi.y, xi.L, xi.L, std::move(B));
}

Jet111 affine_extension3(const ConnectionField& c, const Jet1& xi) {
  const int n = xi.dim();
  const Mat& L = xi.L;
  GammaJet jx = c.gamma_jet(xi.x, 1);
  GammaJet jy = c.gamma_jet(xi.y, 1);
  Jet11 S = affine_extension(c, xi);
  const Bilin& BS = S.B;
  Mat I = Mat::Identity(n, n);

  // C(s1,s2,s3) = BS(Γx(s2,s1), s3) + L (∂_{s3}Γx)(s2,s1)
  //             - (∂_{L s3}Γy)(L s2, L s1) - Γy(BS(s2,s3), L s1) - Γy(L s2, BS(s1,s3)).
  Trilin t1 = trilin_nest12(BS, jx.G.transposed(), I);
  Trilin t2 = jx.dG.permuted(1, 0, 2).premul(L);
  Trilin t3 = jy.dG.permuted(1, 0, 2).compose(L, L, L);
  Trilin t4 = trilin_nest23(jy.G.transposed(), L, BS);
  Trilin t5 = trilin_nest13(jy.G.transposed(), BS, L);
  Trilin C = t1 + t2 - t3 - t4 - t5;
  return Jet111::jet(xi.x, xi.y, L, L, L, BS, BS, BS, std::move(C));
}

// ---------------------------------------------------------------------------
// Torsion and curvature as holonomy defects

Vec torsion_from_sjet(const SymmetryJetField& s, const Vec& x, const Vec& X, const Vec& Y) {
  Jet11 sx = s.at(x);
  T2Elem e{x, Y, X, Vec::Zero(x.size())};
  return 0.5 * t2_pi(act(jet_kappa(sx), e), act(sx, e));
}

Vec torsion_defect(const ConnectionField& c, const Jet1& xi, const Vec& X, const Vec& Y) {
  Jet11 S = affine_extension(c, xi);
  T2Elem e{xi.x, Y, X, Vec::Zero(xi.x.size())};
  return t2_pi(act(S, e), act(jet_kappa(S), e));
}

Vec curvature_sjet(const SymmetryJetField& s, const Vec& x, const Vec& X, const Vec& Y,
                   const Vec& Z) {
  Jet111 l = s.j1(x);
  Jet111 kl = jet111_involution(l, Invol3::kappa);
  T3Elem E = T3Elem::zero(x);
  E.s1 = Z;
  E.s2 = Y;
  E.s3 = X;
  T3Elem a = act(kl, act(l, E));
  T3Elem b = act(l, act(kl, E));
  double scale = std::max({1.0, max_abs(a.s12), max_abs(a.s13), max_abs(a.s23), max_abs(b.s12),
                           max_abs(b.s13), max_abs(b.s23)});
  return 0.25 * t3_Pi(a, b, 1e-9 * scale);
}

Vec curvature_homothety(const ConnectionField& c, double a, const Vec& x, const Vec& X,
                        const Vec& Y, const Vec& Z, double torsion_tol) {
  if (std::abs(a) < 1e-9 || std::abs(a - 1.0) < 1e-9 || std::abs(a + 1.0) < 1e-9)
    throw BadScalar("curvature_homothety requires a outside {0, 1, -1}");
  Bilin g = c.gamma(x);
  if ((g - g.transposed()).max_abs() > torsion_tol)
    throw TorsionNotZero("curvature_homothety requires a torsionless connection");
  int n = static_cast<int>(x.size());
  Jet1 ma{x, x, a * Mat::Identity(n, n)};
  Jet111 S3 = affine_extension3(c, ma);
  Jet111 kS3 = jet111_involution(S3, Invol3::kappa);
  T3Elem E = T3Elem::zero(x);
  E.s1 = Z;
  E.s2 = Y;
  E.s3 = X;
  Vec diff = act(S3, E).s123 - act(kS3, E).s123;
  return diff / (a * (1.0 - a * a));
}

DefectResult residual_dT_defect(const ConnectionField& c, const Jet1& xi, const Vec& X,
                                const Vec& Y, const Vec& Z, double tol) {
  Jet111 S3 = affine_extension3(c, xi);
  Jet111 kS3 = jet111_involution(S3, Invol3::kappa_star);
  T3Elem E = T3Elem::zero(xi.x);
  E.s1 = X;
  E.s2 = Y;
  E.s3 = Z;
  DefectResult out;
  out.value = act(S3, E).s123 - act(kS3, E).s123;
  out.hypothesis_met = classify(affine_extension(c, xi), tol) == Holonomy::holonomic;
  return out;
}

DefectResult residual_R_defect(const ConnectionField& c, const Jet1& xi, const Vec& X,
                               const Vec& Y, const Vec& Z, double tol) {
  Jet111 S3 = affine_extension3(c, xi);
  Jet111 kS3 = jet111_involution(S3, Invol3::kappa);
  T3Elem E = T3Elem::zero(xi.x);
  E.s1 = Z;
  E.s2 = Y;
  E.s3 = X;
  DefectResult out;
  out.value = act(S3, E).s123 - act(kS3, E).s123;
  TensorValueSet tx = classical_tensors(c, xi.x);
  TensorValueSet ty = classical_tensors(c, xi.y);
  out.hypothesis_met =
      preservation_residual(xi, tv_from_bilin(tx.T), tv_from_bilin(ty.T)) <= tol;
  return out;
}

// ---------------------------------------------------------------------------
// Classical oracle

TensorValueSet classical_tensors(const ConnectionField& c, const Vec& x) {
  GammaJet j = c.gamma_jet(x, 2);
  const int n = j.n;
  TensorValueSet out;

  out.T = j.G - j.G.transposed();

  // R(X,Y,Z)^l with coefficient order (l; i, j, k) contracting X^i Y^j Z^k.
  out.R = Trilin(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j2 = 0; j2 < n; ++j2)
        for (int k = 0; k < n; ++k) {
          double v = j.dG.at(l, j2, k, i) - j.dG.at(l, i, k, j2);
          for (int m = 0; m < n; ++m)
            v += j.G.at(l, i, m) * j.G.at(m, j2, k) - j.G.at(l, j2, m) * j.G.at(m, i, k);
          out.R.at(l, i, j2, k) = v;
        }

  // (∇_d T)(u, v), coefficient order (l; d, u, v).
  out.dT = Trilin(n);
  Bilin T = out.T;
  for (int l = 0; l < n; ++l)
    for (int d = 0; d < n; ++d)
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          double val = j.dG.at(l, u, v, d) - j.dG.at(l, v, u, d);
          for (int m = 0; m < n; ++m)
            val += j.G.at(l, d, m) * T.at(m, u, v) - T.at(l, m, v) * j.G.at(m, d, u) -
                   T.at(l, u, m) * j.G.at(m, d, v);
          out.dT.at(l, d, u, v) = val;
        }

  // (∇_d R)(X, Y)Z, coefficient order (l; d, i, j, k).
  out.dR = Quadlin(n);
  for (int l = 0; l < n; ++l)
    for (int d = 0; d < n; ++d)
      for (int i = 0; i < n; ++i)
        for (int j2 = 0; j2 < n; ++j2)
          for (int k = 0; k < n; ++k) {
            double v = j.d2G.at(l, j2, k, i, d) - j.d2G.at(l, i, k, j2, d);
            for (int m = 0; m < n; ++m)
              v += j.dG.at(l, i, m, d) * j.G.at(m, j2, k) + j.G.at(l, i, m) * j.dG.at(m, j2, k, d) -
                   j.dG.at(l, j2, m, d) * j.G.at(m, i, k) - j.G.at(l, j2, m) * j.dG.at(m, i, k, d);
            for (int m = 0; m < n; ++m)
              v += j.G.at(l, d, m) * out.R.at(m, i, j2, k) - out.R.at(l, m, j2, k) * j.G.at(m, d, i) -
                   out.R.at(l, i, m, k) * j.G.at(m, d, j2) - out.R.at(l, i, j2, m) * j.G.at(m, d, k);
            out.dR.at(l, d, i, j2, k) = v;
          }

  return out;
}

// ---------------------------------------------------------------------------
// Tensor covariant derivative through the jet action

TensorValue tensor_covariant_derivative(const SymmetryJetField& s, const TensorField& Q,
                                        const Vec& x, const Vec& d) {
  if (!s.domain().contains(x)) throw DomainError("tensor derivative outside the chart domain");
  const int rc = Q.contra_rank();
  const int ck = Q.cov_rank();
  const double eps = ((rc + ck) % 2 == 0) ? 1.0 : -1.0;

  Bilin gs = s.gamma_s(x);
  Mat A = gs.right(d);  // w ↦ Γs(w, d), the derivative of the linear-part family

  TensorValue q = Q.value(x);
  TensorValue qdot = Q.dirderiv(x, d);

  // Derivative of t ↦ 𝔰-action of the section jet on the tensor path.
  TensorValue delta = qdot * eps;
  if (rc == 1) {
    double ksgn = (ck % 2 == 0) ? 1.0 : -1.0;
    delta = delta + q.out_premul(A) * ksgn;
  }
  Mat Acov = A;
  for (int slot = 0; slot < ck; ++slot) delta = delta + q.cov_compose(slot, Acov) * eps;

  // ∇_d Q = ½ π(Q_* d, thick-minus(𝔰 · Q_* d)): the fiber difference is
  // qdot - (-eps · delta).
  return (qdot + delta * eps) * 0.5;
}

TensorValue classical_tensor_derivative(const ConnectionField& c, const TensorField& Q,
                                        const Vec& x, const Vec& d) {
  Mat G = c.gamma(x).left(d);  // v ↦ Γ(d, v)
  TensorValue out = Q.dirderiv(x, d);
  if (Q.contra_rank() == 1) out = out + Q.value(x).out_premul(G);
  for (int s = 0; s < Q.cov_rank(); ++s) out = out - Q.value(x).cov_compose(s, G);
  return out;
}

// ---------------------------------------------------------------------------
// Levi-Civita

namespace {

int sym_index(int a, int b, int n) {
  if (a > b) std::swap(a, b);
  // Index of the unordered pair (a, b) with a <= b.
  return a * n - a * (a - 1) / 2 + (b - a);
}

Mat lc_operator(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  const int pairs = n * (n + 1) / 2;
  const int N = n * pairs;
  // Unknowns S^m_{(ab)}; equations g(S(d,u),v) + g(u,S(d,v)) for (d, (u<=v)).
  Mat op = Mat::Zero(N, N);
  for (int d = 0; d < n; ++d)
    for (int u = 0; u < n; ++u)
      for (int v = u; v < n; ++v) {
        int row = d * pairs + sym_index(u, v, n);
        for (int m = 0; m < n; ++m) {
          op(row, m * pairs + sym_index(d, u, n)) += h(m, v);
          op(row, m * pairs + sym_index(d, v, n)) += h(u, m);
        }
      }
  return op;
}

}  // namespace

int levi_civita_operator_rank(const Mat& h) {
  Eigen::FullPivLU<Mat> lu(lc_operator(h));
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

LeviCivitaResult levi_civita(const ManifoldSpec& spec, const Vec& x) {
  if (!spec.has_metric()) throw Error("levi_civita requires a metric manifold");
  const int n = spec.n;
  Mat g = spec.metric_value(x);
  double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (std::abs(g.determinant()) <= 1e-10 * std::pow(scale, n))
    throw DegenerateMetric("metric is degenerate at the query point");

  LeviCivitaResult out;
  out.gamma = make_metric_provider(n, spec.metric)->gamma(x);

  // Metric first derivatives.
  TensorField gf = spec.metric_field();
  std::vector<TensorValue> dg;
  for (int l = 0; l < n; ++l) dg.push_back(gf.dirderiv(x, Vec::Unit(n, l)));

  const int pairs = n * (n + 1) / 2;
  const int N = n * pairs;
  Mat op = lc_operator(g);
  Vec rhs(N);
  for (int d = 0; d < n; ++d)
    for (int u = 0; u < n; ++u)
      for (int v = u; v < n; ++v) rhs[d * pairs + sym_index(u, v, n)] = dg[static_cast<size_t>(d)].at({u, v});

  Eigen::FullPivLU<Mat> lu(op);
  lu.setThreshold(1e-10);
  out.rank = static_cast<int>(lu.rank());
  out.expected_rank = N;
  out.unique = out.rank == N;
  Vec sol = lu.solve(rhs);

  out.gamma_solved = Bilin(n);
  for (int m = 0; m < n; ++m)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out.gamma_solved.at(m, a, b) = sol[m * pairs + sym_index(a, b, n)];
  return out;
}

// ---------------------------------------------------------------------------
// The involution ψ and the affine plane

GrpdTangent psi_involution(const SymmetryJetField& s, const Jet1& xi, const GrpdTangent& t) {
  Bilin gsx = s.gamma_s(xi.x);
  Bilin gsy = s.gamma_s(xi.y);
  GrpdTangent out;
  out.u = -t.u;
  out.v = -t.v;
  out.Lam = t.Lam + xi.L * gsx.right(t.u) - gsy.right(t.v) * xi.L;
  return out;
}

GrpdTangent affine_plane_tangent(const ConnectionField& c, const Jet1& xi, const Vec& w) {
  Jet11 S = affine_extension(c, xi);
  return GrpdTangent{w, xi.L * w, S.B.right(w)};
}

// ---------------------------------------------------------------------------
// Preservation, integrability, tangency

double preservation_residual(const Jet1& xi, const TensorValue& Qx, const TensorValue& Qy) {
  Mat Li = xi.L.inverse();
  return (Qx.transform(xi.L, Li) - Qy).max_abs();
}

IntegrabilityReport integrability_check(const ConnectionField& c, const Jet1& xi, double tol) {
  TensorValueSet tx = classical_tensors(c, xi.x);
  TensorValueSet ty = classical_tensors(c, xi.y);
  IntegrabilityReport out;
  out.torsion_residual = preservation_residual(xi, tv_from_bilin(tx.T), tv_from_bilin(ty.T));
  out.curvature_residual = preservation_residual(xi, tv_from_trilin(tx.R), tv_from_trilin(ty.R));
  Jet111 S3 = affine_extension3(c, xi);
  out.kappa_defect = jet111_max_diff(S3, jet111_involution(S3, Invol3::kappa));
  out.integrable = out.torsion_residual <= tol && out.curvature_residual <= tol;
  return out;
}

TangencyCheck preservation_derivative_check(const ConnectionField& c, const Jet1& xi,
                                            const Vec& Z, double fd_h) {
  Jet11 S = affine_extension(c, xi);
  Mat Lam = S.B.right(Z);
  Vec xiZ = xi.L * Z;

  // Residual in the source parameterization: ρ(u,v) = ξT_x(u,v) − T_y(ξu, ξv),
  // with the arguments held fixed while ξ moves along the affine plane.
  auto residual_tensor = [&](double t) {
    Jet1 jt{xi.x + t * Z, xi.y + t * xiZ, xi.L + t * Lam};
    TensorValueSet tx = classical_tensors(c, jt.x);
    TensorValueSet ty = classical_tensors(c, jt.y);
    return tv_from_bilin(tx.T).out_premul(jt.L) -
           tv_from_bilin(ty.T).cov_compose(0, jt.L).cov_compose(1, jt.L);
  };

  TangencyCheck out;
  out.lhs = (residual_tensor(fd_h) - residual_tensor(-fd_h)) * (1.0 / (2.0 * fd_h));

  TensorValue rho = residual_tensor(0.0);
  TensorValueSet tx = classical_tensors(c, xi.x);
  TensorValueSet ty = classical_tensors(c, xi.y);
  TensorValue defect = tv_from_bilin(tx.dT.fix_first(Z)).out_premul(xi.L) -
                       tv_from_bilin(ty.dT.fix_first(xiZ)).cov_compose(0, xi.L).cov_compose(1, xi.L);

  Mat Gy = c.gamma(xi.y).left(xiZ);
  Mat Gx = c.gamma(xi.x).left(Z);
  out.rhs = defect - rho.out_premul(Gy);
  for (int s2 = 0; s2 < 2; ++s2) out.rhs = out.rhs + rho.cov_compose(s2, Gx);
  out.residual = (out.lhs - out.rhs).max_abs();
  return out;
}

// ---------------------------------------------------------------------------
// Lie algebroid connection data

GrpdTangent algebroid_sigma(const SymmetryJetField& s, const Vec& x, const Vec& X) {
  ConnectionField c = connection_from_sjet(s);
  GrpdTangent out;
  out.u = X;
  out.v = Vec::Zero(x.size());
  out.Lam = c.gamma(x).left(X);
  return out;
}

GrpdTangent phi_sigma(const SymmetryJetField& s, const Jet1& xi, const Vec& X) {
  ConnectionField c = connection_from_sjet(s);
  GrpdTangent out;
  out.u = X;
  out.v = xi.L * X;
  out.Lam = xi.L * c.gamma(xi.x).left(X) - c.gamma(xi.y).left(xi.L * X) * xi.L;
  return out;
}

}  // namespace symjet
