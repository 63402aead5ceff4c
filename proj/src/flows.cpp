#include "symjet/flows.hpp"

#include <cmath>

namespace symjet {

namespace {

// One classical RK4 step of ẏ = f(t, y) on a flat Vec state.
template <typename F>
Vec rk4_step(const F& f, double t, const Vec& y, double h) {
  Vec k1 = f(t, y);
  Vec k2 = f(t + 0.5 * h, Vec(y + 0.5 * h * k1));
  Vec k3 = f(t + 0.5 * h, Vec(y + 0.5 * h * k2));
  Vec k4 = f(t + h, Vec(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec pack2(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensePath

void DensePath::append(double t, Vec x, Vec v, Vec a) {
  ts_.push_back(t);
  xs_.push_back(std::move(x));
  vs_.push_back(std::move(v));
  as_.push_back(std::move(a));
}

size_t DensePath::segment(double t) const {
  if (ts_.size() < 2) return 0;
  const bool fwd = ts_.back() >= ts_.front();
  size_t lo = 0, hi = ts_.size() - 1;
  if (fwd ? t <= ts_.front() : t >= ts_.front()) return 0;
  if (fwd ? t >= ts_.back() : t <= ts_.back()) return ts_.size() - 2;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    ((fwd ? ts_[mid] <= t : ts_[mid] >= t) ? lo : hi) = mid;
  }
  return lo;
}

Vec DensePath::pos(double t) const {
  if (ts_.size() == 1) return xs_[0];
  size_t k = segment(t);
  double dt = ts_[k + 1] - ts_[k];
  double s = (t - ts_[k]) / dt;
  double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * xs_[k] + (s3 - 2 * s2 + s) * dt * vs_[k] +
         (-2 * s3 + 3 * s2) * xs_[k + 1] + (s3 - s2) * dt * vs_[k + 1];
}

Vec DensePath::vel(double t) const {
  if (ts_.size() == 1) return vs_[0];
  size_t k = segment(t);
  double dt = ts_[k + 1] - ts_[k];
  double s = (t - ts_[k]) / dt;
  double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * vs_[k] + (s3 - 2 * s2 + s) * dt * as_[k] +
         (-2 * s3 + 3 * s2) * vs_[k + 1] + (s3 - s2) * dt * as_[k + 1];
}

// ---------------------------------------------------------------------------
// Geodesics

DensePath geodesic_path(const ConnectionField& c, const Vec& x, const Vec& X, double T,
                        double h) {
  const int n = c.dim();
  const double dir = T >= 0 ? 1.0 : -1.0;
  const double total = std::abs(T);
  auto rhs = [&](double, const Vec& y) {
    Vec pos = y.head(n), vel = y.tail(n);
    if (!c.domain().contains(pos)) throw LeftDomain("geodesic left the chart domain", 0.0);
    Vec acc = -c.gamma(pos)(vel, vel);
    return pack2(vel, acc);
  };

  DensePath path;
  path.set_step(h);
  Vec y = pack2(x, X);
  double t = 0;
  path.append(0.0, x, X, -c.gamma(x)(X, X));
  int steps = static_cast<int>(std::ceil(total / h - 1e-12));
  for (int k = 0; k < steps; ++k) {
    double step = std::min(h, total - t);
    try {
      y = rk4_step(rhs, dir * t, y, dir * step);
    } catch (const LeftDomain&) {
      throw LeftDomain("geodesic left the chart domain", dir * t);
    }
    t += step;
    Vec pos = y.head(n), vel = y.tail(n);
    if (!c.domain().contains(pos)) throw LeftDomain("geodesic left the chart domain", dir * t);
    path.append(dir * t, pos, vel, -c.gamma(pos)(vel, vel));
  }
  return path;
}

GeodesicState geodesic(const ConnectionField& c, const Vec& x, const Vec& X, double t, double h) {
  if (t == 0.0 || X.norm() == 0.0) return {x, X};
  // Endpoint-only integration; no path recording.
  const int n = c.dim();
  const double dir = t >= 0 ? 1.0 : -1.0;
  const double total = std::abs(t);
  auto rhs = [&](double, const Vec& y) {
    Vec pos = y.head(n), vel = y.tail(n);
    if (!c.domain().contains(pos)) throw LeftDomain("geodesic left the chart domain", 0.0);
    return pack2(vel, Vec(-c.gamma(pos)(vel, vel)));
  };
  Vec y = pack2(x, X);
  double s = 0;
  int steps = static_cast<int>(std::ceil(total / h - 1e-12));
  for (int k = 0; k < steps; ++k) {
    double step = std::min(h, total - s);
    try {
      y = rk4_step(rhs, dir * s, y, dir * step);
    } catch (const LeftDomain&) {
      throw LeftDomain("geodesic left the chart domain", dir * s);
    }
    s += step;
    if (!c.domain().contains(y.head(n)))
      throw LeftDomain("geodesic left the chart domain", dir * s);
  }
  return {y.head(n), y.tail(n)};
}

Vec exp_map(const ConnectionField& c, const Vec& x, const Vec& X, double h) {
  return geodesic(c, x, X, 1.0, h).x;
}

Vec exp_inverse(const ConnectionField& c, const Vec& x, const Vec& y, const FlowOpts& opts,
                const Vec* guess) {
  const int n = c.dim();
  if ((y - x).norm() > opts.normal_radius)
    throw DomainError("exp_inverse: target outside the configured normal neighborhood");

  Vec V = guess ? *guess : Vec(y - x);
  Vec r = exp_map(c, x, V, opts.h) - y;
  double rn = r.norm();
  if (rn <= opts.newton_tol) return V;

  // Frozen central-difference Jacobian, refreshed only when damping stalls.
  // Small targets skip the stencil: the identity is contraction enough there.
  double jh = std::max(1e-6, 1e-6 * V.norm());
  Mat J = Mat::Identity(n, n);
  auto refresh = [&](const Vec& at) {
    for (int i = 0; i < n; ++i) {
      Vec vp = at, vm = at;
      vp[i] += jh;
      vm[i] -= jh;
      J.col(i) = (exp_map(c, x, vp, opts.h) - exp_map(c, x, vm, opts.h)) / (2 * jh);
    }
  };
  if (!guess && (y - x).norm() > 0.05 * opts.normal_radius) refresh(V);

  for (int it = 0; it < opts.max_iter; ++it) {
    Vec dv = J.fullPivLu().solve(r);
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 12; ++half) {
      Vec Vn = V - lambda * dv;
      Vec r2 = exp_map(c, x, Vn, opts.h) - y;
      if (r2.norm() < rn) {
        V = Vn;
        r = r2;
        rn = r.norm();
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (rn <= opts.newton_tol) return V;
    if (!improved) refresh(V);
  }
  throw NoConvergence("exp_inverse did not reach the requested tolerance", opts.max_iter);
}

Vec geodesic_symmetry(const ConnectionField& c, const Vec& x, const Vec& y,
                      const FlowOpts& opts) {
  return exp_map(c, x, -exp_inverse(c, x, y, opts), opts.h);
}

Jet11 numeric_symmetry_2jet(const ConnectionField& c, const Vec& x, const FlowOpts& opts,
                            double fd_h) {
  auto ax = [&](const Vec& y) { return geodesic_symmetry(c, x, y, opts); };
  FdJet fd = fd_jet_oracle(ax, x, 2, fd_h);
  return Jet11::jet(x, x, fd.J, fd.J, fd.H);
}

// ---------------------------------------------------------------------------
// Parallel transport

void TransportFrame::append(double t, Mat tau, Mat dtau) {
  ts_.push_back(t);
  taus_.push_back(std::move(tau));
  dtaus_.push_back(std::move(dtau));
}

size_t TransportFrame::segment(double t) const {
  if (ts_.size() < 2) return 0;
  const bool fwd = ts_.back() >= ts_.front();
  size_t lo = 0, hi = ts_.size() - 1;
  if (fwd ? t <= ts_.front() : t >= ts_.front()) return 0;
  if (fwd ? t >= ts_.back() : t <= ts_.back()) return ts_.size() - 2;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    ((fwd ? ts_[mid] <= t : ts_[mid] >= t) ? lo : hi) = mid;
  }
  return lo;
}

Mat TransportFrame::at(double t) const {
  if (ts_.size() == 1) return taus_[0];
  size_t k = segment(t);
  double dt = ts_[k + 1] - ts_[k];
  double s = (t - ts_[k]) / dt;
  double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * taus_[k] + (s3 - 2 * s2 + s) * dt * dtaus_[k] +
         (-2 * s3 + 3 * s2) * taus_[k + 1] + (s3 - s2) * dt * dtaus_[k + 1];
}

TransportFrame parallel_transport_frame(const ConnectionField& c, const DensePath& path,
                                        double h) {
  const int n = c.dim();
  auto rhs = [&](double t, const Vec& y) {
    Mat tau = Eigen::Map<const Mat>(y.data(), n, n);
    Mat d = -c.gamma(path.pos(t)).left(path.vel(t)) * tau;
    return Vec(Eigen::Map<const Vec>(d.data(), n * n));
  };

  TransportFrame frame;
  Mat tau = Mat::Identity(n, n);
  double t = path.t0();
  frame.append(t, tau, -c.gamma(path.pos(t)).left(path.vel(t)) * tau);
  Vec y = Eigen::Map<const Vec>(tau.data(), n * n);
  const double dir = path.t1() >= path.t0() ? 1.0 : -1.0;
  const double total = std::abs(path.t1() - path.t0());
  double s = 0;
  int steps = static_cast<int>(std::ceil(total / h - 1e-12));
  for (int k = 0; k < steps; ++k) {
    double step = std::min(h, total - s);
    y = rk4_step(rhs, t, y, dir * step);
    s += step;
    t = path.t0() + dir * s;
    tau = Eigen::Map<const Mat>(y.data(), n, n);
    frame.append(t, tau, -c.gamma(path.pos(t)).left(path.vel(t)) * tau);
  }
  return frame;
}

Mat parallel_transport(const ConnectionField& c, const DensePath& path, double t, double h) {
  return parallel_transport_frame(c, path, h).at(t);
}

// ---------------------------------------------------------------------------
// Path from inverse-transported velocity

VelocityIntegration path_from_velocity(const ConnectionField& c, const Vec& x,
                                       const std::function<Vec(double)>& v, double T, double h) {
  const int n = c.dim();
  auto rhs = [&](double t, const Vec& y) {
    Vec pos = y.head(n);
    Mat tau = Eigen::Map<const Mat>(y.data() + n, n, n);
    Vec vel = tau * v(t);
    Mat dtau = -c.gamma(pos).left(vel) * tau;
    Vec out(n + n * n);
    out.head(n) = vel;
    out.tail(n * n) = Eigen::Map<const Vec>(dtau.data(), n * n);
    return out;
  };

  VelocityIntegration out;
  out.path.set_step(h);
  Mat tau0 = Mat::Identity(n, n);
  Vec y(n + n * n);
  y.head(n) = x;
  y.tail(n * n) = Eigen::Map<const Vec>(tau0.data(), n * n);

  auto record = [&](double t) {
    Vec pos = y.head(n);
    Mat tau = Eigen::Map<const Mat>(y.data() + n, n, n);
    Vec vel = tau * v(t);
    Mat dtau = -c.gamma(pos).left(vel) * tau;
    // Fiber-velocity derivative for the Hermite queries.
    double vh = 1e-6;
    Vec vdot = (v(t + vh) - v(t - vh)) / (2 * vh);
    out.path.append(t, pos, vel, dtau * v(t) + tau * vdot);
    out.frame.append(t, tau, dtau);
  };

  double t = 0;
  record(0.0);
  const double dir = T >= 0 ? 1.0 : -1.0;
  const double total = std::abs(T);
  int steps = static_cast<int>(std::ceil(total / h - 1e-12));
  for (int k = 0; k < steps; ++k) {
    double step = std::min(h, total - t);
    y = rk4_step(rhs, dir * t, y, dir * step);
    t += step;
    if (!c.domain().contains(y.head(n)))
      throw LeftDomain("integrated path left the chart domain", dir * t);
    record(dir * t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Affine lift of a path

std::vector<LiftSample> affine_lift(const ConnectionField& c, const Jet1& xi,
                                    const DensePath& path, double h) {
  const int n = c.dim();
  if ((path.x0() - xi.x).norm() > 1e-9)
    throw PreconditionFailed("affine_lift: path must start at the source of the jet");

  auto rhs = [&](double t, const Vec& s) {
    Vec y = s.head(n);
    Mat L = Eigen::Map<const Mat>(s.data() + n, n, n);
    Vec x = path.pos(t);
    Vec gdot = path.vel(t);
    // Tangent to the affine plane: ẏ = Lγ̇, L̇w = LΓ_x(γ̇, w) − Γ_y(Lγ̇, Lw).
    Mat Ldot = L * c.gamma(x).left(gdot) - c.gamma(y).left(L * gdot) * L;
    Vec out(n + n * n);
    out.head(n) = L * gdot;
    out.tail(n * n) = Eigen::Map<const Vec>(Ldot.data(), n * n);
    return out;
  };

  std::vector<LiftSample> lifts;
  Vec s(n + n * n);
  s.head(n) = xi.y;
  s.tail(n * n) = Eigen::Map<const Vec>(xi.L.data(), n * n);
  double t = path.t0();
  lifts.push_back({t, Jet1{path.pos(t), xi.y, xi.L}});
  const double dir = path.t1() >= path.t0() ? 1.0 : -1.0;
  const double total = std::abs(path.t1() - path.t0());
  double done = 0;
  int steps = static_cast<int>(std::ceil(total / h - 1e-12));
  for (int k = 0; k < steps; ++k) {
    double step = std::min(h, total - done);
    s = rk4_step(rhs, t, s, dir * step);
    done += step;
    t = path.t0() + dir * done;
    Vec y = s.head(n);
    if (!c.domain().contains(y)) throw LeftDomain("affine lift left the chart domain", t);
    Mat L = Eigen::Map<const Mat>(s.data() + n, n, n);
    lifts.push_back({t, Jet1{path.pos(t), y, L}});
  }
  return lifts;
}

// ---------------------------------------------------------------------------
// Geodesic extension of a 1-jet

Vec phi_xi(const ConnectionField& c, const Jet1& xi, const Vec& xp, const FlowOpts& opts) {
  Vec V = exp_inverse(c, xi.x, xp, opts);
  return exp_map(c, xi.y, xi.L * V, opts.h);
}

namespace {

Vec phi_xi_warm(const ConnectionField& c, const Jet1& xi, const Vec& xp, const FlowOpts& opts,
                const Vec& guess) {
  Vec V = exp_inverse(c, xi.x, xp, opts, &guess);
  return exp_map(c, xi.y, xi.L * V, opts.h);
}

}  // namespace

Jet1 phi_xi_1jet_fd(const ConnectionField& c, const Jet1& xi, const Vec& xp,
                    const FlowOpts& opts, double fd_h) {
  auto phi = [&](const Vec& p) { return phi_xi(c, xi, p, opts); };
  FdJet fd = fd_jet_oracle(phi, xp, 1, fd_h);
  return Jet1{xp, phi(xp), fd.J};
}

Jet1 phi_xi_1jet_lift(const ConnectionField& c, const Jet1& xi, const Vec& xp,
                      const FlowOpts& opts, int rays, double ray_radius) {
  const int n = c.dim();
  Vec V = exp_inverse(c, xi.x, xp, opts);

  auto lift_target = [&](const Vec& dirV) {
    if (dirV.norm() < 1e-14) return std::pair<Vec, Vec>(xi.x, xi.y);
    DensePath ray = geodesic_path(c, xi.x, dirV, 1.0, opts.h);
    std::vector<LiftSample> lifts = affine_lift(c, xi, ray, opts.h);
    return std::pair<Vec, Vec>(ray.pos_at(ray.size() - 1), lifts.back().jet.y);
  };

  auto center = lift_target(V);

  // Symmetric sphere of ray perturbations; the least-squares fit of the lifted
  // base points against the chart offsets is the bounced 1-jet.
  Mat AtA = Mat::Zero(n, n);
  Mat BtA = Mat::Zero(n, n);
  int half = std::max(rays / 2, n);
  std::mt19937 rng(1234);
  for (int k = 0; k < half; ++k) {
    Vec u;
    if (n == 2) {
      double ang = 2.0 * M_PI * k / half;
      u = Vec(2);
      u << std::cos(ang), std::sin(ang);
    } else {
      u = random_vec(rng, n);
      u.normalize();
    }
    for (double sgn : {1.0, -1.0}) {
      auto tgt = lift_target(V + sgn * ray_radius * u);
      Vec dx = tgt.first - center.first;
      Vec dy = tgt.second - center.second;
      AtA += dx * dx.transpose();
      BtA += dy * dx.transpose();
    }
  }
  Mat J = BtA * AtA.inverse();
  return Jet1{center.first, center.second, J};
}

double leaf_residual(const ConnectionField& c, const Jet1& xi, const FlowOpts& opts,
                     double fd_h) {
  // At the center the geodesic extension is affine to second order for any ξ,
  // so the obstruction is sampled along rays away from it.
  const int n = c.dim();
  const double ray = 0.4 * opts.normal_radius;
  double worst = 0;
  for (int k = 0; k < 2 * n; ++k) {
    Vec d = (k % 2 == 0 ? 1.0 : -1.0) * Vec::Unit(n, k / 2);
    Vec xp = exp_map(c, xi.x, ray * d, opts.h);
    Vec guess = ray * d;
    auto phi = [&](const Vec& p) { return phi_xi_warm(c, xi, p, opts, guess); };
    FdJet fd = fd_jet_oracle(phi, xp, 2, fd_h);
    Jet11 S = affine_extension(c, Jet1{xp, phi(xp), fd.J});
    worst = std::max(worst, (fd.H - S.B).max_abs());
  }
  return worst;
}

}  // namespace symjet
