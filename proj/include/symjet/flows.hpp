#pragma once

#include <functional>
#include <vector>

#include "symjet/connection.hpp"

namespace symjet {

// Fixed-step classical 4th-order integration throughout; no adaptive stepping,
// so the O(h^4) error model stays testable.
struct FlowOpts {
  double h = 1e-3;
  double newton_tol = 1e-12;
  int max_iter = 50;
  double normal_radius = 0.5;
};

// Densely sampled curve with cubic Hermite queries between samples.
class DensePath {
public:
  DensePath() = default;

  double t0() const { return ts_.empty() ? 0.0 : ts_.front(); }
  double t1() const { return ts_.empty() ? 0.0 : ts_.back(); }
  const Vec& x0() const { return xs_.front(); }
  const Vec& v0() const { return vs_.front(); }
  double step() const { return h_; }

  Vec pos(double t) const;
  Vec vel(double t) const;

  size_t size() const { return ts_.size(); }
  double time_at(size_t k) const { return ts_[k]; }
  const Vec& pos_at(size_t k) const { return xs_[k]; }
  const Vec& vel_at(size_t k) const { return vs_[k]; }

  void append(double t, Vec x, Vec v, Vec a);
  void set_step(double h) { h_ = h; }

private:
  size_t segment(double t) const;
  double h_ = 0;
  std::vector<double> ts_;
  std::vector<Vec> xs_, vs_, as_;
};

// Geodesics: ẍ + Γ(ẋ, ẋ) = 0.
struct GeodesicState {
  Vec x, v;
};
GeodesicState geodesic(const ConnectionField& c, const Vec& x, const Vec& X, double t,
                       double h = 1e-3);
DensePath geodesic_path(const ConnectionField& c, const Vec& x, const Vec& X, double T,
                        double h = 1e-3);
Vec exp_map(const ConnectionField& c, const Vec& x, const Vec& X, double h = 1e-3);

// Inverse of exp_x on a normal neighborhood, by damped Newton with a frozen
// finite-difference Jacobian, initialized at `guess` (y - x when absent).
Vec exp_inverse(const ConnectionField& c, const Vec& x, const Vec& y,
                const FlowOpts& opts = {}, const Vec* guess = nullptr);

// a_x(y) = exp_x(-exp_x^{-1}(y)).
Vec geodesic_symmetry(const ConnectionField& c, const Vec& x, const Vec& y,
                      const FlowOpts& opts = {});
// Central-difference 2-jet of a_x at x; linear part -I and bilinear part
// Γs(x) up to the FD + integrator budget.
Jet11 numeric_symmetry_2jet(const ConnectionField& c, const Vec& x, const FlowOpts& opts = {},
                            double fd_h = 1e-3);

// Parallel transport τ along a path: τ̇ = -Γ(γ̇)·τ, τ(0) = I.
class TransportFrame {
public:
  Mat at(double t) const;
  void append(double t, Mat tau, Mat dtau);

private:
  size_t segment(double t) const;
  std::vector<double> ts_;
  std::vector<Mat> taus_, dtaus_;
};
TransportFrame parallel_transport_frame(const ConnectionField& c, const DensePath& path,
                                        double h = 1e-3);
Mat parallel_transport(const ConnectionField& c, const DensePath& path, double t,
                       double h = 1e-3);

// Reconstructs the path whose inverse-transported velocity is v(t); returns
// the path and its transport frame.
struct VelocityIntegration {
  DensePath path;
  TransportFrame frame;
};
VelocityIntegration path_from_velocity(const ConnectionField& c, const Vec& x,
                                       const std::function<Vec(double)>& v, double T,
                                       double h = 1e-3);

// α-lift of γ through ξ tangent to the affine planes D(S(·)).
struct LiftSample {
  double t;
  Jet1 jet;
};
std::vector<LiftSample> affine_lift(const ConnectionField& c, const Jet1& xi,
                                    const DensePath& path, double h = 1e-3);

// Geodesic extension of a 1-jet: φ_ξ = exp_y ∘ ξ ∘ exp_x^{-1}.
Vec phi_xi(const ConnectionField& c, const Jet1& xi, const Vec& xp, const FlowOpts& opts = {});
// 1-jet of φ_ξ at x', by central differences of φ_ξ.
Jet1 phi_xi_1jet_fd(const ConnectionField& c, const Jet1& xi, const Vec& xp,
                    const FlowOpts& opts = {}, double fd_h = 1e-3);
// Same 1-jet assembled from affine lifts along geodesic rays and bounced:
// least-squares fit of the lifted base points over a sphere of ray directions.
Jet1 phi_xi_1jet_lift(const ConnectionField& c, const Jet1& xi, const Vec& xp,
                      const FlowOpts& opts = {}, int rays = 16, double ray_radius = 1e-3);
// Max-norm of j²φ_ξ - S(j¹φ_ξ) at ξ.x; vanishes when a leaf of the affine
// distribution passes through ξ.
double leaf_residual(const ConnectionField& c, const Jet1& xi, const FlowOpts& opts = {},
                     double fd_h = 1.5e-3);

}  // namespace symjet
