#pragma once

#include <random>

#include "symjet/flows.hpp"
#include "symjet/frames.hpp"
#include "symjet/report.hpp"

namespace symjet {

struct SuiteConfig {
  unsigned seed = 42;
  double h = 1e-3;
  double tol_override = 0;  // <= 0 keeps the per-check pinned tolerances
};

std::vector<std::string> suite_names();  // core, curvature, flows, frames
// Runs one named suite (or "all") against a manifold. Checks that need a
// hypothesis the manifold lacks (torsionless, metric) are omitted.
SuiteReport run_suite(const std::string& suite, const ManifoldSpec& spec,
                      const SuiteConfig& cfg);

// Fixture helpers shared by the suites, the unit tests and the acceptance run.

// n = 2 only: a 1-jet x → y with ξ·T_x(e1,e2) = det(ξ)·T_y(e1,e2), so that ξ
// preserves the torsion tensor; lam scales the constructed map.
Jet1 torsion_preserving_jet(const ConnectionField& c, const Vec& x, const Vec& y, double lam,
                            std::mt19937& rng);

// Differential of a round-sphere isometry in the stereographic chart
// (unit-determinant Möbius transform); angle = rotation angle, axis_phase
// selects the rotation axis in the equatorial plane.
Vec sphere_rotation_point(const Vec& x, double angle, double axis_phase);
Jet1 sphere_rotation_jet(const Vec& x, double angle, double axis_phase);

// True when the sampled torsion vanishes identically (within 1e-12).
bool connection_is_torsionless(const ConnectionField& c, const ManifoldSpec& spec,
                               std::mt19937& rng, int samples = 10);

}  // namespace symjet
