// Command-line driver: load manifold specs, run verification suites, emit
// machine-readable reports and plot data.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "symjet/flows.hpp"
#include "symjet/suites.hpp"

namespace {

using namespace symjet;

Vec parse_vec(const std::string& text, int n) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  if (static_cast<int>(vals.size()) != n)
    throw ValidationError("expected " + std::to_string(n) + " comma-separated values, got '" +
                          text + "'");
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = vals[static_cast<size_t>(i)];
  return v;
}

Mat parse_mat(const std::string& text, int n) {
  std::vector<std::string> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(row);
  if (static_cast<int>(rows.size()) != n)
    throw ValidationError("expected " + std::to_string(n) + " semicolon-separated rows");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = parse_vec(rows[static_cast<size_t>(i)], n).transpose();
  return m;
}

void print_bilin(std::ostream& os, const std::string& name, const Bilin& b) {
  int n = b.dim();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (b.at(k, i, j) != 0.0)
          os << "  " << name << "^" << (k + 1) << "_(" << (i + 1) << "," << (j + 1)
             << ") = " << b.at(k, i, j) << "\n";
}

int cmd_verify(const std::string& manifold, const std::string& suite, double tol, unsigned seed,
               double h, const std::string& report_path) {
  ManifoldSpec spec = load_manifold(manifold);
  SuiteConfig cfg;
  cfg.seed = seed;
  cfg.h = h;
  cfg.tol_override = tol;
  SuiteReport rep = run_suite(suite, spec, cfg);

  for (const CheckRecord& c : rep.checks) {
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << std::left << std::setw(28) << c.id
              << " residual " << std::scientific << std::setprecision(3) << c.residual
              << "  tol " << c.tol << std::defaultfloat << "  (" << std::fixed
              << std::setprecision(1) << c.ms << " ms)\n"
              << std::defaultfloat;
  }
  std::cout << rep.passed() << "/" << rep.checks.size() << " checks passed on '" << spec.name
            << "'\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot write report to '" + report_path + "'");
    out << rep.to_json();
  }
  return rep.all_passed() ? 0 : 1;
}

int cmd_geodesic(const std::string& manifold, const std::string& from, const std::string& dir,
                 double T, double h, const std::string& emit, bool symmetry) {
  ManifoldSpec spec = load_manifold(manifold);
  ConnectionField c = ConnectionField::from_manifold(spec);
  Vec x = parse_vec(from, spec.n);
  Vec X = parse_vec(dir, spec.n);
  if (!spec.domain.contains(x)) throw ValidationError("start point outside the chart domain");

  std::ofstream out;
  std::ostream* os = &std::cout;
  if (!emit.empty()) {
    out.open(emit);
    if (!out) throw IoError("cannot write CSV to '" + emit + "'");
    os = &out;
  }

  *os << "t";
  for (int i = 1; i <= spec.n; ++i) *os << ",x" << i;
  for (int i = 1; i <= spec.n; ++i) *os << ",v" << i;
  if (symmetry)
    for (int i = 1; i <= spec.n; ++i) *os << ",s" << i;
  *os << "\n";
  os->precision(17);

  FlowOpts opts{h, 1e-12, 50, spec.normal_radius};
  try {
    DensePath p = geodesic_path(c, x, X, T, h);
    Vec vguess = Vec::Zero(spec.n);
    bool have_guess = false;
    for (size_t k = 0; k < p.size(); ++k) {
      *os << p.time_at(k);
      for (int i = 0; i < spec.n; ++i) *os << "," << p.pos_at(k)[i];
      for (int i = 0; i < spec.n; ++i) *os << "," << p.vel_at(k)[i];
      if (symmetry) {
        // Consecutive samples are close; warm-start the inversion.
        Vec V = exp_inverse(c, x, p.pos_at(k), opts, have_guess ? &vguess : nullptr);
        vguess = V;
        have_guess = true;
        Vec s = exp_map(c, x, Vec(-V), h);
        for (int i = 0; i < spec.n; ++i) *os << "," << s[i];
      }
      *os << "\n";
    }
  } catch (const LeftDomain& e) {
    std::cerr << "geodesic left the domain at t = " << e.t_exit() << "\n";
    return 1;
  }
  return 0;
}

int cmd_inspect(const std::string& manifold, const std::string& at, const std::string& xi_text) {
  ManifoldSpec spec = load_manifold(manifold);
  ConnectionField c = ConnectionField::from_manifold(spec);
  SymmetryJetField s = SymmetryJetField::from_manifold(spec);
  Vec x = parse_vec(at, spec.n);
  if (!spec.domain.contains(x)) throw ValidationError("point outside the chart domain");
  const int n = spec.n;

  std::cout << "manifold '" << spec.name << "'  n = " << n << "  at x = [" << x.transpose()
            << "]\n";
  print_bilin(std::cout, "Gamma", c.gamma(x));
  print_bilin(std::cout, "Gamma_s", s.gamma_s(x));
  TensorValueSet ts = classical_tensors(c, x);
  print_bilin(std::cout, "T", ts.T);
  std::cout << "  |R| max = " << ts.R.max_abs() << ",  |dR| max = " << ts.dR.max_abs() << "\n";
  Holonomy h = s.classify_at(x, 1e-11);
  std::cout << "  symmetry jet class: "
            << (h == Holonomy::holonomic ? "holonomic"
                : h == Holonomy::semiholonomic ? "semiholonomic" : "nonholonomic")
            << "\n";

  if (!xi_text.empty()) {
    Jet1 xi{x, x, parse_mat(xi_text, n)};
    Jet11 S = affine_extension(c, xi);
    std::cout << "with xi = [" << xi_text << "]:\n";
    print_bilin(std::cout, "B_S", S.B);
    Bilin kdef = S.B.transposed() - S.B;
    std::cout << "  extension holonomy defect (kappa) max = " << kdef.max_abs() << "\n";
    Jet111 S3 = affine_extension3(c, xi);
    std::cout << "  order-3 extension trilinear |C| max   = " << S3.C.max_abs()
              << (S3.faces_coincide(1e-10) ? "  (faces coincide)" : "") << "\n";
    IntegrabilityReport ir = integrability_check(c, xi);
    std::cout << "  torsion preservation residual   = " << ir.torsion_residual << "\n";
    std::cout << "  curvature preservation residual = " << ir.curvature_residual << "\n";
    std::cout << "  order-3 extension kappa defect  = " << ir.kappa_defect << "\n";
    std::cout << "  verdict: " << (ir.integrable ? "inside the integrability locus"
                                                 : "outside the integrability locus")
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jet-level affine connection toolkit"};
  app.require_subcommand(1);
  // The integrator step is exposed as --h, so keep help long-form only.
  app.set_help_flag("--help", "print help");

  std::string manifold, suite = "all", report_path, from, dir, at, xi_text, emit;
  double tol = 0, T = 1.0, h = 1e-3;
  unsigned seed = 42;
  bool symmetry = false;

  CLI::App* verify = app.add_subcommand("verify", "run verification suites against a manifold");
  verify->set_help_flag("--help", "print help");
  verify->add_option("--manifold", manifold, "builtin name or spec file")->required();
  verify->add_option("--suite", suite, "all|core|curvature|flows|frames");
  verify->add_option("--tol", tol, "override the pinned per-check tolerances");
  verify->add_option("--seed", seed, "random seed (echoed in the report)");
  verify->add_option("--h", h, "integrator step");
  verify->add_option("--report", report_path, "write a JSON report here");

  CLI::App* geod = app.add_subcommand("geodesic", "integrate a geodesic and emit CSV samples");
  geod->set_help_flag("--help", "print help");
  geod->add_option("--manifold", manifold)->required();
  geod->add_option("--from", from, "start point, comma separated")->required();
  geod->add_option("--dir", dir, "initial velocity, comma separated")->required();
  geod->add_option("--t", T, "final time");
  geod->add_option("--h", h, "integrator step");
  geod->add_option("--emit", emit, "CSV output path (stdout when omitted)");
  geod->add_flag("--symmetry", symmetry, "also emit the geodesic reflected through the start");

  CLI::App* inspect = app.add_subcommand("inspect", "print jet-level data at a point");
  inspect->add_option("--manifold", manifold)->required();
  inspect->add_option("--at", at, "chart point, comma separated")->required();
  inspect->add_option("--xi", xi_text, "matrix rows 'a,b;c,d' of a 1-jet at the point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(manifold, suite, tol, seed, h, report_path);
    if (geod->parsed()) return cmd_geodesic(manifold, from, dir, T, h, emit, symmetry);
    if (inspect->parsed()) return cmd_inspect(manifold, at, xi_text);
  } catch (const symjet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
