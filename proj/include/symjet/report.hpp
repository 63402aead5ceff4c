#pragma once

#include <string>
#include <vector>

namespace symjet {

inline constexpr const char* kToolVersion = "0.1.0";

struct CheckRecord {
  std::string id;     // stable check id; reports are ordered by it
  std::string claim;  // the identity being checked, in words
  double residual = 0;
  double tol = 0;
  bool pass = false;
  double ms = 0;
};

struct SuiteReport {
  std::string suite;
  std::string manifold;
  unsigned seed = 42;
  double h = 1e-3;
  bool tol_overridden = false;
  double tol_override = 0;
  std::vector<CheckRecord> checks;

  int passed() const;
  int failed() const;
  bool all_passed() const { return failed() == 0; }
  void sort_by_id();
  // Versioned JSON ("schema": 1). Without timing the output is byte-stable
  // for fixed (spec, seed, h); wall times are console-only by default.
  std::string to_json(bool include_timing = false) const;
};

}  // namespace symjet
