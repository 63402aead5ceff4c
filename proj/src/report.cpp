#include "symjet/report.hpp"

#include <algorithm>

#include <json.hpp>

namespace symjet {

int SuiteReport::passed() const {
  int n = 0;
  for (const CheckRecord& c : checks) n += c.pass ? 1 : 0;
  return n;
}

int SuiteReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

void SuiteReport::sort_by_id() {
  std::stable_sort(checks.begin(), checks.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
}

std::string SuiteReport::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["tool"] = "symjet";
  j["version"] = kToolVersion;
  j["suite"] = suite;
  j["config"]["manifold"] = manifold;
  j["config"]["seed"] = seed;
  j["config"]["h"] = h;
  if (tol_overridden)
    j["config"]["tol"] = tol_override;
  else
    j["config"]["tol"] = nullptr;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CheckRecord& c : checks) {
    nlohmann::ordered_json rec;
    rec["id"] = c.id;
    rec["claim"] = c.claim;
    rec["residual"] = c.residual;
    rec["tol"] = c.tol;
    rec["pass"] = c.pass;
    if (include_timing) rec["ms"] = c.ms;
    arr.push_back(rec);
  }
  j["checks"] = arr;
  j["summary"]["total"] = checks.size();
  j["summary"]["passed"] = passed();
  j["summary"]["failed"] = failed();
  return j.dump(2) + "\n";
}

}  // namespace symjet
