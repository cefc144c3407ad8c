// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "qg/suites.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* suite;
  std::function<bool(const qg::Check&)> selects;
};

bool prefix(const qg::Check& c, const char* p) { return c.name.rfind(p, 0) == 0; }

}  // namespace

int main() {
  auto all = [](const qg::Check&) { return true; };
  const std::vector<Criterion> criteria{
      {1, "pq identity", "pq-identity", all},
      {2, "density chain", "lift-invariants", [](const qg::Check& c) { return c.name.find("density_chain") != std::string::npos; }},
      {3, "conformality", "conformality", all},
      {4, "bundle orthogonality", "orthogonality", all},
      {5, "tension lemma", "tension-lemma", [](const qg::Check& c) { return prefix(c, "ellipsoid."); }},
      {6, "harmonic controls", "tension-lemma", [](const qg::Check& c) { return prefix(c, "torus.") || prefix(c, "quadric."); }},
      {7, "Blaschke round trip", "blaschke-roundtrip", all},
      {8, "invariance", "invariance", all},
      {9, "flatness discrimination", "flatness", all},
      {10, "spectral deformation", "deform", all},
      {11, "duality", "dualize", all},
      {12, "Willmore descent", "descent", all},
  };

  std::map<std::string, qg::SuiteReport> reports;
  int failed = 0;
  for (const auto& c : criteria) {
    if (!reports.count(c.suite)) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        reports[c.suite] = qg::run_suite(c.suite);
      } catch (const std::exception& e) {
        std::printf("criterion %2d %-24s FAIL  suite %s threw: %s\n", c.id, c.title, c.suite, e.what());
        ++failed;
        reports[c.suite] = qg::SuiteReport{};
        continue;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "  [%s %.1fs]\n", c.suite, secs);
    }
    const qg::SuiteReport& r = reports[c.suite];
    bool pass = false;
    std::string detail;
    for (const auto& k : r.checks) {
      if (!c.selects(k)) continue;
      if (detail.empty()) pass = true;
      pass = pass && k.pass;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s%s=%.3g%s%.3g", detail.empty() ? "" : ", ", k.name.c_str(), k.value,
                    k.at_most ? "<=" : ">=", k.threshold);
      detail += buf;
    }
    if (!pass) ++failed;
    std::printf("criterion %2d %-24s %s  %s\n", c.id, c.title, pass ? "PASS" : "FAIL", detail.c_str());
  }
  std::printf("%d of %zu criteria pass\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
