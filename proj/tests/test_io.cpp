#include "qg/generators.hpp"
#include "qg/gauss_map.hpp"
#include "qg/io.hpp"
#include "qg/legendre.hpp"
#include "qg/suites.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>

using namespace qg;
using nlohmann::json;

TEST_CASE("order fit") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  std::vector<double> v;
  for (double x : h) v.push_back(3.0 * x * x);
  const OrderFit f = fit_order("q", {10, 20, 40}, h, v);
  CHECK(std::abs(f.order - 2.0) < 1e-12);
  CHECK(!f.at_floor);

  const OrderFit g = fit_order("q", {10, 20, 40}, h, {1e-12, 3e-12, 2e-12});
  CHECK(g.at_floor);
  CHECK(std::isinf(g.order));

  // Samples under the floor are dropped from the fit.
  const OrderFit k = fit_order("q", {10, 20, 40, 80}, {0.1, 0.05, 0.025, 0.0125}, {1e-2, 2.5e-3, 6.25e-4, 1e-12}, 1e-9);
  CHECK(std::abs(k.order - 2.0) < 1e-12);
}

TEST_CASE("surface JSON round trip") {
  const SurfaceGrid s = gen::ellipsoid(1, 1.3, 1.7, 12, 14);
  const std::string text = io::surface_to_json(s);
  const json j = json::parse(text);
  CHECK(j["schema"] == "qg.surface/1");
  CHECK(j["kind"] == "ellipsoid");
  const SurfaceGrid r = io::surface_from_json(text);
  CHECK(r.chart.nu == 12);
  CHECK(r.chart.nv == 14);
  CHECK(r.has_kappa);
  CHECK(r.curvature_line == s.curvature_line);
  for_valid(s.points3, [&](int i, int j) {
    CHECK((r.points3(i, j) - s.points3(i, j)).norm() == 0.0);
    CHECK((r.normals(i, j) - s.normals(i, j)).norm() == 0.0);
    CHECK(r.kappa1(i, j) == s.kappa1(i, j));
  });
  // A round-tripped surface goes through the pipeline like the original.
  CHECK(conformality(conformal_gauss(lie_lift(r))).max_abs == conformality(conformal_gauss(lie_lift(s))).max_abs);

  const SurfaceGrid q = gen::convex_graph(10, 10);
  const SurfaceGrid rq = io::surface_from_json(io::surface_to_json(q));
  CHECK(rq.chart.is_complex());
  for_valid(q.points4, [&](int i, int j) { CHECK((rq.points4(i, j) - q.points4(i, j)).norm() == 0.0); });
}

TEST_CASE("Gauss map JSON round trip") {
  const GaussMapGrid S = conformal_gauss(lie_lift(gen::torus(1.0, 3.0, 12, 12)));
  const GaussMapGrid r = io::gauss_from_json(io::gauss_to_json(S));
  CHECK(r.space.same_as(S.space));
  CHECK(r.eps == S.eps);
  for_valid(S.P, [&](int i, int j) { CHECK((r.P(i, j) - S.P(i, j)).norm() == 0.0); });
}

TEST_CASE("schema errors") {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::invalid_argument;
  };
  CHECK(kind_of([] { io::surface_from_json("{not json"); }) == ErrorKind::schema);
  CHECK(kind_of([] { io::surface_from_json(R"({"schema":"qg.report/1"})"); }) == ErrorKind::schema);
  json j = json::parse(io::surface_to_json(gen::torus(1.0, 3.0, 6, 6)));
  j["points"].erase(0);
  const std::string broken = j.dump();
  CHECK(kind_of([&] { io::surface_from_json(broken); }) == ErrorKind::schema);
  CHECK(kind_of([] { io::report_from_json(R"({"schema":"qg.report/1","suite":3})"); }) == ErrorKind::schema);
}

TEST_CASE("suite reports and merging") {
  CHECK_THROWS_AS(run_suite("bogus"), Error);
  SuiteConfig bad;
  bad.grids = {};
  CHECK_THROWS_AS(run_suite("orthogonality", bad), Error);

  SuiteConfig a, b;
  a.grids = {24, 32};
  b.grids = {48};
  const SuiteReport ra = run_suite("orthogonality", a), rb = run_suite("orthogonality", b);
  const SuiteReport back = io::report_from_json(io::report_to_json(ra));
  CHECK(back.suite == "orthogonality");
  CHECK(back.pass == ra.pass);
  REQUIRE(back.checks.size() == ra.checks.size());
  for (std::size_t k = 0; k < ra.checks.size(); ++k) {
    CHECK(back.checks[k].name == ra.checks[k].name);
    CHECK(back.checks[k].value == ra.checks[k].value);
  }

  const json m = json::parse(io::merge_reports({io::report_to_json(ra), io::report_to_json(rb)}));
  CHECK(m["schema"] == "qg.summary/1");
  CHECK(m["matrix"].size() == 2);
  REQUIRE(!m["convergence_orders"].empty());
  const json& e = m["convergence_orders"][0];
  CHECK(e["grids"].size() == 3);
  // Oracle: refit the pooled samples directly.
  std::vector<double> h, v;
  for (const auto* r : {&ra, &rb})
    for (const auto& f : r->orders)
      if (f.name == e["quantity"].get<std::string>())
        for (std::size_t k = 0; k < f.h.size(); ++k) {
          h.push_back(f.h[k]);
          v.push_back(f.values[k]);
        }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double x = std::log(h[k]), y = std::log(v[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = double(h.size());
  CHECK(std::abs(e["order"].get<double>() - (n * sxy - sx * sy) / (n * sxx - sx * sx)) < 1e-9);
  CHECK_THROWS_AS(io::merge_reports({}), Error);
}
