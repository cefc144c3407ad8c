#include "qg/functionals.hpp"
#include "qg/gauss_map.hpp"
#include "qg/generators.hpp"
#include "qg/legendre.hpp"

#include <doctest.h>

#include <cmath>

using namespace qg;

TEST_CASE("node-sum integration") {
  const GridChart c = gen::chart_for(11, 21, {0.0, 1.0, 0.0, 2.0});
  Field<cplx> one(11, 21, 2, cplx(1.0));
  const EnergyReport r = integrate_density(one, c);
  CHECK(std::abs(r.total - 7 * 17 * c.hu * c.hv) < 1e-12);
  const EnergyReport rx = integrate_density(one, c, {{3, 3}, {4, 5}, {0, 0}});
  CHECK(std::abs(rx.total - (7 * 17 - 2) * c.hu * c.hv) < 1e-12);  // (0,0) lies in the margin
  CHECK(rx.excluded.size() == 3);
}

TEST_CASE("Lie density of linear curvature fields") {
  const GridChart c = gen::chart_for(21, 21, {0.0, 1.0, 0.0, 1.0});
  Field<double> k1(21, 21, 0, 0.0), k2 = k1;
  for (int i = 0; i < 21; ++i)
    for (int j = 0; j < 21; ++j) {
      k1(i, j) = 2.0 * c.u(i) + c.v(j);
      k2(i, j) = -3.0 * c.v(j) + 0.5 * c.u(i) - 4.0;
    }
  const LieDensity d = lie_density(k1, k2, c);
  for_valid(d.value, [&](int i, int j) {
    const double gap = k1(i, j) - k2(i, j);
    const double want = 2.0 * -3.0 / (gap * gap);
    CHECK(std::abs(d.value(i, j) - want) < 1e-12);
    CHECK(d.negated(i, j) == -d.value(i, j));
  });
}

TEST_CASE("general chart data recovers curvatures off the principal chart") {
  const double a = 1, b = 1.3, cc = 1.7;
  std::vector<double> err;
  for (int n : {33, 65}) {
    const SurfaceGrid s = gen::ellipsoid_lonlat(a, b, cc, n, n);
    const GeneralChartData g = general_chart_data(s.points3, s.normals, s.chart);
    double e = 0.0;
    for_valid(g.kappa1, [&](int i, int j) {
      const Vec3 p = s.points3(i, j);
      const double P = p(0) * p(0) / std::pow(a, 4) + p(1) * p(1) / std::pow(b, 4) + p(2) * p(2) / std::pow(cc, 4);
      const double K = 1.0 / (a * a * b * b * cc * cc * P * P);
      const double H = (a * a + b * b + cc * cc - p.squaredNorm()) / (2 * a * a * b * b * cc * cc * std::pow(P, 1.5));
      const double d = std::sqrt(H * H - K);
      const double x = g.kappa1(i, j), y = g.kappa2(i, j);
      e = std::max(e, std::min(std::abs(x - H - d) + std::abs(y - H + d), std::abs(x - H + d) + std::abs(y - H - d)));
    });
    err.push_back(e);
  }
  CHECK(err[1] < 1e-3);
  CHECK(std::log2(err[0] / err[1]) > 1.7);
}

TEST_CASE("projective density") {
  const ProjDensity q = proj_density(gen::quadric_graph(33, 33));
  for_valid(q.pq, [&](int i, int j) { CHECK(std::abs(q.pq(i, j)) < 1e-10); });

  const SurfaceGrid g = asymptotic_reparametrize(gen::perturbed_graph(0.1, 48, 48));
  const ProjDensity d = proj_density(g);
  const ConjugateCoefficients cc = conjugate_coefficients(proj_lift(g));
  double dev = 0.0, top = 0.0;
  for_valid(d.pq, [&](int i, int j) {
    if (!cc.p.valid(i, j)) return;
    dev = std::max(dev, std::abs(d.pq(i, j) - cc.p(i, j) * cc.q(i, j)));
    top = std::max(top, std::abs(d.pq(i, j)));
  });
  CHECK(top > 1e-3);
  CHECK(dev <= 1e-2 * top);

  CHECK_THROWS_AS(proj_density(gen::torus(1.0, 3.0, 24, 24)), Error);
}

TEST_CASE("Willmore energy") {
  CHECK(std::abs(willmore_energy(conformal_gauss(lie_lift(gen::torus(1.0, 3.0, 48, 48)))).total) < 1e-8);

  std::vector<double> w;
  for (int n : {32, 64, 128}) {
    const GaussMapGrid S = conformal_gauss(lie_lift(gen::ellipsoid(1, 1.3, 1.7, n, n)));
    w.push_back(willmore_energy(S).total);
  }
  CHECK(std::abs(w[2] - w[1]) < std::abs(w[1] - w[0]));
  CHECK(std::abs(w[2]) > 1e-4);
}

TEST_CASE("a few descent steps never raise the energy") {
  DescentOptions opt;
  opt.steps = 3;
  const DescentResult r = willmore_descent(gen::ellipsoid(1, 1.3, 1.7, 32, 32), opt);
  REQUIRE(r.energies.size() >= 2);
  for (std::size_t k = 1; k < r.energies.size(); ++k) CHECK(r.energies[k] <= r.energies[k - 1]);
  CHECK(r.step_taken.size() + 1 == r.energies.size());
  CHECK(r.final_surface.chart.nu == 32);
}

TEST_CASE("invariance report on trivial transforms") {
  Transform id;
  id.label = "identity";
  Transform shift;
  shift.kind = Transform::Kind::normal_shift;
  shift.shift = 0.1;
  shift.label = "shift";
  const auto rep = invariance_report(gen::ellipsoid(1, 1.3, 1.7, 48, 48), {id, shift});
  REQUIRE(rep.size() == 2);
  CHECK(rep[0].label == "identity");
  CHECK(rep[0].density_deviation == 0.0);
  CHECK(rep[1].density_deviation < 1e-4);
}

TEST_CASE("zero step and minimal surfaces") {
  DescentOptions opt;
  opt.steps = 3;
  opt.step_size = 0.0;
  const SurfaceGrid e = gen::ellipsoid(1, 1.3, 1.7, 24, 24);
  const DescentResult r = willmore_descent(e, opt);
  for (double w : r.energies) CHECK(w == r.energies.front());
  for_valid(e.points3, [&](int i, int j) { CHECK((r.final_surface.points3(i, j) - e.points3(i, j)).norm() == 0.0); });

  opt.step_size = 4e-3;
  const DescentResult t = willmore_descent(gen::torus(1.0, 3.0, 32, 32), opt);
  for (double w : t.energies) CHECK(std::abs(w) <= 1e-7);
}
