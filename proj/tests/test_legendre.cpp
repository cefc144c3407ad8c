#include "qg/fd.hpp"
#include "qg/gauss_map.hpp"
#include "qg/generators.hpp"
#include "qg/legendre.hpp"
#include "qg/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace qg;

namespace {

// Principal curvatures of x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 from the implicit
// Gaussian and mean curvature, inward normal.
std::pair<double, double> ellipsoid_curvatures(const Vec3& p, double a, double b, double c) {
  const double P = p(0) * p(0) / std::pow(a, 4) + p(1) * p(1) / std::pow(b, 4) + p(2) * p(2) / std::pow(c, 4);
  const double K = 1.0 / (a * a * b * b * c * c * P * P);
  const double H = (a * a + b * b + c * c - p.squaredNorm()) / (2 * a * a * b * b * c * c * std::pow(P, 1.5));
  const double d = std::sqrt(H * H - K);
  return {H + d, H - d};
}

Vec6 lie_point(const Vec3& f) {
  Vec6 x;
  x << 0.0, 1.0, f(0), f(1), f(2), f.squaredNorm();
  return x;
}

Vec6 lie_plane(const Vec3& n, const Vec3& f) {
  Vec6 x;
  x << 1.0, 0.0, n(0), n(1), n(2), 2.0 * n.dot(f);
  return x;
}

SurfaceGrid without_kappa(SurfaceGrid s) {
  s.has_kappa = false;
  s.kappa1 = {};
  s.kappa2 = {};
  s.source.reset();
  return s;
}

template <class A, class B>
double max_diff(const Field<A>& a, const Field<B>& b) {
  double m = 0.0;
  for_valid(a, [&](int i, int j) {
    if (b.valid(i, j)) m = std::max(m, double(std::abs(a(i, j) - b(i, j))));
  });
  return m;
}

}  // namespace

TEST_CASE("principal curvatures of the torus and the ellipsoid") {
  const SurfaceGrid t = gen::torus(1.0, 3.0, 48, 48);
  const PrincipalResult pt = principal_data(without_kappa(t));
  for_valid(pt.surface.kappa1, [&](int i, int j) { CHECK(std::abs(pt.surface.kappa1(i, j) - 1.0) < 1e-3); });

  const double a = 1, b = 1.3, c = 1.7;
  const SurfaceGrid e = gen::ellipsoid(a, b, c, 33, 33);
  double closed = 0.0;
  for_valid(e.kappa1, [&](int i, int j) {
    auto [k1, k2] = ellipsoid_curvatures(e.points3(i, j), a, b, c);
    const double g1 = e.kappa1(i, j), g2 = e.kappa2(i, j);
    closed = std::max(closed, std::min(std::abs(g1 - k1) + std::abs(g2 - k2), std::abs(g1 - k2) + std::abs(g2 - k1)));
  });
  CHECK(closed < 1e-6);

  // Grid estimate converges to the closed form at second order.
  std::vector<double> err;
  for (int n : {33, 65}) {
    const SurfaceGrid en = gen::ellipsoid(a, b, c, n, n);
    const PrincipalResult pe = principal_data(without_kappa(en));
    err.push_back(std::max(max_diff(pe.surface.kappa1, en.kappa1), max_diff(pe.surface.kappa2, en.kappa2)));
  }
  CHECK(err[1] < 1e-4);
  CHECK(std::log2(err[0] / err[1]) > 1.8);
}

TEST_CASE("principal data rejects umbilics and misaligned charts") {
  try {
    principal_data(without_kappa(gen::sphere(1.0, 24, 24)));
    FAIL("expected umbilic");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::umbilic);
    CHECK(!e.nodes().empty());
  }
  try {
    principal_data(without_kappa(gen::ellipsoid_lonlat(1, 1.3, 1.7, 33, 33)));
    FAIL("expected not_curvature_line");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_curvature_line);
  }
}

TEST_CASE("curvature-line reparametrization") {
  const SurfaceGrid t = gen::torus(1.0, 3.0, 33, 33);
  const SurfaceGrid rt = curvature_line_reparametrize(t);
  CHECK(curvature_line_residual(rt) < 1e-8);

  const SurfaceGrid e = gen::ellipsoid_lonlat(1, 1.3, 1.7, 33, 33, {0.75, 0.85, 0.45, 0.55});
  const double before = curvature_line_residual(e);
  const SurfaceGrid re = curvature_line_reparametrize(e);
  CHECK(before > 1e-3);
  CHECK(curvature_line_residual(re) < 1e-6);
  CHECK(re.curvature_line);

  CHECK_THROWS_AS(curvature_line_reparametrize(gen::sphere(1.0, 24, 24)), Error);
}

TEST_CASE("asymptotic reparametrization") {
  const SurfaceGrid q = gen::quadric_graph(33, 33);
  CHECK(asymptotic_residual(q) < 1e-12);
  const SurfaceGrid rq = asymptotic_reparametrize(q);
  CHECK(asymptotic_residual(rq) < 1e-8);

  const SurfaceGrid g = gen::perturbed_graph(0.1, 64, 64, {-0.5, 0.5, -0.5, 0.5}, true);
  CHECK(asymptotic_residual(g) > 1e-3);
  const SurfaceGrid rg = asymptotic_reparametrize(g);
  CHECK(asymptotic_residual(rg) <= 1e-5);
  CHECK(rg.asymptotic);

  try {
    asymptotic_reparametrize(gen::convex_graph(24, 24, {-0.5, 0.5, -0.5, 0.5}, Reality::real));
    FAIL("expected signature error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::signature);
  }
}

TEST_CASE("Lie lift matches the sphere formulas") {
  const SurfaceGrid t = gen::torus(1.0, 3.0, 40, 40);
  const LegendreGrid f = lie_lift(t);
  const PseudoSpace& L = PseudoSpace::lie();
  for_valid(f.l, [&](int i, int j) {
    const Vec6 phi = lie_point(t.points3(i, j)), nu = lie_plane(t.normals(i, j), t.points3(i, j));
    CHECK((f.phi(i, j) - phi).norm() < 1e-12);
    CHECK((f.nu_sphere(i, j) - nu).norm() < 1e-12);
    const double sc = f.l(i, j).squaredNorm() + f.s(i, j).squaredNorm();
    CHECK(std::abs(L.pair(f.l(i, j), f.l(i, j))) <= 1e-12 * sc);
    CHECK(std::abs(L.pair(f.s(i, j), f.s(i, j))) <= 1e-12 * sc);
    CHECK(std::abs(L.pair(f.l(i, j), f.s(i, j))) <= 1e-12 * sc);
  });
  // origin with normal e3: phi = v0, nu = v_{-1} + v3
  const Vec6 phi0 = lie_point(Vec3::Zero()), nu0 = lie_plane(Vec3::UnitZ(), Vec3::Zero());
  CHECK(phi0 == Vec6::Unit(1));
  CHECK(nu0 == Vec6(Vec6::Unit(0) + Vec6::Unit(4)));
  CHECK(L.pair(phi0, phi0) == cplx(0.0));
  CHECK(L.pair(phi0, nu0) == cplx(0.0));

  // Dupin: kappa1 is constant along u, so l_u vanishes up to truncation.
  std::vector<double> lu;
  for (int n : {24, 48}) {
    const LegendreGrid g = lie_lift(gen::torus(1.0, 3.0, n, n));
    auto d = fd::du(g.l, g.chart);
    double m = 0.0;
    for_valid(d, [&](int i, int j) { m = std::max(m, d(i, j).norm()); });
    lu.push_back(m);
  }
  CHECK(lu[1] < 1e-10);
  CHECK_THROWS_AS(lie_lift(without_kappa(t)), Error);
}

TEST_CASE("projective lift and conjugate coefficients") {
  const LegendreGrid q = proj_lift(gen::quadric_graph(33, 33));
  const ConjugateCoefficients cq = conjugate_coefficients(q);
  double pq = 0.0;
  for_valid(cq.p, [&](int i, int j) { pq = std::max({pq, std::abs(cq.p(i, j)), std::abs(cq.q(i, j))}); });
  CHECK(pq < 1e-10);

  // Rescaling the homogeneous lift leaves p*q unchanged up to truncation.
  SurfaceGrid g = asymptotic_reparametrize(gen::perturbed_graph(0.1, 48, 48));
  const ConjugateCoefficients c0 = conjugate_coefficients(proj_lift(g));
  SurfaceGrid g2 = g;
  for (int i = 0; i < g.chart.nu; ++i)
    for (int j = 0; j < g.chart.nv; ++j) {
      const double u = g.chart.u(i), v = g.chart.v(j);
      g2.points4(i, j) *= std::exp(0.3 * u - 0.2 * v + 0.1 * u * v);
    }
  const ConjugateCoefficients c1 = conjugate_coefficients(proj_lift(g2));
  double dev = 0.0, top = 0.0;
  for_valid(c0.p, [&](int i, int j) {
    if (!c1.p.valid(i, j)) return;
    dev = std::max(dev, std::abs(c0.p(i, j) * c0.q(i, j) - c1.p(i, j) * c1.q(i, j)));
    top = std::max(top, std::abs(c0.p(i, j) * c0.q(i, j)));
  });
  CHECK(dev <= 1e-3 * std::max(top, 1.0));

  // torus: p = q = 0
  const ConjugateCoefficients ct = conjugate_coefficients(lie_lift(gen::torus(1.0, 3.0, 40, 40)));
  double tmax = 0.0;
  for_valid(ct.p, [&](int i, int j) { tmax = std::max({tmax, std::abs(ct.p(i, j)), std::abs(ct.q(i, j))}); });
  CHECK(tmax < 1e-8);
}

TEST_CASE("ellipsoid p*q follows the curvature formula") {
  // -d_u k1 d_v k2 / (k1 - k2)^2 from differenced analytic curvatures.
  std::vector<double> err;
  for (int n : {32, 64}) {
    const SurfaceGrid e = gen::ellipsoid(1, 1.3, 1.7, n, n);
    const ConjugateCoefficients cc = conjugate_coefficients(lie_lift(e));
    double m = 0.0;
    for (int i = 3; i < n - 3; ++i)
      for (int j = 3; j < n - 3; ++j) {
        const double k1u = (e.kappa1(i + 1, j) - e.kappa1(i - 1, j)) / (2 * e.chart.hu);
        const double k2v = (e.kappa2(i, j + 1) - e.kappa2(i, j - 1)) / (2 * e.chart.hv);
        const double gap = e.kappa1(i, j) - e.kappa2(i, j);
        const double want = -k1u * k2v / (gap * gap);
        if (cc.p.valid(i, j)) m = std::max(m, std::abs(cc.p(i, j) * cc.q(i, j) - want));
      }
    err.push_back(m);
  }
  CHECK(err[1] < 1e-3);
  CHECK(std::log2(err[0] / err[1]) > 1.7);
}

TEST_CASE("focal frame undoes a smooth gauge") {
  // Lines come from differenced data, so the recovery error is O(h^2).
  std::vector<double> err;
  for (int n : {40, 80}) {
    const LegendreGrid f = lie_lift(gen::ellipsoid(1, 1.3, 1.7, n, n));
    LegendreGrid mixed = f;
    for (int i = 0; i < f.chart.nu; ++i)
      for (int j = 0; j < f.chart.nv; ++j) {
        const double u = f.chart.u(i), v = f.chart.v(j);
        const double a = 1.0 + 0.2 * std::sin(u), b = 0.3 + 0.1 * v, c = -0.4 + 0.2 * u * v, d = 1.5 + 0.1 * std::cos(v);
        mixed.l(i, j) = a * f.l(i, j) + b * f.s(i, j);
        mixed.s(i, j) = c * f.l(i, j) + d * f.s(i, j);
      }
    const LegendreGrid back = focal_frame(mixed);
    double ang = 0.0;
    for_valid(back.l, [&](int i, int j) {
      ang = std::max({ang, line_angle(back.l(i, j), f.l(i, j)), line_angle(back.s(i, j), f.s(i, j))});
    });
    err.push_back(ang);
  }
  CHECK(err[1] < 5e-5);
  CHECK(std::log2(err[0] / err[1]) > 1.8);

  const LegendreGrid f = lie_lift(gen::ellipsoid(1, 1.3, 1.7, 24, 24));
  LegendreGrid flat = f;
  for (auto& x : flat.l.data) x = f.l(12, 12);
  for (auto& x : flat.s.data) x = f.s(12, 12);
  try {
    focal_frame(flat);
    FAIL("expected not_immersed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_immersed);
  }
}

TEST_CASE("conformal structure signatures") {
  const ConformalStructure ce = conformal_structure(lie_lift(gen::ellipsoid(1, 1.3, 1.7, 40, 40)));
  CHECK(ce.overall == 11);
  CHECK(ce.null_residual < 1e-3);
  const SurfaceGrid cv = gen::convex_graph(33, 33);
  REQUIRE(cv.chart.is_complex());
  const ConformalStructure cc = conformal_structure(proj_lift(cv));
  CHECK(cc.overall == 20);
}

TEST_CASE("point surface round trips") {
  const SurfaceGrid e = gen::ellipsoid(1, 1.3, 1.7, 40, 40);
  const PointSurfaceResult pe = point_surface(lie_lift(e));
  double d = 0.0;
  for_valid(pe.surface.points3, [&](int i, int j) { d = std::max(d, (pe.surface.points3(i, j) - e.points3(i, j)).norm()); });
  CHECK(d <= 1e-8);
  CHECK(pe.singular_nodes.empty());

  const SurfaceGrid g = asymptotic_reparametrize(gen::perturbed_graph(0.1, 40, 40));
  const PointSurfaceResult pg = point_surface(proj_lift(g));
  double ang = 0.0;
  for_valid(pg.surface.points4, [&](int i, int j) {
    const Eigen::Vector4d a = pg.surface.points4(i, j).normalized(), b = g.points4(i, j).normalized();
    ang = std::max(ang, std::min((a - b).norm(), (a + b).norm()));
  });
  CHECK(ang <= 1e-8);
}

TEST_CASE("cone through its apex flags singular nodes") {
  // z = r on (r, theta), apex at r = 0. l = tangent-plane sphere (constant
  // along rulings), s = point sphere plus a multiple of l.
  const int n = 21;
  LegendreGrid f;
  f.space = PseudoSpace::lie();
  f.chart = gen::chart_for(n, n, {-0.5, 0.5, 0.2, 1.2});
  f.l = Field<Vec6>(n, n, 0, Vec6::Zero());
  f.s = f.l;
  Field<Vec3> pts(n, n, 0, Vec3::Zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = f.chart.u(i), th = f.chart.v(j);
      const Vec3 p(r * std::cos(th), r * std::sin(th), r);
      const Vec3 nn = Vec3(std::cos(th), std::sin(th), -1.0) / std::sqrt(2.0);
      pts(i, j) = p;
      f.l(i, j) = lie_plane(nn, p);
      f.s(i, j) = lie_point(p) + std::sqrt(2.0) * r * f.l(i, j);
    }
  const PointSurfaceResult ps = point_surface(f);
  REQUIRE(!ps.singular_nodes.empty());
  for (auto [i, j] : ps.singular_nodes) CHECK(std::abs(f.chart.u(i)) < 1e-12);
  double d = 0.0;
  for_valid(ps.surface.points3, [&](int i, int j) { d = std::max(d, (ps.surface.points3(i, j) - pts(i, j)).norm()); });
  CHECK(d < 1e-12);
}

TEST_CASE("normal shifts") {
  const SurfaceGrid e = gen::ellipsoid(1, 1.3, 1.7, 24, 24);
  const SurfaceGrid e0 = normal_shift(e, 0.0);
  for_valid(e.points3, [&](int i, int j) { CHECK((e0.points3(i, j) - e.points3(i, j)).norm() == 0.0); });

  const SurfaceGrid s = gen::sphere(1.0, 24, 24);
  const SurfaceGrid h = normal_shift(s, 0.5);
  for_valid(h.points3, [&](int i, int j) {
    CHECK(std::abs(h.points3(i, j).norm() - 0.5) < 1e-12);
    CHECK(std::abs(h.kappa1(i, j) - 2.0) < 1e-12);
  });
  try {
    normal_shift(s, 1.0);
    FAIL("expected focal_value");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::focal_value);
  }
}

TEST_CASE("group actions leave the Gauss map density fixed") {
  const LegendreGrid f = lie_lift(gen::ellipsoid(1, 1.3, 1.7, 32, 32));
  const Field<cplx> w0 = willmore_density(conformal_gauss(f));
  SeedStream seeds(99);
  for (int k = 0; k < 3; ++k) {
    auto rng = seeds.split();
    const Mat6 g = random_isometry(PseudoSpace::lie(), rng);
    const LegendreGrid fg = apply_group(f, g);
    for_valid(fg.l, [&](int i, int j) { CHECK((fg.l(i, j) - g * f.l(i, j)).norm() <= 1e-12 * (1 + f.l(i, j).norm()) * g.norm()); });
    const Field<cplx> w1 = willmore_density(conformal_gauss(fg));
    double dev = 0.0, top = 0.0;
    for_valid(w0, [&](int i, int j) {
      dev = std::max(dev, std::abs(w1(i, j) - w0(i, j)));
      top = std::max(top, std::abs(w0(i, j)));
    });
    CHECK(dev <= 1e-8 * top);  // roundoff through second differences
  }
  Mat6 bad = Mat6::Identity();
  bad(2, 2) = 2.0;
  try {
    apply_group(f, bad);
    FAIL("expected not_in_group");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_in_group);
  }
}
