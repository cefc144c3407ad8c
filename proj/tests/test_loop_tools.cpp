#include "qg/gauss_map.hpp"
#include "qg/generators.hpp"
#include "qg/legendre.hpp"
#include "qg/loop_tools.hpp"

#include <doctest.h>

#include <cmath>

using namespace qg;

namespace {

GaussMapGrid torus_map(int n) { return conformal_gauss(lie_lift(gen::torus(1.0, 3.0, n, n))); }
GaussMapGrid ellipsoid_map(int n) { return conformal_gauss(lie_lift(gen::ellipsoid(1, 1.3, 1.7, n, n))); }

double group_defect(const Mat6& F, const PseudoSpace& s) { return (s.adjoint(F) * F - Mat6::Identity()).norm(); }

}  // namespace

TEST_CASE("symmetric pair of a reference plane") {
  const GaussMapGrid S = ellipsoid_map(24);
  const SymmetricPair sp = SymmetricPair::at(S.space, S.P(12, 12));
  CHECK((sp.J * sp.J - Mat6::Identity()).norm() < 1e-10);
  CHECK(sp.closure_residual() <= 1e-12);
  const auto basis = sp.algebra_basis();
  CHECK(basis.size() == 15);
  // Linear independence: the 15 flattened generators have full rank.
  Eigen::Matrix<cplx, 36, 15> flat;
  for (int k = 0; k < 15; ++k) {
    CHECK(skew_residual(basis[k], S.space) < 1e-14);
    flat.col(k) = Eigen::Map<const Eigen::Matrix<cplx, 36, 1>>(basis[k].data());
  }
  CHECK(Eigen::FullPivLU<Eigen::Matrix<cplx, 36, 15>>(flat).rank() == 15);

  Mat6 x = Mat6::Zero();
  for (int k = 0; k < 15; ++k) x += double(k + 1) * 0.1 * basis[k];
  auto [kpart, ppart] = sp.split(x);
  CHECK((kpart + ppart - x).norm() < 1e-12);
  CHECK((sp.J * kpart * sp.J - kpart).norm() < 1e-10);
  CHECK((sp.J * ppart * sp.J + ppart).norm() < 1e-10);
  // [k, k] in k, [k, p] in p, [p, p] in k
  auto comm = [](const Mat6& a, const Mat6& b) { Mat6 r = a * b - b * a; return r; };
  const Mat6 kk = comm(kpart, sp.J * kpart * sp.J), kp = comm(kpart, ppart);
  CHECK((sp.J * kp * sp.J + kp).norm() < 1e-9);
  CHECK((sp.J * kk * sp.J - kk).norm() < 1e-9);

  CHECK_THROWS_AS(sp.split(Mat6::Identity()), Error);
  CHECK(skew_residual(Mat6::Identity(), S.space) > 1.0);
}

TEST_CASE("frame carries the reference plane onto S") {
  const GaussMapGrid S = ellipsoid_map(40);
  const FrameGrid F = frame(S);
  CHECK(F.max_step <= 0.5);
  CHECK((F.P_o - S.P(20, 20)).norm() < 1e-12);
  CHECK((F.F(20, 20) - Mat6::Identity()).norm() < 1e-10);
  for_valid(F.F, [&](int i, int j) {
    const Mat6& f = F.F(i, j);
    CHECK(group_defect(f, S.space) < 1e-10);
    CHECK((f * F.P_o * f.inverse() - S.P(i, j)).norm() < 1e-8);
  });
}

TEST_CASE("Maurer-Cartan form: skew, flat, and integrable back to the frame") {
  const GaussMapGrid S = ellipsoid_map(40);
  const FrameGrid F = frame(S);
  const ConnectionGrid a = maurer_cartan(F);
  const SymmetricPair sp = SymmetricPair::at(S.space, F.P_o);
  for (int i = 0; i < a.chart.nu; ++i)
    for (int j = 0; j < a.chart.nv; ++j) {
      if (a.has_u(i, j)) {
        CHECK(skew_residual(a.u(i, j), S.space) < 1e-10);
        CHECK((sp.J * a.ku(i, j) * sp.J - a.ku(i, j)).norm() < 1e-10);
        CHECK((sp.J * a.pu(i, j) * sp.J + a.pu(i, j)).norm() < 1e-10);
      }
      if (a.has_v(i, j)) CHECK(skew_residual(a.v(i, j), S.space) < 1e-10);
    }
  CHECK(flatness_residual(a).max_raw < 1e-10);

  const IntegratedFrame back = integrate_frame(a, F.F(20, 20));
  CHECK(back.consistency < 1e-9);
  for_valid(F.F, [&](int i, int j) {
    if (back.frame.F.valid(i, j)) CHECK((back.frame.F(i, j) - F.F(i, j)).norm() < 1e-9);
  });
}

TEST_CASE("spectral connection") {
  const GaussMapGrid S = ellipsoid_map(32);
  const ConnectionGrid a = maurer_cartan(frame(S));
  const ConnectionGrid one = spectral_connection(a, 1.0);
  const ConnectionGrid two = spectral_connection(a, 2.0);
  const ConnectionGrid six = spectral_connection(spectral_connection(a, 2.0), 3.0);
  const ConnectionGrid direct = spectral_connection(a, 6.0);
  for (int i = 0; i < a.chart.nu; ++i)
    for (int j = 0; j < a.chart.nv; ++j) {
      if (!a.has_u(i, j) || !a.has_v(i, j)) continue;
      CHECK((one.u(i, j) - a.u(i, j)).norm() < 1e-15);
      CHECK((two.pu(i, j) - 2.0 * a.pu(i, j)).norm() < 1e-15);
      CHECK((two.pv(i, j) - 0.5 * a.pv(i, j)).norm() < 1e-15);
      CHECK((two.ku(i, j) - a.ku(i, j)).norm() == 0.0);
      CHECK((six.u(i, j) - direct.u(i, j)).norm() < 1e-13);
      CHECK((six.v(i, j) - direct.v(i, j)).norm() < 1e-13);
    }
  CHECK(two.lambda.has_value());
  CHECK_THROWS_AS(spectral_connection(a, 0.0), Error);
  // Chart rules on lambda apply to the deformation, not the raw connection.
  CHECK_THROWS_AS(spectral_deform(S, cplx(1.0, 1.0)), Error);

  const GaussMapGrid C = conformal_gauss(proj_lift(gen::convex_graph(24, 24)));
  const ConnectionGrid ac = maurer_cartan(frame(C));
  CHECK_THROWS_AS(spectral_deform(C, 2.0), Error);
  const ConnectionGrid ac1 = spectral_connection(ac, 1.0);
  for (int i = 0; i < ac.chart.nu; ++i)
    for (int j = 0; j < ac.chart.nv; ++j)
      if (ac.has_u(i, j) && ac.has_v(i, j)) {
        CHECK((ac1.u(i, j) - ac.u(i, j)).norm() < 1e-13);
        CHECK((ac1.v(i, j) - ac.v(i, j)).norm() < 1e-13);
      }
}

TEST_CASE("constant Gauss map deforms to itself") {
  const GaussMapGrid S0 = ellipsoid_map(20);
  Field<Mat6> P(S0.chart.nu, S0.chart.nv, 0, S0.P(10, 10));
  const GaussMapGrid S = GaussMapGrid::from_projectors(S0.space, S0.chart, P, 1.0);
  const FrameGrid F = frame(S);
  for_valid(F.F, [&](int i, int j) { CHECK((F.F(i, j) - Mat6::Identity()).norm() < 1e-12); });
  const DeformResult d = spectral_deform(S, 3.0);
  for_valid(d.S.P, [&](int i, int j) { CHECK((d.S.P(i, j) - S.P(10, 10)).norm() < 1e-10); });
}

TEST_CASE("harmonic test in the spectral deformation") {
  const DeformResult d = spectral_deform(torus_map(32), 2.0);
  CHECK(d.flat_lambda.max_raw < 1e-8);
  try {
    spectral_deform(ellipsoid_map(32), 2.0);
    FAIL("expected non_harmonic");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::non_harmonic);
  }
}

TEST_CASE("dualization swaps the signatures") {
  const GaussMapGrid S = torus_map(32);
  const DualizeResult d = dualize(S);
  CHECK(d.S.space.kind == SpaceKind::plucker);
  CHECK(d.imag_residual < 1e-10);
  CHECK(d.skew_residual < 1e-10);
  for_valid(d.S.P, [&](int i, int j) { CHECK(d.S.P(i, j).imag().norm() < 1e-10); });

  const DualizeResult back = inverse_dualize(d.S);
  CHECK(back.S.space.kind == SpaceKind::lie);
  const Mat6 T = round_trip_isometry(d, back);
  CHECK(group_defect(T, S.space) < 1e-9);
  for_valid(S.P, [&](int i, int j) {
    if (back.S.P.valid(i, j)) CHECK((T * S.P(i, j) * T.inverse() - back.S.P(i, j)).norm() < 1e-8);
  });

  try {
    dualize(conformal_gauss(proj_lift(gen::convex_graph(24, 24))));
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported);
  }
}
