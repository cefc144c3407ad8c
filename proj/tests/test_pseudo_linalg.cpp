#include "qg/pseudo_linalg.hpp"
#include "qg/random.hpp"

#include <doctest.h>

#include <random>

using namespace qg;

namespace {

Vec4 rand4(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec4 x;
  for (int k = 0; k < 4; ++k) x(k) = n(rng);
  return x;
}

// Determinant of the 4x4 matrix with columns a,b,c,d.
cplx det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d) {
  Mat4 m;
  m << a, b, c, d;
  return m.determinant();
}

Vec6 lie_basis(int k) { return Vec6::Unit(k); }  // v_{-1}, v_0, v_1, v_2, v_3, v_inf

bool parallel(const Vec6& a, const Vec6& b) {
  return std::abs(std::abs(a.dot(b)) - a.norm() * b.norm()) < 1e-12 * a.norm() * b.norm();
}

double rel(const Mat6& a, const Mat6& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("pairing on basis vectors") {
  const PseudoSpace d = PseudoSpace::diagonal(3, 3);
  CHECK(d.pair(Vec6::Unit(0), Vec6::Unit(0)) == cplx(1.0));
  CHECK(d.pair(Vec6::Unit(0), Vec6::Unit(1)) == cplx(0.0));
  CHECK(d.pair(Vec6::Unit(4), Vec6::Unit(4)) == cplx(-1.0));
  const PseudoSpace& lie = PseudoSpace::lie();
  CHECK(lie.pair(lie_basis(1), lie_basis(5)) == cplx(-0.5));
  CHECK(lie.pair(lie_basis(0), lie_basis(0)) == cplx(-1.0));
  CHECK(lie.pair(lie_basis(1), lie_basis(1)) == cplx(0.0));
  CHECK(lie.m == 4);
  CHECK(lie.n == 2);
  CHECK(PseudoSpace::plucker().m == 3);
  CHECK(PseudoSpace::plucker().n == 3);
}

TEST_CASE("pairing is symmetric and rejects mixed spaces") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  Vec6 x, y;
  for (int k = 0; k < 6; ++k) {
    x(k) = cplx(n(rng), n(rng));
    y(k) = cplx(n(rng), n(rng));
  }
  for (const PseudoSpace* s : {&PseudoSpace::lie(), &PseudoSpace::plucker()})
    CHECK(std::abs(s->pair(x, y) - s->pair(y, x)) < 1e-14);
  const SixVector a = SixVector::make(x, PseudoSpace::lie());
  const SixVector b = SixVector::make(y, PseudoSpace::plucker());
  try {
    pair(a, b, PseudoSpace::lie());
    FAIL("expected mismatched_space");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::mismatched_space);
  }
}

TEST_CASE("bivector pairing equals the volume form") {
  std::mt19937_64 rng(11);
  const PseudoSpace& p = PseudoSpace::plucker();
  for (int t = 0; t < 20; ++t) {
    const Vec4 a = rand4(rng), b = rand4(rng), c = rand4(rng), d = rand4(rng);
    const Vec6 l = plucker_embed(a, b), m = plucker_embed(c, d);
    CHECK(std::abs(p.pair(l, m) - det4(a, b, c, d)) < 1e-12 * (1 + std::abs(det4(a, b, c, d))));
    CHECK(std::abs(p.pair(l, l)) <= 1e-12 * l.squaredNorm());
  }
  const Vec4 e1 = Vec4::Unit(0), e2 = Vec4::Unit(1), e3 = Vec4::Unit(2), e4 = Vec4::Unit(3);
  CHECK(p.pair(plucker_embed(e1, e2), plucker_embed(e3, e4)) == cplx(1.0));
  CHECK(p.pair(plucker_embed(e1, e2), plucker_embed(e1, e3)) == cplx(0.0));
  // alternating
  CHECK((plucker_embed(e1, e2) + plucker_embed(e2, e1)).norm() == 0.0);
  CHECK_THROWS_AS(plucker_embed(e1, 2.0 * e1), Error);
}

TEST_CASE("klein_plane recovers the plane") {
  const Vec4 e1 = Vec4::Unit(0), e2 = Vec4::Unit(1);
  for (double scale : {1.0, 7.0}) {
    const TwoPlane tp = klein_plane(scale * plucker_embed(e1, e2));
    // both vectors in span{e1, e2}, and independent
    CHECK(std::abs(tp.x(2)) + std::abs(tp.x(3)) + std::abs(tp.y(2)) + std::abs(tp.y(3)) < 1e-14);
    CHECK(plucker_embed(tp.x, tp.y).norm() > 1e-8);
  }
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Vec6 l = plucker_embed(rand4(rng), rand4(rng));
    const TwoPlane tp = klein_plane(l);
    const Vec6 back = plucker_embed(tp.x, tp.y);
    const cplx s = back.dot(l) / back.squaredNorm();
    CHECK((s * back - l).norm() <= 1e-10 * l.norm());
  }
  Vec6 bad = plucker_embed(e1, e2) + plucker_embed(Vec4::Unit(2), Vec4::Unit(3));
  try {
    klein_plane(bad);
    FAIL("expected not_decomposable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_decomposable);
  }
}

TEST_CASE("hodge star squares to the sign of the quadric") {
  const PseudoSpace& p = PseudoSpace::plucker();
  QuadricForm lor{Eigen::Vector4d(1, 1, 1, -1).asDiagonal().toDenseMatrix(), false};
  QuadricForm split{Eigen::Vector4d(1, 1, -1, -1).asDiagonal().toDenseMatrix(), false};
  const Mat6 sl = hodge_star(lor), ss = hodge_star(split);
  CHECK((sl * sl + Mat6::Identity()).norm() < 1e-12);
  CHECK((ss * ss - Mat6::Identity()).norm() < 1e-12);
  // symmetric for the pairing
  CHECK((p.adjoint(sl) - sl).norm() < 1e-12);
  CHECK((p.adjoint(ss) - ss).norm() < 1e-12);
}

TEST_CASE("hodge star matches the compound of the quadric") {
  // <x^y, star(z^w)> = Q(x,z)Q(y,w) - Q(x,w)Q(y,z) for |det Q| = 1
  std::mt19937_64 rng(5);
  const PseudoSpace& p = PseudoSpace::plucker();
  for (Eigen::Vector4d d : {Eigen::Vector4d(1, 1, 1, -1), Eigen::Vector4d(1, -1, 1, -1)}) {
    const Mat4r q = d.asDiagonal();
    const Mat6 st = hodge_star({q, false});
    for (int t = 0; t < 10; ++t) {
      const Vec4 x = rand4(rng), y = rand4(rng), z = rand4(rng), w = rand4(rng);
      const Mat4 qc = q.cast<cplx>();
      auto Q = [&](const Vec4& a, const Vec4& b) { return cplx((a.transpose() * qc * b)(0)); };
      const cplx expect = Q(x, z) * Q(y, w) - Q(x, w) * Q(y, z);
      const cplx got = p.pair(plucker_embed(x, y), st * plucker_embed(z, w));
      CHECK(std::abs(got - expect) < 1e-11 * (1 + std::abs(expect)));
    }
  }
}

TEST_CASE("null planes of a quadric are star eigenvectors") {
  QuadricForm q{Eigen::Vector4d(1, -1, 1, -1).asDiagonal().toDenseMatrix(), false};
  const Mat6 st = hodge_star(q);
  const Vec6 l = plucker_embed(Vec4(1, 1, 0, 0), Vec4(0, 0, 1, 1));
  const Vec6 sl = st * l;
  const bool plus = (sl - l).norm() < 1e-12 * l.norm(), minus = (sl + l).norm() < 1e-12 * l.norm();
  CHECK((plus || minus));

  // Both directions on random split quadrics: Q = A^T D A has null planes A^{-1}(e1+e3, e2+e4).
  std::mt19937_64 rng(9);
  const Mat4r D = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  for (int t = 0; t < 100; ++t) {
    const Mat4r A = random_sl4(rng, 0.5);
    const Mat4r Q = A.transpose() * D * A;
    const Mat6 s = hodge_star({Q, false});
    const Mat4r Ai = A.inverse();
    const Vec4 x = (Ai * Eigen::Vector4d(1, 0, 1, 0)).cast<cplx>(), y = (Ai * Eigen::Vector4d(0, 1, 0, 1)).cast<cplx>();
    const Vec6 nl = plucker_embed(x, y);
    const double res = std::min((s * nl - nl).norm(), (s * nl + nl).norm()) / nl.norm();
    CHECK(res <= 1e-9);
    // a generic line is not an eigenvector, and Q does not vanish on its plane
    const Vec6 g = plucker_embed(rand4(rng), rand4(rng));
    const double gres = std::min((s * g - g).norm(), (s * g + g).norm()) / g.norm();
    CHECK(gres > 1e-3);
  }
}

TEST_CASE("star_to_quadric inverts hodge_star up to scale") {
  const Mat4r lor = Eigen::Vector4d(1, 1, 1, -1).asDiagonal();
  const QuadricForm back = star_to_quadric(hodge_star({lor, false}));
  const double s = back.q(0, 0);
  CHECK(s > 0);
  CHECK((back.q / s - lor).norm() < 1e-12);

  const Mat4r two = Eigen::Vector4d(2, 2, -1, -1).asDiagonal();
  const QuadricForm b2 = star_to_quadric(hodge_star({two, false}));
  CHECK((b2.q / b2.q(0, 0) - two / 2.0).norm() < 1e-12);

  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const Mat4r A = random_sl4(rng, 0.5);
    const Mat4r Q = A.transpose() * Eigen::Vector4d(1, -1, 1, -1).asDiagonal() * A;
    const Mat6 st = hodge_star({Q, false});
    const QuadricForm r = star_to_quadric(st);
    CHECK(rel(hodge_star(r), st) <= 1e-9);
    // scale fixing: r is proportional to Q
    const double k = (r.q.array() * Q.array()).sum() / Q.squaredNorm();
    CHECK((r.q - k * Q).norm() <= 1e-9 * r.q.norm());
  }
  CHECK_THROWS_AS(star_to_quadric(Mat6::Zero()), Error);
}

TEST_CASE("second exterior power of SL(4) preserves the pairing") {
  std::mt19937_64 rng(17);
  const PseudoSpace& p = PseudoSpace::plucker();
  for (int t = 0; t < 20; ++t) {
    const Mat4r A = random_sl4(rng);
    const Mat6 L = lambda2(A.cast<cplx>());
    CHECK(group_residual(L, p) <= 1e-10);
    const Vec4 x = rand4(rng), y = rand4(rng);
    const Mat4 Ac = A.cast<cplx>();
    CHECK((L * plucker_embed(x, y) - plucker_embed(Ac * x, Ac * y)).norm() <= 1e-10 * (1 + plucker_embed(x, y).norm()));
  }
}

TEST_CASE("indefinite Gram-Schmidt") {
  const PseudoSpace d = PseudoSpace::diagonal(3, 3);
  const auto w = indefinite_orthogonalize({Vec6::Unit(0), Vec6(Vec6::Unit(0) + Vec6::Unit(1))}, d);
  REQUIRE(w.size() == 2);
  CHECK(std::abs(std::abs(w[0](0)) - 1.0) < 1e-14);
  CHECK(std::abs(std::abs(w[1](1)) - 1.0) < 1e-14);
  CHECK(std::abs(w[1](0)) < 1e-14);

  // <v0 + v_inf, v0 + v_inf> = 2 * (-1/2) = -1: already a unit timelike vector.
  const Vec6 t = lie_basis(1) + lie_basis(5);
  const auto u = indefinite_orthogonalize({t}, PseudoSpace::lie());
  REQUIRE(u.size() == 1);
  CHECK(std::abs(PseudoSpace::lie().pair(u[0], u[0]) - cplx(-1.0)) < 1e-14);
  CHECK(parallel(u[0], t));

  try {
    indefinite_orthogonalize({lie_basis(1)}, PseudoSpace::lie());
    FAIL("expected degenerate_subspace");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_subspace);
  }

  // random spanning sets come back with a +-1 diagonal Gram
  std::mt19937_64 rng(19);
  std::normal_distribution<double> n;
  for (const PseudoSpace* s : {&PseudoSpace::lie(), &PseudoSpace::plucker()}) {
    std::vector<Vec6> vs;
    for (int k = 0; k < 6; ++k) {
      Vec6 v;
      for (int c = 0; c < 6; ++c) v(c) = n(rng);
      vs.push_back(v);
    }
    const auto o = indefinite_orthogonalize(vs, *s);
    REQUIRE(o.size() == 6);
    int pos = 0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const cplx g = s->pair(o[a], o[b]);
        if (a == b) {
          CHECK(std::abs(std::abs(g) - 1.0) < 1e-10);
          pos += g.real() > 0;
        } else {
          CHECK(std::abs(g) < 1e-10);
        }
      }
    CHECK(pos == s->m);
  }
}

TEST_CASE("random isometries and seed streams") {
  SeedStream a(42), b(42);
  for (int k = 0; k < 5; ++k) CHECK(a.next() == b.next());
  SeedStream c(42);
  auto r1 = c.split();
  auto r2 = c.split();
  CHECK(r1() != r2());
  SeedStream s(1);
  for (const PseudoSpace* sp : {&PseudoSpace::lie(), &PseudoSpace::plucker()}) {
    for (int t = 0; t < 20; ++t) {
      auto rng = s.split();
      const Mat6 g = random_isometry(*sp, rng);
      CHECK(group_residual(g, *sp) <= 1e-12);
      CHECK(is_real(g, 1e-12));
    }
  }
  auto rng = s.split();
  for (int t = 0; t < 20; ++t) CHECK(std::abs(random_sl4(rng).determinant() - 1.0) < 1e-12);
}
