#include "qg/source.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qg {

Jet jet_of(const PointFn& fn, double u, double v, double h) {
  auto first = [&](double hh) {
    Eigen::VectorXd fu = (fn(u + hh, v) - fn(u - hh, v)) / (2 * hh);
    Eigen::VectorXd fv = (fn(u, v + hh) - fn(u, v - hh)) / (2 * hh);
    return std::make_pair(fu, fv);
  };
  auto second = [&](double hh, const Eigen::VectorXd& f0) {
    Eigen::VectorXd fuu = (fn(u + hh, v) - 2 * f0 + fn(u - hh, v)) / (hh * hh);
    Eigen::VectorXd fvv = (fn(u, v + hh) - 2 * f0 + fn(u, v - hh)) / (hh * hh);
    Eigen::VectorXd fuv = (fn(u + hh, v + hh) - fn(u + hh, v - hh) - fn(u - hh, v + hh) + fn(u - hh, v - hh)) / (4 * hh * hh);
    return std::make_tuple(fuu, fuv, fvv);
  };
  Jet j;
  j.f = fn(u, v);
  auto [a1, b1] = first(h);
  auto [a2, b2] = first(h / 2);
  j.fu = (4 * a2 - a1) / 3;
  j.fv = (4 * b2 - b1) / 3;
  auto [c1, d1, e1] = second(h, j.f);
  auto [c2, d2, e2] = second(h / 2, j.f);
  j.fuu = (4 * c2 - c1) / 3;
  j.fuv = (4 * d2 - d1) / 3;
  j.fvv = (4 * e2 - e1) / 3;
  return j;
}

FormCoefficients euclidean_forms(const Jet& jet, const Vec3& n) {
  FormCoefficients c;
  c.E = jet.fu.dot(jet.fu);
  c.F = jet.fu.dot(jet.fv);
  c.G = jet.fv.dot(jet.fv);
  c.L = jet.fuu.dot(n);
  c.M = jet.fuv.dot(n);
  c.N = jet.fvv.dot(n);
  return c;
}

FormCoefficients projective_forms(const Jet& jet) {
  auto det4 = [&](const Eigen::VectorXd& w) {
    Eigen::Matrix4d m;
    m << jet.f, jet.fu, jet.fv, w;
    return m.determinant();
  };
  const double scale = jet.f.squaredNorm() * jet.fu.norm() * jet.fv.norm();
  FormCoefficients c;
  c.E = jet.fu.dot(jet.fu);
  c.F = jet.fu.dot(jet.fv);
  c.G = jet.fv.dot(jet.fv);
  c.L = det4(jet.fuu) / scale;
  c.M = det4(jet.fuv) / scale;
  c.N = det4(jet.fvv) / scale;
  return c;
}

PrincipalFrame principal_of(const FormCoefficients& c, const Eigen::Vector2d& reference) {
  Eigen::Matrix2d I, II;
  I << c.E, c.F, c.F, c.G;
  II << c.L, c.M, c.M, c.N;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(II, I);
  Eigen::Vector2d a = es.eigenvectors().col(0).normalized();
  Eigen::Vector2d b = es.eigenvectors().col(1).normalized();
  double ka = es.eigenvalues()(0), kb = es.eigenvalues()(1);
  PrincipalFrame pf;
  if (std::abs(a.dot(reference)) >= std::abs(b.dot(reference))) {
    pf.k1 = ka;
    pf.k2 = kb;
    pf.d1 = a;
    pf.d2 = b;
  } else {
    pf.k1 = kb;
    pf.k2 = ka;
    pf.d1 = b;
    pf.d2 = a;
  }
  return pf;
}

bool asymptotic_of(const FormCoefficients& c, std::array<Eigen::Vector2d, 2>& dirs, double tol) {
  Eigen::Matrix2d H;
  H << c.L, c.M, c.M, c.N;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
  const double m0 = es.eigenvalues()(0), m1 = es.eigenvalues()(1);
  const double s = std::max(std::abs(m0), std::abs(m1));
  if (!(s > 0) || !(m0 < -tol * s) || !(m1 > tol * s)) return false;
  Eigen::Vector2d e0 = es.eigenvectors().col(0), e1 = es.eigenvectors().col(1);
  dirs[0] = (std::sqrt(m1) * e0 + std::sqrt(-m0) * e1).normalized();
  dirs[1] = (std::sqrt(m1) * e0 - std::sqrt(-m0) * e1).normalized();
  return true;
}

bool is_umbilic(double k1, double k2) { return std::abs(k1 - k2) < 1e-6 * (std::abs(k1) + std::abs(k2) + 1.0); }

}  // namespace qg
