#include "qg/pseudo_linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>

namespace qg {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::mismatched_space: return "mismatched-space";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::not_decomposable: return "not-decomposable";
    case ErrorKind::degenerate_quadric: return "degenerate-quadric";
    case ErrorKind::not_a_quadric_star: return "not-a-quadric-star";
    case ErrorKind::degenerate_subspace: return "degenerate-subspace";
    case ErrorKind::umbilic: return "umbilic";
    case ErrorKind::not_curvature_line: return "not-curvature-line";
    case ErrorKind::not_asymptotic: return "not-asymptotic";
    case ErrorKind::signature: return "signature";
    case ErrorKind::domain_exit: return "domain-exit";
    case ErrorKind::not_immersed: return "not-immersed";
    case ErrorKind::kernel_two_dimensional: return "kernel-two-dimensional";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::degenerate_structure: return "degenerate-structure";
    case ErrorKind::degenerate_reconstruction: return "degenerate-reconstruction";
    case ErrorKind::missing_data: return "missing-data";
    case ErrorKind::focal_value: return "focal-value";
    case ErrorKind::not_in_group: return "not-in-group";
    case ErrorKind::non_harmonic: return "non-harmonic";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::schema: return "schema";
  }
  return "error";
}

namespace {

constexpr std::array<std::pair<int, int>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

int pair_index(int a, int b) {
  for (int k = 0; k < 6; ++k)
    if (kPairs[k].first == a && kPairs[k].second == b) return k;
  return -1;
}

Mat6r lie_gram() {
  Mat6r g = Mat6r::Zero();
  g(0, 0) = -1.0;
  g(2, 2) = g(3, 3) = g(4, 4) = 1.0;
  g(1, 5) = g(5, 1) = -0.5;
  return g;
}

Mat6r plucker_gram() {
  Mat6r g = Mat6r::Zero();
  g(0, 5) = g(5, 0) = 1.0;
  g(1, 4) = g(4, 1) = -1.0;
  g(2, 3) = g(3, 2) = 1.0;
  return g;
}

}  // namespace

const PseudoSpace& PseudoSpace::lie() {
  static const PseudoSpace s{4, 2, lie_gram(), SpaceKind::lie};
  return s;
}

const PseudoSpace& PseudoSpace::plucker() {
  static const PseudoSpace s{3, 3, plucker_gram(), SpaceKind::plucker};
  return s;
}

PseudoSpace PseudoSpace::diagonal(int m, int n) {
  if (m + n != 6 || m < 0 || n < 0) throw Error(ErrorKind::invalid_argument, "signature must satisfy m+n=6");
  PseudoSpace s;
  s.m = m;
  s.n = n;
  s.gram = Mat6r::Zero();
  for (int i = 0; i < 6; ++i) s.gram(i, i) = i < m ? 1.0 : -1.0;
  s.kind = SpaceKind::diagonal;
  return s;
}

PseudoSpace PseudoSpace::from_gram(const Mat6r& gram) {
  if ((gram - gram.transpose()).norm() > 1e-12 * gram.norm())
    throw Error(ErrorKind::invalid_argument, "gram must be symmetric");
  auto [p, q] = signature_of(gram);
  if (p + q != 6) throw Error(ErrorKind::invalid_argument, "gram must be invertible");
  PseudoSpace s;
  s.m = p;
  s.n = q;
  s.gram = gram;
  s.kind = SpaceKind::custom;
  return s;
}

Mat6 PseudoSpace::adjoint(const Mat6& a) const {
  Mat6r gi = gram.inverse();
  return gi.cast<cplx>() * a.transpose() * gram.cast<cplx>();
}

const char* PseudoSpace::name() const {
  switch (kind) {
    case SpaceKind::lie: return "lie";
    case SpaceKind::plucker: return "plucker";
    case SpaceKind::diagonal: return "diagonal";
    case SpaceKind::custom: return "custom";
  }
  return "custom";
}

SixVector SixVector::make(const Vec6& c, const PseudoSpace& s, double tol) {
  return SixVector{c, &s, is_real(c, tol)};
}

cplx pair(const SixVector& x, const SixVector& y, const PseudoSpace& space) {
  if (x.space == nullptr || y.space == nullptr || !x.space->same_as(space) || !y.space->same_as(space))
    throw Error(ErrorKind::mismatched_space, "vectors belong to a different inner-product space");
  return space.pair(x.components, y.components);
}

cplx pair(const Vec6& x, const Vec6& y, const PseudoSpace& space) { return space.pair(x, y); }

Vec6 wedge(const Vec4& x, const Vec4& y) {
  Vec6 out;
  for (int k = 0; k < 6; ++k) {
    auto [a, b] = kPairs[k];
    out(k) = x(a) * y(b) - x(b) * y(a);
  }
  return out;
}

Vec6 plucker_embed(const Vec4& x, const Vec4& y) {
  Vec6 l = wedge(x, y);
  double scale = x.norm() * y.norm();
  if (scale == 0.0 || l.norm() <= 1e-13 * scale)
    throw Error(ErrorKind::degenerate_input, "plucker_embed needs linearly independent vectors");
  return l;
}

Mat6 lambda2(const Mat4& a) {
  Mat6 out;
  for (int c = 0; c < 6; ++c) {
    auto [k, l] = kPairs[c];
    out.col(c) = wedge(a.col(k), a.col(l));
  }
  return out;
}

Mat6 compound_form(const Mat4& q) {
  Mat6 out;
  for (int r = 0; r < 6; ++r) {
    auto [i, j] = kPairs[r];
    for (int c = 0; c < 6; ++c) {
      auto [k, l] = kPairs[c];
      out(r, c) = q(i, k) * q(j, l) - q(i, l) * q(j, k);
    }
  }
  return out;
}

Mat4 bivector_matrix(const Vec6& l) {
  Mat4 m = Mat4::Zero();
  for (int k = 0; k < 6; ++k) {
    auto [a, b] = kPairs[k];
    m(a, b) = l(k);
    m(b, a) = -l(k);
  }
  return m;
}

TwoPlane klein_plane(const Vec6& l, double tol) {
  const double n2 = l.squaredNorm();
  if (n2 == 0.0) throw Error(ErrorKind::degenerate_input, "zero bivector");
  const cplx ll = PseudoSpace::plucker().pair(l, l);
  if (std::abs(ll) > tol * n2) throw Error(ErrorKind::not_decomposable, "bivector fails the Plucker relation");
  Vec4 x, y;
  if (is_real(l)) {
    Mat4r m = bivector_matrix(l).real();
    Eigen::JacobiSVD<Mat4r> svd(m, Eigen::ComputeFullU);
    x = svd.matrixU().col(0).cast<cplx>();
    y = svd.matrixU().col(1).cast<cplx>();
  } else {
    Mat4 m = bivector_matrix(l);
    Eigen::JacobiSVD<Mat4> svd(m, Eigen::ComputeFullU);
    x = svd.matrixU().col(0);
    y = svd.matrixU().col(1);
  }
  Vec6 w = wedge(x, y);
  cplx c = l.dot(w) / l.squaredNorm();  // w = c l
  if (std::abs(c) < 1e-14) throw Error(ErrorKind::degenerate_input, "klein_plane: singular bivector");
  y /= c;
  return {x, y};
}

Mat6 hodge_star(const QuadricForm& form) {
  const Mat4r& q = form.q;
  if ((q - q.transpose()).norm() > 1e-12 * q.norm()) throw Error(ErrorKind::degenerate_quadric, "form not symmetric");
  const double det = q.determinant();
  const double scale = std::pow(q.norm(), 4);
  if (!(std::abs(det) > 1e-12 * scale)) throw Error(ErrorKind::degenerate_quadric, "degenerate quadric form");
  auto [p, n] = signature_of(q);
  if (p == 4 || n == 4) throw Error(ErrorKind::degenerate_quadric, "definite form has an empty quadric");
  Mat4r qn = q / std::pow(std::abs(det), 0.25);
  Mat6 m = compound_form(qn.cast<cplx>());
  return PseudoSpace::plucker().gram.inverse().cast<cplx>() * m;
}

QuadricForm star_to_quadric(const Mat6& star) {
  const PseudoSpace& sp = PseudoSpace::plucker();
  const double sn = star.norm();
  if (!(sn > 0.0)) throw Error(ErrorKind::not_a_quadric_star, "zero operator");
  Mat6 m = sp.gram_c() * star;
  if ((m - m.transpose()).norm() > 1e-8 * m.norm())
    throw Error(ErrorKind::not_a_quadric_star, "operator is not symmetric for the pairing");
  Mat6 sq = star * star;
  const double dplus = (sq - Mat6::Identity()).norm(), dminus = (sq + Mat6::Identity()).norm();
  if (std::min(dplus, dminus) > 1e-8 * std::max(1.0, sq.norm()))
    throw Error(ErrorKind::not_a_quadric_star, "operator does not square to +-1");
  if (!is_real(m, 1e-10 * m.norm())) throw Error(ErrorKind::not_a_quadric_star, "operator is not real");
  Mat6r mr = m.real();

  // m is the compound of A = +-Q. Column (a,b) of m equals A e_a ^ A e_b, so
  // A e_k is the common vector of the three planes with index k.
  std::array<Vec4r, 4> pts;
  for (int k = 0; k < 4; ++k) {
    Eigen::Matrix<double, 12, 4> sys = Eigen::Matrix<double, 12, 4>::Zero();
    int row = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      int a = std::min(j, k), b = std::max(j, k);
      Eigen::Matrix<double, 6, 1> bv = mr.col(pair_index(a, b));
      // (p ^ bv)_{ijk} = p_i b_jk - p_j b_ik + p_k b_ij for the four triples.
      const int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
      for (const auto& t : triples) {
        int i = t[0], jj = t[1], kk = t[2];
        sys(row, i) += bv(pair_index(jj, kk));
        sys(row, jj) -= bv(pair_index(i, kk));
        sys(row, kk) += bv(pair_index(i, jj));
        ++row;
      }
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 12, 4>> svd(sys, Eigen::ComputeFullV);
    pts[k] = svd.matrixV().col(3);
  }
  auto ratio = [&](int a, int b) {
    Eigen::Matrix<double, 6, 1> w = wedge(pts[a].cast<cplx>(), pts[b].cast<cplx>()).real();
    return w.dot(mr.col(pair_index(a, b))) / w.squaredNorm();
  };
  const double r01 = ratio(0, 1), r02 = ratio(0, 2), r12 = ratio(1, 2);
  if (r12 == 0.0) throw Error(ErrorKind::not_a_quadric_star, "inconsistent compound");
  const double c0 = std::sqrt(std::abs(r01 * r02 / r12));
  Mat4r a;
  a.col(0) = c0 * pts[0];
  for (int j = 1; j < 4; ++j) a.col(j) = (ratio(0, j) / c0) * pts[j];
  Mat6 check = compound_form(a.cast<cplx>());
  if ((check - m).norm() > 1e-6 * m.norm())
    throw Error(ErrorKind::not_a_quadric_star, "operator is not the star of a quadric");
  Mat4r q = 0.5 * (a + a.transpose());
  auto [p, n] = signature_of(q);
  if (p == 1 && n == 3) q = -q;
  if (p == 2 && n == 2) {
    Eigen::Index r, c;
    q.cwiseAbs().maxCoeff(&r, &c);
    if (q(r, c) < 0) q = -q;
  }
  return QuadricForm{q, true};
}

std::vector<Vec6> indefinite_orthogonalize(const std::vector<Vec6>& vectors, const PseudoSpace& space, double tol) {
  std::vector<Vec6> rem = vectors;
  double scale = 0.0;
  for (const auto& v : rem) scale = std::max(scale, v.norm());
  std::vector<Vec6> out;
  if (scale == 0.0) {
    if (rem.empty()) return out;
    throw Error(ErrorKind::degenerate_subspace, "all input vectors vanish");
  }
  while (true) {
    rem.erase(std::remove_if(rem.begin(), rem.end(), [&](const Vec6& v) { return v.norm() <= 1e-10 * scale; }),
              rem.end());
    if (rem.empty()) break;
    int best = -1;
    double best_ratio = -1.0;
    for (int k = 0; k < int(rem.size()); ++k) {
      double r = std::abs(space.pair(rem[k], rem[k])) / rem[k].squaredNorm();
      if (r > best_ratio + 1e-14) {
        best_ratio = r;
        best = k;
      }
    }
    if (best_ratio < tol) {
      int a = -1, b = -1;
      double pr = -1.0;
      for (int x = 0; x < int(rem.size()); ++x)
        for (int y = x + 1; y < int(rem.size()); ++y) {
          double r = std::abs(space.pair(rem[x], rem[y])) / (rem[x].norm() * rem[y].norm());
          if (r > pr) {
            pr = r;
            a = x;
            b = y;
          }
        }
      if (a < 0 || pr < tol) throw Error(ErrorKind::degenerate_subspace, "induced pairing is degenerate");
      rem[a] = rem[a] + rem[b];
      continue;
    }
    Vec6 w = rem[best];
    rem.erase(rem.begin() + best);
    cplx nn = space.pair(w, w);
    if (is_real(w, 1e-12 * w.norm()) && std::abs(nn.imag()) <= 1e-12 * std::abs(nn)) {
      w = Vec6(w.real().cast<cplx>());
      w /= std::sqrt(std::abs(nn.real()));
    } else {
      w /= std::sqrt(nn);
    }
    w = fix_sign(w);
    const cplx ww = space.pair(w, w);
    for (auto& v : rem) v -= (space.pair(v, w) / ww) * w;
    out.push_back(w);
  }
  return out;
}

Vec6 fix_sign(const Vec6& v) {
  Eigen::Index k;
  v.cwiseAbs().maxCoeff(&k);
  const cplx c = v(k);
  bool flip = c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0);
  if (std::abs(c.real()) < 1e-14 * std::abs(c)) flip = c.imag() < 0.0;
  return flip ? Vec6(-v) : v;
}

bool is_real(const Vec6& v, double tol) { return v.imag().cwiseAbs().maxCoeff() <= tol; }
bool is_real(const Mat6& m, double tol) { return m.imag().cwiseAbs().maxCoeff() <= tol; }

double group_residual(const Mat6& a, const PseudoSpace& space) {
  Mat6 g = space.gram_c();
  return (a.transpose() * g * a - g).norm() / g.norm();
}

std::pair<int, int> signature_of(const Eigen::MatrixXd& sym, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()));
  const auto& ev = es.eigenvalues();
  const double mx = ev.cwiseAbs().maxCoeff();
  int p = 0, n = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol * mx) ++p;
    if (ev(i) < -tol * mx) ++n;
  }
  return {p, n};
}

}  // namespace qg
