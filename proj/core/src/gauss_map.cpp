#include "qg/gauss_map.hpp"

#include "qg/fd.hpp"
#include "qg/legendre.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace qg {

namespace {

using Mat63 = Eigen::Matrix<cplx, 6, 3>;

double opnorm(const Mat6& a) {
  return Eigen::JacobiSVD<Mat6>(a).singularValues()(0);
}

// Three dominant left singular vectors of a rank-3 projector, then made
// orthonormal in the pairing.
Mat63 image_basis(const Mat6& p, const PseudoSpace& space, Eigen::Vector3cd& eta) {
  Eigen::JacobiSVD<Mat6> svd(p, Eigen::ComputeFullU);
  std::vector<Vec6> cols;
  for (int k = 0; k < 3; ++k) cols.push_back(svd.matrixU().col(k));
  auto w = indefinite_orthogonalize(cols, space);
  if (w.size() != 3) throw Error(ErrorKind::degenerate_subspace, "projector image is not three-dimensional");
  Mat63 b;
  for (int k = 0; k < 3; ++k) {
    b.col(k) = w[k];
    eta(k) = space.pair(w[k], w[k]);
  }
  return b;
}

// Copy projectors into flagged nodes from the nearest unflagged one.
void continue_degenerate(Field<Mat6>& P, const Field<char>& bad) {
  std::vector<Node> good;
  for_valid(P, [&](int i, int j) {
    if (!bad(i, j)) good.emplace_back(i, j);
  });
  if (good.empty()) throw Error(ErrorKind::degenerate_subspace, "span of l, l_v, l_vv degenerate everywhere");
  for_valid(P, [&](int i, int j) {
    if (!bad(i, j)) return;
    int best = -1, bd = 1 << 30;
    for (int k = 0; k < int(good.size()); ++k) {
      const int d = std::abs(good[k].first - i) + std::abs(good[k].second - j);
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    P(i, j) = P(good[best].first, good[best].second);
  });
}

}  // namespace

double line_angle(const Vec6& a, const Vec6& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  const Vec6 ua = a / na, ub = b / nb;
  const Vec6 r = ub - ua * ua.dot(ub);
  return std::min(1.0, r.norm());
}

Mat6 projector_onto(const Eigen::Matrix<cplx, 6, Eigen::Dynamic>& b, const PseudoSpace& space) {
  const Mat6 g = space.gram_c();
  Eigen::MatrixXcd m = b.transpose() * g * b;
  return b * m.inverse() * b.transpose() * g;
}

NodeBases node_bases(const Mat6& P, const PseudoSpace& space) {
  NodeBases nb;
  nb.S = image_basis(P, space, nb.eta_S);
  nb.perp = image_basis(Mat6::Identity() - P, space, nb.eta_perp);
  return nb;
}

GaussMapGrid GaussMapGrid::from_projectors(const PseudoSpace& space, const GridChart& chart, Field<Mat6> P, cplx eps) {
  GaussMapGrid g;
  g.space = space;
  g.chart = chart;
  g.eps = eps;
  g.signature_z = chart.is_complex() ? std::make_pair(2, 0) : std::make_pair(1, 1);
  g.degenerate = Field<char>(P.nu, P.nv, P.margin, 0);
  g.bases = Field<NodeBases>(P.nu, P.nv, P.margin, NodeBases{});
  for_valid(P, [&](int i, int j) { g.bases(i, j) = node_bases(P(i, j), space); });
  g.P = std::move(P);
  return g;
}

GaussMapGrid conformal_gauss(const LegendreGrid& f) {
  const GridChart& c = f.chart;
  auto lv = fd::dv(f.l, c), lvv = fd::dvv(f.l, c);
  const Mat6 g = f.space.gram_c();
  Field<Mat6> P(c.nu, c.nv, lvv.margin, Mat6::Zero());
  Field<char> bad(c.nu, c.nv, lvv.margin, 0);
  for_valid(P, [&](int i, int j) {
    Mat63 b;
    b << f.l(i, j).normalized(), lv(i, j).normalized(), lvv(i, j).normalized();
    Eigen::Matrix3cd m = b.transpose() * g * b;
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(m);
    Eigen::JacobiSVD<Mat63> rank(b);
    if (!(svd.singularValues()(2) > 1e-8) || !(rank.singularValues()(2) > 1e-8)) {
      bad(i, j) = 1;
      return;
    }
    // Euclidean-orthonormal columns keep the roundoff in P small.
    Mat63 qb = Eigen::HouseholderQR<Mat63>(b).householderQ() * Mat63::Identity();
    Eigen::Matrix3cd mq = qb.transpose() * g * qb;
    P(i, j) = qb * mq.partialPivLu().solve(qb.transpose() * g);
  });
  continue_degenerate(P, bad);
  GaussMapGrid S = GaussMapGrid::from_projectors(f.space, c, std::move(P), c.is_complex() ? I_unit : cplx(1.0));
  S.degenerate = bad;
  return S;
}

Eigen::Matrix3cd coefficients(const TangentHom& a, const NodeBases& b, const PseudoSpace& space) {
  const Mat6 g = space.gram_c();
  // c(k,j) = <sigma_k, A e_j> / <sigma_k, sigma_k>
  Eigen::Matrix3cd c = b.perp.transpose() * g * a.op * b.S;
  for (int k = 0; k < 3; ++k) c.row(k) /= b.eta_perp(k);
  return c;
}

cplx grassmann_pair(const TangentHom& a, const TangentHom& b, const PseudoSpace& space) {
  return -(space.adjoint(b.op) * a.op).trace();
}

cplx grassmann_pair(const Eigen::Matrix3cd& a, const Eigen::Matrix3cd& b, const NodeBases& nb) {
  // B* = G_S^{-1} B^T G_perp in orthonormal bases.
  Eigen::Matrix3cd bstar = nb.eta_S.cwiseInverse().asDiagonal() * b.transpose() * nb.eta_perp.asDiagonal();
  return -(bstar * a).trace();
}

Differential dS(const GaussMapGrid& S) {
  const GridChart& c = S.chart;
  auto Pu = fd::du(S.P, c), Pv = fd::dv(S.P, c);
  Differential d;
  d.Su = Field<TangentHom>(c.nu, c.nv, Pu.margin, TangentHom{});
  d.Sv = d.Su;
  for_valid(Pu, [&](int i, int j) {
    const Mat6& p = S.P(i, j);
    const Mat6 q = Mat6::Identity() - p;
    d.Su(i, j).op = q * Pu(i, j) * p;
    d.Sv(i, j).op = q * Pv(i, j) * p;
  });
  return d;
}

Field<cplx> willmore_density(const GaussMapGrid& S) {
  auto d = dS(S);
  Field<cplx> w(S.chart.nu, S.chart.nv, d.Su.margin, 0.0);
  for_valid(w, [&](int i, int j) { w(i, j) = grassmann_pair(d.Su(i, j), d.Sv(i, j), S.space); });
  return w;
}

ConformalityReport conformality(const GaussMapGrid& S) {
  auto d = dS(S);
  ConformalityReport r;
  r.uu = Field<cplx>(S.chart.nu, S.chart.nv, d.Su.margin, 0.0);
  r.vv = r.uu;
  for_valid(r.uu, [&](int i, int j) {
    r.uu(i, j) = grassmann_pair(d.Su(i, j), d.Su(i, j), S.space);
    r.vv(i, j) = grassmann_pair(d.Sv(i, j), d.Sv(i, j), S.space);
    r.max_abs = std::max({r.max_abs, std::abs(r.uu(i, j)), std::abs(r.vv(i, j))});
  });
  return r;
}

TensionField tension(const GaussMapGrid& S) {
  const GridChart& c = S.chart;
  auto d = dS(S);
  Field<Mat6> su(c.nu, c.nv, d.Su.margin, Mat6::Zero()), sv = su;
  for_valid(su, [&](int i, int j) {
    su(i, j) = d.Su(i, j).op;
    sv(i, j) = d.Sv(i, j).op;
  });
  auto u_of_sv = fd::du(sv, c), v_of_su = fd::dv(su, c);
  TensionField t;
  t.tau = Field<TangentHom>(c.nu, c.nv, u_of_sv.margin, TangentHom{});
  t.tau_alt = t.tau;
  t.norm = Field<double>(c.nu, c.nv, u_of_sv.margin, 0.0);
  for_valid(t.tau, [&](int i, int j) {
    const Mat6& p = S.P(i, j);
    const Mat6 q = Mat6::Identity() - p;
    t.tau(i, j).op = q * u_of_sv(i, j) * p;
    t.tau_alt(i, j).op = q * v_of_su(i, j) * p;
    t.norm(i, j) = opnorm(t.tau(i, j).op);
    t.max_norm = std::max(t.max_norm, t.norm(i, j));
    t.codazzi_abs = std::max(t.codazzi_abs, opnorm(t.tau(i, j).op - t.tau_alt(i, j).op));
  });
  t.codazzi_rel = t.max_norm > 0.0 ? t.codazzi_abs / t.max_norm : 0.0;
  return t;
}

BlaschkeResidual blaschke_residual(const GaussMapGrid& S) {
  auto d = dS(S);
  BlaschkeResidual r;
  r.u = Field<double>(S.chart.nu, S.chart.nv, d.Su.margin, 0.0);
  r.v = r.u;
  for_valid(r.u, [&](int i, int j) {
    const Mat6& a = d.Su(i, j).op;
    const Mat6& b = d.Sv(i, j).op;
    r.u(i, j) = opnorm(S.space.adjoint(a) * a);
    r.v(i, j) = opnorm(b * S.space.adjoint(b));
    r.max_u = std::max(r.max_u, r.u(i, j));
    r.max_v = std::max(r.max_v, r.v(i, j));
  });
  return r;
}

ReconstructResult reconstruct(const GaussMapGrid& S) {
  const GridChart& c = S.chart;
  auto d = dS(S);
  ReconstructResult r;
  r.f.space = S.space;
  r.f.chart = c;
  r.f.l = Field<Vec6>(c.nu, c.nv, d.Su.margin, Vec6::Zero());
  r.f.s = r.f.l;
  Field<char> bad(c.nu, c.nv, d.Su.margin, 0);
  int usable = 0;
  for_valid(r.f.l, [&](int i, int j) {
    // Below 1e-6 |P| a derivative is indistinguishable from integration noise.
    const double floor = 1e-6 * std::max(1.0, S.P(i, j).norm());
    auto dominant = [floor](const Mat6& a, Vec6& out) {
      Eigen::JacobiSVD<Mat6> svd(a, Eigen::ComputeFullU);
      const auto& sv = svd.singularValues();
      out = svd.matrixU().col(0);
      return sv(0) > floor && sv(0) >= 1e3 * sv(1);
    };
    const Mat6& su = d.Su(i, j).op;
    const Mat6 svs = S.space.adjoint(d.Sv(i, j).op);
    const double dens = std::abs(grassmann_pair(d.Su(i, j), d.Sv(i, j), S.space));
    Vec6 s, l;
    const bool ok = dominant(su, s) & dominant(svs, l);
    if (!ok || dens <= 1e-8 * opnorm(su) * opnorm(svs)) {
      bad(i, j) = 1;
      r.degenerate_nodes.emplace_back(i, j);
    } else {
      ++usable;
    }
    r.f.s(i, j) = s;
    r.f.l(i, j) = l;
  });
  if (usable == 0) throw Error(ErrorKind::degenerate_reconstruction, "S has no nondegenerate focal data", r.degenerate_nodes);
  // Normalize against a usable seed so the reference pairing is meaningful.
  const int ic = c.nu / 2, jc = c.nv / 2;
  int si = ic, sj = jc, bd = 1 << 30;
  for_valid(bad, [&](int i, int j) {
    if (!bad(i, j) && std::abs(i - ic) + std::abs(j - jc) < bd) {
      bd = std::abs(i - ic) + std::abs(j - jc);
      si = i;
      sj = j;
    }
  });
  for (auto* x : {&r.f.l, &r.f.s}) {
    const Vec6 ref = (*x)(si, sj) / (*x)(si, sj).squaredNorm();
    for_valid(*x, [&](int i, int j) {
      const cplx p = ref.dot((*x)(i, j));
      if (std::abs(p) > 1e-8) (*x)(i, j) /= p;
    });
  }
  return r;
}

const char* to_string(Envelope e) {
  switch (e) {
    case Envelope::generic: return "generic";
    case Envelope::godeaux_rozet_u: return "godeaux_rozet_u";
    case Envelope::godeaux_rozet_v: return "godeaux_rozet_v";
    case Envelope::demoulin: return "demoulin";
  }
  return "?";
}

Field<Envelope> envelope_degeneracy(const GaussMapGrid& S, double tol) {
  auto d = dS(S);
  Field<Envelope> out(S.chart.nu, S.chart.nv, d.Su.margin, Envelope::generic);
  for_valid(out, [&](int i, int j) {
    const Mat6& a = d.Su(i, j).op;
    const Mat6& b = d.Sv(i, j).op;
    const double scale = std::pow(opnorm(a) + opnorm(b), 2);
    const bool vv = opnorm(S.space.adjoint(b) * b) <= tol * scale + 1e-12;
    const bool uu = opnorm(a * S.space.adjoint(a)) <= tol * scale + 1e-12;
    if (vv && uu) out(i, j) = Envelope::demoulin;
    else if (vv) out(i, j) = Envelope::godeaux_rozet_v;
    else if (uu) out(i, j) = Envelope::godeaux_rozet_u;
  });
  return out;
}

OrthogonalityReport bundle_orthogonality(const LegendreGrid& f) {
  const GridChart& c = f.chart;
  auto lv = fd::dv(f.l, c), lvv = fd::dvv(f.l, c), su = fd::du(f.s, c), suu = fd::duu(f.s, c);
  const Mat6 g = f.space.gram_c();
  OrthogonalityReport r;
  r.cross = Field<double>(c.nu, c.nv, lv.margin, 0.0);
  for_valid(r.cross, [&](int i, int j) {
    Mat63 a, b;
    a << f.l(i, j), lv(i, j), lvv(i, j);
    b << f.s(i, j), su(i, j), suu(i, j);
    Mat63 qa = Eigen::HouseholderQR<Mat63>(a).householderQ() * Mat63::Identity();
    Mat63 qb = Eigen::HouseholderQR<Mat63>(b).householderQ() * Mat63::Identity();
    r.cross(i, j) = (qa.transpose() * g * qb).norm();
    r.max_cross = std::max(r.max_cross, r.cross(i, j));
  });
  return r;
}

LemmaReport tension_lemma(const LegendreGrid& f, const GaussMapGrid& S, const TensionField& t) {
  (void)S;
  auto lv = fd::dv(f.l, f.chart);
  LemmaReport r;
  for_valid(t.tau, [&](int i, int j) {
    if (t.norm(i, j) <= 0.1 * t.max_norm || t.norm(i, j) == 0.0) return;
    const Mat6& tau = t.tau(i, j).op;
    Eigen::JacobiSVD<Mat6> svd(tau, Eigen::ComputeFullU);
    r.max_image_angle = std::max(r.max_image_angle, line_angle(svd.matrixU().col(0), f.s(i, j)));
    const double tn = t.norm(i, j);
    r.max_kernel = std::max({r.max_kernel, (tau * f.l(i, j)).norm() / (tn * f.l(i, j).norm()),
                             (tau * lv(i, j)).norm() / (tn * lv(i, j).norm())});
    ++r.nodes_used;
  });
  return r;
}

}  // namespace qg
