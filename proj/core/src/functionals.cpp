#include "qg/functionals.hpp"

#include "qg/fd.hpp"
#include "qg/legendre.hpp"
#include "qg/source.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace qg {

EnergyReport integrate_density(const Field<cplx>& density, const GridChart& chart, const std::vector<Node>& excluded) {
  EnergyReport r;
  r.chart = chart;
  r.excluded = excluded;
  r.density = Field<double>(density.nu, density.nv, density.margin, 0.0);
  Field<char> skip(density.nu, density.nv, 0, 0);
  for (auto [i, j] : excluded) skip(i, j) = 1;
  for_valid(density, [&](int i, int j) {
    r.density(i, j) = density(i, j).real();
    if (!skip(i, j)) r.total += r.density(i, j) * chart.hu * chart.hv;
  });
  return r;
}

EnergyReport willmore_energy(const GaussMapGrid& S) {
  auto w = willmore_density(S);
  std::vector<Node> ex;
  for_valid(w, [&](int i, int j) {
    if (S.degenerate.valid(i, j) && S.degenerate(i, j)) ex.emplace_back(i, j);
  });
  return integrate_density(w, S.chart, ex);
}

LieDensity lie_density(const Field<double>& k1, const Field<double>& k2, const GridChart& chart) {
  if (chart.is_complex()) throw Error(ErrorKind::unsupported, "lie_density needs a real chart");
  auto k1u = fd::dx(k1, chart), k2v = fd::dy(k2, chart);
  LieDensity d;
  d.value = Field<double>(k1.nu, k1.nv, std::max(k1u.margin, k2v.margin), 0.0);
  d.negated = d.value;
  std::vector<Node> umb;
  for_valid(d.value, [&](int i, int j) {
    if (is_umbilic(k1(i, j), k2(i, j))) {
      umb.emplace_back(i, j);
      return;
    }
    const double gap = k1(i, j) - k2(i, j);
    d.value(i, j) = k1u(i, j) * k2v(i, j) / (gap * gap);
    d.negated(i, j) = -d.value(i, j);
  });
  if (!umb.empty()) throw Error(ErrorKind::umbilic, "lie_density at umbilic nodes", umb);
  return d;
}

ProjDensity proj_density(const SurfaceGrid& s, double residual_tol) {
  if (s.euclidean()) throw Error(ErrorKind::invalid_argument, "proj_density needs a projective surface");
  const GridChart& c = s.chart;
  Field<Vec4> f(s.points4.nu, s.points4.nv, s.points4.margin, Vec4::Zero());
  for (std::size_t k = 0; k < f.data.size(); ++k) f.data[k] = s.points4.data[k].cast<cplx>();
  auto fu = fd::du(f, c), fv = fd::dv(f, c), fuu = fd::duu(f, c), fvv = fd::dvv(f, c), fuv = fd::duv(f, c);
  ProjDensity d;
  d.pq = Field<cplx>(c.nu, c.nv, fu.margin, 0.0);
  d.p = d.pq;
  d.q = d.pq;
  std::vector<Node> bad;
  for_valid(d.pq, [&](int i, int j) {
    Eigen::Matrix<cplx, 4, 3> a;
    a << f(i, j), fu(i, j), fv(i, j);
    Eigen::ColPivHouseholderQR<Eigen::Matrix<cplx, 4, 3>> qr(a);
    Eigen::Vector3cd x = qr.solve(fuu(i, j)), y = qr.solve(fvv(i, j));
    const double scale = fuu(i, j).norm() + fvv(i, j).norm() + fuv(i, j).norm();
    const double res = ((a * x - fuu(i, j)).norm() + (a * y - fvv(i, j)).norm()) / scale;
    d.max_residual = std::max(d.max_residual, res);
    if (res > residual_tol) bad.emplace_back(i, j);
    d.p(i, j) = x(2);
    d.q(i, j) = y(1);
    d.pq(i, j) = x(2) * y(1);
  });
  if (!bad.empty()) throw Error(ErrorKind::not_asymptotic, "second derivatives leave the tangent space", bad);
  return d;
}

Field<cplx> willmore_gradient_density(const LegendreGrid& f, const GaussMapGrid& S, const TensionField& t) {
  const Mat6 g = S.space.gram_c();
  Field<cplx> out(t.tau.nu, t.tau.nv, t.tau.margin, 0.0);
  std::vector<Node> bad;
  for_valid(out, [&](int i, int j) {
    const Mat6 q = S.complement(i, j);
    const Eigen::Matrix<cplx, 1, 6> pr = f.s(i, j).transpose() * g * q;
    Eigen::Index k;
    const double best = pr.cwiseAbs().maxCoeff(&k);
    if (!(best > 1e-12 * f.s(i, j).norm())) {
      bad.emplace_back(i, j);
      return;
    }
    const Vec6 sigma = q.col(k) / pr(k);
    const Vec6 x = S.space.adjoint(t.tau(i, j).op) * sigma;
    const Vec6& l = f.l(i, j);
    out(i, j) = l.dot(x) / l.squaredNorm();
  });
  if (!bad.empty()) throw Error(ErrorKind::degenerate_subspace, "s pairs trivially with the complement", bad);
  return out;
}

namespace {

struct Densities {
  Field<cplx> w;
  GridChart chart;
};

Densities pipeline_density(const SurfaceGrid& s, const Transform* t) {
  Densities d;
  d.chart = s.chart;
  if (s.euclidean()) {
    SurfaceGrid base = s;
    if (t && t->kind == Transform::Kind::normal_shift) base = normal_shift(s, t->shift);
    if (!base.has_kappa) base = principal_data(base).surface;
    LegendreGrid f = lie_lift(base);
    if (t && t->kind == Transform::Kind::group) f = apply_group(f, t->group);
    d.w = willmore_density(conformal_gauss(f));
    return d;
  }
  SurfaceGrid base = s;
  if (t && t->kind == Transform::Kind::projective) base = apply_projective(s, t->projective);
  if (t && t->kind == Transform::Kind::group) {
    d.w = willmore_density(conformal_gauss(apply_group(proj_lift(base), t->group)));
    return d;
  }
  d.w = proj_density(base).pq;
  return d;
}

}  // namespace

std::vector<InvarianceEntry> invariance_report(const SurfaceGrid& s, const std::vector<Transform>& transforms) {
  for (const auto& t : transforms) {
    if (t.kind == Transform::Kind::normal_shift && !s.euclidean())
      throw Error(ErrorKind::invalid_argument, "normal shift needs a euclidean surface");
    if (t.kind == Transform::Kind::projective && s.euclidean())
      throw Error(ErrorKind::invalid_argument, "projective map needs a projective surface");
  }
  const Densities base = pipeline_density(s, nullptr);
  // Group actions on the projective lift are compared against the Gauss-map density.
  Densities base_gauss;
  if (!s.euclidean()) base_gauss.w = willmore_density(conformal_gauss(proj_lift(s)));
  std::vector<InvarianceEntry> out;
  for (const auto& t : transforms) {
    const Field<cplx>& ref = (!s.euclidean() && t.kind == Transform::Kind::group) ? base_gauss.w : base.w;
    Densities d = t.kind == Transform::Kind::identity ? base : pipeline_density(s, &t);
    const int m = std::max(ref.margin, d.w.margin);
    double dev = 0.0, top = 0.0, e0 = 0.0, e1 = 0.0;
    for (int i = m; i < ref.nu - m; ++i)
      for (int j = m; j < ref.nv - m; ++j) {
        dev = std::max(dev, std::abs(d.w(i, j) - ref(i, j)));
        top = std::max(top, std::abs(ref(i, j)));
        e0 += ref(i, j).real();
        e1 += d.w(i, j).real();
      }
    InvarianceEntry e;
    e.label = t.label;
    e.density_deviation = top > 1e-12 ? dev / top : dev;
    e.energy_deviation = std::abs(e0) > 1e-12 ? std::abs(e1 - e0) / std::abs(e0) : std::abs(e1 - e0) * s.chart.hu * s.chart.hv;
    out.push_back(e);
  }
  return out;
}

}  // namespace qg
