#include "qg/legendre.hpp"

#include "qg/fd.hpp"
#include "qg/source.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace qg {

namespace {

Vec6 lift_point(const Vec3& f) {
  Vec6 p;
  p << 0.0, 1.0, f(0), f(1), f(2), f.squaredNorm();
  return p;
}

Vec6 lift_plane(const Vec3& f, const Vec3& n) {
  Vec6 p;
  p << 1.0, 0.0, n(0), n(1), n(2), 2.0 * n.dot(f);
  return p;
}

Field<Vec4> complex_points(const SurfaceGrid& s) {
  Field<Vec4> out(s.points4.nu, s.points4.nv, s.points4.margin, Vec4::Zero());
  for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] = s.points4.data[k].cast<cplx>();
  return out;
}

// Euclidean least-squares residual of y against the columns of a.
template <int C>
double ls_residual(const Eigen::Matrix<cplx, 6, C>& a, const Vec6& y) {
  Eigen::Matrix<cplx, C, 1> c = (a.adjoint() * a).ldlt().solve(a.adjoint() * y);
  return (a * c - y).norm();
}

void require_real_chart(const SurfaceGrid& s, const char* what) {
  if (s.chart.is_complex()) throw Error(ErrorKind::unsupported, std::string(what) + " needs a real chart");
}

}  // namespace

void normalize_lines(Field<Vec6>& x) {
  const int ic = x.nu / 2, jc = x.nv / 2;
  if (!x.valid(ic, jc)) throw Error(ErrorKind::invalid_argument, "line field has no valid centre node");
  const Vec6 ref = x(ic, jc) / x(ic, jc).squaredNorm();
  std::vector<Node> bad;
  for_valid(x, [&](int i, int j) {
    const cplx d = ref.dot(x(i, j));
    if (std::abs(d) < 1e-6 * x(i, j).norm() * ref.norm()) {
      bad.emplace_back(i, j);
      return;
    }
    x(i, j) /= d;
  });
  if (!bad.empty()) throw Error(ErrorKind::ill_conditioned, "line field turns orthogonal to its reference", bad);
}

PrincipalResult principal_data(const SurfaceGrid& surface, double alignment_tol) {
  if (!surface.euclidean()) throw Error(ErrorKind::invalid_argument, "principal_data needs a euclidean surface");
  require_real_chart(surface, "principal_data");
  const GridChart& c = surface.chart;
  auto fu = fd::dx(surface.points3, c), fv = fd::dy(surface.points3, c);
  auto nu = fd::dx(surface.normals, c), nv = fd::dy(surface.normals, c);
  PrincipalResult r;
  r.surface = surface;
  r.surface.kappa1 = Field<double>(c.nu, c.nv, fu.margin, 0.0);
  r.surface.kappa2 = Field<double>(c.nu, c.nv, fu.margin, 0.0);
  r.residual1 = Field<double>(c.nu, c.nv, fu.margin, 0.0);
  r.residual2 = Field<double>(c.nu, c.nv, fu.margin, 0.0);
  for_valid(fu, [&](int i, int j) {
    const double k1 = -nu(i, j).dot(fu(i, j)) / fu(i, j).squaredNorm();
    const double k2 = -nv(i, j).dot(fv(i, j)) / fv(i, j).squaredNorm();
    r.surface.kappa1(i, j) = k1;
    r.surface.kappa2(i, j) = k2;
    const double scale = std::abs(k1) + std::abs(k2) + 1e-300;
    r.residual1(i, j) = (nu(i, j) + k1 * fu(i, j)).norm() / (fu(i, j).norm() * scale);
    r.residual2(i, j) = (nv(i, j) + k2 * fv(i, j)).norm() / (fv(i, j).norm() * scale);
    r.max_residual = std::max({r.max_residual, r.residual1(i, j), r.residual2(i, j)});
  });
  Field<char> umb(c.nu, c.nv, fu.margin, 0);
  for_valid(umb, [&](int i, int j) { umb(i, j) = is_umbilic(r.surface.kappa1(i, j), r.surface.kappa2(i, j)); });
  for_valid(umb, [&](int i, int j) {
    if (!umb(i, j)) return;
    bool region = true;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        if (umb.valid(i + a, j + b) && !umb(i + a, j + b)) region = false;
    if (region) r.umbilic_nodes.emplace_back(i, j);
  });
  if (!r.umbilic_nodes.empty()) throw Error(ErrorKind::umbilic, "umbilic region", r.umbilic_nodes);
  if (r.max_residual > alignment_tol) {
    std::vector<Node> bad;
    for_valid(fu, [&](int i, int j) {
      if (std::max(r.residual1(i, j), r.residual2(i, j)) > alignment_tol) bad.emplace_back(i, j);
    });
    throw Error(ErrorKind::not_curvature_line, "chart axes are not principal directions", bad);
  }
  r.surface.has_kappa = true;
  r.surface.curvature_line = true;
  return r;
}

double asymptotic_residual(const SurfaceGrid& s) {
  if (s.euclidean()) throw Error(ErrorKind::invalid_argument, "asymptotic_residual needs a projective surface");
  const GridChart& c = s.chart;
  auto f = complex_points(s);
  auto fu = fd::du(f, c), fv = fd::dv(f, c), fuu = fd::duu(f, c), fvv = fd::dvv(f, c), fuv = fd::duv(f, c);
  double worst = 0.0;
  for_valid(fu, [&](int i, int j) {
    auto det = [&](const Vec4& w) {
      Mat4 m;
      m << f(i, j), fu(i, j), fv(i, j), w;
      return std::abs(m.determinant());
    };
    const double L = det(fuu(i, j)), M = det(fuv(i, j)), N = det(fvv(i, j));
    worst = std::max(worst, std::max(L, N) / std::max(M, 1e-300));
  });
  return worst;
}

double curvature_line_residual(const SurfaceGrid& s) {
  if (!s.euclidean()) throw Error(ErrorKind::invalid_argument, "curvature_line_residual needs a euclidean surface");
  const GridChart& c = s.chart;
  auto fu = fd::dx(s.points3, c), fv = fd::dy(s.points3, c);
  auto fuu = fd::dxx(s.points3, c), fvv = fd::dyy(s.points3, c), fuv = fd::dxy(s.points3, c);
  double worst = 0.0;
  for_valid(fuu, [&](int i, int j) {
    const Vec3& n = s.normals(i, j);
    Eigen::Matrix2d first, second;
    first << fu(i, j).dot(fu(i, j)), fu(i, j).dot(fv(i, j)), fu(i, j).dot(fv(i, j)), fv(i, j).dot(fv(i, j));
    second << fuu(i, j).dot(n), fuv(i, j).dot(n), fuv(i, j).dot(n), fvv(i, j).dot(n);
    const Eigen::Matrix2d shape = first.inverse() * second;
    worst = std::max(worst, std::max(std::abs(shape(0, 1)), std::abs(shape(1, 0))) / shape.norm());
  });
  return worst;
}

LegendreGrid lie_lift(const SurfaceGrid& s) {
  if (!s.euclidean()) throw Error(ErrorKind::invalid_argument, "lie_lift needs a euclidean surface");
  if (!s.has_kappa) throw Error(ErrorKind::missing_data, "lie_lift needs principal curvatures");
  const GridChart& c = s.chart;
  const int m = std::max({s.points3.margin, s.normals.margin, s.kappa1.margin, s.kappa2.margin});
  LegendreGrid f;
  f.space = PseudoSpace::lie();
  f.chart = c;
  f.l = Field<Vec6>(c.nu, c.nv, m, Vec6::Zero());
  f.s = f.l;
  f.phi = f.l;
  f.nu_sphere = f.l;
  f.has_aux = true;
  std::vector<Node> umb;
  for_valid(f.l, [&](int i, int j) {
    const double k1 = s.kappa1(i, j), k2 = s.kappa2(i, j);
    if (is_umbilic(k1, k2)) umb.emplace_back(i, j);
    const Vec6 phi = lift_point(s.points3(i, j));
    const Vec6 nu = lift_plane(s.points3(i, j), s.normals(i, j));
    f.phi(i, j) = phi;
    f.nu_sphere(i, j) = nu;
    f.l(i, j) = nu + k1 * phi;
    f.s(i, j) = nu + k2 * phi;
  });
  if (!umb.empty()) throw Error(ErrorKind::umbilic, "lie_lift at umbilic nodes", umb);
  return f;
}

LegendreGrid proj_lift(const SurfaceGrid& s) {
  if (s.euclidean()) throw Error(ErrorKind::invalid_argument, "proj_lift needs a projective surface");
  const GridChart& c = s.chart;
  auto f = complex_points(s);
  auto fu = fd::du(f, c), fv = fd::dv(f, c);
  LegendreGrid out;
  out.space = PseudoSpace::plucker();
  out.chart = c;
  out.l = Field<Vec6>(c.nu, c.nv, fu.margin, Vec6::Zero());
  out.s = out.l;
  std::vector<Node> bad;
  for_valid(fu, [&](int i, int j) {
    out.l(i, j) = wedge(f(i, j), fu(i, j));
    out.s(i, j) = wedge(f(i, j), fv(i, j));
    Eigen::Matrix<cplx, 4, 3> d;
    d << f(i, j), fu(i, j), fv(i, j);
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 4, 3>> svd(d);
    if (svd.singularValues()(2) < 1e-10 * svd.singularValues()(0)) bad.emplace_back(i, j);
  });
  if (!bad.empty()) throw Error(ErrorKind::not_immersed, "projective lift is not immersed", bad);
  if (!s.asymptotic) {
    const double r = asymptotic_residual(s);
    if (r > 0.05) throw Error(ErrorKind::not_asymptotic, "chart is not asymptotic (residual " + std::to_string(r) + ")");
  }
  return out;
}

LegendreGrid focal_frame(const LegendreGrid& f) {
  const GridChart& c = f.chart;
  auto au = fd::du(f.l, c), bu = fd::du(f.s, c), av = fd::dv(f.l, c), bv = fd::dv(f.s, c);
  LegendreGrid out;
  out.space = f.space;
  out.chart = c;
  out.l = Field<Vec6>(c.nu, c.nv, au.margin, Vec6::Zero());
  out.s = out.l;
  std::vector<Node> flat;
  for_valid(au, [&](int i, int j) {
    Eigen::Matrix<cplx, 6, 2> b;
    b << f.l(i, j), f.s(i, j);
    const Mat6 proj = Mat6::Identity() - b * (b.adjoint() * b).inverse() * b.adjoint();
    auto kernel = [&](const Vec6& xu, const Vec6& yu, Vec6& line) {
      Eigen::Matrix<cplx, 6, 2> r;
      r << proj * xu, proj * yu;
      Eigen::JacobiSVD<Eigen::Matrix<cplx, 6, 2>> svd(r, Eigen::ComputeFullV);
      const double scale = (xu.norm() + yu.norm()) + 1e-300;
      if (svd.singularValues()(0) <= 1e-10 * scale || svd.singularValues()(0) == 0.0) return false;
      Eigen::Vector2cd k = svd.matrixV().col(1);
      line = k(0) * f.l(i, j) + k(1) * f.s(i, j);
      return true;
    };
    Vec6 l, s;
    if (!kernel(au(i, j), bu(i, j), l) || !kernel(av(i, j), bv(i, j), s)) {
      flat.emplace_back(i, j);
      return;
    }
    out.l(i, j) = l;
    out.s(i, j) = s;
  });
  if (!flat.empty()) throw Error(ErrorKind::not_immersed, "Legendre map has a vanishing derivative", flat);
  normalize_lines(out.l);
  normalize_lines(out.s);
  return out;
}

ConjugateCoefficients conjugate_coefficients(const LegendreGrid& f) {
  const GridChart& c = f.chart;
  auto lu = fd::du(f.l, c), sv = fd::dv(f.s, c);
  ConjugateCoefficients cc;
  cc.p = Field<cplx>(c.nu, c.nv, lu.margin, 0.0);
  cc.q = cc.p;
  cc.residual = Field<double>(c.nu, c.nv, lu.margin, 0.0);
  std::vector<Node> bad;
  for_valid(lu, [&](int i, int j) {
    Eigen::Matrix<cplx, 6, 2> a;
    a << f.l(i, j), f.s(i, j);
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 6, 2>> svd(a);
    if (svd.singularValues()(1) < 1e-10 * svd.singularValues()(0)) {
      bad.emplace_back(i, j);
      return;
    }
    Eigen::ColPivHouseholderQR<Eigen::Matrix<cplx, 6, 2>> qr(a);
    Eigen::Vector2cd x = qr.solve(lu(i, j)), y = qr.solve(sv(i, j));
    cc.p(i, j) = x(1);
    cc.q(i, j) = y(0);
    const double scale = lu(i, j).norm() + sv(i, j).norm() + 1e-300;
    cc.residual(i, j) = ((a * x - lu(i, j)).norm() + (a * y - sv(i, j)).norm()) / scale;
    cc.max_residual = std::max(cc.max_residual, cc.residual(i, j));
  });
  if (!bad.empty()) throw Error(ErrorKind::ill_conditioned, "focal lines are parallel", bad);
  return cc;
}

ConformalStructure conformal_structure(const LegendreGrid& f) {
  const GridChart& c = f.chart;
  const Mat6 g = f.space.gram_c();
  Field<Vec6> s1(c.nu, c.nv, f.l.margin, Vec6::Zero()), s2 = s1;
  for_valid(s1, [&](int i, int j) {
    if (c.is_complex()) {
      s1(i, j) = f.l(i, j).real().cast<cplx>();
      s2(i, j) = f.l(i, j).imag().cast<cplx>();
    } else {
      s1(i, j) = f.l(i, j).real().cast<cplx>();
      s2(i, j) = f.s(i, j).real().cast<cplx>();
    }
  });
  auto d1x = fd::dx(s1, c), d1y = fd::dy(s1, c), d2x = fd::dx(s2, c), d2y = fd::dy(s2, c);
  ConformalStructure cs;
  cs.coeffs = Field<Eigen::Vector3d>(c.nu, c.nv, d1x.margin, Eigen::Vector3d::Zero());
  cs.signature = Field<int>(c.nu, c.nv, d1x.margin, 0);
  int n11 = 0, n20 = 0;
  for_valid(d1x, [&](int i, int j) {
    Eigen::Matrix<double, 2, 6> cons;
    cons.row(0) = (s1(i, j).real().transpose() * g.real());
    cons.row(1) = (s2(i, j).real().transpose() * g.real());
    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 6>> svd(cons, Eigen::ComputeFullV);
    // Kernel of the two constraints is the orthogonal complement; drop the
    // part lying in f itself.
    Eigen::Matrix<double, 6, 2> fb;
    fb << s1(i, j).real(), s2(i, j).real();
    Eigen::Matrix<double, 6, 6> pf = fb * (fb.transpose() * fb).inverse() * fb.transpose();
    std::vector<Eigen::Matrix<double, 6, 1>> cand;
    for (int k = 2; k < 6; ++k) cand.push_back(svd.matrixV().col(k) - pf * svd.matrixV().col(k));
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.norm() > b.norm(); });
    Eigen::Matrix<double, 6, 1> w1 = cand[0].normalized();
    Eigen::Matrix<double, 6, 1> w2 = (cand[1] - cand[1].dot(w1) * w1).normalized();
    auto Q = [&](const Vec6& a, const Vec6& b) {
      Eigen::Matrix2d m;
      m(0, 0) = (a.real().transpose() * g.real() * w1)(0);
      m(0, 1) = (a.real().transpose() * g.real() * w2)(0);
      m(1, 0) = (b.real().transpose() * g.real() * w1)(0);
      m(1, 1) = (b.real().transpose() * g.real() * w2)(0);
      return m.determinant();
    };
    const double A = Q(d1x(i, j), d2x(i, j));
    const double C = Q(d1y(i, j), d2y(i, j));
    const double S = Q(d1x(i, j) + d1y(i, j), d2x(i, j) + d2y(i, j));
    const double B = 0.5 * (S - A - C);
    cs.coeffs(i, j) = Eigen::Vector3d(A, B, C);
    const double disc = B * B - A * C;
    const double scale = A * A + B * B + C * C;
    int sig = 0;
    if (disc > 1e-8 * scale) sig = 11;
    else if (disc < -1e-8 * scale) sig = 20;
    cs.signature(i, j) = sig;
    if (sig == 0) cs.degenerate_nodes.emplace_back(i, j);
    if (sig == 11) ++n11;
    if (sig == 20) ++n20;
    if (!c.is_complex() && scale > 0)
      cs.null_residual = std::max(cs.null_residual, std::max(std::abs(A), std::abs(C)) / std::sqrt(scale));
  });
  if (!cs.degenerate_nodes.empty())
    throw Error(ErrorKind::degenerate_structure, "induced conformal structure is degenerate", cs.degenerate_nodes);
  cs.overall = n20 == 0 ? 11 : (n11 == 0 ? 20 : 0);
  return cs;
}

PointSurfaceResult point_surface(const LegendreGrid& f) {
  const GridChart& c = f.chart;
  PointSurfaceResult r;
  SurfaceGrid& s = r.surface;
  s.chart = c;
  const int m = std::max(f.l.margin, f.s.margin);
  if (f.space.kind == SpaceKind::plucker) {
    s.geometry = Geometry::projective3;
    s.points4 = Field<Vec4r>(c.nu, c.nv, m, Vec4r::Zero());
    for_valid(s.points4, [&](int i, int j) {
      TwoPlane a = klein_plane(f.l(i, j), 1e-2), b = klein_plane(f.s(i, j), 1e-2);
      Mat4 sys;
      sys << a.x, a.y, -b.x, -b.y;
      Eigen::JacobiSVD<Mat4> svd(sys, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (sv(2) < 1e-8 * sv(0)) r.singular_nodes.emplace_back(i, j);
      Eigen::Vector4cd k = svd.matrixV().col(3);
      Vec4 p = k(0) * a.x + k(1) * a.y;
      int lead = 0;
      while (lead < 3 && std::abs(p(lead)) <= 1e-8 * p.norm()) ++lead;
      p /= p(lead);
      s.points4(i, j) = p.real();
    });
    s.asymptotic = true;
    return r;
  }
  if (f.space.kind != SpaceKind::lie) throw Error(ErrorKind::unsupported, "point_surface needs a Lie or Plucker grid");
  s.geometry = Geometry::euclidean3;
  s.points3 = Field<Vec3>(c.nu, c.nv, m, Vec3::Zero());
  s.normals = s.points3;
  s.kappa1 = Field<double>(c.nu, c.nv, m, 0.0);
  s.kappa2 = s.kappa1;
  Field<char> sing(c.nu, c.nv, m, 0);
  for_valid(s.points3, [&](int i, int j) {
    const Vec6& l = f.l(i, j);
    const Vec6& sp = f.s(i, j);
    Vec6 x = sp(0) * l - l(0) * sp;
    const double scale = l.norm() * sp.norm();
    if (x.norm() <= 1e-10 * scale || std::abs(x(1)) <= 1e-10 * x.norm()) {
      sing(i, j) = 1;
      return;
    }
    x /= x(1);
    const Vec3 p = x.segment<3>(2).real();
    s.points3(i, j) = p;
    const bool use_l = std::abs(l(0)) >= std::abs(sp(0));
    const Vec6 t = use_l ? Vec6(l / l(0)) : Vec6(sp / sp(0));
    const double k = t(1).real();
    s.normals(i, j) = t.segment<3>(2).real() - k * p;
    if (std::abs(l(0)) > 1e-12 * l.norm()) s.kappa1(i, j) = (l(1) / l(0)).real();
    if (std::abs(sp(0)) > 1e-12 * sp.norm()) s.kappa2(i, j) = (sp(1) / sp(0)).real();
  });
  auto pu = fd::dx(s.points3, c), pv = fd::dy(s.points3, c);
  double top = 0.0;
  for_valid(pu, [&](int i, int j) { top = std::max(top, pu(i, j).cross(pv(i, j)).norm()); });
  for_valid(pu, [&](int i, int j) {
    if (pu(i, j).cross(pv(i, j)).norm() <= 1e-6 * top) sing(i, j) = 1;
  });
  for_valid(sing, [&](int i, int j) {
    if (sing(i, j)) r.singular_nodes.emplace_back(i, j);
  });
  s.has_kappa = true;
  s.curvature_line = true;
  return r;
}

SurfaceGrid normal_shift(const SurfaceGrid& surface, double t) {
  if (!surface.euclidean()) throw Error(ErrorKind::invalid_argument, "normal_shift needs a euclidean surface");
  SurfaceGrid s = surface;
  std::vector<Node> focal;
  for (int i = 0; i < s.chart.nu; ++i)
    for (int j = 0; j < s.chart.nv; ++j) {
      s.points3(i, j) += t * s.normals(i, j);
      if (s.has_kappa && s.kappa1.valid(i, j)) {
        const double d1 = 1.0 - t * s.kappa1(i, j), d2 = 1.0 - t * s.kappa2(i, j);
        if (std::abs(d1) < 1e-12 || std::abs(d2) < 1e-12) {
          focal.emplace_back(i, j);
          continue;
        }
        s.kappa1(i, j) /= d1;
        s.kappa2(i, j) /= d2;
      }
    }
  if (!focal.empty()) throw Error(ErrorKind::focal_value, "shift distance hits a focal value", focal);
  if (surface.source) {
    auto old = surface.source;
    auto src = std::make_shared<SurfaceSource>(*old);
    if (old->normal) {
      src->point = [old, t](double u, double v) {
        Eigen::VectorXd p = old->point(u, v);
        p.head<3>() += t * old->normal(u, v);
        return p;
      };
      s.source = src;
    } else {
      s.source.reset();
    }
  }
  s.params.emplace_back("shift", t);
  return s;
}

LegendreGrid apply_group(const LegendreGrid& f, const Mat6& g) {
  if (group_residual(g, f.space) > 1e-10) throw Error(ErrorKind::not_in_group, "map does not preserve the pairing");
  LegendreGrid out;
  out.space = f.space;
  out.chart = f.chart;
  out.l = f.l;
  out.s = f.s;
  for (auto& x : out.l.data) x = g * x;
  for (auto& x : out.s.data) x = g * x;
  return out;
}

SurfaceGrid apply_projective(const SurfaceGrid& surface, const Mat4r& a) {
  if (surface.euclidean()) throw Error(ErrorKind::invalid_argument, "apply_projective needs a projective surface");
  if (std::abs(a.determinant()) < 1e-12 * std::pow(a.norm(), 4))
    throw Error(ErrorKind::not_in_group, "projective map is singular");
  SurfaceGrid s = surface;
  for (auto& p : s.points4.data) p = a * p;
  if (surface.source) {
    auto old = surface.source;
    auto src = std::make_shared<SurfaceSource>(*old);
    src->point = [old, a](double u, double v) { return Eigen::VectorXd(a * old->point(u, v)); };
    s.source = src;
  }
  return s;
}

LegendreResidual legendre_residual(const LegendreGrid& f) {
  const GridChart& c = f.chart;
  auto lu = fd::du(f.l, c), lv = fd::dv(f.l, c), su = fd::du(f.s, c), sv = fd::dv(f.s, c);
  LegendreResidual r;
  const PseudoSpace& sp = f.space;
  for_valid(f.l, [&](int i, int j) {
    const Vec6& l = f.l(i, j);
    const Vec6& s = f.s(i, j);
    const double nl = l.norm(), ns = s.norm();
    r.nullity = std::max({r.nullity, std::abs(sp.pair(l, l)) / (nl * nl), std::abs(sp.pair(s, s)) / (ns * ns),
                          std::abs(sp.pair(l, s)) / (nl * ns)});
  });
  for_valid(lu, [&](int i, int j) {
    const Vec6& l = f.l(i, j);
    const Vec6& s = f.s(i, j);
    const double dl = lu(i, j).norm() + lv(i, j).norm(), ds = su(i, j).norm() + sv(i, j).norm();
    r.legendre = std::max({r.legendre, std::abs(sp.pair(lu(i, j), s)) / (dl * s.norm()),
                           std::abs(sp.pair(lv(i, j), s)) / (dl * s.norm()),
                           std::abs(sp.pair(su(i, j), l)) / (ds * l.norm()),
                           std::abs(sp.pair(sv(i, j), l)) / (ds * l.norm())});
    Eigen::Matrix<cplx, 6, 2> a;
    a << l, s;
    r.focal = std::max({r.focal, ls_residual<2>(a, lu(i, j)) / dl, ls_residual<2>(a, sv(i, j)) / ds});
  });
  return r;
}

}  // namespace qg
