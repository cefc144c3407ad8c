#include "qg/fd.hpp"
#include "qg/functionals.hpp"
#include "qg/source.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qg {

namespace {

using V2 = Eigen::Vector2d;
using Mat63 = Eigen::Matrix<cplx, 6, 3>;

// Derivative of a field along a direction field: d[0] * dx + d[1] * dy.
template <class T>
Field<T> along(const Field<T>& f, const Field<V2>& d, const GridChart& c) {
  auto fx = fd::dx(f, c), fy = fd::dy(f, c);
  Field<T> out(f.nu, f.nv, std::max(fx.margin, d.margin), zero_of<T>());
  for_valid(out, [&](int i, int j) { out(i, j) = T(d(i, j)(0) * fx(i, j) + d(i, j)(1) * fy(i, j)); });
  return out;
}

double energy_of(const Field<double>& dens, const GridChart& c, int margin) {
  double w = 0.0;
  const int m = std::max(margin, dens.margin);
  for (int i = m; i < dens.nu - m; ++i)
    for (int j = m; j < dens.nv - m; ++j) w += dens(i, j) * c.hu * c.hv;
  return w;
}

// Smooth compactly supported bump on the node range [mg, n-1-mg].
std::vector<double> bump(int n, int mg, std::vector<double>& z) {
  std::vector<double> b(n, 0.0);
  z.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double t = double(i - mg) / double(n - 1 - 2 * mg);
    z[i] = 2.0 * t - 1.0;
    if (std::abs(z[i]) < 1.0) b[i] = std::exp(1.0 - 1.0 / (1.0 - z[i] * z[i]));
  }
  return b;
}

}  // namespace

GeneralChartData general_chart_data(const Field<Vec3>& pts, const Field<Vec3>& ref, const GridChart& c) {
  if (c.is_complex()) throw Error(ErrorKind::unsupported, "general chart data needs a real chart");
  const PseudoSpace& sp = PseudoSpace::lie();
  const Mat6 G = sp.gram_c();
  auto fx = fd::dx(pts, c), fy = fd::dy(pts, c), fxx = fd::dxx(pts, c), fyy = fd::dyy(pts, c), fxy = fd::dxy(pts, c);
  const int m1 = fx.margin;
  GeneralChartData d;
  d.normals = Field<Vec3>(c.nu, c.nv, m1, Vec3::Zero());
  d.kappa1 = Field<double>(c.nu, c.nv, m1, 0.0);
  d.kappa2 = d.kappa1;
  Field<V2> X(c.nu, c.nv, m1, V2::Zero()), Y = X;
  Field<Vec6> l(c.nu, c.nv, m1, Vec6::Zero()), s = l;
  std::vector<Node> umb;
  for_valid(fx, [&](int i, int j) {
    Vec3 n = fx(i, j).cross(fy(i, j)).normalized();
    if (n.dot(ref(i, j)) < 0) n = -n;
    FormCoefficients fc;
    fc.E = fx(i, j).dot(fx(i, j));
    fc.F = fx(i, j).dot(fy(i, j));
    fc.G = fy(i, j).dot(fy(i, j));
    fc.L = fxx(i, j).dot(n);
    fc.M = fxy(i, j).dot(n);
    fc.N = fyy(i, j).dot(n);
    PrincipalFrame pf = principal_of(fc, V2(1, 0));
    if (is_umbilic(pf.k1, pf.k2)) umb.emplace_back(i, j);
    d.normals(i, j) = n;
    d.kappa1(i, j) = pf.k1;
    d.kappa2(i, j) = pf.k2;
    X(i, j) = pf.d1 / pf.d1(0);
    Y(i, j) = pf.d2 / pf.d2(1);
    const Vec3& p = pts(i, j);
    Vec6 phi, nu;
    phi << 0.0, 1.0, p(0), p(1), p(2), p.squaredNorm();
    nu << 1.0, 0.0, n(0), n(1), n(2), 2.0 * n.dot(p);
    l(i, j) = nu + pf.k1 * phi;
    s(i, j) = nu + pf.k2 * phi;
  });
  if (!umb.empty()) throw Error(ErrorKind::umbilic, "umbilic nodes in the deformed patch", umb);

  auto lY = along(l, Y, c);
  auto lYY = along(lY, Y, c);
  Field<Mat6> P(c.nu, c.nv, lYY.margin, Mat6::Zero());
  for_valid(P, [&](int i, int j) {
    Mat63 b;
    b << l(i, j).normalized(), lY(i, j).normalized(), lYY(i, j).normalized();
    Mat63 q = Eigen::HouseholderQR<Mat63>(b).householderQ() * Mat63::Identity();
    Eigen::Matrix3cd mq = q.transpose() * G * q;
    P(i, j) = q * mq.partialPivLu().solve(q.transpose() * G);
  });
  auto PX = along(P, X, c), PY = along(P, Y, c);
  auto XY = along(Y, X, c), YX = along(X, Y, c);
  Field<Mat6> AY(c.nu, c.nv, PX.margin, Mat6::Zero());
  Field<double> det(c.nu, c.nv, PX.margin, 0.0), alpha = det;
  d.density = Field<double>(c.nu, c.nv, PX.margin, 0.0);
  for_valid(AY, [&](int i, int j) {
    const Mat6& p = P(i, j);
    const Mat6 q = Mat6::Identity() - p;
    const V2& x = X(i, j);
    const V2& y = Y(i, j);
    det(i, j) = x(0) * y(1) - x(1) * y(0);
    d.density(i, j) = (-(p * PY(i, j) * PX(i, j)).trace()).real() / det(i, j);
    AY(i, j) = q * PY(i, j) * p;
    // [X,Y] = alpha Y - beta X
    const V2 br = XY(i, j) - YX(i, j);
    alpha(i, j) = (x(0) * br(1) - x(1) * br(0)) / det(i, j);
  });
  auto AYX = along(AY, X, c);
  d.g = Field<double>(c.nu, c.nv, AYX.margin, 0.0);
  for_valid(d.g, [&](int i, int j) {
    const Mat6& p = P(i, j);
    const Mat6 q = Mat6::Identity() - p;
    const Mat6 tau = (q * AYX(i, j) * p - alpha(i, j) * AY(i, j)) / det(i, j);
    const Eigen::Matrix<cplx, 1, 6> pr = s(i, j).transpose() * G * q;
    Eigen::Index k;
    pr.cwiseAbs().maxCoeff(&k);
    const Vec6 sigma = q.col(k) / pr(k);
    const Vec6 x = sp.adjoint(tau) * sigma;
    d.g(i, j) = (l(i, j).dot(x) / l(i, j).squaredNorm()).real();
  });
  return d;
}

DescentResult willmore_descent(const SurfaceGrid& surface, const DescentOptions& opt) {
  if (!surface.euclidean()) throw Error(ErrorKind::invalid_argument, "descent needs a euclidean surface");
  if (opt.steps < 0 || !(opt.step_size >= 0.0)) throw Error(ErrorKind::invalid_argument, "steps and step size must be non-negative");
  const GridChart& c = surface.chart;
  const int M = opt.energy_margin;
  if (c.nu <= 2 * opt.window_margin + 2 || c.nv <= 2 * opt.window_margin + 2)
    throw Error(ErrorKind::invalid_argument, "grid too small for the variation window");
  if (opt.window_margin < M + 1) throw Error(ErrorKind::invalid_argument, "variation window must sit inside the energy region");

  std::vector<double> zu, zv;
  const auto bu = bump(c.nu, opt.window_margin, zu), bv = bump(c.nv, opt.window_margin, zv);
  std::vector<Field<double>> basis;
  for (int a = 0; a <= opt.degree; ++a)
    for (int b = 0; a + b <= opt.degree; ++b) {
      Field<double> B(c.nu, c.nv, 0, 0.0);
      for (int i = 0; i < c.nu; ++i)
        for (int j = 0; j < c.nv; ++j) {
          const double x = std::clamp(zu[i], -1.0, 1.0), y = std::clamp(zv[j], -1.0, 1.0);
          B(i, j) = bu[i] * bv[j] * std::legendre(a, x) * std::legendre(b, y);
        }
      basis.push_back(std::move(B));
    }

  auto interior_gap = [&](const GeneralChartData& d) {
    double gap = std::numeric_limits<double>::infinity();
    for (int i = M; i < c.nu - M; ++i)
      for (int j = M; j < c.nv - M; ++j) gap = std::min(gap, std::abs(d.kappa1(i, j) - d.kappa2(i, j)));
    return gap;
  };
  auto interior_dk = [&](const GeneralChartData& a, const GeneralChartData& b) {
    double dk = 0.0;
    for (int i = M; i < c.nu - M; ++i)
      for (int j = M; j < c.nv - M; ++j)
        dk = std::max({dk, std::abs(a.kappa1(i, j) - b.kappa1(i, j)), std::abs(a.kappa2(i, j) - b.kappa2(i, j))});
    return dk;
  };
  auto report = [&](const GeneralChartData& d, double w) {
    EnergyReport r;
    r.chart = c;
    r.total = w;
    r.density = Field<double>(c.nu, c.nv, std::max(M, d.density.margin), 0.0);
    for_valid(r.density, [&](int i, int j) { r.density(i, j) = d.density(i, j); });
    return r;
  };

  Field<Vec3> pts = surface.points3;
  const Field<Vec3>& ref = surface.normals;
  GeneralChartData data = general_chart_data(pts, ref, c);
  DescentResult res;
  double W = energy_of(data.density, c, M);
  res.energies.push_back(W);
  res.reports.push_back(report(data, W));

  for (int it = 0; it < opt.steps; ++it) {
    Field<double> grad(c.nu, c.nv, 0, 0.0);
    for_valid(data.g, [&](int i, int j) { grad(i, j) = 2.0 * data.g(i, j) * (data.kappa1(i, j) - data.kappa2(i, j)); });
    Field<double> rho(c.nu, c.nv, 0, 0.0);
    for (const auto& B : basis) {
      double ck = 0.0;
      for (std::size_t k = 0; k < B.data.size(); ++k) ck += grad.data[k] * B.data[k] * c.hu * c.hv;
      for (std::size_t k = 0; k < B.data.size(); ++k) rho.data[k] += ck * B.data[k];
    }
    const double gap = interior_gap(data);
    double h = opt.step_size;
    bool accepted = false;
    for (int k = 0; k <= opt.max_halvings; ++k, h *= 0.5) {
      Field<Vec3> trial = pts;
      for_valid(data.normals, [&](int i, int j) { trial(i, j) -= h * rho(i, j) * data.normals(i, j); });
      GeneralChartData next;
      try {
        next = general_chart_data(trial, ref, c);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::umbilic) throw;
        continue;
      }
      const double w2 = energy_of(next.density, c, M);
      if (w2 <= W && interior_dk(data, next) <= opt.curvature_guard * gap) {
        pts = std::move(trial);
        data = std::move(next);
        W = w2;
        res.step_taken.push_back(h);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }
    res.energies.push_back(W);
    res.reports.push_back(report(data, W));
  }

  SurfaceGrid out = surface;
  out.points3 = pts;
  for_valid(data.normals, [&](int i, int j) { out.normals(i, j) = data.normals(i, j); });
  out.kappa1 = data.kappa1;
  out.kappa2 = data.kappa2;
  out.has_kappa = true;
  out.curvature_line = false;
  out.source.reset();
  res.final_surface = std::move(out);
  return res;
}

}  // namespace qg
