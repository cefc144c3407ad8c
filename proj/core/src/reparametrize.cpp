#include "qg/fd.hpp"
#include "qg/legendre.hpp"
#include "qg/source.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace qg {

namespace {

using V2 = Eigen::Vector2d;

enum class Net { principal, asymptotic };

// Second-order data of the input, sampled either from the analytic source or
// by bilinear interpolation of grid forms.
class FieldSampler {
 public:
  FieldSampler(const SurfaceGrid& s, Net net) : s_(s), net_(net) {
    const GridChart& c = s.chart;
    lo_ = V2(c.u(0), c.v(0));
    hi_ = V2(c.u(c.nu - 1), c.v(c.nv - 1));
    if (!s.source) build_grid_forms();
  }

  V2 lo() const { return lo_; }
  V2 hi() const { return hi_; }
  bool inside(const V2& p) const {
    return p(0) >= lo_(0) && p(0) <= hi_(0) && p(1) >= lo_(1) && p(1) <= hi_(1);
  }

  FormCoefficients forms(const V2& p) const {
    if (s_.source) {
      Jet j = jet_of(s_.source->point, p(0), p(1));
      if (s_.euclidean()) return euclidean_forms(j, normal_from_jet(j, p));
      return projective_forms(j);
    }
    return interpolate(p);
  }

  // The two direction fields at p (unit, parameter plane) plus curvatures
  // for the principal net.
  std::array<V2, 2> directions(const V2& p, std::array<double, 2>* kappa = nullptr) const {
    const FormCoefficients c = forms(p);
    if (net_ == Net::principal) {
      PrincipalFrame pf = principal_of(c, V2(1, 0));
      if (is_umbilic(pf.k1, pf.k2))
        throw Error(ErrorKind::umbilic, "umbilic point at (" + std::to_string(p(0)) + ", " + std::to_string(p(1)) + ")");
      if (kappa) *kappa = {pf.k1, pf.k2};
      return {pf.d1, pf.d2};
    }
    std::array<V2, 2> d;
    if (!asymptotic_of(c, d, 1e-6))
      throw Error(ErrorKind::signature, "second fundamental form is not indefinite at (" + std::to_string(p(0)) + ", " +
                                            std::to_string(p(1)) + ")");
    return d;
  }

  Eigen::VectorXd point(const V2& p) const {
    if (s_.source) return s_.source->point(p(0), p(1));
    if (s_.euclidean()) return bilinear(s_.points3, p, 0);
    return bilinear(s_.points4, p, 0);
  }

  Vec3 normal(const V2& p) const {
    if (s_.source) {
      if (s_.source->normal) return s_.source->normal(p(0), p(1));
      return normal_from_jet(jet_of(s_.source->point, p(0), p(1)), p);
    }
    return Vec3(bilinear(s_.normals, p, 0)).normalized();
  }

 private:
  Vec3 normal_from_jet(const Jet& j, const V2& p) const {
    if (s_.source->normal) return s_.source->normal(p(0), p(1));
    return Vec3(j.fu.head<3>()).cross(Vec3(j.fv.head<3>())).normalized();
  }

  template <class T>
  Eigen::VectorXd bilinear(const Field<T>& f, const V2& p, int margin) const {
    const GridChart& c = s_.chart;
    double x = (p(0) - c.u0) / c.hu, y = (p(1) - c.v0) / c.hv;
    int i = std::clamp(int(std::floor(x)), margin, c.nu - 2 - margin);
    int j = std::clamp(int(std::floor(y)), margin, c.nv - 2 - margin);
    const double a = x - i, b = y - j;
    Eigen::VectorXd r = (1 - a) * (1 - b) * Eigen::VectorXd(f(i, j)) + a * (1 - b) * Eigen::VectorXd(f(i + 1, j)) +
                        (1 - a) * b * Eigen::VectorXd(f(i, j + 1)) + a * b * Eigen::VectorXd(f(i + 1, j + 1));
    return r;
  }

  void build_grid_forms() {
    const GridChart& c = s_.chart;
    if (c.is_complex()) throw Error(ErrorKind::unsupported, "reparametrization needs a real chart");
    forms_ = Field<Eigen::Matrix<double, 6, 1>>(c.nu, c.nv, 1, Eigen::Matrix<double, 6, 1>::Zero());
    auto fill = [&](auto const& pts) {
      auto fu = fd::dx(pts, c), fv = fd::dy(pts, c), fuu = fd::dxx(pts, c), fvv = fd::dyy(pts, c),
           fuv = fd::dxy(pts, c);
      for_valid(fu, [&](int i, int j) {
        Jet jt;
        jt.f = pts(i, j);
        jt.fu = fu(i, j);
        jt.fv = fv(i, j);
        jt.fuu = fuu(i, j);
        jt.fvv = fvv(i, j);
        jt.fuv = fuv(i, j);
        FormCoefficients fc = s_.euclidean() ? euclidean_forms(jt, s_.normals(i, j)) : projective_forms(jt);
        forms_(i, j) << fc.E, fc.F, fc.G, fc.L, fc.M, fc.N;
      });
    };
    if (s_.euclidean())
      fill(s_.points3);
    else
      fill(s_.points4);
    lo_ = V2(c.u(1), c.v(1));
    hi_ = V2(c.u(c.nu - 2), c.v(c.nv - 2));
  }

  FormCoefficients interpolate(const V2& p) const {
    Eigen::VectorXd v = bilinear(forms_, p, 1);
    return {v(0), v(1), v(2), v(3), v(4), v(5)};
  }

  const SurfaceGrid& s_;
  Net net_;
  V2 lo_, hi_;
  Field<Eigen::Matrix<double, 6, 1>> forms_;
};

// Polyline of a traced streamline, uniformly sampled in arc length with unit
// tangents, interpolated by cubic Hermite segments.
struct Streamline {
  double step = 0.0;
  int origin = 0;  // index of arc length 0
  std::vector<V2> pts;
  std::vector<V2> tan;

  double smin() const { return -origin * step; }
  double smax() const { return (int(pts.size()) - 1 - origin) * step; }

  std::pair<V2, V2> eval(double s) const {
    double x = s / step + origin;
    int k = std::clamp(int(std::floor(x)), 0, int(pts.size()) - 2);
    double t = x - k;
    const V2 &p0 = pts[k], &p1 = pts[k + 1];
    const V2 m0 = tan[k] * step, m1 = tan[k + 1] * step;
    const double t2 = t * t, t3 = t2 * t;
    V2 p = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
    V2 d = ((6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * p1 + (3 * t2 - 2 * t) * m1) / step;
    return {p, d};
  }
};

class Tracer {
 public:
  explicit Tracer(const FieldSampler& f) : f_(f) {}

  // Direction of the field family most parallel to `heading`, oriented along it.
  V2 follow(const V2& p, const V2& heading) const {
    auto d = f_.directions(p);
    V2 best = std::abs(d[0].dot(heading)) >= std::abs(d[1].dot(heading)) ? d[0] : d[1];
    return best.dot(heading) < 0 ? V2(-best) : best;
  }

  // One-sided trace with RK4; stops at `length` or when leaving the domain.
  void trace(const V2& start, V2 heading, double step, double length, std::vector<V2>& pts, std::vector<V2>& tan) const {
    V2 p = start;
    const int n = int(std::ceil(length / step - 1e-9));
    for (int k = 0; k < n; ++k) {
      V2 k1 = follow(p, heading);
      V2 q = p + 0.5 * step * k1;
      if (!f_.inside(q)) return;
      V2 k2 = follow(q, k1);
      q = p + 0.5 * step * k2;
      if (!f_.inside(q)) return;
      V2 k3 = follow(q, k2);
      q = p + step * k3;
      if (!f_.inside(q)) return;
      V2 k4 = follow(q, k3);
      V2 next = p + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!f_.inside(next)) return;
      heading = follow(next, k4);
      p = next;
      pts.push_back(p);
      tan.push_back(heading);
    }
  }

  Streamline line(const V2& start, const V2& heading, double step, double length) const {
    Streamline sl;
    sl.step = step;
    std::vector<V2> fp, ft, bp, bt;
    V2 h0 = follow(start, heading);
    trace(start, h0, step, length, fp, ft);
    trace(start, -h0, step, length, bp, bt);
    for (int k = int(bp.size()) - 1; k >= 0; --k) {
      sl.pts.push_back(bp[k]);
      sl.tan.push_back(-bt[k]);
    }
    sl.origin = int(sl.pts.size());
    sl.pts.push_back(start);
    sl.tan.push_back(h0);
    sl.pts.insert(sl.pts.end(), fp.begin(), fp.end());
    sl.tan.insert(sl.tan.end(), ft.begin(), ft.end());
    return sl;
  }

 private:
  const FieldSampler& f_;
};

SurfaceGrid reparametrize(const SurfaceGrid& surface, const ReparamOptions& opt, Net net) {
  const GridChart& in = surface.chart;
  if (in.is_complex()) throw Error(ErrorKind::unsupported, "reparametrization needs a real chart");
  if (!(opt.fraction > 0.0 && opt.fraction < 1.0)) throw Error(ErrorKind::invalid_argument, "fraction must lie in (0,1)");
  if (opt.substeps < 1) throw Error(ErrorKind::invalid_argument, "substeps must be positive");
  const int nu = opt.nu > 0 ? opt.nu : in.nu;
  const int nv = opt.nv > 0 ? opt.nv : in.nv;
  FieldSampler field(surface, net);
  Tracer tracer(field);

  const V2 centre = 0.5 * (field.lo() + field.hi());
  const double half = 0.5 * std::min(field.hi()(0) - field.lo()(0), field.hi()(1) - field.lo()(1));
  const double extent = opt.fraction * half;
  const double hs1 = 2.0 * extent / (nu - 1), hs2 = 2.0 * extent / (nv - 1);
  const double d1 = hs1 / opt.substeps, d2 = hs2 / opt.substeps;

  auto dirs = field.directions(centre);
  V2 x1 = std::abs(dirs[0](0)) >= std::abs(dirs[1](0)) ? dirs[0] : dirs[1];
  V2 x2 = std::abs(dirs[0](0)) >= std::abs(dirs[1](0)) ? dirs[1] : dirs[0];
  if (x1(0) < 0) x1 = -x1;
  if (x1(0) * x2(1) - x1(1) * x2(0) < 0) x2 = -x2;

  const double reach = 2.0 * extent;
  Streamline axis1 = tracer.line(centre, x1, d1, reach);
  Streamline axis2 = tracer.line(centre, x2, d2, reach);
  auto require_range = [&](const Streamline& s, double a, double b) {
    if (s.smin() > a + 1e-12 || s.smax() < b - 1e-12) throw Error(ErrorKind::domain_exit, "streamline leaves the domain");
  };
  require_range(axis1, -extent, extent);
  require_range(axis2, -extent, extent);

  std::vector<Streamline> rows(nv), cols(nu);  // rows[j]: X1-curve through axis2(t_j)
  for (int j = 0; j < nv; ++j) {
    const double t = -extent + j * hs2;
    auto [p, d] = axis2.eval(t);
    rows[j] = tracer.line(p, x1, d1, reach);
  }
  for (int i = 0; i < nu; ++i) {
    const double s = -extent + i * hs1;
    auto [p, d] = axis1.eval(s);
    cols[i] = tracer.line(p, x2, d2, reach);
  }

  GridChart out;
  out.nu = nu;
  out.nv = nv;
  out.hu = hs1;
  out.hv = hs2;
  out.u0 = -extent;
  out.v0 = -extent;
  out.validate();

  Field<V2> params(nu, nv, 0, V2::Zero());
  std::vector<Node> lost;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const Streamline& r = rows[j];
      const Streamline& c = cols[i];
      double a = -extent + i * hs1, b = -extent + j * hs2;
      bool ok = false;
      for (int it = 0; it < 50; ++it) {
        if (a < r.smin() || a > r.smax() || b < c.smin() || b > c.smax()) break;
        auto [pr, tr] = r.eval(a);
        auto [pc, tc] = c.eval(b);
        V2 g = pr - pc;
        Eigen::Matrix2d J;
        J << tr, -tc;
        V2 step = J.fullPivLu().solve(-g);
        a += step(0);
        b += step(1);
        if (step.norm() < 1e-14 * (1.0 + std::abs(a) + std::abs(b))) {
          ok = a >= r.smin() && a <= r.smax() && b >= c.smin() && b <= c.smax();
          break;
        }
      }
      if (!ok) {
        lost.emplace_back(i, j);
        continue;
      }
      params(i, j) = r.eval(a).first;
    }
  }
  if (!lost.empty()) throw Error(ErrorKind::domain_exit, "coordinate lines do not meet inside the domain", lost);

  SurfaceGrid s;
  s.geometry = surface.geometry;
  s.chart = out;
  s.kind = surface.kind;
  s.params = surface.params;
  if (surface.euclidean()) {
    s.points3 = Field<Vec3>(nu, nv, 0, Vec3::Zero());
    s.normals = s.points3;
    s.kappa1 = Field<double>(nu, nv, 0, 0.0);
    s.kappa2 = s.kappa1;
  } else {
    s.points4 = Field<Vec4r>(nu, nv, 0, Vec4r::Zero());
  }
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const V2 p = params(i, j);
      Eigen::VectorXd x = field.point(p);
      if (surface.euclidean()) {
        s.points3(i, j) = x.head<3>();
        s.normals(i, j) = field.normal(p);
        if (net == Net::principal) {
          std::array<double, 2> k{};
          auto d = field.directions(p, &k);
          // kappa1 belongs to the family tracing the first output axis.
          auto [pp, tr] = rows[j].eval(-extent + i * hs1);
          (void)pp;
          const bool first = std::abs(d[0].dot(tr)) >= std::abs(d[1].dot(tr));
          s.kappa1(i, j) = first ? k[0] : k[1];
          s.kappa2(i, j) = first ? k[1] : k[0];
        }
      } else {
        s.points4(i, j) = x.head<4>();
      }
    }
  }
  if (net == Net::principal) {
    s.has_kappa = surface.euclidean();
    s.curvature_line = true;
  } else {
    s.asymptotic = true;
  }
  s.params.emplace_back("reparam_fraction", opt.fraction);
  return s;
}

}  // namespace

SurfaceGrid curvature_line_reparametrize(const SurfaceGrid& surface, const ReparamOptions& opt) {
  if (!surface.euclidean()) throw Error(ErrorKind::invalid_argument, "curvature-line reparametrization needs a euclidean surface");
  return reparametrize(surface, opt, Net::principal);
}

SurfaceGrid asymptotic_reparametrize(const SurfaceGrid& surface, const ReparamOptions& opt) {
  return reparametrize(surface, opt, Net::asymptotic);
}

}  // namespace qg
