#include "qg/generators.hpp"

#include "qg/source.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace qg::gen {

GridChart chart_for(int nu, int nv, const Window& w, Reality r) {
  if (!(w.u1 > w.u0) || !(w.v1 > w.v0)) throw Error(ErrorKind::invalid_argument, "empty window");
  GridChart c;
  c.nu = nu;
  c.nv = nv;
  c.u0 = w.u0;
  c.v0 = w.v0;
  c.hu = (w.u1 - w.u0) / (nu - 1);
  c.hv = (w.v1 - w.v0) / (nv - 1);
  c.reality = r;
  c.validate();
  return c;
}

SurfaceGrid sample(std::shared_ptr<const SurfaceSource> src, Geometry g, const GridChart& chart) {
  SurfaceGrid s;
  s.geometry = g;
  s.chart = chart;
  if (g == Geometry::euclidean3) {
    s.points3 = Field<Vec3>(chart.nu, chart.nv, 0, Vec3::Zero());
    s.normals = Field<Vec3>(chart.nu, chart.nv, 0, Vec3::Zero());
  } else {
    s.points4 = Field<Vec4r>(chart.nu, chart.nv, 0, Vec4r::Zero());
  }
  for (int i = 0; i < chart.nu; ++i) {
    for (int j = 0; j < chart.nv; ++j) {
      const double u = chart.u(i), v = chart.v(j);
      Eigen::VectorXd p = src->point(u, v);
      if (g == Geometry::euclidean3) {
        s.points3(i, j) = p.head<3>();
        if (src->normal) {
          s.normals(i, j) = src->normal(u, v);
        } else {
          Jet jt = jet_of(src->point, u, v);
          s.normals(i, j) = Vec3(jt.fu.head<3>()).cross(Vec3(jt.fv.head<3>())).normalized();
        }
      } else {
        s.points4(i, j) = p.head<4>();
      }
    }
  }
  s.source = std::move(src);
  return s;
}

namespace {

void set_kappa(SurfaceGrid& s, const std::function<std::pair<double, double>(double, double)>& k) {
  s.kappa1 = Field<double>(s.chart.nu, s.chart.nv, 0, 0.0);
  s.kappa2 = Field<double>(s.chart.nu, s.chart.nv, 0, 0.0);
  for (int i = 0; i < s.chart.nu; ++i)
    for (int j = 0; j < s.chart.nv; ++j) {
      auto [a, b] = k(s.chart.u(i), s.chart.v(j));
      s.kappa1(i, j) = a;
      s.kappa2(i, j) = b;
    }
  s.has_kappa = true;
}

struct EllipsoidAxes {
  std::array<double, 3> sq;   // squared semi-axes, descending
  std::array<int, 3> slot;    // output coordinate of each sorted axis
};

EllipsoidAxes sort_axes(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0)) throw Error(ErrorKind::invalid_argument, "ellipsoid semi-axes must be positive");
  std::array<double, 3> ax{a, b, c};
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return ax[x] > ax[y]; });
  if (!(ax[idx[0]] > ax[idx[1]] && ax[idx[1]] > ax[idx[2]]))
    throw Error(ErrorKind::invalid_argument, "ellipsoid needs three distinct semi-axes");
  EllipsoidAxes e;
  for (int k = 0; k < 3; ++k) {
    e.sq[k] = ax[idx[k]] * ax[idx[k]];
    e.slot[k] = idx[k];
  }
  return e;
}

}  // namespace

SurfaceGrid torus(double r, double R, int nu, int nv, Window w) {
  if (!(r > 0) || !(R > r)) throw Error(ErrorKind::invalid_argument, "torus needs 0 < r < R");
  auto src = std::make_shared<SurfaceSource>();
  src->point = [r, R](double u, double v) {
    Eigen::VectorXd p(3);
    p << (R + r * std::cos(u)) * std::cos(v), (R + r * std::cos(u)) * std::sin(v), r * std::sin(u);
    return p;
  };
  src->normal = [](double u, double v) {
    return Vec3(-std::cos(u) * std::cos(v), -std::cos(u) * std::sin(v), -std::sin(u));
  };
  SurfaceGrid s = sample(src, Geometry::euclidean3, chart_for(nu, nv, w));
  set_kappa(s, [r, R](double u, double) { return std::make_pair(1.0 / r, std::cos(u) / (R + r * std::cos(u))); });
  s.curvature_line = true;
  s.kind = "torus";
  s.params = {{"r", r}, {"R", R}};
  return s;
}

SurfaceGrid ellipsoid(double a, double b, double c, int nu, int nv, Window w) {
  const EllipsoidAxes ax = sort_axes(a, b, c);
  const double a1 = ax.sq[0], a2 = ax.sq[1], a3 = ax.sq[2];
  auto conf = [=](double th, double ps) {
    const double su = std::sin(th), sv = std::sin(ps);
    return std::make_pair(a2 + (a1 - a2) * su * su, a3 + (a2 - a3) * sv * sv);
  };
  auto point = [=](double th, double ps) {
    auto [U, V] = conf(th, ps);
    std::array<double, 3> x{std::sqrt(std::max(0.0, a1 * (a1 - U) * (a1 - V) / ((a1 - a2) * (a1 - a3)))),
                            std::sqrt(std::max(0.0, a2 * (a2 - U) * (a2 - V) / ((a2 - a1) * (a2 - a3)))),
                            std::sqrt(std::max(0.0, a3 * (a3 - U) * (a3 - V) / ((a3 - a1) * (a3 - a2))))};
    Vec3 out;
    for (int k = 0; k < 3; ++k) out(ax.slot[k]) = x[k];
    return out;
  };
  auto grad = [=](const Vec3& p) {
    Vec3 g;
    for (int k = 0; k < 3; ++k) g(ax.slot[k]) = p(ax.slot[k]) / ax.sq[k];
    return g;
  };
  auto src = std::make_shared<SurfaceSource>();
  src->point = [=](double u, double v) { return Eigen::VectorXd(point(u, v)); };
  src->normal = [=](double u, double v) { return Vec3(-grad(point(u, v)).normalized()); };
  if (!(w.u0 > 0 && w.u1 < M_PI / 2 && w.v0 > 0 && w.v1 < M_PI / 2))
    throw Error(ErrorKind::invalid_argument, "ellipsoid window must lie inside (0, pi/2)^2");
  SurfaceGrid s = sample(src, Geometry::euclidean3, chart_for(nu, nv, w));
  set_kappa(s, [=](double u, double v) {
    auto [U, V] = conf(u, v);
    const double p = 1.0 / grad(point(u, v)).norm();
    return std::make_pair(p / U, p / V);
  });
  s.curvature_line = true;
  s.kind = "ellipsoid";
  s.params = {{"a", a}, {"b", b}, {"c", c}};
  return s;
}

SurfaceGrid ellipsoid_lonlat(double a, double b, double c, int nu, int nv, Window w) {
  if (!(a > 0 && b > 0 && c > 0)) throw Error(ErrorKind::invalid_argument, "ellipsoid semi-axes must be positive");
  auto src = std::make_shared<SurfaceSource>();
  src->point = [=](double u, double v) {
    Eigen::VectorXd p(3);
    p << a * std::cos(v) * std::cos(u), b * std::cos(v) * std::sin(u), c * std::sin(v);
    return p;
  };
  src->normal = [=](double u, double v) {
    Vec3 g(std::cos(v) * std::cos(u) / a, std::cos(v) * std::sin(u) / b, std::sin(v) / c);
    return Vec3(-g.normalized());
  };
  SurfaceGrid s = sample(src, Geometry::euclidean3, chart_for(nu, nv, w));
  s.kind = "ellipsoid_lonlat";
  s.params = {{"a", a}, {"b", b}, {"c", c}};
  return s;
}

SurfaceGrid sphere(double r, int nu, int nv, Window w) {
  if (!(r > 0)) throw Error(ErrorKind::invalid_argument, "sphere radius must be positive");
  auto src = std::make_shared<SurfaceSource>();
  src->point = [r](double u, double v) {
    Eigen::VectorXd p(3);
    p << r * std::cos(v) * std::cos(u), r * std::cos(v) * std::sin(u), r * std::sin(v);
    return p;
  };
  src->normal = [](double u, double v) {
    return Vec3(-std::cos(v) * std::cos(u), -std::cos(v) * std::sin(u), -std::sin(v));
  };
  SurfaceGrid s = sample(src, Geometry::euclidean3, chart_for(nu, nv, w));
  set_kappa(s, [r](double, double) { return std::make_pair(1.0 / r, 1.0 / r); });
  s.curvature_line = true;
  s.umbilic = true;
  s.kind = "sphere";
  s.params = {{"r", r}};
  return s;
}

SurfaceGrid revolution(const std::string& profile, double p, int nu, int nv, Window w) {
  std::function<double(double)> rho, drho;
  if (profile == "catenoid") {
    if (!(p > 0)) throw Error(ErrorKind::invalid_argument, "catenoid neck radius must be positive");
    rho = [p](double t) { return p * std::cosh(t / p); };
    drho = [p](double t) { return std::sinh(t / p); };
  } else if (profile == "bulge") {
    if (!(std::abs(p) < 2)) throw Error(ErrorKind::invalid_argument, "bulge amplitude must be below 2");
    rho = [p](double t) { return 2.0 + p * std::cos(t); };
    drho = [p](double t) { return -p * std::sin(t); };
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown revolution profile '" + profile + "'");
  }
  auto src = std::make_shared<SurfaceSource>();
  src->point = [rho](double t, double v) {
    Eigen::VectorXd x(3);
    x << rho(t) * std::cos(v), rho(t) * std::sin(v), t;
    return x;
  };
  src->normal = [drho](double t, double v) {
    return Vec3(Vec3(-std::cos(v), -std::sin(v), drho(t)).normalized());
  };
  SurfaceGrid s = sample(src, Geometry::euclidean3, chart_for(nu, nv, w));
  set_kappa(s, [src](double u, double v) {
    PrincipalFrame pf = principal_of(euclidean_forms(jet_of(src->point, u, v), src->normal(u, v)), {1.0, 0.0});
    return std::make_pair(pf.k1, pf.k2);
  });
  s.curvature_line = true;
  s.kind = "revolution";
  s.params = {{"p", p}};
  return s;
}

SurfaceGrid quadric_graph(int nu, int nv, Window w) {
  auto src = std::make_shared<SurfaceSource>();
  src->point = [](double u, double v) {
    Eigen::VectorXd p(4);
    p << 1.0, u, v, u * v;
    return p;
  };
  SurfaceGrid s = sample(src, Geometry::projective3, chart_for(nu, nv, w));
  s.asymptotic = true;
  s.kind = "quadric_graph";
  return s;
}

SurfaceGrid perturbed_graph(double eps, int nu, int nv, Window w, bool x_only) {
  const double ey = x_only ? 0.0 : eps;
  auto src = std::make_shared<SurfaceSource>();
  src->point = [eps, ey](double x, double y) {
    Eigen::VectorXd p(4);
    p << 1.0, x, y, x * y + eps * x * x * x + ey * y * y * y;
    return p;
  };
  SurfaceGrid s = sample(src, Geometry::projective3, chart_for(nu, nv, w));
  s.kind = "perturbed_graph";
  s.params = {{"eps", eps}, {"x_only", x_only ? 1.0 : 0.0}};
  return s;
}

SurfaceGrid convex_graph(int nu, int nv, Window w, Reality r) {
  auto src = std::make_shared<SurfaceSource>();
  src->point = [](double x, double y) {
    Eigen::VectorXd p(4);
    p << 1.0, x, y, x * x + y * y;
    return p;
  };
  SurfaceGrid s = sample(src, Geometry::projective3, chart_for(nu, nv, w, r));
  s.asymptotic = r == Reality::complex_conjugate;
  s.kind = "convex_graph";
  return s;
}

SurfaceGrid generate(const std::string& kind, const std::map<std::string, double>& params, int nu, int nv,
                     std::optional<Window> w) {
  auto get = [&](const std::string& k, double dflt) {
    auto it = params.find(k);
    return it == params.end() ? dflt : it->second;
  };
  for (const auto& [k, v] : params)
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "parameter '" + k + "' is not finite");
  if (kind == "torus") return w ? torus(get("r", 1), get("R", 3), nu, nv, *w) : torus(get("r", 1), get("R", 3), nu, nv);
  if (kind == "ellipsoid") {
    const double a = get("a", 1), b = get("b", 1.3), c = get("c", 1.7);
    return w ? ellipsoid(a, b, c, nu, nv, *w) : ellipsoid(a, b, c, nu, nv);
  }
  if (kind == "ellipsoid_lonlat") {
    const double a = get("a", 1), b = get("b", 1.3), c = get("c", 1.7);
    return w ? ellipsoid_lonlat(a, b, c, nu, nv, *w) : ellipsoid_lonlat(a, b, c, nu, nv);
  }
  if (kind == "sphere") return w ? sphere(get("r", 1), nu, nv, *w) : sphere(get("r", 1), nu, nv);
  if (kind == "catenoid" || kind == "revolution") {
    return w ? revolution("catenoid", get("p", 1), nu, nv, *w) : revolution("catenoid", get("p", 1), nu, nv);
  }
  if (kind == "bulge") return w ? revolution("bulge", get("p", 0.5), nu, nv, *w) : revolution("bulge", get("p", 0.5), nu, nv);
  if (kind == "quadric_graph") return w ? quadric_graph(nu, nv, *w) : quadric_graph(nu, nv);
  if (kind == "perturbed_graph") {
    const bool xo = get("x_only", 0) != 0;
    return w ? perturbed_graph(get("eps", 0.1), nu, nv, *w, xo) : perturbed_graph(get("eps", 0.1), nu, nv, {-0.5, 0.5, -0.5, 0.5}, xo);
  }
  if (kind == "convex_graph") {
    const Reality r = get("complex", 1) != 0 ? Reality::complex_conjugate : Reality::real;
    return convex_graph(nu, nv, w.value_or(Window{-0.5, 0.5, -0.5, 0.5}), r);
  }
  throw Error(ErrorKind::invalid_argument, "unknown surface kind '" + kind + "'");
}

}  // namespace qg::gen
