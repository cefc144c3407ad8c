#include "qg/io.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <map>

namespace qg::io {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::schema, what); }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception&) {
    schema_error(std::string("field '") + key + "' has the wrong type");
  }
}

json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    schema_error("bad number '" + s + "'");
  }
  if (!j.is_number()) schema_error("expected a number");
  return j.get<double>();
}

json complex(cplx z) { return json::array({z.real(), z.imag()}); }

json chart_json(const GridChart& c) {
  json j;
  j["nu"] = c.nu;
  j["nv"] = c.nv;
  j["hu"] = c.hu;
  j["hv"] = c.hv;
  j["u0"] = c.u0;
  j["v0"] = c.v0;
  j["reality"] = c.is_complex() ? "complex_conjugate" : "real";
  j["orientation"] = c.orientation;
  return j;
}

GridChart read_chart(const json& j) {
  GridChart c;
  c.nu = get<int>(j, "nu");
  c.nv = get<int>(j, "nv");
  c.hu = get<double>(j, "hu");
  c.hv = get<double>(j, "hv");
  if (j.contains("u0")) c.u0 = get<double>(j, "u0");
  if (j.contains("v0")) c.v0 = get<double>(j, "v0");
  const auto r = get<std::string>(j, "reality");
  if (r == "real") c.reality = Reality::real;
  else if (r == "complex_conjugate") c.reality = Reality::complex_conjugate;
  else schema_error("unknown reality '" + r + "'");
  if (j.contains("orientation")) c.orientation = get<int>(j, "orientation");
  try {
    c.validate();
  } catch (const Error& e) {
    schema_error(e.what());
  }
  return c;
}

template <class T, class Fn>
json field_json(const Field<T>& f, Fn convert) {
  json a = json::array();
  for (const auto& x : f.data) a.push_back(convert(x));
  return a;
}

json real_field(const Field<double>& f) {
  return field_json(f, [](double x) { return number(x); });
}

json complex_field(const Field<cplx>& f) {
  return field_json(f, [](cplx z) { return complex(z); });
}

json mat6(const Mat6& m) {
  json a = json::array();
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) a.push_back(complex(m(r, c)));
  return a;
}

Mat6 read_mat6(const json& a) {
  if (!a.is_array() || a.size() != 36) schema_error("matrix must have 36 entries");
  Mat6 m;
  for (int k = 0; k < 36; ++k) {
    const json& z = a[std::size_t(k)];
    if (!z.is_array() || z.size() != 2) schema_error("complex entries are [re, im] pairs");
    m(k / 6, k % 6) = cplx(read_number(z[0]), read_number(z[1]));
  }
  return m;
}

json space_json(const PseudoSpace& s) {
  json j;
  j["name"] = s.name();
  j["signature"] = json::array({s.m, s.n});
  json g = json::array();
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) g.push_back(s.gram(r, c));
  j["gram"] = g;
  return j;
}

PseudoSpace read_space(const json& j) {
  const auto g = get<std::vector<double>>(j, "gram");
  if (g.size() != 36) schema_error("gram must have 36 entries");
  Mat6r m;
  for (int k = 0; k < 36; ++k) m(k / 6, k % 6) = g[std::size_t(k)];
  if ((m - PseudoSpace::lie().gram).norm() == 0.0) return PseudoSpace::lie();
  if ((m - PseudoSpace::plucker().gram).norm() == 0.0) return PseudoSpace::plucker();
  try {
    return PseudoSpace::from_gram(m);
  } catch (const Error& e) {
    schema_error(e.what());
  }
}

void check_size(const json& a, const GridChart& c, const char* what) {
  if (!a.is_array() || a.size() != std::size_t(c.nu) * std::size_t(c.nv))
    schema_error(std::string("'") + what + "' must hold nu*nv entries");
}

template <int N>
Field<Eigen::Matrix<double, N, 1>> read_vectors(const json& a, const GridChart& c, const char* what) {
  check_size(a, c, what);
  Field<Eigen::Matrix<double, N, 1>> f(c.nu, c.nv, 0, Eigen::Matrix<double, N, 1>::Zero());
  for (std::size_t k = 0; k < f.data.size(); ++k) {
    const json& x = a[k];
    if (!x.is_array() || x.size() != std::size_t(N)) schema_error(std::string("bad entry in '") + what + "'");
    for (int d = 0; d < N; ++d) f.data[k](d) = read_number(x[std::size_t(d)]);
  }
  return f;
}

Field<double> read_scalars(const json& a, const GridChart& c, int margin, const char* what) {
  check_size(a, c, what);
  Field<double> f(c.nu, c.nv, margin, 0.0);
  for (std::size_t k = 0; k < f.data.size(); ++k) f.data[k] = read_number(a[k]);
  return f;
}

template <class V>
json vector_json(const V& v) {
  json a = json::array();
  for (int d = 0; d < v.size(); ++d) a.push_back(v(d));
  return a;
}

json report_json(const SuiteReport& r) {
  json j;
  j["schema"] = "qg.report/1";
  j["suite"] = r.suite;
  j["pass"] = r.pass;
  j["seed"] = r.seed;
  json m = json::object();
  for (const auto& [k, v] : r.metrics) m[k] = number(v);
  j["metrics"] = m;
  json o = json::object();
  for (const auto& f : r.orders) {
    json e;
    e["order"] = number(f.order);
    e["at_floor"] = f.at_floor;
    e["floor"] = f.floor;
    e["grids"] = f.grids;
    e["h"] = f.h;
    json vals = json::array();
    for (double v : f.values) vals.push_back(number(v));
    e["values"] = vals;
    o[f.name] = e;
  }
  j["convergence_orders"] = o;
  json cs = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["value"] = number(c.value);
    e["relation"] = c.at_most ? "<=" : ">=";
    e["threshold"] = number(c.threshold);
    e["pass"] = c.pass;
    cs.push_back(e);
  }
  j["checks"] = cs;
  return j;
}

SuiteReport read_report(const json& j) {
  SuiteReport r;
  r.suite = get<std::string>(j, "suite");
  r.pass = get<bool>(j, "pass");
  if (j.contains("seed")) r.seed = get<std::uint64_t>(j, "seed");
  const json& m = field(j, "metrics");
  if (!m.is_object()) schema_error("'metrics' must be an object");
  for (const auto& [k, v] : m.items()) r.metrics.emplace_back(k, read_number(v));
  const json& o = field(j, "convergence_orders");
  if (!o.is_object()) schema_error("'convergence_orders' must be an object");
  for (const auto& [k, e] : o.items()) {
    OrderFit f;
    f.name = k;
    f.order = read_number(field(e, "order"));
    f.at_floor = get<bool>(e, "at_floor");
    if (e.contains("floor")) f.floor = read_number(field(e, "floor"));
    f.grids = get<std::vector<int>>(e, "grids");
    f.h = get<std::vector<double>>(e, "h");
    const json& vals = field(e, "values");
    if (!vals.is_array()) schema_error("'values' must be an array");
    for (const auto& v : vals) f.values.push_back(read_number(v));
    if (f.h.size() != f.values.size()) schema_error("order samples and spacings differ in length");
    r.orders.push_back(std::move(f));
  }
  if (j.contains("checks")) {
    for (const auto& e : field(j, "checks")) {
      Check c;
      c.name = get<std::string>(e, "name");
      c.value = read_number(field(e, "value"));
      c.threshold = read_number(field(e, "threshold"));
      c.at_most = get<std::string>(e, "relation") == "<=";
      c.pass = get<bool>(e, "pass");
      r.checks.push_back(c);
    }
  }
  return r;
}

}  // namespace

std::string surface_to_json(const SurfaceGrid& s) {
  json j;
  j["schema"] = "qg.surface/1";
  j["geometry"] = s.euclidean() ? "euclidean3" : "projective3";
  const json chart = chart_json(s.chart);
  for (const auto& [k, v] : chart.items()) j[k] = v;
  j["kind"] = s.kind;
  json p = json::object();
  for (const auto& [k, v] : s.params) p[k] = v;
  j["params"] = p;
  j["flags"] = {{"curvature_line", s.curvature_line}, {"asymptotic", s.asymptotic}, {"umbilic", s.umbilic}};
  if (s.euclidean()) {
    j["points"] = field_json(s.points3, [](const Vec3& x) { return vector_json(x); });
    if (!s.normals.empty()) j["normals"] = field_json(s.normals, [](const Vec3& x) { return vector_json(x); });
  } else {
    j["points"] = field_json(s.points4, [](const Vec4r& x) { return vector_json(x); });
  }
  if (s.has_kappa) {
    j["kappa_margin"] = s.kappa1.margin;
    j["kappa1"] = real_field(s.kappa1);
    j["kappa2"] = real_field(s.kappa2);
  }
  return j.dump();
}

SurfaceGrid surface_from_json(const std::string& text) {
  const json j = parse(text);
  SurfaceGrid s;
  const auto geo = get<std::string>(j, "geometry");
  if (geo == "euclidean3") s.geometry = Geometry::euclidean3;
  else if (geo == "projective3") s.geometry = Geometry::projective3;
  else schema_error("unknown geometry '" + geo + "'");
  s.chart = read_chart(j);
  if (j.contains("kind")) s.kind = get<std::string>(j, "kind");
  if (j.contains("params"))
    for (const auto& [k, v] : field(j, "params").items()) s.params.emplace_back(k, read_number(v));
  if (j.contains("flags")) {
    const json& f = field(j, "flags");
    if (f.contains("curvature_line")) s.curvature_line = get<bool>(f, "curvature_line");
    if (f.contains("asymptotic")) s.asymptotic = get<bool>(f, "asymptotic");
    if (f.contains("umbilic")) s.umbilic = get<bool>(f, "umbilic");
  }
  if (s.euclidean()) {
    s.points3 = read_vectors<3>(field(j, "points"), s.chart, "points");
    if (j.contains("normals")) s.normals = read_vectors<3>(field(j, "normals"), s.chart, "normals");
    else {
      s.normals = Field<Vec3>(s.chart.nu, s.chart.nv, 0, Vec3::Zero());
      for (int i = 0; i < s.chart.nu; ++i)
        for (int j2 = 0; j2 < s.chart.nv; ++j2) {
          const int i0 = std::max(i - 1, 0), i1 = std::min(i + 1, s.chart.nu - 1);
          const int j0 = std::max(j2 - 1, 0), j1 = std::min(j2 + 1, s.chart.nv - 1);
          const Vec3 fu = s.points3(i1, j2) - s.points3(i0, j2), fv = s.points3(i, j1) - s.points3(i, j0);
          s.normals(i, j2) = s.chart.orientation * fu.cross(fv).normalized();
        }
    }
  } else {
    s.points4 = read_vectors<4>(field(j, "points"), s.chart, "points");
  }
  if (j.contains("kappa1") || j.contains("kappa2")) {
    const int m = j.contains("kappa_margin") ? get<int>(j, "kappa_margin") : 0;
    s.kappa1 = read_scalars(field(j, "kappa1"), s.chart, m, "kappa1");
    s.kappa2 = read_scalars(field(j, "kappa2"), s.chart, m, "kappa2");
    s.has_kappa = true;
  }
  return s;
}

std::string legendre_to_json(const LegendreGrid& f) {
  json j;
  j["schema"] = "qg.legendre/1";
  j["space"] = space_json(f.space);
  j["chart"] = chart_json(f.chart);
  j["margin"] = f.l.margin;
  auto lines = [](const Field<Vec6>& x) {
    return field_json(x, [](const Vec6& v) {
      json a = json::array();
      for (int k = 0; k < 6; ++k) a.push_back(complex(v(k)));
      return a;
    });
  };
  j["l"] = lines(f.l);
  j["s"] = lines(f.s);
  return j.dump();
}

std::string gauss_to_json(const GaussMapGrid& S) {
  json j;
  j["schema"] = "qg.gauss/1";
  j["space"] = space_json(S.space);
  j["chart"] = chart_json(S.chart);
  j["eps"] = complex(S.eps);
  j["margin"] = S.P.margin;
  j["projectors"] = field_json(S.P, [](const Mat6& m) { return mat6(m); });
  json deg = json::array();
  if (!S.degenerate.empty())
    for_valid(S.degenerate, [&](int i, int k) {
      if (S.degenerate(i, k)) deg.push_back(json::array({i, k}));
    });
  j["degenerate"] = deg;
  return j.dump();
}

GaussMapGrid gauss_from_json(const std::string& text) {
  const json j = parse(text);
  const PseudoSpace space = read_space(field(j, "space"));
  const GridChart c = read_chart(field(j, "chart"));
  const json& e = field(j, "eps");
  if (!e.is_array() || e.size() != 2) schema_error("'eps' must be [re, im]");
  const cplx eps(read_number(e[0]), read_number(e[1]));
  const int margin = get<int>(j, "margin");
  const json& ps = field(j, "projectors");
  check_size(ps, c, "projectors");
  Field<Mat6> P(c.nu, c.nv, margin, Mat6::Zero());
  for (std::size_t k = 0; k < P.data.size(); ++k) P.data[k] = read_mat6(ps[k]);
  GaussMapGrid S = GaussMapGrid::from_projectors(space, c, std::move(P), eps);
  if (j.contains("degenerate"))
    for (const auto& n : field(j, "degenerate")) {
      const auto ij = n.get<std::vector<int>>();
      if (ij.size() == 2 && S.degenerate.valid(ij[0], ij[1])) S.degenerate(ij[0], ij[1]) = 1;
    }
  return S;
}

std::string energy_to_json(const EnergyReport& e) {
  json j;
  j["schema"] = "qg.energy/1";
  j["total"] = number(e.total);
  j["nu"] = e.chart.nu;
  j["nv"] = e.chart.nv;
  j["margin"] = e.density.margin;
  j["density"] = real_field(e.density);
  json ex = json::array();
  for (auto [i, k] : e.excluded) ex.push_back(json::array({i, k}));
  j["excluded"] = ex;
  return j.dump();
}

std::string tension_to_json(const TensionField& t, const GridChart& chart) {
  json j;
  j["schema"] = "qg.tension/1";
  j["chart"] = chart_json(chart);
  j["margin"] = t.norm.margin;
  j["max_norm"] = number(t.max_norm);
  j["codazzi_abs"] = number(t.codazzi_abs);
  j["codazzi_rel"] = number(t.codazzi_rel);
  j["norm"] = real_field(t.norm);
  return j.dump();
}

std::string flatness_to_json(const FlatnessReport& f, const GridChart& chart, cplx lambda) {
  json j;
  j["schema"] = "qg.flatness/1";
  j["chart"] = chart_json(chart);
  j["lambda"] = complex(lambda);
  j["max_raw"] = number(f.max_raw);
  j["max_density"] = number(f.max_density);
  j["raw"] = real_field(f.raw);
  j["density"] = real_field(f.density);
  return j.dump();
}

std::string connection_to_json(const ConnectionGrid& a) {
  json j;
  j["schema"] = "qg.connection/1";
  j["space"] = space_json(a.space);
  j["chart"] = chart_json(a.chart);
  j["lambda"] = a.lambda ? complex(*a.lambda) : complex(1.0);
  j["margin"] = a.margin;
  j["base_projector"] = mat6(a.P_o);
  json u = json::array(), v = json::array();
  for (int i = 0; i < a.chart.nu; ++i)
    for (int k = 0; k < a.chart.nv; ++k) {
      if (a.has_u(i, k)) u.push_back({{"edge", json::array({i, k})}, {"k", mat6(a.ku(i, k))}, {"p", mat6(a.pu(i, k))}});
      if (a.has_v(i, k)) v.push_back({{"edge", json::array({i, k})}, {"k", mat6(a.kv(i, k))}, {"p", mat6(a.pv(i, k))}});
    }
  j["u_edges"] = u;
  j["v_edges"] = v;
  return j.dump();
}

std::string frame_to_json(const FrameGrid& F) {
  json j;
  j["schema"] = "qg.frame/1";
  j["space"] = space_json(F.space);
  j["chart"] = chart_json(F.chart);
  j["margin"] = F.F.margin;
  j["base_projector"] = mat6(F.P_o);
  j["frames"] = field_json(F.F, [](const Mat6& m) { return mat6(m); });
  return j.dump();
}

std::string descent_to_json(const DescentResult& r) {
  json j;
  j["schema"] = "qg.descent/1";
  json e = json::array(), s = json::array();
  for (double x : r.energies) e.push_back(number(x));
  for (double x : r.step_taken) s.push_back(number(x));
  j["energies"] = e;
  j["steps"] = s;
  j["stalled"] = r.stalled;
  j["final_surface"] = json::parse(surface_to_json(r.final_surface));
  return j.dump();
}

std::string report_to_json(const SuiteReport& r) { return report_json(r).dump(); }

SuiteReport report_from_json(const std::string& text) { return read_report(parse(text)); }

std::string merge_reports(const std::vector<std::string>& reports) {
  if (reports.empty()) throw Error(ErrorKind::invalid_argument, "merge needs at least one report");
  std::vector<SuiteReport> rs;
  for (const auto& t : reports) rs.push_back(report_from_json(t));
  json j;
  j["schema"] = "qg.summary/1";
  json matrix = json::array();
  bool all = true;
  for (const auto& r : rs) {
    json row;
    row["suite"] = r.suite;
    row["seed"] = r.seed;
    row["pass"] = r.pass;
    json cs = json::object();
    for (const auto& c : r.checks) cs[c.name] = c.pass;
    row["checks"] = cs;
    matrix.push_back(row);
    all = all && r.pass;
  }
  j["all_pass"] = all;
  j["matrix"] = matrix;

  // Pool samples of each (suite, quantity) across reports and refit.
  std::map<std::pair<std::string, std::string>, std::map<double, std::pair<int, double>>> pooled;
  std::vector<std::pair<std::string, std::string>> order_of_keys;
  std::map<std::pair<std::string, std::string>, double> floors;
  for (const auto& r : rs)
    for (const auto& f : r.orders) {
      const auto key = std::make_pair(r.suite, f.name);
      if (!pooled.count(key)) order_of_keys.push_back(key);
      floors[key] = f.floor;
      auto& samples = pooled[key];
      for (std::size_t k = 0; k < f.h.size(); ++k)
        samples[f.h[k]] = {k < f.grids.size() ? f.grids[k] : 0, f.values[k]};
    }
  json table = json::array();
  for (const auto& key : order_of_keys) {
    std::vector<int> grids;
    std::vector<double> h, v;
    for (auto it = pooled[key].rbegin(); it != pooled[key].rend(); ++it) {
      h.push_back(it->first);
      grids.push_back(it->second.first);
      v.push_back(it->second.second);
    }
    const OrderFit f = fit_order(key.second, grids, h, v, floors[key]);
    json e;
    e["suite"] = key.first;
    e["quantity"] = key.second;
    e["grids"] = grids;
    e["h"] = h;
    json vals = json::array();
    for (double x : v) vals.push_back(number(x));
    e["values"] = vals;
    e["order"] = number(f.order);
    e["at_floor"] = f.at_floor;
    table.push_back(e);
  }
  j["convergence_orders"] = table;
  json raw = json::array();
  for (const auto& r : rs) raw.push_back(report_json(r));
  j["reports"] = raw;
  return j.dump();
}

}  // namespace qg::io
