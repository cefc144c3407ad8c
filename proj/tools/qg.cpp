#include "qg/functionals.hpp"
#include "qg/gauss_map.hpp"
#include "qg/generators.hpp"
#include "qg/io.hpp"
#include "qg/legendre.hpp"
#include "qg/loop_tools.hpp"
#include "qg/suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Options {
  std::string in;
  std::string kind = "ellipsoid";
  std::vector<std::string> params;
  int nu = 64;
  int nv = 64;
  std::vector<double> window;
  std::string reparam = "none";
  double lambda_re = 2.0;
  double lambda_im = 0.0;
  std::optional<double> tolerance;
  std::uint64_t seed = qg::SuiteConfig{}.seed;
  std::string out;
  std::vector<int> grids{32, 64, 128};
  std::vector<std::string> thresholds;
  std::string suite;
  std::vector<std::string> reports;
  bool inverse = false;
  bool dump_connection = false;
  int steps = 50;
  double step_size = qg::DescentOptions{}.step_size;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw qg::Error(qg::ErrorKind::invalid_argument, "cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw qg::Error(qg::ErrorKind::invalid_argument, "cannot write '" + o.out + "'");
  f << text << '\n';
}

std::pair<std::string, double> key_value(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw qg::Error(qg::ErrorKind::invalid_argument, "expected key=value, got '" + s + "'");
  try {
    return {s.substr(0, eq), std::stod(s.substr(eq + 1))};
  } catch (const std::exception&) {
    throw qg::Error(qg::ErrorKind::invalid_argument, "value of '" + s.substr(0, eq) + "' is not a number");
  }
}

qg::SurfaceGrid surface(const Options& o) {
  qg::SurfaceGrid s;
  if (!o.in.empty()) {
    s = qg::io::surface_from_json(read_file(o.in));
  } else {
    std::map<std::string, double> p;
    for (const auto& kv : o.params) p.insert(key_value(kv));
    std::optional<qg::gen::Window> w;
    if (!o.window.empty()) {
      if (o.window.size() != 4) throw qg::Error(qg::ErrorKind::invalid_argument, "--window takes u0 u1 v0 v1");
      w = qg::gen::Window{o.window[0], o.window[1], o.window[2], o.window[3]};
    }
    s = qg::gen::generate(o.kind, p, o.nu, o.nv, w);
  }
  if (o.reparam == "curvature") s = qg::curvature_line_reparametrize(s);
  else if (o.reparam == "asymptotic") s = qg::asymptotic_reparametrize(s);
  return s;
}

qg::LegendreGrid lift(const qg::SurfaceGrid& s) {
  if (!s.euclidean()) return qg::proj_lift(s);
  if (s.has_kappa) return qg::lie_lift(s);
  return qg::lie_lift(qg::principal_data(s).surface);
}

qg::cplx lambda(const Options& o) { return {o.lambda_re, o.lambda_im}; }

int run_check(const Options& o) {
  qg::SuiteConfig cfg;
  cfg.grids = o.grids;
  cfg.seed = o.seed;
  cfg.lambda = lambda(o);
  cfg.tolerance = o.tolerance;
  cfg.descent_steps = o.steps;
  cfg.descent_step = o.step_size;
  for (const auto& kv : o.thresholds) cfg.thresholds.insert(key_value(kv));
  const qg::SuiteReport r = qg::run_suite(o.suite, cfg);
  emit(o, qg::io::report_to_json(r));
  for (const auto& c : r.checks)
    std::cerr << (c.pass ? "pass " : "FAIL ") << r.suite << ' ' << c.name << ' ' << c.value << (c.at_most ? " <= " : " >= ")
              << c.threshold << '\n';
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal Gauss map toolkit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  Options o;
  app.add_option("--in", o.in, "surface JSON input (otherwise --kind is generated)");
  app.add_option("--kind", o.kind, "surface generator")->capture_default_str();
  app.add_option("--param", o.params, "generator parameter key=value (repeatable)");
  app.add_option("--grid-nu", o.nu, "nodes along u")->check(CLI::Range(5, 1 << 14))->capture_default_str();
  app.add_option("--grid-nv", o.nv, "nodes along v")->check(CLI::Range(5, 1 << 14))->capture_default_str();
  app.add_option("--window", o.window, "parameter window u0 u1 v0 v1")->expected(4);
  app.add_option("--reparam", o.reparam, "reparametrize input first")
      ->check(CLI::IsMember({"none", "curvature", "asymptotic"}))
      ->capture_default_str();
  app.add_option("--lambda-re", o.lambda_re, "spectral parameter, real part")->capture_default_str();
  app.add_option("--lambda-im", o.lambda_im, "spectral parameter, imaginary part")->capture_default_str();
  app.add_option("--tolerance", o.tolerance, "threshold of the suite's first check")->check(CLI::PositiveNumber);
  app.add_option("--threshold", o.thresholds, "check threshold override name=value (repeatable)");
  app.add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
  app.add_option("--grids", o.grids, "grid sizes for convergence checks")->check(CLI::Range(5, 1 << 14));
  app.add_option("--steps", o.steps, "descent steps")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--step-size", o.step_size, "initial descent step")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--out", o.out, "output path (default: stdout)");

  auto* generate = app.add_subcommand("generate", "write a sampled surface");
  auto* lift_cmd = app.add_subcommand("lift", "Lie or projective lift to a Legendre map");
  auto* gauss = app.add_subcommand("gauss", "conformal Gauss map");
  auto* energy = app.add_subcommand("energy", "Willmore energy report");
  auto* tension_cmd = app.add_subcommand("tension", "tension field report");
  auto* check = app.add_subcommand("check", "run a check suite; exit 0 iff every threshold is met");
  check->add_option("suite", o.suite, "suite name")->required()->check(CLI::IsMember(qg::suite_names()));
  auto* deform = app.add_subcommand("deform", "spectral deformation of a harmonic Gauss map");
  deform->add_flag("--connection", o.dump_connection, "write the spectral connection instead of the Gauss map");
  auto* dualize = app.add_subcommand("dualize", "swap signatures (4,2) and (3,3)");
  dualize->add_flag("--inverse", o.inverse, "use the inverse branch");
  auto* descent = app.add_subcommand("descent", "backtracked Willmore descent");
  auto* merge = app.add_subcommand("merge", "merge check reports");
  merge->add_option("reports", o.reports, "report files")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) emit(o, qg::io::surface_to_json(surface(o)));
    else if (*lift_cmd) emit(o, qg::io::legendre_to_json(lift(surface(o))));
    else if (*gauss) emit(o, qg::io::gauss_to_json(qg::conformal_gauss(lift(surface(o)))));
    else if (*energy) emit(o, qg::io::energy_to_json(qg::willmore_energy(qg::conformal_gauss(lift(surface(o))))));
    else if (*tension_cmd) {
      const auto S = qg::conformal_gauss(lift(surface(o)));
      emit(o, qg::io::tension_to_json(qg::tension(S), S.chart));
    } else if (*check) return run_check(o);
    else if (*deform) {
      const auto S = qg::conformal_gauss(lift(surface(o)));
      if (o.dump_connection) {
        const auto a = qg::spectral_connection(qg::maurer_cartan(qg::frame(S)), lambda(o));
        emit(o, qg::io::connection_to_json(a));
      } else {
        const auto d = qg::spectral_deform(S, lambda(o));
        std::cerr << "flatness at lambda " << d.flat_lambda.max_raw << ", at 1 " << d.flat_one.max_raw << '\n';
        emit(o, qg::io::gauss_to_json(d.S));
      }
    } else if (*dualize) {
      const auto S = qg::conformal_gauss(lift(surface(o)));
      const auto d = o.inverse ? qg::inverse_dualize(S) : qg::dualize(S);
      std::cerr << "imaginary residual " << d.imag_residual << '\n';
      emit(o, qg::io::gauss_to_json(d.S));
    } else if (*descent) {
      qg::DescentOptions opt;
      opt.steps = o.steps;
      opt.step_size = o.step_size;
      emit(o, qg::io::descent_to_json(qg::willmore_descent(surface(o), opt)));
    } else if (*merge) {
      std::vector<std::string> texts;
      for (const auto& p : o.reports) texts.push_back(read_file(p));
      emit(o, qg::io::merge_reports(texts));
    }
  } catch (const qg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!e.nodes().empty()) {
      std::cerr << "  at nodes:";
      const std::size_t shown = std::min<std::size_t>(e.nodes().size(), 10);
      for (std::size_t k = 0; k < shown; ++k) std::cerr << " (" << e.nodes()[k].first << ',' << e.nodes()[k].second << ')';
      if (e.nodes().size() > shown) std::cerr << " ... " << e.nodes().size() << " total";
      std::cerr << '\n';
    }
    return 2;
  }
  return 0;
}
