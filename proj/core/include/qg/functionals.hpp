#pragma once

#include "qg/gauss_map.hpp"
#include "qg/surface.hpp"

#include <string>
#include <vector>

namespace qg {

struct EnergyReport {
  double total = 0.0;
  Field<double> density;
  std::vector<Node> excluded;
  GridChart chart;
};

// Node sum of density * hu * hv over valid, non-excluded nodes. Complex
// charts integrate against dx dy (the constant du^dv factor is dropped).
EnergyReport integrate_density(const Field<cplx>& density, const GridChart& chart,
                               const std::vector<Node>& excluded = {});

EnergyReport willmore_energy(const GaussMapGrid& S);

// d_u k1 d_v k2 / (k1 - k2)^2 and its negative.
struct LieDensity {
  Field<double> value;
  Field<double> negated;
};

LieDensity lie_density(const Field<double>& kappa1, const Field<double>& kappa2, const GridChart& chart);

// p*q from regressing f_uu and f_vv onto (f, f_u, f_v).
struct ProjDensity {
  Field<cplx> pq;
  Field<cplx> p;
  Field<cplx> q;
  double max_residual = 0.0;
};

ProjDensity proj_density(const SurfaceGrid& surface, double residual_tol = 1e-2);

// Coefficient g in tau* sigma = g l, with sigma in S_perp normalized by <s, sigma> = 1.
Field<cplx> willmore_gradient_density(const LegendreGrid& f, const GaussMapGrid& S, const TensionField& t);

// Energy data of a euclidean patch in an arbitrary chart: principal frame
// fields replace the coordinate directions, so the patch stays usable after
// it has been deformed off its curvature-line chart.
struct GeneralChartData {
  Field<double> density;  // <S_X, S_Y> / det(X, Y)
  Field<double> g;        // first-variation coefficient
  Field<Vec3> normals;
  Field<double> kappa1;   // along the frame field closest to the first grid axis
  Field<double> kappa2;
};

GeneralChartData general_chart_data(const Field<Vec3>& points, const Field<Vec3>& reference_normals,
                                    const GridChart& chart);

struct DescentOptions {
  int steps = 50;
  double step_size = 4e-3;
  int max_halvings = 20;
  int energy_margin = 5;      // nodes excluded from W at each edge
  int window_margin = 10;     // support of the smooth variation window
  int degree = 3;             // total Legendre degree of the variation basis
  double curvature_guard = 0.1;  // max |dk| relative to min |k1 - k2| per step
};

struct DescentResult {
  std::vector<double> energies;    // W before the first step and after each accepted step
  std::vector<double> step_taken;  // accepted step per iteration
  std::vector<EnergyReport> reports;
  bool stalled = false;            // no admissible step after all halvings
  SurfaceGrid final_surface;
};

DescentResult willmore_descent(const SurfaceGrid& surface, const DescentOptions& opt = {});

struct Transform {
  enum class Kind { identity, group, normal_shift, projective };
  Kind kind = Kind::identity;
  Mat6 group = Mat6::Identity();
  double shift = 0.0;
  Mat4r projective = Mat4r::Identity();
  std::string label;
};

struct InvarianceEntry {
  std::string label;
  double density_deviation = 0.0;  // max node deviation / max |baseline density|
  double energy_deviation = 0.0;
};

// Densities recomputed from scratch for each transformed input. Euclidean
// surfaces use the Lie pipeline, projective ones p*q.
std::vector<InvarianceEntry> invariance_report(const SurfaceGrid& surface, const std::vector<Transform>& transforms);

}  // namespace qg
