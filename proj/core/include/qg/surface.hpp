#pragma once

#include "qg/pseudo_linalg.hpp"
#include "qg/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qg {

enum class Geometry { euclidean3, projective3 };

// Closed-form description of a surface patch, used by the reparametrizers to
// sample direction fields exactly instead of interpolating grid data.
struct SurfaceSource {
  // Point at chart coordinates (u,v): 3 components (euclidean) or a
  // homogeneous 4-vector (projective).
  std::function<Eigen::VectorXd(double, double)> point;
  // Unit normal; optional for euclidean sources (else the oriented cross product).
  std::function<Vec3(double, double)> normal;
};

struct SurfaceGrid {
  Geometry geometry = Geometry::euclidean3;
  GridChart chart;
  Field<Vec3> points3;
  Field<Vec3> normals;
  Field<Vec4r> points4;
  Field<double> kappa1;
  Field<double> kappa2;
  bool has_kappa = false;
  bool curvature_line = false;
  bool asymptotic = false;
  bool umbilic = false;
  std::string kind;
  std::vector<std::pair<std::string, double>> params;
  std::shared_ptr<const SurfaceSource> source;

  bool euclidean() const { return geometry == Geometry::euclidean3; }
};

// Pair of lightlike line fields (l,s) spanning a discrete Legendre map.
struct LegendreGrid {
  PseudoSpace space;
  GridChart chart;
  Field<Vec6> l;
  Field<Vec6> s;
  Field<Vec6> phi;        // point-sphere lift, Lie case only
  Field<Vec6> nu_sphere;  // tangent-plane lift, Lie case only
  bool has_aux = false;
};

struct ConjugateCoefficients {
  Field<cplx> p;
  Field<cplx> q;
  Field<double> residual;
  double max_residual = 0.0;
};

}  // namespace qg
