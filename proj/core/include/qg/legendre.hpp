#pragma once

#include "qg/surface.hpp"

#include <vector>

namespace qg {

struct PrincipalResult {
  SurfaceGrid surface;      // input with kappa1, kappa2 filled in
  Field<double> residual1;  // |n_u + k1 f_u| relative
  Field<double> residual2;
  double max_residual = 0.0;
  std::vector<Node> umbilic_nodes;
};

// Least-squares principal curvatures along the chart axes.
PrincipalResult principal_data(const SurfaceGrid& surface, double alignment_tol = 0.05);

struct ReparamOptions {
  int nu = 0;  // output size; 0 keeps the input size
  int nv = 0;
  double fraction = 0.6;  // half-extent of the output net relative to the input half-extent
  int substeps = 8;       // integration steps per output spacing
};

// Coordinate net whose lines follow the principal (resp. asymptotic)
// direction fields. Directions come from the analytic source when present,
// else from bilinear interpolation of grid-computed forms.
SurfaceGrid curvature_line_reparametrize(const SurfaceGrid& surface, const ReparamOptions& opt = {});
SurfaceGrid asymptotic_reparametrize(const SurfaceGrid& surface, const ReparamOptions& opt = {});

// Relative size of the fuu, fvv components off span(f, fu, fv) (projective).
double asymptotic_residual(const SurfaceGrid& surface);
// Relative off-diagonal part of the shape operator (euclidean).
double curvature_line_residual(const SurfaceGrid& surface);

LegendreGrid lie_lift(const SurfaceGrid& surface);
LegendreGrid proj_lift(const SurfaceGrid& surface);

// Rotate an arbitrary null frame of a Legendre map onto its focal lines.
LegendreGrid focal_frame(const LegendreGrid& f);

ConjugateCoefficients conjugate_coefficients(const LegendreGrid& f);

struct ConformalStructure {
  Field<Eigen::Vector3d> coeffs;  // (A, B, C): Q(a,b) = A a^2 + 2B ab + C b^2 on real grid directions
  Field<int> signature;           // 11 for (1,1), 20 for (2,0), 0 degenerate
  int overall = 0;
  double null_residual = 0.0;     // real charts: |Q(d_u)|, |Q(d_v)| relative to |Q|
  std::vector<Node> degenerate_nodes;
};

ConformalStructure conformal_structure(const LegendreGrid& f);

struct PointSurfaceResult {
  SurfaceGrid surface;
  std::vector<Node> singular_nodes;
};

PointSurfaceResult point_surface(const LegendreGrid& f);

SurfaceGrid normal_shift(const SurfaceGrid& surface, double t);

LegendreGrid apply_group(const LegendreGrid& f, const Mat6& g);
// Linear action on homogeneous coordinates (no renormalization).
SurfaceGrid apply_projective(const SurfaceGrid& surface, const Mat4r& a);

struct LegendreResidual {
  double nullity = 0.0;  // max |<l,l>|,|<s,s>|,|<l,s>| relative
  double legendre = 0.0; // max |<dl,s>|, |<ds,l>| relative
  double focal = 0.0;    // max distance of l_u, s_v from span{l,s}, relative
};

LegendreResidual legendre_residual(const LegendreGrid& f);

// Smoothly varying representative of a line field: divide by a fixed
// reference pairing so neighbouring nodes carry consistent scale and sign.
void normalize_lines(Field<Vec6>& x);

}  // namespace qg
