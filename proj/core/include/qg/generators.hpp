#pragma once

#include "qg/surface.hpp"

#include <map>
#include <optional>
#include <string>

namespace qg::gen {

// Parameter rectangle [u0,u1] x [v0,v1].
struct Window {
  double u0, u1, v0, v1;
};

// Tube circles along u, rotation along v; normal points to the tube core so
// the tube curvature is +1/r.
SurfaceGrid torus(double r, double R, int nu, int nv, Window w = {-1.0, 1.0, 0.0, 1.5});

// Ellipsoid with semi-axes (a,b,c) along (x,y,z) in trigonometric
// ellipsoidal coordinates: u and v are angles whose coordinate lines are the
// curvature lines. Inward normal.
SurfaceGrid ellipsoid(double a, double b, double c, int nu, int nv, Window w = {0.8, 1.3, 0.3, 0.8});
// Same ellipsoid in longitude (u) / latitude (v); not curvature-line aligned.
SurfaceGrid ellipsoid_lonlat(double a, double b, double c, int nu, int nv, Window w = {0.5, 1.1, 0.2, 0.8});
// Round sphere, longitude/latitude chart, inward normal; every node umbilic.
SurfaceGrid sphere(double r, int nu, int nv, Window w = {0.0, 1.0, -0.5, 0.5});

// Surface of revolution of a meridian profile: "catenoid" (neck radius p) or
// "bulge" (radius 2 + p cos t). u runs along meridians, v around the axis.
SurfaceGrid revolution(const std::string& profile, double p, int nu, int nv, Window w = {-0.6, 0.6, 0.0, 1.2});

// Projective surfaces with homogeneous lifts (1, x, y, z).
// Doubly ruled quadric (1, u, v, uv), already in asymptotic coordinates.
SurfaceGrid quadric_graph(int nu, int nv, Window w = {-1.0, 1.0, -1.0, 1.0});
// Graph z = xy + eps*(x^3 + y^3) in the (x,y) chart; with x_only the y^3 term
// is dropped, which gives a ruled surface.
SurfaceGrid perturbed_graph(double eps, int nu, int nv, Window w = {-0.5, 0.5, -0.5, 0.5}, bool x_only = false);
// Graph z = x^2 + y^2. With a complex-conjugate chart the grid axes x,y are
// the real and imaginary parts of the conjugate asymptotic coordinate.
SurfaceGrid convex_graph(int nu, int nv, Window w = {-0.5, 0.5, -0.5, 0.5}, Reality r = Reality::complex_conjugate);

// Dispatch by name; unknown kinds or invalid parameters throw.
SurfaceGrid generate(const std::string& kind, const std::map<std::string, double>& params, int nu, int nv,
                     std::optional<Window> w = std::nullopt);

// Sample a source on a chart into grid fields.
SurfaceGrid sample(std::shared_ptr<const SurfaceSource> src, Geometry g, const GridChart& chart);

GridChart chart_for(int nu, int nv, const Window& w, Reality r = Reality::real);

}  // namespace qg::gen
