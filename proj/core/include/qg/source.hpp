#pragma once

#include "qg/types.hpp"

#include <array>
#include <functional>

namespace qg {

using PointFn = std::function<Eigen::VectorXd(double, double)>;

// Point and partial derivatives up to second order at one parameter value.
struct Jet {
  Eigen::VectorXd f, fu, fv, fuu, fuv, fvv;
};

// Richardson-extrapolated central differences of a smooth point function.
Jet jet_of(const PointFn& fn, double u, double v, double h = 2e-3);

// First and second fundamental form coefficients (E,F,G) and (L,M,N).
struct FormCoefficients {
  double E = 0, F = 0, G = 0, L = 0, M = 0, N = 0;
};

FormCoefficients euclidean_forms(const Jet& jet, const Vec3& normal);
// Projective second fundamental form, L = det(f, fu, fv, fuu) etc., scaled by
// the norms so it is comparable across lifts. E,F,G are Euclidean helpers.
FormCoefficients projective_forms(const Jet& jet);

struct PrincipalFrame {
  double k1 = 0, k2 = 0;
  Eigen::Vector2d d1, d2;  // unit parameter-plane directions
};

// Eigen-decomposition of the shape operator; d1 is the direction closer to
// `reference` (parameter plane).
PrincipalFrame principal_of(const FormCoefficients& c, const Eigen::Vector2d& reference);

// The two asymptotic directions of a hyperbolic form, unit in the parameter
// plane. Returns false when the form is not indefinite.
bool asymptotic_of(const FormCoefficients& c, std::array<Eigen::Vector2d, 2>& dirs, double tol = 1e-10);

bool is_umbilic(double k1, double k2);

}  // namespace qg
