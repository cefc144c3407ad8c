#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace qg {

using cplx = std::complex<double>;
using Vec6 = Eigen::Matrix<cplx, 6, 1>;
using Mat6 = Eigen::Matrix<cplx, 6, 6>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec3 = Eigen::Vector3d;
using Mat6r = Eigen::Matrix<double, 6, 6>;
using Mat4r = Eigen::Matrix4d;
using Vec4r = Eigen::Vector4d;

inline constexpr cplx I_unit{0.0, 1.0};

enum class ErrorKind {
  invalid_argument,
  mismatched_space,
  degenerate_input,
  not_decomposable,
  degenerate_quadric,
  not_a_quadric_star,
  degenerate_subspace,
  umbilic,
  not_curvature_line,
  not_asymptotic,
  signature,
  domain_exit,
  not_immersed,
  kernel_two_dimensional,
  ill_conditioned,
  degenerate_structure,
  degenerate_reconstruction,
  missing_data,
  focal_value,
  not_in_group,
  non_harmonic,
  unsupported,
  schema,
};

const char* to_string(ErrorKind k);

using Node = std::pair<int, int>;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::vector<Node> nodes = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        nodes_(std::move(nodes)) {}
  ErrorKind kind() const { return kind_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  ErrorKind kind_;
  std::vector<Node> nodes_;
};

enum class Reality { real, complex_conjugate };

// Rectangular parameter chart. Node (i,j) sits at (u0 + i*hu, v0 + j*hv);
// for complex-conjugate charts the grid axes are the real coordinates x,y.
struct GridChart {
  int nu = 0;
  int nv = 0;
  double hu = 1.0;
  double hv = 1.0;
  double u0 = 0.0;
  double v0 = 0.0;
  Reality reality = Reality::real;
  int orientation = 1;

  void validate() const {
    if (nu < 5 || nv < 5) throw Error(ErrorKind::invalid_argument, "grid needs at least 5x5 nodes");
    if (!(hu > 0.0) || !(hv > 0.0)) throw Error(ErrorKind::invalid_argument, "grid spacings must be positive");
  }
  int index(int i, int j) const { return i * nv + j; }
  double u(int i) const { return u0 + i * hu; }
  double v(int j) const { return v0 + j * hv; }
  bool is_complex() const { return reality == Reality::complex_conjugate; }
};

// Node field on a chart. Values are meaningful only at least `margin` nodes
// away from every edge; each finite-difference level adds one to the margin.
template <class T>
struct Field {
  int nu = 0;
  int nv = 0;
  int margin = 0;
  std::vector<T> data;

  Field() = default;
  Field(int nu_, int nv_, int margin_, const T& fill) : nu(nu_), nv(nv_), margin(margin_), data(std::size_t(nu_) * nv_, fill) {}

  T& operator()(int i, int j) { return data[std::size_t(i) * nv + j]; }
  const T& operator()(int i, int j) const { return data[std::size_t(i) * nv + j]; }
  bool valid(int i, int j) const { return i >= margin && j >= margin && i < nu - margin && j < nv - margin; }
  bool empty() const { return data.empty(); }
};

template <class T>
Field<T> like(const GridChart& c, int margin, const T& fill) {
  return Field<T>(c.nu, c.nv, margin, fill);
}

template <class T>
inline T zero_of() {
  if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>) {
    return T(0);
  } else {
    return T::Zero();
  }
}

// Visit every valid node of a field.
template <class T, class F>
void for_valid(const Field<T>& f, F&& fn) {
  for (int i = f.margin; i < f.nu - f.margin; ++i)
    for (int j = f.margin; j < f.nv - f.margin; ++j) fn(i, j);
}

}  // namespace qg
