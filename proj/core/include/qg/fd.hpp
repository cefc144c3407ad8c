#pragma once

#include "qg/types.hpp"

namespace qg::fd {

namespace detail {

template <class T>
struct scalar_of {
  using type = typename T::Scalar;
};
template <>
struct scalar_of<double> {
  using type = double;
};
template <>
struct scalar_of<cplx> {
  using type = cplx;
};

template <class T>
inline constexpr bool is_complex_v = std::is_same_v<typename scalar_of<T>::type, cplx>;

template <class T>
T times_i(const T& x) {
  if constexpr (is_complex_v<T>) {
    return T(x * I_unit);
  } else {
    throw Error(ErrorKind::unsupported, "complex-conjugate chart needs complex-valued fields");
  }
}

enum class Stencil { x, y, xx, yy, xy };

template <class T>
Field<T> raw(const Field<T>& f, const GridChart& c, Stencil s) {
  const int m = f.margin + 1;
  Field<T> out(f.nu, f.nv, m, zero_of<T>());
  const double hx = c.hu, hy = c.hv;
  for (int i = m; i < f.nu - m; ++i) {
    for (int j = m; j < f.nv - m; ++j) {
      switch (s) {
        case Stencil::x: out(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2.0 * hx); break;
        case Stencil::y: out(i, j) = (f(i, j + 1) - f(i, j - 1)) / (2.0 * hy); break;
        case Stencil::xx: out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (hx * hx); break;
        case Stencil::yy: out(i, j) = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (hy * hy); break;
        case Stencil::xy:
          out(i, j) = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * hx * hy);
          break;
      }
    }
  }
  return out;
}

template <class T, class Fn>
Field<T> combine(const Field<T>& a, const Field<T>& b, Fn fn) {
  Field<T> out(a.nu, a.nv, std::max(a.margin, b.margin), zero_of<T>());
  for_valid(out, [&](int i, int j) { out(i, j) = fn(a(i, j), b(i, j)); });
  return out;
}

}  // namespace detail

// Derivatives along the chart's null coordinates. On a real chart these are
// the grid axes; on a complex-conjugate chart d/du = (d/dx - i d/dy)/2 and
// d/dv = (d/dx + i d/dy)/2.
template <class T>
Field<T> du(const Field<T>& f, const GridChart& c) {
  using namespace detail;
  if (!c.is_complex()) return raw(f, c, Stencil::x);
  auto fx = raw(f, c, Stencil::x), fy = raw(f, c, Stencil::y);
  return combine(fx, fy, [](const T& x, const T& y) { return T(0.5 * (x - times_i(y))); });
}

template <class T>
Field<T> dv(const Field<T>& f, const GridChart& c) {
  using namespace detail;
  if (!c.is_complex()) return raw(f, c, Stencil::y);
  auto fx = raw(f, c, Stencil::x), fy = raw(f, c, Stencil::y);
  return combine(fx, fy, [](const T& x, const T& y) { return T(0.5 * (x + times_i(y))); });
}

template <class T>
Field<T> duu(const Field<T>& f, const GridChart& c) {
  using namespace detail;
  if (!c.is_complex()) return raw(f, c, Stencil::xx);
  auto fxx = raw(f, c, Stencil::xx), fyy = raw(f, c, Stencil::yy), fxy = raw(f, c, Stencil::xy);
  Field<T> out(f.nu, f.nv, f.margin + 1, zero_of<T>());
  for_valid(out, [&](int i, int j) { out(i, j) = T(0.25 * (fxx(i, j) - fyy(i, j) - 2.0 * times_i(fxy(i, j)))); });
  return out;
}

template <class T>
Field<T> dvv(const Field<T>& f, const GridChart& c) {
  using namespace detail;
  if (!c.is_complex()) return raw(f, c, Stencil::yy);
  auto fxx = raw(f, c, Stencil::xx), fyy = raw(f, c, Stencil::yy), fxy = raw(f, c, Stencil::xy);
  Field<T> out(f.nu, f.nv, f.margin + 1, zero_of<T>());
  for_valid(out, [&](int i, int j) { out(i, j) = T(0.25 * (fxx(i, j) - fyy(i, j) + 2.0 * times_i(fxy(i, j)))); });
  return out;
}

template <class T>
Field<T> duv(const Field<T>& f, const GridChart& c) {
  using namespace detail;
  if (!c.is_complex()) return raw(f, c, Stencil::xy);
  auto fxx = raw(f, c, Stencil::xx), fyy = raw(f, c, Stencil::yy);
  return combine(fxx, fyy, [](const T& x, const T& y) { return T(0.25 * (x + y)); });
}

// Plain grid-axis derivatives regardless of chart reality.
template <class T>
Field<T> dx(const Field<T>& f, const GridChart& c) {
  return detail::raw(f, c, detail::Stencil::x);
}
template <class T>
Field<T> dy(const Field<T>& f, const GridChart& c) {
  return detail::raw(f, c, detail::Stencil::y);
}
template <class T>
Field<T> dxx(const Field<T>& f, const GridChart& c) {
  return detail::raw(f, c, detail::Stencil::xx);
}
template <class T>
Field<T> dyy(const Field<T>& f, const GridChart& c) {
  return detail::raw(f, c, detail::Stencil::yy);
}
template <class T>
Field<T> dxy(const Field<T>& f, const GridChart& c) {
  return detail::raw(f, c, detail::Stencil::xy);
}

}  // namespace qg::fd
