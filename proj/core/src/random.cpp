#include "qg/random.hpp"

#include <cmath>
#include <numbers>

namespace qg {

std::uint64_t SeedStream::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Mat6 random_isometry(const PseudoSpace& space, std::mt19937_64& rng, double max_boost, int planes) {
  std::vector<Vec6> basis;
  for (int k = 0; k < 6; ++k) basis.push_back(Vec6::Unit(k));
  const auto ortho = indefinite_orthogonalize(basis, space);
  Mat6 C;
  Eigen::Matrix<double, 6, 1> eta;
  int col = 0;
  for (int sign : {1, -1})
    for (const auto& w : ortho)
      if ((space.pair(w, w).real() > 0) == (sign > 0)) {
        C.col(col) = w;
        eta(col++) = sign;
      }

  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rapidity(-max_boost, max_boost);
  Eigen::Matrix<double, 6, 6> R = Eigen::Matrix<double, 6, 6>::Identity();
  for (int k = 0; k < planes; ++k) {
    int a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    Eigen::Matrix<double, 6, 6> step = Eigen::Matrix<double, 6, 6>::Identity();
    if (eta(a) == eta(b)) {
      const double t = angle(rng);
      step(a, a) = step(b, b) = std::cos(t);
      step(a, b) = -std::sin(t);
      step(b, a) = std::sin(t);
    } else {
      const double t = rapidity(rng);
      step(a, a) = step(b, b) = std::cosh(t);
      step(a, b) = step(b, a) = std::sinh(t);
    }
    R = step * R;
  }
  return C * R.cast<cplx>() * C.inverse();
}

Mat4r random_sl4(std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> n(0.0, spread);
  Mat4r a;
  do {
    a = Mat4r::Identity();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) += n(rng);
  } while (std::abs(a.determinant()) < 0.1);
  if (a.determinant() < 0) a.row(0) *= -1.0;
  return a / std::pow(a.determinant(), 0.25);
}

}  // namespace qg
