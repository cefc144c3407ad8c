#pragma once

#include "qg/types.hpp"

#include <vector>

namespace qg {

enum class SpaceKind { lie, plucker, diagonal, custom };

// Inner-product structure on six-dimensional space.
struct PseudoSpace {
  int m = 0;  // positive directions
  int n = 0;  // negative directions
  Mat6r gram = Mat6r::Identity();
  SpaceKind kind = SpaceKind::custom;

  // Lie basis order (v_{-1}, v_0, v_1, v_2, v_3, v_inf), signature (4,2).
  static const PseudoSpace& lie();
  // Bivector basis (12, 13, 14, 23, 24, 34) paired by the unit volume form, signature (3,3).
  static const PseudoSpace& plucker();
  // diag(+1 x m, -1 x n).
  static PseudoSpace diagonal(int m, int n);
  static PseudoSpace from_gram(const Mat6r& gram);

  cplx pair(const Vec6& x, const Vec6& y) const { return x.transpose() * gram * y; }
  Mat6 gram_c() const { return gram.cast<cplx>(); }
  // Adjoint with respect to the pairing: G^{-1} A^T G.
  Mat6 adjoint(const Mat6& a) const;
  bool same_as(const PseudoSpace& o) const { return m == o.m && n == o.n && (gram - o.gram).norm() == 0.0; }
  const char* name() const;
};

struct SixVector {
  Vec6 components = Vec6::Zero();
  const PseudoSpace* space = nullptr;
  bool real = true;

  static SixVector make(const Vec6& c, const PseudoSpace& s, double tol = 1e-12);
};

cplx pair(const SixVector& x, const SixVector& y, const PseudoSpace& space);
cplx pair(const Vec6& x, const Vec6& y, const PseudoSpace& space);

struct TwoPlane {
  Vec4 x = Vec4::Zero();
  Vec4 y = Vec4::Zero();
};

struct QuadricForm {
  Mat4r q = Mat4r::Identity();
  bool vol_normalized = false;
};

// Bivector x^y with components (x_i y_j - x_j y_i) in the fixed basis.
Vec6 plucker_embed(const Vec4& x, const Vec4& y);
Vec6 wedge(const Vec4& x, const Vec4& y);
// Lambda^2 A acting on bivectors; preserves the pairing when det A = 1.
Mat6 lambda2(const Mat4& a);
// The 4x4 skew matrix with entries L_ij = l_ij.
Mat4 bivector_matrix(const Vec6& l);

// tol bounds |<l,l>| relative to |l|^2.
TwoPlane klein_plane(const Vec6& l, double tol = 1e-8);

// Symmetric endomorphism of the bivector space whose pairing against v equals
// the quadric's induced form: <v, star w> = Q(v,w) extended to bivectors.
// Q is first rescaled to |det Q| = 1, so star^2 = sign(det Q).
Mat6 hodge_star(const QuadricForm& q);
// Recover the quadric (up to scale) from its star. Sign convention: Lorentz
// forms come back with signature (3,1); split forms have their
// largest-magnitude entry positive.
QuadricForm star_to_quadric(const Mat6& star);
// Symmetric bilinear form on bivectors induced from a 4x4 form.
Mat6 compound_form(const Mat4& q);

// Gram-Schmidt for an indefinite pairing. Pivots on the largest
// |<v,v>|/|v|^2; when everything left is near-null it combines the pair with
// the largest mutual pairing. Real vectors end with <w,w> = +-1, genuinely
// complex ones with <w,w> = 1.
std::vector<Vec6> indefinite_orthogonalize(const std::vector<Vec6>& vectors, const PseudoSpace& space,
                                           double tol = 1e-9);

// Largest-magnitude component made real-positive by a sign flip.
Vec6 fix_sign(const Vec6& v);

bool is_real(const Vec6& v, double tol = 1e-12);
bool is_real(const Mat6& m, double tol = 1e-12);

// Residual ||A^T G A - G|| / ||G||.
double group_residual(const Mat6& a, const PseudoSpace& space);

// Signature (positive, negative) of a real symmetric matrix, counting
// eigenvalues with |lambda| > tol * max|lambda|.
std::pair<int, int> signature_of(const Eigen::MatrixXd& sym, double tol = 1e-10);

}  // namespace qg
