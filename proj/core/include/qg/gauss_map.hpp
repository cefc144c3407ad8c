#pragma once

#include "qg/surface.hpp"

#include <utility>
#include <vector>

namespace qg {

// Orthonormal bases of S and its complement at one node; eta holds <e_k,e_k>.
struct NodeBases {
  Eigen::Matrix<cplx, 6, 3> S = Eigen::Matrix<cplx, 6, 3>::Zero();
  Eigen::Matrix<cplx, 6, 3> perp = Eigen::Matrix<cplx, 6, 3>::Zero();
  Eigen::Vector3cd eta_S = Eigen::Vector3cd::Ones();
  Eigen::Vector3cd eta_perp = Eigen::Vector3cd::Ones();
};

// Field of 3-planes in a six-dimensional pseudo-Euclidean space, stored as
// the projector onto S along its orthogonal complement.
struct GaussMapGrid {
  PseudoSpace space;
  GridChart chart;
  cplx eps{1.0, 0.0};                      // 1 on real charts, i on complex-conjugate charts
  std::pair<int, int> signature_z{1, 1};   // chart conformal type: (1,1) or (2,0)
  Field<Mat6> P;
  Field<NodeBases> bases;
  Field<char> degenerate;                  // span collapsed here; P continued from a neighbour

  Mat6 star(int i, int j) const { return eps * (2.0 * P(i, j) - Mat6::Identity()); }
  Mat6 complement(int i, int j) const { return Mat6::Identity() - P(i, j); }

  // Build from a projector field, recomputing bases.
  static GaussMapGrid from_projectors(const PseudoSpace& space, const GridChart& chart, Field<Mat6> P, cplx eps);
};

// Orthogonal projector onto span(B) along its complement: B (B^T G B)^{-1} B^T G.
Mat6 projector_onto(const Eigen::Matrix<cplx, 6, Eigen::Dynamic>& b, const PseudoSpace& space);
NodeBases node_bases(const Mat6& P, const PseudoSpace& space);

GaussMapGrid conformal_gauss(const LegendreGrid& f);

// Linear map S -> S_perp, stored as a 6x6 operator vanishing on S_perp.
struct TangentHom {
  Mat6 op = Mat6::Zero();
};

// Coefficient array c with A e_j = sum_k c(k,j) sigma_k in the node bases.
Eigen::Matrix3cd coefficients(const TangentHom& a, const NodeBases& b, const PseudoSpace& space);
// -tr(B* A), with the adjoint taken in the pairing.
cplx grassmann_pair(const TangentHom& a, const TangentHom& b, const PseudoSpace& space);
cplx grassmann_pair(const Eigen::Matrix3cd& a, const Eigen::Matrix3cd& b, const NodeBases& bases);

struct Differential {
  Field<TangentHom> Su;
  Field<TangentHom> Sv;
};

Differential dS(const GaussMapGrid& S);

Field<cplx> willmore_density(const GaussMapGrid& S);

struct ConformalityReport {
  Field<cplx> uu;  // <S_u,S_u>
  Field<cplx> vv;  // <S_v,S_v>
  double max_abs = 0.0;
};

ConformalityReport conformality(const GaussMapGrid& S);

struct TensionField {
  Field<TangentHom> tau;
  Field<TangentHom> tau_alt;  // same field from the v-derivative of S_u
  Field<double> norm;
  double max_norm = 0.0;
  double codazzi_abs = 0.0;  // max node norm of tau - tau_alt
  double codazzi_rel = 0.0;  // codazzi_abs / max_norm
};

TensionField tension(const GaussMapGrid& S);

struct BlaschkeResidual {
  Field<double> u;  // |S_u* S_u|
  Field<double> v;  // |S_v S_v*|
  double max_u = 0.0;
  double max_v = 0.0;
};

BlaschkeResidual blaschke_residual(const GaussMapGrid& S);

struct ReconstructResult {
  LegendreGrid f;
  std::vector<Node> degenerate_nodes;
};

// Focal lines from the images of S_u and S_v*. Throws
// degenerate_reconstruction when no node carries a usable rank-one image.
ReconstructResult reconstruct(const GaussMapGrid& S);

enum class Envelope { generic, godeaux_rozet_u, godeaux_rozet_v, demoulin };
const char* to_string(Envelope e);

Field<Envelope> envelope_degeneracy(const GaussMapGrid& S, double tol = 1e-3);

// Cross-Gram between the orthonormalized (l, l_v, l_vv) and (s, s_u, s_uu).
struct OrthogonalityReport {
  Field<double> cross;
  double max_cross = 0.0;
};

OrthogonalityReport bundle_orthogonality(const LegendreGrid& f);

// Containments of the tension: image against span{s}, kernel against span{l, l_v}.
struct LemmaReport {
  double max_image_angle = 0.0;  // over nodes with |tau| above 10% of its maximum
  double max_kernel = 0.0;       // |tau l|, |tau l_v| relative to |tau| |.|
  int nodes_used = 0;
};

LemmaReport tension_lemma(const LegendreGrid& f, const GaussMapGrid& S, const TensionField& t);

// Sine of the angle between two lines.
double line_angle(const Vec6& a, const Vec6& b);

}  // namespace qg
