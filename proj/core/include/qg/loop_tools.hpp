#pragma once

#include "qg/gauss_map.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace qg {

// Reference 3-plane S_o with involution J = 2 P_o - I acting on the algebra
// of pairing-skew endomorphisms by X -> J X J.
struct SymmetricPair {
  PseudoSpace space;
  Mat6 P_o = Mat6::Identity();
  Mat6 J = Mat6::Identity();

  static SymmetricPair at(const PseudoSpace& space, const Mat6& P_o);

  // (X + JXJ)/2 and (X - JXJ)/2. Throws if X is not skew.
  std::pair<Mat6, Mat6> split(const Mat6& x) const;
  // Basis G^{-1}(e_a e_b^T - e_b e_a^T) of the algebra, a < b.
  std::vector<Mat6> algebra_basis() const;
  // Max norm of the bracket-relation violations on the basis.
  double closure_residual() const;
};

// |X* + X| / max(|X|, 1); absolute for the small edge values.
double skew_residual(const Mat6& x, const PseudoSpace& space);

struct FrameGrid {
  PseudoSpace space;
  GridChart chart;
  Mat6 P_o = Mat6::Identity();
  Field<Mat6> F;
  double max_step = 0.0;  // largest |F_b - F_a| between neighbours
};

FrameGrid frame(const GaussMapGrid& S, const SymmetricPair& pair);
FrameGrid frame(const GaussMapGrid& S);  // base at the grid centre

// Discrete algebra-valued 1-form on grid edges. The u-edge (i,j) joins node
// (i,j) to (i+1,j); the v-edge (i,j) joins (i,j) to (i,j+1). Values are edge
// integrals, already multiplied by the spacing.
struct ConnectionGrid {
  PseudoSpace space;
  GridChart chart;
  Mat6 P_o = Mat6::Identity();
  int margin = 0;  // node margin; edges exist between valid nodes
  Field<Mat6> ku, pu, kv, pv;
  std::optional<cplx> lambda;

  bool has_u(int i, int j) const { return i >= margin && i + 1 < chart.nu - margin && j >= margin && j < chart.nv - margin; }
  bool has_v(int i, int j) const { return j >= margin && j + 1 < chart.nv - margin && i >= margin && i < chart.nu - margin; }
  Mat6 u(int i, int j) const { return ku(i, j) + pu(i, j); }
  Mat6 v(int i, int j) const { return kv(i, j) + pv(i, j); }
};

ConnectionGrid maurer_cartan(const FrameGrid& F);

// k + lambda p' + lambda^{-1} p''. On complex-conjugate charts p' and p''
// are the du and dv parts, so both edge directions mix.
ConnectionGrid spectral_connection(const ConnectionGrid& alpha, cplx lambda);

struct FlatnessReport {
  Field<double> raw;      // |log holonomy| per plaquette, corner (i,j)
  Field<double> density;  // raw / (hu hv)
  double max_raw = 0.0;
  double max_density = 0.0;
};

FlatnessReport flatness_residual(const ConnectionGrid& alpha);

struct IntegratedFrame {
  FrameGrid frame;      // rows-first propagation
  double consistency = 0.0;  // max node |F_rows - F_columns|
};

IntegratedFrame integrate_frame(const ConnectionGrid& alpha, const Mat6& F0);

struct DeformOptions {
  double harmonic_factor = 10.0;  // flatness at lambda vs lambda = 1
  double harmonic_floor = 1e-6;   // absolute allowance on the raw plaquette residual
};

struct DeformResult {
  GaussMapGrid S;
  FlatnessReport flat_lambda;
  FlatnessReport flat_one;
  double consistency = 0.0;
};

DeformResult spectral_deform(const GaussMapGrid& S, cplx lambda, const DeformOptions& opt = {});

struct DualizeResult {
  GaussMapGrid S;
  ConnectionGrid connection;  // dual connection in the target space
  Mat6 adapted = Mat6::Identity();   // columns: basis of S_o then S_o perp in the source
  Mat6 isometry = Mat6::Identity();  // columns: matching orthonormal basis of the target
  double imag_residual = 0.0;  // max |Im| of the dual connection
  double skew_residual = 0.0;
  double consistency = 0.0;
};

// Swap (4,2) and (3,3) by evaluating the spectral connection at lambda = i
// and re-reading S_o + i S_o_perp as a real space. The inverse direction
// evaluates at -i with the conjugate identification; both give the same
// real connection, so either undoes the other up to a constant isometry.
DualizeResult dualize(const GaussMapGrid& S);
DualizeResult inverse_dualize(const GaussMapGrid& S);

// Constant isometry relating S to dualize(dualize(S)): T = C2 k^{-1} B^{-1}.
Mat6 round_trip_isometry(const DualizeResult& first, const DualizeResult& second);

}  // namespace qg
