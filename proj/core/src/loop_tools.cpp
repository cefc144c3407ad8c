#include "qg/loop_tools.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace qg {

namespace {

bool finite(const Mat6& m) { return m.allFinite(); }

Mat6 inverse_of(const Mat6& f, const PseudoSpace& space) { return space.adjoint(f); }

// Newton-Schulz step back onto the isometry group.
Mat6 reproject(const Mat6& m, const PseudoSpace& space) {
  Mat6 x = m;
  for (int k = 0; k < 2; ++k) x = 0.5 * x * (3.0 * Mat6::Identity() - space.adjoint(x) * x);
  return x;
}

Mat6 expm(const Mat6& a) { return a.exp(); }

Mat6 logm(const Mat6& a) {
  Mat6 l = a.log();
  if (!finite(l)) l = a - Mat6::Identity();
  return l;
}

Mat6 minimal_rotation(const Mat6& Jb, const Mat6& Ja) {
  Mat6 m = Jb * Ja;
  Mat6 r = m.sqrt();
  return r;
}

std::pair<int, int> centre_of(const GridChart& c) { return {c.nu / 2, c.nv / 2}; }

void check_lambda(cplx lambda, const GridChart& c) {
  if (std::abs(lambda) == 0.0) throw Error(ErrorKind::invalid_argument, "lambda must be nonzero");
  if (!c.is_complex() && std::abs(lambda.imag()) > 1e-12 * std::abs(lambda))
    throw Error(ErrorKind::invalid_argument, "real charts take real lambda");
  if (c.is_complex() && std::abs(std::abs(lambda) - 1.0) > 1e-12)
    throw Error(ErrorKind::invalid_argument, "complex-conjugate charts take |lambda| = 1");
}

// Propagate node values from the centre: along the centre row (or column)
// first, then outward along the other direction.
template <class Step>
Field<Mat6> propagate(const GridChart& c, int margin, const Mat6& seed, bool rows_first, Step step) {
  Field<Mat6> F(c.nu, c.nv, margin, Mat6::Zero());
  auto [ic, jc] = centre_of(c);
  if (!F.valid(ic, jc)) throw Error(ErrorKind::invalid_argument, "grid centre lies outside the valid region");
  F(ic, jc) = seed;
  if (rows_first) {
    for (int i = ic + 1; i < c.nu - margin; ++i) F(i, jc) = step(F(i - 1, jc), i - 1, jc, i, jc);
    for (int i = ic - 1; i >= margin; --i) F(i, jc) = step(F(i + 1, jc), i + 1, jc, i, jc);
    for (int i = margin; i < c.nu - margin; ++i) {
      for (int j = jc + 1; j < c.nv - margin; ++j) F(i, j) = step(F(i, j - 1), i, j - 1, i, j);
      for (int j = jc - 1; j >= margin; --j) F(i, j) = step(F(i, j + 1), i, j + 1, i, j);
    }
  } else {
    for (int j = jc + 1; j < c.nv - margin; ++j) F(ic, j) = step(F(ic, j - 1), ic, j - 1, ic, j);
    for (int j = jc - 1; j >= margin; --j) F(ic, j) = step(F(ic, j + 1), ic, j + 1, ic, j);
    for (int j = margin; j < c.nv - margin; ++j) {
      for (int i = ic + 1; i < c.nu - margin; ++i) F(i, j) = step(F(i - 1, j), i - 1, j, i, j);
      for (int i = ic - 1; i >= margin; --i) F(i, j) = step(F(i + 1, j), i + 1, j, i, j);
    }
  }
  return F;
}

}  // namespace

double skew_residual(const Mat6& x, const PseudoSpace& space) {
  return (space.adjoint(x) + x).norm() / std::max(x.norm(), 1.0);
}

SymmetricPair SymmetricPair::at(const PseudoSpace& space, const Mat6& P_o) {
  SymmetricPair p;
  p.space = space;
  p.P_o = P_o;
  p.J = 2.0 * P_o - Mat6::Identity();
  return p;
}

std::pair<Mat6, Mat6> SymmetricPair::split(const Mat6& x) const {
  if (skew_residual(x, space) > 1e-8) throw Error(ErrorKind::invalid_argument, "element is not skew for the pairing");
  const Mat6 jxj = J * x * J;
  return {0.5 * (x + jxj), 0.5 * (x - jxj)};
}

std::vector<Mat6> SymmetricPair::algebra_basis() const {
  const Mat6 gi = space.gram.inverse().cast<cplx>();
  std::vector<Mat6> out;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b) {
      Mat6 e = Mat6::Zero();
      e(a, b) = 1.0;
      e(b, a) = -1.0;
      out.push_back(gi * e);
    }
  return out;
}

double SymmetricPair::closure_residual() const {
  std::vector<Mat6> ks, ps;
  for (const auto& e : algebra_basis()) {
    auto [k, p] = split(e);
    ks.push_back(k);
    ps.push_back(p);
  }
  auto br = [](const Mat6& a, const Mat6& b) { return Mat6(a * b - b * a); };
  double worst = 0.0;
  for (std::size_t a = 0; a < ks.size(); ++a)
    for (std::size_t b = 0; b < ks.size(); ++b) {
      // [k,k] in k, [k,p] in p, [p,p] in k: the off-type component must vanish.
      auto kk = split(br(ks[a], ks[b]));
      auto kp = split(br(ks[a], ps[b]));
      auto pp = split(br(ps[a], ps[b]));
      worst = std::max({worst, kk.second.norm(), kp.first.norm(), pp.second.norm()});
    }
  return worst;
}

FrameGrid frame(const GaussMapGrid& S, const SymmetricPair& pair) {
  const GridChart& c = S.chart;
  FrameGrid fg;
  fg.space = S.space;
  fg.chart = c;
  fg.P_o = pair.P_o;
  auto [ic, jc] = centre_of(c);
  if (!S.P.valid(ic, jc)) throw Error(ErrorKind::invalid_argument, "grid centre lies outside the Gauss map");
  auto J = [&](int i, int j) { return Mat6(2.0 * S.P(i, j) - Mat6::Identity()); };
  const Mat6 seed = reproject(minimal_rotation(J(ic, jc), pair.J), S.space);
  std::vector<Node> bad;
  fg.F = propagate(c, S.P.margin, seed, true, [&](const Mat6& Fa, int ia, int ja, int ib, int jb) {
    Mat6 R = minimal_rotation(J(ib, jb), J(ia, ja));
    if (!finite(R)) {
      bad.emplace_back(ib, jb);
      return Fa;
    }
    Mat6 Fb = reproject(R * Fa, S.space);
    fg.max_step = std::max(fg.max_step, (Fb - Fa).norm());
    return Fb;
  });
  if (!bad.empty()) throw Error(ErrorKind::degenerate_subspace, "frame propagation failed", bad);
  return fg;
}

FrameGrid frame(const GaussMapGrid& S) {
  auto [ic, jc] = centre_of(S.chart);
  if (!S.P.valid(ic, jc)) throw Error(ErrorKind::invalid_argument, "grid centre lies outside the Gauss map");
  return frame(S, SymmetricPair::at(S.space, S.P(ic, jc)));
}

ConnectionGrid maurer_cartan(const FrameGrid& F) {
  const GridChart& c = F.chart;
  ConnectionGrid a;
  a.space = F.space;
  a.chart = c;
  a.P_o = F.P_o;
  a.margin = F.F.margin;
  a.ku = Field<Mat6>(c.nu, c.nv, 0, Mat6::Zero());
  a.pu = a.ku;
  a.kv = a.ku;
  a.pv = a.ku;
  const SymmetricPair pair = SymmetricPair::at(F.space, F.P_o);
  auto edge = [&](const Mat6& Fa, const Mat6& Fb) {
    const Mat6 t = inverse_of(Fa, F.space) * Fb;
    Mat6 x = t.log();
    if (!finite(x)) x = inverse_of(Fa, F.space) * (Fb - Fa);
    return pair.split(x);
  };
  for (int i = 0; i < c.nu; ++i)
    for (int j = 0; j < c.nv; ++j) {
      if (a.has_u(i, j)) std::tie(a.ku(i, j), a.pu(i, j)) = edge(F.F(i, j), F.F(i + 1, j));
      if (a.has_v(i, j)) std::tie(a.kv(i, j), a.pv(i, j)) = edge(F.F(i, j), F.F(i, j + 1));
    }
  return a;
}

ConnectionGrid spectral_connection(const ConnectionGrid& alpha, cplx lambda) {
  if (std::abs(lambda) == 0.0) throw Error(ErrorKind::invalid_argument, "lambda must be nonzero");
  ConnectionGrid out = alpha;
  out.lambda = lambda;
  const cplx inv = 1.0 / lambda;
  const GridChart& c = alpha.chart;
  if (!c.is_complex()) {
    for (auto& x : out.pu.data) x *= lambda;
    for (auto& x : out.pv.data) x *= inv;
    return out;
  }
  const cplx even = 0.5 * (lambda + inv);
  auto avg_v = [&](int i, int j) {
    Mat6 s = Mat6::Zero();
    int n = 0;
    for (auto [a, b] : {Node{i, j}, Node{i, j - 1}, Node{i + 1, j}, Node{i + 1, j - 1}})
      if (a >= 0 && b >= 0 && a < c.nu && b < c.nv && alpha.has_v(a, b)) {
        s += alpha.pv(a, b);
        ++n;
      }
    return n ? Mat6(s / double(n)) : Mat6(Mat6::Zero());
  };
  auto avg_u = [&](int i, int j) {
    Mat6 s = Mat6::Zero();
    int n = 0;
    for (auto [a, b] : {Node{i, j}, Node{i - 1, j}, Node{i, j + 1}, Node{i - 1, j + 1}})
      if (a >= 0 && b >= 0 && a < c.nu && b < c.nv && alpha.has_u(a, b)) {
        s += alpha.pu(a, b);
        ++n;
      }
    return n ? Mat6(s / double(n)) : Mat6(Mat6::Zero());
  };
  for (int i = 0; i < c.nu; ++i)
    for (int j = 0; j < c.nv; ++j) {
      if (alpha.has_u(i, j))
        out.pu(i, j) = even * alpha.pu(i, j) + 0.5 * I_unit * (inv - lambda) * (c.hu / c.hv) * avg_v(i, j);
      if (alpha.has_v(i, j))
        out.pv(i, j) = even * alpha.pv(i, j) + 0.5 * I_unit * (lambda - inv) * (c.hv / c.hu) * avg_u(i, j);
    }
  return out;
}

FlatnessReport flatness_residual(const ConnectionGrid& a) {
  const GridChart& c = a.chart;
  Field<Mat6> eu(c.nu, c.nv, 0, Mat6::Identity()), ev = eu, eui = eu, evi = eu;
  for (int i = 0; i < c.nu; ++i)
    for (int j = 0; j < c.nv; ++j) {
      if (a.has_u(i, j)) {
        eu(i, j) = expm(a.u(i, j));
        eui(i, j) = expm(-a.u(i, j));
      }
      if (a.has_v(i, j)) {
        ev(i, j) = expm(a.v(i, j));
        evi(i, j) = expm(-a.v(i, j));
      }
    }
  FlatnessReport r;
  r.raw = Field<double>(c.nu, c.nv, 0, 0.0);
  r.density = r.raw;
  for (int i = 0; i + 1 < c.nu; ++i)
    for (int j = 0; j + 1 < c.nv; ++j) {
      if (!(a.has_u(i, j) && a.has_v(i + 1, j) && a.has_u(i, j + 1) && a.has_v(i, j))) continue;
      const Mat6 H = eu(i, j) * ev(i + 1, j) * eui(i, j + 1) * evi(i, j);
      r.raw(i, j) = logm(H).norm();
      r.density(i, j) = r.raw(i, j) / (c.hu * c.hv);
      r.max_raw = std::max(r.max_raw, r.raw(i, j));
      r.max_density = std::max(r.max_density, r.density(i, j));
    }
  return r;
}

IntegratedFrame integrate_frame(const ConnectionGrid& a, const Mat6& F0) {
  const GridChart& c = a.chart;
  auto step = [&](const Mat6& Fa, int ia, int ja, int ib, int jb) {
    Mat6 e;
    if (ib == ia + 1) e = expm(a.u(ia, ja));
    else if (ib == ia - 1) e = expm(-a.u(ib, jb));
    else if (jb == ja + 1) e = expm(a.v(ia, ja));
    else e = expm(-a.v(ib, jb));
    return reproject(Fa * e, a.space);
  };
  IntegratedFrame out;
  out.frame.space = a.space;
  out.frame.chart = c;
  out.frame.P_o = a.P_o;
  out.frame.F = propagate(c, a.margin, F0, true, step);
  Field<Mat6> cols = propagate(c, a.margin, F0, false, step);
  for_valid(cols, [&](int i, int j) {
    out.consistency = std::max(out.consistency, (out.frame.F(i, j) - cols(i, j)).norm());
  });
  return out;
}

DeformResult spectral_deform(const GaussMapGrid& S, cplx lambda, const DeformOptions& opt) {
  check_lambda(lambda, S.chart);
  FrameGrid F = frame(S);
  ConnectionGrid alpha = maurer_cartan(F);
  DeformResult r;
  r.flat_one = flatness_residual(alpha);
  ConnectionGrid al = spectral_connection(alpha, lambda);
  r.flat_lambda = flatness_residual(al);
  if (r.flat_lambda.max_raw > opt.harmonic_factor * r.flat_one.max_raw + opt.harmonic_floor)
    throw Error(ErrorKind::non_harmonic, "spectral connection is not flat (residual " +
                                             std::to_string(r.flat_lambda.max_raw) + ")");
  auto [ic, jc] = centre_of(S.chart);
  IntegratedFrame Fl = integrate_frame(al, F.F(ic, jc));
  r.consistency = Fl.consistency;
  Field<Mat6> P(S.chart.nu, S.chart.nv, alpha.margin, Mat6::Zero());
  for_valid(P, [&](int i, int j) {
    const Mat6& f = Fl.frame.F(i, j);
    P(i, j) = f * F.P_o * inverse_of(f, S.space);
  });
  r.S = GaussMapGrid::from_projectors(S.space, S.chart, std::move(P), S.eps);
  return r;
}

namespace {

DualizeResult dualize_with(const GaussMapGrid& S, cplx unit) {
  if (S.chart.is_complex() || S.signature_z != std::make_pair(1, 1))
    throw Error(ErrorKind::unsupported, "duality needs a real (1,1) chart");
  const PseudoSpace* target = nullptr;
  if (S.space.m == 4 && S.space.n == 2) target = &PseudoSpace::plucker();
  else if (S.space.m == 3 && S.space.n == 3) target = &PseudoSpace::lie();
  else throw Error(ErrorKind::signature, "duality maps between signatures (4,2) and (3,3)");

  auto [ic, jc] = centre_of(S.chart);
  const Mat6 P_o = S.P(ic, jc);
  const SymmetricPair pair = SymmetricPair::at(S.space, P_o);
  NodeBases nb = node_bases(P_o, S.space);
  if (!is_real(Mat6(P_o), 1e-9)) throw Error(ErrorKind::unsupported, "base plane is not real");

  // Adapted real basis: S_o then S_o perp, positive vectors first in each block.
  Mat6 B;
  Eigen::Matrix<double, 6, 1> eta;
  auto fill = [&](const Eigen::Matrix<cplx, 6, 3>& cols, const Eigen::Vector3cd& e, int off) {
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e(a).real() > e(b).real(); });
    for (int k = 0; k < 3; ++k) {
      B.col(off + k) = cols.col(order[k]).real().cast<cplx>();
      eta(off + k) = e(order[k]).real() > 0 ? 1.0 : -1.0;
    }
  };
  fill(nb.S, nb.eta_S, 0);
  fill(nb.perp, nb.eta_perp, 3);

  // Target signs: eta on S_o, -eta on S_o perp.
  Eigen::Matrix<double, 6, 1> want = eta;
  want.tail<3>() *= -1.0;
  std::vector<Vec6> std_basis;
  for (int k = 0; k < 6; ++k) std_basis.push_back(Vec6::Unit(k));
  auto ortho = indefinite_orthogonalize(std_basis, *target);
  std::vector<Vec6> pos, neg;
  for (const auto& w : ortho) (target->pair(w, w).real() > 0 ? pos : neg).push_back(w);
  Mat6 W;
  std::size_t ip = 0, in = 0;
  for (int k = 0; k < 6; ++k) {
    if (want(k) > 0) {
      if (ip >= pos.size()) throw Error(ErrorKind::signature, "dual signature does not match the target space");
      W.col(k) = pos[ip++];
    } else {
      if (in >= neg.size()) throw Error(ErrorKind::signature, "dual signature does not match the target space");
      W.col(k) = neg[in++];
    }
  }

  FrameGrid F = frame(S, pair);
  ConnectionGrid alpha = maurer_cartan(F);
  ConnectionGrid al = spectral_connection(alpha, unit);

  DualizeResult r;
  r.adapted = B;
  r.isometry = W;
  Eigen::Matrix<cplx, 6, 1> dd;
  dd << 1.0, 1.0, 1.0, unit, unit, unit;
  const Mat6 D = dd.asDiagonal();
  const Mat6 Di = dd.cwiseInverse().asDiagonal();
  const Mat6 Bi = B.inverse(), Wi = W.inverse();
  Eigen::Matrix<cplx, 6, 1> upper;
  upper << 1.0, 1.0, 1.0, 0.0, 0.0, 0.0;
  const Mat6 Pt_o = W * upper.asDiagonal() * Wi;
  const SymmetricPair tpair = SymmetricPair::at(*target, Pt_o);

  ConnectionGrid dual;
  dual.space = *target;
  dual.chart = S.chart;
  dual.P_o = Pt_o;
  dual.margin = alpha.margin;
  dual.ku = Field<Mat6>(S.chart.nu, S.chart.nv, 0, Mat6::Zero());
  dual.pu = dual.ku;
  dual.kv = dual.ku;
  dual.pv = dual.ku;
  auto convert = [&](const Mat6& x, Mat6& k, Mat6& p) {
    const Mat6 y = Di * Bi * x * B * D;
    r.imag_residual = std::max(r.imag_residual, y.imag().cwiseAbs().maxCoeff());
    const Mat6 z = W * y.real().cast<cplx>() * Wi;
    r.skew_residual = std::max(r.skew_residual, skew_residual(z, *target));
    std::tie(k, p) = tpair.split(z);
  };
  for (int i = 0; i < S.chart.nu; ++i)
    for (int j = 0; j < S.chart.nv; ++j) {
      if (al.has_u(i, j)) convert(al.u(i, j), dual.ku(i, j), dual.pu(i, j));
      if (al.has_v(i, j)) convert(al.v(i, j), dual.kv(i, j), dual.pv(i, j));
    }
  IntegratedFrame Ft = integrate_frame(dual, Mat6::Identity());
  r.consistency = Ft.consistency;
  Field<Mat6> P(S.chart.nu, S.chart.nv, dual.margin, Mat6::Zero());
  for_valid(P, [&](int i, int j) {
    const Mat6& f = Ft.frame.F(i, j);
    P(i, j) = f * Pt_o * target->adjoint(f);
  });
  r.connection = std::move(dual);
  r.S = GaussMapGrid::from_projectors(*target, S.chart, std::move(P), 1.0);
  return r;
}

}  // namespace

DualizeResult dualize(const GaussMapGrid& S) { return dualize_with(S, I_unit); }
DualizeResult inverse_dualize(const GaussMapGrid& S) { return dualize_with(S, -I_unit); }

Mat6 round_trip_isometry(const DualizeResult& first, const DualizeResult& second) {
  const Mat6 k = first.isometry.inverse() * second.adapted;
  return second.isometry * k.inverse() * first.adapted.inverse();
}

}  // namespace qg
