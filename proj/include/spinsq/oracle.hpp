#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "spinsq/channels.hpp"
#include "spinsq/dicke.hpp"
#include "spinsq/initial_state.hpp"
#include "spinsq/two_qubit.hpp"
#include "spinsq/types.hpp"

namespace spinsq {

/// Largest ensemble the full 2^N x 2^N path accepts.
inline constexpr int max_full_matrix_spins = 10;

//=========================================================================
// Sandwich operators  K_l = N' E_l M
//=========================================================================

/// Composite single-qubit operators of the protected channel. ADC is written
/// through k = s n^2, which stays finite as p -> 1:
///   N E_0 M = diag(sqrt k, m),  N E_1 M = sqrt(p) |1><0|.
/// Otherwise the reversal is taken as diag(1, 1/n); the dropped overall
/// factor n cancels in the post-selection normalization.
inline std::vector<Matrix2c> sandwich_operators(const ProtectedChannel& ch) {
  if (ch.kind == ChannelKind::AmplitudeDamping) {
    if (!(ch.m > 0.0) || !(ch.k >= 0.0) || !std::isfinite(ch.m) || !std::isfinite(ch.k))
      throw InvalidArgument("weak-measurement strengths must be positive and finite");
    Matrix2c k0 = Matrix2c::Zero(), k1 = Matrix2c::Zero();
    k0(0, 0) = std::sqrt(ch.k);
    k0(1, 1) = ch.m;
    k1(1, 0) = std::sqrt(ch.p);
    return {k0, k1};
  }
  const WeakOperators w = weak_operators(ch.m, ch.n);
  const Matrix2c pre = w.pre.cast<cplx>();
  const Matrix2c post = w.reversal_rescaled.cast<cplx>();
  std::vector<Matrix2c> ops;
  for (const Matrix2c& e : kraus_operators(ch.kind, ch.p)) ops.push_back(post * e * pre);
  return ops;
}

/// Diagonal of G = sum_l K_l^+ K_l.
inline DiagonalWeight weight_operator(const std::vector<Matrix2c>& ops) {
  Matrix2c g = Matrix2c::Zero();
  for (const Matrix2c& k : ops) g += k.adjoint() * k;
  const double scale = std::max(1e-300, g.cwiseAbs().maxCoeff());
  if (std::abs(g(0, 1)) > 1e-13 * scale || std::abs(g(1, 0)) > 1e-13 * scale)
    throw Error("post-selection weight is not diagonal");
  return {g(0, 0).real(), g(1, 1).real()};
}

/// (Lambda (x) Lambda)(X) with Lambda(X) = sum_l K_l X K_l^+.
inline Matrix4c apply_pair_map(const std::vector<Matrix2c>& ops, const Matrix4c& x) {
  Matrix4c out = Matrix4c::Zero();
  for (const Matrix2c& a : ops) {
    for (const Matrix2c& b : ops) {
      Matrix4c kk;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) kk.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
      out += kk * x * kk.adjoint();
    }
  }
  return out;
}

//=========================================================================
// Fast path: Dicke amplitudes + weighted partial trace
//=========================================================================

/// Exact two-qubit marginal of the globally normalized post-selected state,
///   rho_12 = (Lambda (x) Lambda)(Tr_{3..N}[(I (x) I (x) G^{N-2}) rho]) / Tr[G^N rho].
inline TwoQubitState post_selected_state(const SystemConfig& cfg,
                                         const ProtectedChannel& ch) {
  const DickeState psi = twisted_state_dicke(cfg);
  const auto ops = sandwich_operators(ch);
  const DiagonalWeight g = weight_operator(ops);
  const double z = weighted_norm(psi, g);
  if (!(z > 0.0))
    throw ZeroProbability("post-selection succeeds with probability zero");
  TwoQubitState out{apply_pair_map(ops, weighted_pair_marginal(psi, g)) / z};
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  return out;
}

inline CorrelationSet post_selected_correlations(const SystemConfig& cfg,
                                                 const ProtectedChannel& ch) {
  return block_form_check(post_selected_state(cfg, ch)).correlations;
}

//=========================================================================
// Slow path: full 2^N x 2^N density matrix
//=========================================================================

/// Full density matrix of N spins; spin 0 is the most significant bit and
/// local index 0 is the excited state.
struct CollectiveState {
  Eigen::MatrixXcd rho;
  int n_spins = 0;
};

namespace detail {

inline void require_full_matrix_size(int n_spins) {
  if (n_spins > max_full_matrix_spins)
    throw InvalidArgument("full-matrix path is limited to N <= " +
                          std::to_string(max_full_matrix_spins));
}

/// Single-spin operator `op` acting on spin `site` of an N-spin register.
inline Eigen::MatrixXcd embed(const Matrix2c& op, int site, int n_spins) {
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  const int shift = n_spins - 1 - site;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int bc = static_cast<int>((col >> shift) & 1);
    for (int br = 0; br < 2; ++br) {
      if (op(br, bc) == cplx{0.0, 0.0}) continue;
      const Eigen::Index row = (col & ~(Eigen::Index{1} << shift)) |
                               (static_cast<Eigen::Index>(br) << shift);
      out(row, col) += op(br, bc);
    }
  }
  return out;
}

inline std::array<Eigen::MatrixXcd, 3> collective_operators(int n_spins) {
  Matrix2c sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  std::array<Eigen::MatrixXcd, 3> j;
  for (auto& m : j) m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < n_spins; ++k) {
    j[0] += 0.5 * embed(sx, k, n_spins);
    j[1] += 0.5 * embed(sy, k, n_spins);
    j[2] += 0.5 * embed(sz, k, n_spins);
  }
  return j;
}

/// X -> K X K^+ for K acting on one spin, done by index arithmetic.
inline Eigen::MatrixXcd conjugate_on_site(const Matrix2c& k, const Eigen::MatrixXcd& x,
                                          int site, int n_spins) {
  const Eigen::Index dim = x.rows();
  const Eigen::Index bit = Eigen::Index{1} << (n_spins - 1 - site);
  Eigen::MatrixXcd left(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (r & bit) continue;
    const Eigen::Index r1 = r | bit;
    for (Eigen::Index c = 0; c < dim; ++c) {
      left(r, c) = k(0, 0) * x(r, c) + k(0, 1) * x(r1, c);
      left(r1, c) = k(1, 0) * x(r, c) + k(1, 1) * x(r1, c);
    }
  }
  Eigen::MatrixXcd out(dim, dim);
  const Matrix2c kd = k.adjoint();
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (c & bit) continue;
    const Eigen::Index c1 = c | bit;
    for (Eigen::Index r = 0; r < dim; ++r) {
      out(r, c) = left(r, c) * kd(0, 0) + left(r, c1) * kd(1, 0);
      out(r, c1) = left(r, c) * kd(0, 1) + left(r, c1) * kd(1, 1);
    }
  }
  return out;
}

}  // namespace detail

/// exp(-i theta Jx^2 / 2)|all ground> built on the full 2^N register,
/// independently of the Dicke-basis construction.
inline CollectiveState full_twisted_state(const SystemConfig& cfg) {
  cfg.validate();
  detail::require_full_matrix_size(cfg.n_spins);
  const auto j = detail::collective_operators(cfg.n_spins);
  const Eigen::MatrixXd jx2 = (j[0] * j[0]).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jx2);
  const Eigen::Index last = jx2.rows() - 1;  // all spins in |1>
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd coeff(jx2.rows());
  for (Eigen::Index i = 0; i < jx2.rows(); ++i)
    coeff[i] = v(last, i) * std::exp(cplx{0.0, -0.5 * cfg.theta * es.eigenvalues()[i]});
  const Eigen::VectorXcd psi = v.cast<cplx>() * coeff;
  return {psi * psi.adjoint(), cfg.n_spins};
}

/// Applies the sandwich to every spin and normalizes by the global trace.
inline CollectiveState apply_sandwich(const CollectiveState& in, const ProtectedChannel& ch) {
  const auto ops = sandwich_operators(ch);
  Eigen::MatrixXcd rho = in.rho;
  for (int site = 0; site < in.n_spins; ++site) {
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (const Matrix2c& k : ops) next += detail::conjugate_on_site(k, rho, site, in.n_spins);
    rho = std::move(next);
  }
  const double z = rho.trace().real();
  if (!(z > 0.0))
    throw ZeroProbability("post-selection succeeds with probability zero");
  rho /= z;
  return {0.5 * (rho + rho.adjoint()), in.n_spins};
}

inline CollectiveState exact_post_selected_state(const SystemConfig& cfg,
                                                 const ProtectedChannel& ch) {
  return apply_sandwich(full_twisted_state(cfg), ch);
}

/// Reduced state of spins 0 and 1.
inline TwoQubitState pair_marginal(const CollectiveState& state) {
  const int n = state.n_spins;
  const Eigen::Index rest = Eigen::Index{1} << (n - 2);
  TwoQubitState out;
  out.rho.setZero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (Eigen::Index r = 0; r < rest; ++r)
        out.rho(a, b) += state.rho(a * rest + r, b * rest + r);
  return out;
}

//=========================================================================
// Definitional squeezing parameters from the collective operators
//=========================================================================

struct CollectiveSqueezing {
  std::optional<double> xi1_sq;  ///< empty when the mean spin vanishes
  double xi2_sq = infinity;
  double xi3_sq = infinity;
  Eigen::Vector3d mean_spin = Eigen::Vector3d::Zero();
};

inline CollectiveSqueezing collective_squeezing(const CollectiveState& state) {
  const int n = state.n_spins;
  detail::require_full_matrix_size(n);
  const auto j = detail::collective_operators(n);

  CollectiveSqueezing out;
  std::array<Eigen::MatrixXcd, 3> rj;
  for (int a = 0; a < 3; ++a) {
    rj[a] = state.rho * j[a];
    out.mean_spin[a] = rj[a].trace().real();
  }
  // corr(k, l) = (1/2) <J_k J_l + J_l J_k>
  Eigen::Matrix3d corr;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      corr(a, b) = rj[a].cwiseProduct(j[b].transpose()).sum().real();
  corr = (0.5 * (corr + corr.transpose())).eval();
  const Eigen::Matrix3d cov = corr - out.mean_spin * out.mean_spin.transpose();

  const double len = out.mean_spin.norm();
  if (len > 1e-12 * n) {
    const Eigen::Vector3d dir = out.mean_spin / len;
    Eigen::Index least;
    dir.cwiseAbs().minCoeff(&least);
    const Eigen::Vector3d e1 = dir.cross(Eigen::Vector3d::Unit(least)).normalized();
    const Eigen::Vector3d e2 = dir.cross(e1);
    const double a = e1.dot(cov * e1), c = e2.dot(cov * e2), b = e1.dot(cov * e2);
    const double min_var = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    out.xi1_sq = 4.0 * min_var / n;
    out.xi2_sq = double(n) * n / (4.0 * len * len) * *out.xi1_sq;
  }

  const Eigen::Matrix3d gamma = (n - 1) * cov + corr;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gamma, Eigen::EigenvaluesOnly);
  const double den = corr.trace() - 0.5 * n;
  if (den > 0.0) out.xi3_sq = es.eigenvalues().minCoeff() / den;
  return out;
}

//=========================================================================
// Wootters concurrence
//=========================================================================

}  // namespace spinsq

template <>
struct Eigen::NumTraits<boost::multiprecision::cpp_bin_float_quad>
    : Eigen::GenericNumTraits<boost::multiprecision::cpp_bin_float_quad> {
  using Real = boost::multiprecision::cpp_bin_float_quad;
  using NonInteger = Real;
  using Literal = Real;
  using Nested = Real;
  enum { IsComplex = 0, IsInteger = 0, IsSigned = 1, RequireInitialization = 1,
         ReadCost = 1, AddCost = 4, MulCost = 16 };
  static int digits10() { return std::numeric_limits<Real>::digits10; }
  static Real dummy_precision() { return Real(1e-30); }
};

namespace spinsq {

namespace detail {

using quad = boost::multiprecision::cpp_bin_float_quad;
using Matrix8q = Eigen::Matrix<quad, 8, 8>;

/// Real form [[Re, -Im], [Im, Re]] of a complex 4x4 matrix; products and
/// spectra carry over, every eigenvalue appearing twice.
inline Matrix8q real_embedding(const Matrix4c& a) {
  Matrix8q out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const quad re = a(i, j).real(), im = a(i, j).imag();
      out(i, j) = re;
      out(i + 4, j + 4) = re;
      out(i, j + 4) = -im;
      out(i + 4, j) = im;
    }
  return out;
}

}  // namespace detail

/// max(0, l1 - l2 - l3 - l4), l_i the descending square roots of the
/// eigenvalues of rho * rho~, via the Hermitian form sqrt(rho) rho~ sqrt(rho).
///
/// Near rank-deficient states the l_i of vanishing eigenvalues turn roundoff
/// e into sqrt(e), so the spectra are taken in 113-bit precision on the
/// double-valued input.
inline double wootters_concurrence(const TwoQubitState& state) {
  using detail::quad;
  state.validate(1e-12, 1e-10, 1e-10);
  const Matrix4c herm = 0.5 * (state.rho + state.rho.adjoint());

  Matrix4c yy = Matrix4c::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix4c tilde = yy * herm.conjugate() * yy;  // exact: signs and swaps only

  const detail::Matrix8q h = detail::real_embedding(herm);
  Eigen::SelfAdjointEigenSolver<detail::Matrix8q> es(h);
  Eigen::Matrix<quad, 8, 1> root = es.eigenvalues();
  for (int i = 0; i < 8; ++i) root[i] = root[i] > 0 ? quad(sqrt(root[i])) : quad(0);
  const detail::Matrix8q sqrt_rho =
      es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  detail::Matrix8q r = sqrt_rho * detail::real_embedding(tilde) * sqrt_rho;
  r = (0.5 * (r + r.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<detail::Matrix8q> rs(r, Eigen::EigenvaluesOnly);

  // eigenvalues come in equal pairs; ascending order
  std::array<quad, 4> lam;
  for (int i = 0; i < 4; ++i) {
    const quad v = rs.eigenvalues()[7 - 2 * i];
    lam[i] = v > 0 ? quad(sqrt(v)) : quad(0);
  }
  const quad c = lam[0] - lam[1] - lam[2] - lam[3];
  return c > 0 ? static_cast<double>(c) : 0.0;
}

}  // namespace spinsq
