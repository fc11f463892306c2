#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "spinsq/dicke.hpp"
#include "spinsq/types.hpp"

namespace spinsq {

/// Reduced state of spins 1 and 2 in the basis |00>, |01>, |10>, |11>
/// (first label = spin 1; 0 = excited).
struct TwoQubitState {
  Matrix4c rho = Matrix4c::Identity() / 4.0;

  double hermiticity_error() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  }

  double min_eigenvalue() const {
    const Matrix4c h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  void validate(double herm_tol = 1e-12, double psd_tol = 1e-10,
                double trace_tol = 1e-12) const {
    if (hermiticity_error() > herm_tol)
      throw PositivityViolation("two-qubit state is not Hermitian");
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > trace_tol)
      throw PositivityViolation("two-qubit state does not have unit trace");
    if (min_eigenvalue() < -psd_tol)
      throw PositivityViolation("two-qubit state is not positive semidefinite");
  }
};

/// Two-qubit matrix with the parity block structure
///   [v+  u*] (+) [w  y]
///   [u   v-]     [y  w]
/// on the (|00>,|11>) and (|01>,|10>) sectors.
inline TwoQubitState block_state(const CorrelationSet& c) {
  TwoQubitState s;
  s.rho.setZero();
  s.rho(0, 0) = c.v_plus();
  s.rho(3, 3) = c.v_minus();
  s.rho(3, 0) = c.u;
  s.rho(0, 3) = std::conj(c.u);
  s.rho(1, 1) = c.w();
  s.rho(2, 2) = c.w();
  s.rho(1, 2) = c.y;
  s.rho(2, 1) = c.y;
  return s;
}

struct BlockFormCheck {
  CorrelationSet correlations;
  /// Largest matrix-element magnitude violating the parity block pattern or
  /// the exchange symmetry of the pair.
  double residual = 0.0;
};

/// Reads the local expectations off an arbitrary two-qubit state and
/// measures how far the state is from the parity block form.
inline BlockFormCheck block_form_check(const TwoQubitState& state) {
  const Matrix4c& r = state.rho;
  BlockFormCheck out;
  CorrelationSet& c = out.correlations;
  c.sz = (r(0, 0) + r(1, 1) - r(2, 2) - r(3, 3)).real();
  c.szz = (r(0, 0) - r(1, 1) - r(2, 2) + r(3, 3)).real();
  c.y = r(2, 1).real();
  c.u = r(3, 0);
  c.q = 4.0 * c.y + c.szz;

  double res = 0.0;
  constexpr int even[2] = {0, 3};
  constexpr int odd[2] = {1, 2};
  for (int e : even)
    for (int o : odd) res = std::max({res, std::abs(r(e, o)), std::abs(r(o, e))});
  res = std::max(res, std::abs(r(1, 1) - r(2, 2)));
  res = std::max(res, std::abs(r(1, 2) - r(2, 1)));
  res = std::max(res, std::abs(r(2, 1).imag()));
  out.residual = res;
  return out;
}

}  // namespace spinsq
