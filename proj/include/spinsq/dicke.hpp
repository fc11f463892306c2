#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "spinsq/types.hpp"

namespace spinsq {

using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

/// Pure state of N spins in the permutation-symmetric subspace.
///
/// amplitudes[k] multiplies the Dicke state |j=N/2, m_z=k-N/2>, i.e. the
/// normalized symmetric superposition of all strings with k excited spins.
/// Index 0 is therefore the all-ground state.
struct DickeState {
  Eigen::VectorXcd amplitudes;

  int n_spins() const { return static_cast<int>(amplitudes.size()) - 1; }
  double norm_squared() const { return amplitudes.squaredNorm(); }

  void require_normalized(double tol = 1e-12) const {
    if (amplitudes.size() < 3)
      throw InvalidArgument("DickeState needs at least two spins");
    if (std::abs(norm_squared() - 1.0) > tol)
      throw InvalidArgument("DickeState is not normalized");
  }
};

namespace detail {

/// C(n, k) as a double; exact while the result fits in 53 bits.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

inline int excitations(int a, int b) { return (a == 0) + (b == 0); }

}  // namespace detail

/// Diagonal single-qubit weight diag(excited, ground).
struct DiagonalWeight {
  double excited = 1.0;
  double ground = 1.0;
};

/// Tr_{3..N}[(I (x) I (x) G^{(x)N-2}) |psi><psi|] for a symmetric pure state.
///
/// Every computational string with e excitations carries amplitude
/// c_e / sqrt(C(N, e)); grouping the traced spins by their excitation count
/// reduces the 2^(N-2) sum to N-1 terms per matrix element.
/// With G = I this is the ordinary two-qubit marginal.
inline Matrix4c weighted_pair_marginal(const DickeState& state,
                                       DiagonalWeight g = {}) {
  const int n = state.n_spins();
  const int rest = n - 2;
  const auto& c = state.amplitudes;

  std::vector<double> weight(rest + 1);
  for (int j = 0; j <= rest; ++j)
    weight[j] = detail::binomial(rest, j) * std::pow(g.excited, j) *
                std::pow(g.ground, rest - j);

  Matrix4c rho = Matrix4c::Zero();
  for (int row = 0; row < 4; ++row) {
    const int e_row = detail::excitations(row >> 1, row & 1);
    for (int col = 0; col < 4; ++col) {
      const int e_col = detail::excitations(col >> 1, col & 1);
      cplx acc{0.0, 0.0};
      for (int j = 0; j <= rest; ++j) {
        if (weight[j] == 0.0) continue;
        const int kr = e_row + j, kc = e_col + j;
        acc += weight[j] * c[kr] * std::conj(c[kc]) /
               std::sqrt(detail::binomial(n, kr) * detail::binomial(n, kc));
      }
      rho(row, col) = acc;
    }
  }
  return rho;
}

/// Tr[G^{(x)N} |psi><psi|].
inline double weighted_norm(const DickeState& state, DiagonalWeight g) {
  const int n = state.n_spins();
  double z = 0.0;
  for (int k = 0; k <= n; ++k)
    z += std::norm(state.amplitudes[k]) * std::pow(g.excited, k) *
         std::pow(g.ground, n - k);
  return z;
}

}  // namespace spinsq
