#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "spinsq/dicke.hpp"
#include "spinsq/two_qubit.hpp"
#include "spinsq/types.hpp"

namespace spinsq {

namespace detail {

inline double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace detail

//=========================================================================
// Closed forms for the one-axis twisted state
//=========================================================================

/// The quoted initial pair coherence -(1 - cos^{N-2} theta)/8
/// - (i/2) sin(theta/2) cos^{N-2}(theta/2).
///
/// In the |0> = excited convention this is <sigma_1- sigma_2->, the complex
/// conjugate of CorrelationSet::u. Only |u| enters any squeezing parameter.
inline cplx quoted_pair_coherence(const SystemConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_spins;
  const double c = detail::ipow(std::cos(cfg.theta), n - 2);
  return {-0.125 * (1.0 - c),
          -0.5 * std::sin(cfg.theta / 2) *
              detail::ipow(std::cos(cfg.theta / 2), n - 2)};
}

/// Initial local expectations and pair correlations of
/// exp(-i theta Jx^2 / 2)|all ground>.
inline CorrelationSet closed_initial_correlations(const SystemConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_spins;
  CorrelationSet c;
  c.sz = -detail::ipow(std::cos(cfg.theta / 2), n - 1);
  c.szz = 0.5 * (1.0 + detail::ipow(std::cos(cfg.theta), n - 2));
  c.u = std::conj(quoted_pair_coherence(cfg));
  // Symmetric pure states have <sigma_1 . sigma_2> = 1, which fixes y.
  c.y = 0.25 * (1.0 - c.szz);
  c.q = 1.0;
  return c;
}

/// Raw initial pair concurrence C_0 in its quoted closed form.
inline double initial_pair_concurrence(const SystemConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_spins;
  const double c = detail::ipow(std::cos(cfg.theta), n - 2);
  const double s_half = std::sin(cfg.theta / 2);
  const double c_half = std::cos(cfg.theta / 2);
  const double disc = (1.0 - c) * (1.0 - c) +
                      16.0 * s_half * s_half * detail::ipow(c_half, 2 * n - 4);
  return 0.25 * (std::sqrt(disc) - 1.0 + c);
}

/// C_r(0) = (N - 1) C_0.
inline double initial_rescaled_concurrence(const SystemConfig& cfg) {
  return (cfg.n_spins - 1) * initial_pair_concurrence(cfg);
}

//=========================================================================
// Exact state construction in the Dicke basis
//=========================================================================

/// J_x on the (N+1)-dimensional symmetric subspace, Dicke index k = m + N/2.
inline Eigen::MatrixXd dicke_jx(int n_spins) {
  const int dim = n_spins + 1;
  const double j = 0.5 * n_spins;
  Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k + 1 < dim; ++k) {
    const double m = k - j;
    const double elem = 0.5 * std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    jx(k + 1, k) = elem;
    jx(k, k + 1) = elem;
  }
  return jx;
}

inline DickeState twisted_state_dicke(const SystemConfig& cfg) {
  cfg.validate();
  const int dim = cfg.n_spins + 1;
  const Eigen::MatrixXd jx = dicke_jx(cfg.n_spins);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jx * jx);
  const Eigen::MatrixXd& v = es.eigenvectors();

  // exp(-i theta Jx^2 / 2) e_0 = V diag(phase) V^T e_0
  Eigen::VectorXcd coeff(dim);
  for (int i = 0; i < dim; ++i)
    coeff[i] = v(0, i) * std::exp(cplx{0.0, -0.5 * cfg.theta * es.eigenvalues()[i]});
  DickeState state{v.cast<cplx>() * coeff};
  state.amplitudes /= state.amplitudes.norm();
  return state;
}

/// Exact pair correlations of a symmetric pure state.
inline CorrelationSet oracle_initial_correlations(const DickeState& state) {
  state.require_normalized();
  return block_form_check(TwoQubitState{weighted_pair_marginal(state)})
      .correlations;
}

}  // namespace spinsq
