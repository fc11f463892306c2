#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinsq {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double infinity = std::numeric_limits<double>::infinity();

//=========================================================================
// Errors
//=========================================================================

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-range or malformed input (bad N, p outside [0,1], ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A weak-measurement strength constraint has no real solution, or was
/// violated by explicitly supplied strengths.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// The post-selected branch has zero probability.
class ZeroProbability : public Error {
 public:
  using Error::Error;
};

/// A two-qubit state fails Hermiticity / positivity beyond tolerance.
class PositivityViolation : public Error {
 public:
  using Error::Error;
};

//=========================================================================
// Domain types shared by every module
//=========================================================================

/// Ensemble size and twist angle (radians) of the one-axis twisted state.
struct SystemConfig {
  int n_spins = 2;
  double theta = 0.0;

  static SystemConfig make(int n_spins, double theta) {
    SystemConfig cfg{n_spins, theta};
    cfg.validate();
    return cfg;
  }

  void validate() const {
    if (n_spins < 2)
      throw InvalidArgument("n_spins must be >= 2, got " +
                            std::to_string(n_spins));
    if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  }
};

/// Single-site and pair expectations of an exchange-symmetric parity state.
///
/// Basis convention: |0> is the excited state (sigma_z = +1), |1> the ground
/// state, and sigma_+ = |0><1|. With that convention
///   sz  = <sigma_1z>,  szz = <sigma_1z sigma_2z>,
///   y   = <sigma_1+ sigma_2->   (real for exchange-symmetric states),
///   u   = <sigma_1+ sigma_2+>   (so <sigma_1- sigma_2-> = conj(u)),
///   q   = <sigma_1 . sigma_2>   (= 4 y + szz).
struct CorrelationSet {
  double sz = 0.0;
  double szz = 0.0;
  double y = 0.0;
  cplx u{0.0, 0.0};
  double q = 0.0;

  double v_plus() const { return 0.25 * (1.0 + 2.0 * sz + szz); }
  double v_minus() const { return 0.25 * (1.0 - 2.0 * sz + szz); }
  double w() const { return 0.25 * (1.0 - szz); }

  /// Residual of the exchange identity q = 4y + szz.
  double exchange_residual() const { return std::abs(q - (4.0 * y + szz)); }

  /// True when the implied block-diagonal two-qubit matrix is a state.
  /// Closed forms built on per-qubit surrogate normalizations can leave
  /// this region, so it is a query rather than a constructor invariant.
  bool is_physical(double tol = 1e-10) const {
    const double vp = v_plus(), vm = v_minus(), ww = w();
    if (std::abs(sz) > 1.0 + tol || std::abs(szz) > 1.0 + tol) return false;
    if (vp < -tol || vm < -tol || ww < -tol) return false;
    if (std::abs(u) > std::sqrt(std::max(0.0, vp * vm)) + tol) return false;
    return std::abs(y) <= ww + tol;
  }
};

}  // namespace spinsq
