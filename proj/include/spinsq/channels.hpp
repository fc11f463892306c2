#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinsq/types.hpp"

namespace spinsq {

using Matrix2c = Eigen::Matrix2cd;

enum class ChannelKind { AmplitudeDamping, Depolarizing, PhaseDamping };

inline constexpr std::array<ChannelKind, 3> all_channel_kinds = {
    ChannelKind::AmplitudeDamping, ChannelKind::Depolarizing,
    ChannelKind::PhaseDamping};

inline std::string_view short_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::AmplitudeDamping: return "adc";
    case ChannelKind::Depolarizing: return "dpc";
    case ChannelKind::PhaseDamping: return "pdc";
  }
  return "?";
}

inline ChannelKind parse_channel_kind(std::string_view name) {
  if (name == "adc") return ChannelKind::AmplitudeDamping;
  if (name == "dpc") return ChannelKind::Depolarizing;
  if (name == "pdc") return ChannelKind::PhaseDamping;
  throw InvalidArgument("unknown channel '" + std::string(name) +
                        "' (expected adc, dpc or pdc)");
}

namespace detail {

inline void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidArgument("decoherence strength p must lie in [0, 1], got " +
                          std::to_string(p));
}

}  // namespace detail

//=========================================================================
// Kraus sets and weak-measurement operators
//=========================================================================

/// Single-qubit Kraus operators; basis (|0>, |1>) with |0> excited.
inline std::vector<Matrix2c> kraus_operators(ChannelKind kind, double p) {
  detail::require_probability(p);
  const double s = 1.0 - p;
  std::vector<Matrix2c> ops;
  switch (kind) {
    case ChannelKind::AmplitudeDamping: {
      Matrix2c e0 = Matrix2c::Zero(), e1 = Matrix2c::Zero();
      e0(0, 0) = std::sqrt(s);
      e0(1, 1) = 1.0;
      e1(1, 0) = std::sqrt(p);
      ops = {e0, e1};
      break;
    }
    case ChannelKind::Depolarizing: {
      const double pp = 0.75 * p;
      Matrix2c sx, sy, sz;
      sx << 0, 1, 1, 0;
      sy << 0, cplx(0, -1), cplx(0, 1), 0;
      sz << 1, 0, 0, -1;
      const double a = std::sqrt(pp / 3.0);
      ops = {std::sqrt(1.0 - pp) * Matrix2c::Identity(), a * sx, a * sy, a * sz};
      break;
    }
    case ChannelKind::PhaseDamping: {
      Matrix2c p0 = Matrix2c::Zero(), p1 = Matrix2c::Zero();
      p0(0, 0) = std::sqrt(p);
      p1(1, 1) = std::sqrt(p);
      ops = {std::sqrt(s) * Matrix2c::Identity(), p0, p1};
      break;
    }
  }
  return ops;
}

struct WeakOperators {
  Eigen::Matrix2d pre;                      ///< M = diag(1, m)
  std::optional<Eigen::Matrix2d> reversal;  ///< N = diag(n, 1); empty for n = inf
  Eigen::Matrix2d reversal_rescaled;        ///< N / n = diag(1, 1/n)
};

/// Pass n = infinity for the projector limit of the reversal.
inline WeakOperators weak_operators(double m, double n) {
  if (!(m > 0.0) || !(n > 0.0) || !std::isfinite(m))
    throw InvalidArgument("weak-measurement strengths must be positive");
  WeakOperators w;
  w.pre = Eigen::Vector2d(1.0, m).asDiagonal();
  if (std::isfinite(n)) w.reversal = Eigen::Matrix2d(Eigen::Vector2d(n, 1.0).asDiagonal());
  w.reversal_rescaled = Eigen::Vector2d(1.0, std::isfinite(n) ? 1.0 / n : 0.0).asDiagonal();
  return w;
}

//=========================================================================
// Protected channel: decoherence sandwiched between M and N
//=========================================================================

struct ProtectedChannel {
  ChannelKind kind = ChannelKind::AmplitudeDamping;
  double p = 0.0;
  double s = 1.0;
  double m = 1.0;
  double n = 1.0;  ///< may be +infinity (ADC at s = 0)
  double k = 1.0;  ///< s n^2; stays finite when s -> 0 and n -> infinity
  bool bypass = false;

  /// "Without weak measurement": M = N = identity.
  static ProtectedChannel without_measurement(ChannelKind kind, double p) {
    detail::require_probability(p);
    return {kind, p, 1.0 - p, 1.0, 1.0, 1.0 - p, true};
  }

  /// Arbitrary finite strengths, no constraint enforced.
  static ProtectedChannel with_strengths(ChannelKind kind, double p, double m,
                                         double n) {
    detail::require_probability(p);
    if (!(m > 0.0) || !(n > 0.0) || !std::isfinite(m) || !std::isfinite(n))
      throw InvalidArgument("weak-measurement strengths must be positive and finite");
    const double s = 1.0 - p;
    return {kind, p, s, m, n, s * n * n, false};
  }

  /// Residual of the kind's strength constraint (0 when satisfied).
  double constraint_residual() const {
    switch (kind) {
      case ChannelKind::AmplitudeDamping: return std::abs(k + p - m * m);
      case ChannelKind::Depolarizing: return std::abs(m - 1.0);
      case ChannelKind::PhaseDamping: return std::abs(n * n - 1.0 - (m * m + 1.0));
    }
    return infinity;
  }

  bool satisfies_constraint(double tol = 1e-12) const {
    return constraint_residual() <= tol * std::max(1.0, m * m);
  }

  void require_valid() const {
    if (!bypass && !satisfies_constraint())
      throw ConstraintError("strengths (m=" + std::to_string(m) + ", n=" +
                            std::to_string(n) + ") violate the " +
                            std::string(short_name(kind)) + " constraint");
  }
};

/// Which strength the caller fixes; the constraint determines the other.
struct StrengthKnob {
  enum class Which { M, N } which = Which::M;
  double value = 1.0;
};

inline ProtectedChannel solve_strengths(ChannelKind kind, double p,
                                        StrengthKnob given) {
  detail::require_probability(p);
  if (!(given.value > 0.0) || !std::isfinite(given.value))
    throw InvalidArgument("weak-measurement strength must be positive and finite");
  const double s = 1.0 - p;
  const double v = given.value;
  ProtectedChannel ch{kind, p, s, 1.0, 1.0, s, false};

  switch (kind) {
    case ChannelKind::AmplitudeDamping:
      if (given.which == StrengthKnob::Which::M) {
        // s n^2 + p = m^2
        if (v * v < p)
          throw ConstraintError("ADC constraint needs m^2 >= p (m=" +
                                std::to_string(v) + ", p=" + std::to_string(p) + ")");
        ch.m = v;
        ch.k = v * v - p;
        if (v == 1.0)
          ch.n = 1.0;
        else if (s > 0.0)
          ch.n = std::sqrt(ch.k / s);
        else
          ch.n = ch.k > 0.0 ? infinity : 1.0;
      } else {
        ch.n = v;
        ch.k = s * v * v;
        ch.m = std::sqrt(ch.k + p);
      }
      break;

    case ChannelKind::Depolarizing:
      if (given.which == StrengthKnob::Which::M) {
        if (v != 1.0)
          throw ConstraintError("DPC constraint fixes m = 1, got m=" + std::to_string(v));
        ch.m = 1.0;
        ch.n = 1.0;
      } else {
        ch.m = 1.0;
        ch.n = v;
      }
      ch.k = s * ch.n * ch.n;
      break;

    case ChannelKind::PhaseDamping:
      // n^2 - 1 = m^2 + 1
      if (given.which == StrengthKnob::Which::M) {
        ch.m = v;
        ch.n = std::sqrt(v * v + 2.0);
      } else {
        if (v * v <= 2.0)
          throw ConstraintError("PDC constraint needs n^2 > 2 (n=" + std::to_string(v) + ")");
        ch.n = v;
        ch.m = std::sqrt(v * v - 2.0);
      }
      ch.k = s * ch.n * ch.n;
      break;
  }
  return ch;
}

//=========================================================================
// Heisenberg-picture (dual) maps
//=========================================================================

/// Unnormalized adjoint of X -> N E(M X M^+) N^+, which for diagonal M, N
/// has the shape
///   [[a, b], [c, d]] -> [[aa*a + ad*d, off*b], [off*c, da*a + dd*d]].
struct HeisenbergMap {
  double aa = 1.0, ad = 0.0, da = 0.0, dd = 1.0, off = 1.0;

  /// Diagonal of the image of the identity: the post-selection weight G.
  double weight_excited() const { return aa + ad; }
  double weight_ground() const { return da + dd; }
};

inline HeisenbergMap heisenberg_map(const ProtectedChannel& ch) {
  const double p = ch.p, s = ch.s, m2 = ch.m * ch.m;
  HeisenbergMap h;
  switch (ch.kind) {
    case ChannelKind::AmplitudeDamping:
      // n^2 only ever appears as s n^2 = k
      h = {ch.k, p, 0.0, m2, ch.m * std::sqrt(ch.k)};
      break;
    case ChannelKind::Depolarizing: {
      const double n2 = ch.n * ch.n;
      h = {n2 * (1.0 - 0.5 * p), 0.5 * p, m2 * 0.5 * p * n2, m2 * (1.0 - 0.5 * p),
           ch.m * ch.n * s};
      break;
    }
    case ChannelKind::PhaseDamping: {
      const double n2 = ch.n * ch.n;
      h = {n2, 0.0, 0.0, m2, ch.m * ch.n * s};
      break;
    }
  }
  return h;
}

/// Per-qubit normalized dual map:
///   Theta+(sigma_x,y) = f_xy sigma_x,y,  Theta+(sigma_z) = f_z sigma_z + c_z.
struct DualMapCoefficients {
  double f_xy = 1.0;
  double f_z = 1.0;
  double c_z = 0.0;
  double norm = 1.0;

  /// Theta+(I) as diag(excited, ground), given the map it came from.
  static std::array<double, 2> identity_image(const HeisenbergMap& h, double norm) {
    return {h.weight_excited() / norm, h.weight_ground() / norm};
  }
};

/// The normalization is the single-qubit trace Tr[G rho_1] evaluated at the
/// initial <sigma_z> = sz0. For ADC under its constraint G = m^2 I and the
/// norm does not depend on sz0; for DPC and PDC it does.
inline DualMapCoefficients dual_map(const ProtectedChannel& ch, double sz0) {
  ch.require_valid();
  const HeisenbergMap h = heisenberg_map(ch);
  const double g0 = h.weight_excited(), g1 = h.weight_ground();
  const double z_top = h.aa - h.ad, z_bottom = h.da - h.dd;  // image of sigma_z

  DualMapCoefficients d;
  d.norm = 0.5 * (g0 + g1) + 0.5 * (g0 - g1) * sz0;
  if (!(d.norm > 0.0))
    throw ZeroProbability("dual-map normalization is not positive");
  d.f_xy = h.off / d.norm;
  d.f_z = 0.5 * (z_top - z_bottom) / d.norm;
  d.c_z = 0.5 * (z_top + z_bottom) / d.norm;
  return d;
}

/// Pushes a CorrelationSet through the sandwich with the per-qubit dual map.
/// sz, szz, y, u follow from Theta+ (x) Theta+; q is the image of
/// sigma_1 . sigma_2, i.e. f_xy^2 (q0 - szz0) + szz'.
inline CorrelationSet evolve_correlations(const ProtectedChannel& ch,
                                          const CorrelationSet& c0) {
  const DualMapCoefficients d = dual_map(ch, c0.sz);
  const double f2 = d.f_xy * d.f_xy;
  CorrelationSet c;
  c.sz = d.f_z * c0.sz + d.c_z;
  c.szz = d.f_z * d.f_z * c0.szz + 2.0 * d.f_z * d.c_z * c0.sz + d.c_z * d.c_z;
  c.y = f2 * c0.y;
  c.u = f2 * c0.u;
  c.q = f2 * (c0.q - c0.szz) + c.szz;
  return c;
}

/// p = 1 - exp(-gamma t / 2).
inline double p_from_time(double gamma, double t) {
  if (gamma < 0.0 || t < 0.0)
    throw InvalidArgument("damping rate and time must be nonnegative");
  return -std::expm1(-0.5 * gamma * t);
}

}  // namespace spinsq
