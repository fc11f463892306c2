#pragma once

#include <algorithm>
#include <cmath>

#include "spinsq/channels.hpp"
#include "spinsq/initial_state.hpp"
#include "spinsq/types.hpp"

namespace spinsq {

//=========================================================================
// Squeezing parameters from local expectations and pair correlations
//=========================================================================

/// Kitagawa-Ueda parameter, 1 + 2(N-1)(y - |u|).
inline double xi1_sq(const CorrelationSet& c, int n_spins) {
  return 1.0 + 2.0 * (n_spins - 1) * (c.y - std::abs(c.u));
}

/// Wineland parameter xi1^2 / sz^2; +inf when the mean spin vanishes.
inline double xi2_sq(const CorrelationSet& c, int n_spins) {
  if (c.sz == 0.0) return infinity;
  return xi1_sq(c, n_spins) / (c.sz * c.sz);
}

inline double varsigma_sq(const CorrelationSet& c, int n_spins) {
  return 1.0 + (n_spins - 1) * (c.szz - c.sz * c.sz);
}

/// (1 - 1/N) q + 1/N, the normalized <J^2> - N/2.
inline double xi3_denominator(double q, int n_spins) {
  const double inv_n = 1.0 / n_spins;
  return (1.0 - inv_n) * q + inv_n;
}

/// Toth parameter min{xi1^2, varsigma^2} / ((1-1/N) q + 1/N).
inline double xi3_sq(const CorrelationSet& c, int n_spins) {
  const double den = xi3_denominator(c.q, n_spins);
  if (!(den > 0.0)) return infinity;
  return std::min(xi1_sq(c, n_spins), varsigma_sq(c, n_spins)) / den;
}

/// The same parameter with xi1^2 alone in the numerator.
inline double xi3_sq_without_min(const CorrelationSet& c, int n_spins) {
  const double den = xi3_denominator(c.q, n_spins);
  if (!(den > 0.0)) return infinity;
  return xi1_sq(c, n_spins) / den;
}

/// max(0, 1 - xi^2), held to [0, 1].
inline double clipped_squeezing(double xi_sq) {
  if (!(xi_sq < 1.0)) return 0.0;  // also inf, nan
  return std::min(1.0, 1.0 - xi_sq);
}

//=========================================================================
// Pair concurrence of the parity block form
//=========================================================================

struct BlockConcurrence {
  enum class Branch { None, Coherence, Population };

  double raw = 0.0;       ///< two-qubit concurrence C
  double rescaled = 0.0;  ///< C_r = (N - 1) C
  double coherence_term = 0.0;   ///< 2(|u| - w)
  double population_term = 0.0;  ///< 2(|y| - sqrt(v+ v-))
  Branch branch = Branch::None;
};

inline BlockConcurrence block_concurrence(const CorrelationSet& c, int n_spins,
                                          double tol = 1e-10) {
  if (!c.is_physical(tol))
    throw PositivityViolation("correlations do not describe a two-qubit state");
  BlockConcurrence r;
  r.coherence_term = 2.0 * (std::abs(c.u) - c.w());
  r.population_term =
      2.0 * (std::abs(c.y) - std::sqrt(std::max(0.0, c.v_plus() * c.v_minus())));
  r.raw = std::max({0.0, r.coherence_term, r.population_term});
  if (r.raw > 0.0)
    r.branch = r.coherence_term >= r.population_term
                   ? BlockConcurrence::Branch::Coherence
                   : BlockConcurrence::Branch::Population;
  r.rescaled = (n_spins - 1) * r.raw;
  return r;
}

//=========================================================================
// Reports
//=========================================================================

struct SqueezingReport {
  double xi1_sq = 1.0;
  double xi2_sq = 1.0;
  double xi3_sq = 1.0;             ///< with min{xi1^2, varsigma^2}
  double xi3_sq_without_min = 1.0; ///< xi1^2 alone in the numerator
  double varsigma_sq = 1.0;
  double zeta1_sq = 0.0;
  double zeta2_sq = 0.0;
  double zeta3_sq = 0.0;
  double concurrence = 0.0;        ///< rescaled C_r
  double pair_correlation = 1.0;   ///< q = <sigma_1 . sigma_2>

  void fill_zetas() {
    zeta1_sq = clipped_squeezing(xi1_sq);
    zeta2_sq = clipped_squeezing(xi2_sq);
    zeta3_sq = clipped_squeezing(xi3_sq);
  }
};

/// Generic path: every parameter from its correlation-level definition,
/// concurrence with both block branches.
inline SqueezingReport report_from_correlations(const CorrelationSet& c,
                                                int n_spins) {
  SqueezingReport r;
  r.xi1_sq = xi1_sq(c, n_spins);
  r.xi2_sq = xi2_sq(c, n_spins);
  r.varsigma_sq = varsigma_sq(c, n_spins);
  r.xi3_sq = xi3_sq(c, n_spins);
  r.xi3_sq_without_min = xi3_sq_without_min(c, n_spins);
  r.concurrence = block_concurrence(c, n_spins).rescaled;
  r.pair_correlation = c.q;
  r.fill_zetas();
  return r;
}

namespace detail {

inline void finish_closed_report(SqueezingReport& r, int n_spins, double sz,
                                 double szz, double q) {
  r.xi2_sq = sz == 0.0 ? infinity : r.xi1_sq / (sz * sz);
  r.varsigma_sq = 1.0 + (n_spins - 1) * (szz - sz * sz);
  r.pair_correlation = q;
  const double den = xi3_denominator(q, n_spins);
  r.xi3_sq = den > 0.0 ? std::min(r.xi1_sq, r.varsigma_sq) / den : infinity;
  r.xi3_sq_without_min = den > 0.0 ? r.xi1_sq / den : infinity;
  r.fill_zetas();
}

}  // namespace detail

/// The explicit per-channel parameter formulas, evaluated from the initial
/// closed forms (sz0, szz0, C_r(0), u0).
///
/// ADC works in k = s n^2 so that p = 1 stays finite. PDC is written for
/// general (m, n) with a = (n^2 + m^2)/2, b = (n^2 - m^2)/2; under its
/// constraint b = 1 and a = m^2 + 1, and the bypass point m = n = 1 gives the
/// plain dephasing channel.
inline SqueezingReport closed_form_report(const ProtectedChannel& ch,
                                          const SystemConfig& cfg) {
  cfg.validate();
  ch.require_valid();
  const int n_spins = cfg.n_spins;
  const CorrelationSet c0 = closed_initial_correlations(cfg);
  const double sz0 = c0.sz, szz0 = c0.szz;
  const double cr0 = initial_rescaled_concurrence(cfg);
  const cplx u0 = quoted_pair_coherence(cfg);
  const double q12y = 0.5 * (1.0 - detail::ipow(std::cos(cfg.theta), n_spins - 2));
  const double p = ch.p, s = ch.s;

  double norm = 1.0, gain = 1.0, sz = sz0, szz = szz0, q = 1.0;
  switch (ch.kind) {
    case ChannelKind::AmplitudeDamping: {
      const double k = ch.k, m2 = ch.m * ch.m;
      norm = m2;
      gain = k * m2;
      sz = (k * sz0 - p) / norm;
      szz = (k * k * szz0 - 2.0 * k * p * sz0 + p * p) / (norm * norm);
      q = (k * m2 + k * (k - m2) * szz0 - 2.0 * k * p * sz0 + p * p) / (norm * norm);
      break;
    }
    case ChannelKind::Depolarizing: {
      const double n2 = ch.n * ch.n;
      const double a = n2 * s + s, b = n2 - 1.0;
      norm = 0.5 * ((n2 * s - s) * sz0 + (n2 + 1.0));
      gain = s * s * n2;
      sz = 0.5 * (a * sz0 + b) / norm;
      const double zz = 0.25 * (a * a * szz0 + 2.0 * b * a * sz0 + b * b);
      szz = zz / (norm * norm);
      q = (gain * (1.0 - szz0) + zz) / (norm * norm);
      break;
    }
    case ChannelKind::PhaseDamping: {
      const double n2 = ch.n * ch.n, m2 = ch.m * ch.m;
      const double a = 0.5 * (n2 + m2), b = 0.5 * (n2 - m2);
      norm = a + b * sz0;
      gain = s * s * m2 * n2;
      sz = (a * sz0 + b) / norm;
      const double zz = a * a * szz0 + 2.0 * a * b * sz0 + b * b;
      szz = zz / (norm * norm);
      q = (gain * (1.0 - szz0) + zz) / (norm * norm);
      break;
    }
  }
  if (!(norm > 0.0)) throw ZeroProbability("closed-form normalization is not positive");

  SqueezingReport r;
  const double norm2 = norm * norm;
  r.xi1_sq = 1.0 - gain * cr0 / norm2;
  detail::finish_closed_report(r, n_spins, sz, szz, q);

  const cplx u = -0.5 * gain * q12y - gain * u0;
  const double w = 0.25 * (1.0 - szz);
  r.concurrence = 2.0 * (n_spins - 1) * std::max(0.0, std::abs(u) / norm2 - w);
  return r;
}

/// Large-m ADC and small-m PDC limits.
inline SqueezingReport asymptotic_report(ChannelKind kind, const SystemConfig& cfg) {
  cfg.validate();
  const int n_spins = cfg.n_spins;
  const CorrelationSet c0 = closed_initial_correlations(cfg);
  const double cr0 = initial_rescaled_concurrence(cfg);
  SqueezingReport r;
  switch (kind) {
    case ChannelKind::AmplitudeDamping:
      r.xi1_sq = 1.0 - cr0;
      detail::finish_closed_report(r, n_spins, c0.sz, c0.szz, 1.0);
      r.concurrence = cr0;
      return r;
    case ChannelKind::PhaseDamping: {
      const double norm = 1.0 + c0.sz;
      if (!(norm > 0.0))
        throw ZeroProbability("small-m PDC limit needs <sigma_z>_0 > -1");
      const double zz = (c0.szz + 2.0 * c0.sz + 1.0) / (norm * norm);
      r.xi1_sq = 1.0;
      detail::finish_closed_report(r, n_spins, 1.0, zz, zz);
      r.concurrence = std::max(0.0, 0.5 * (n_spins - 1) * (zz - 1.0));
      return r;
    }
    case ChannelKind::Depolarizing:
      break;
  }
  throw InvalidArgument("no asymptotic form for the depolarizing channel");
}

}  // namespace spinsq
