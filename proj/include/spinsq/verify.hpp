#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "spinsq/channels.hpp"
#include "spinsq/initial_state.hpp"
#include "spinsq/metrics.hpp"
#include "spinsq/oracle.hpp"
#include "spinsq/sweep.hpp"

namespace spinsq {

/// Closed forms agree with the oracle when every deviation is below this.
inline constexpr double exactness_tolerance = 1e-9;
/// Fast and full-matrix oracle paths must agree to this.
inline constexpr double dual_path_tolerance = 1e-10;

struct VerifyOptions {
  std::vector<ChannelKind> channels{all_channel_kinds.begin(), all_channel_kinds.end()};
  int n_spins = 6;
  std::vector<double> thetas{0.1 * pi, 1.8 * pi};
  PGrid grid{0.0, 0.95, 0.05, {}};
  std::vector<int> initial_spins{2, 3, 6, 12};
  int dual_path_spins = 8;  ///< capped at n_spins
};

/// Largest absolute closed-vs-oracle differences.
struct Deviation {
  double sz = 0, szz = 0, y = 0, u = 0, q = 0;
  double xi1_sq = 0, xi2_sq = 0, xi3_sq = 0, concurrence = 0;

  double max_correlation() const { return std::max({sz, szz, y, u, q}); }
  double max_report() const { return std::max({xi1_sq, xi2_sq, xi3_sq, concurrence}); }
  double max_all() const { return std::max(max_correlation(), max_report()); }

  void absorb(const CorrelationSet& a, const CorrelationSet& b) {
    sz = std::max(sz, std::abs(a.sz - b.sz));
    szz = std::max(szz, std::abs(a.szz - b.szz));
    y = std::max(y, std::abs(a.y - b.y));
    u = std::max(u, std::abs(a.u - b.u));
    q = std::max(q, std::abs(a.q - b.q));
  }

  static double gap(double a, double b) {
    if (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) return 0.0;
    return std::abs(a - b);
  }

  void absorb(const SqueezingReport& a, const SqueezingReport& b) {
    xi1_sq = std::max(xi1_sq, gap(a.xi1_sq, b.xi1_sq));
    xi2_sq = std::max(xi2_sq, gap(a.xi2_sq, b.xi2_sq));
    xi3_sq = std::max(xi3_sq, gap(a.xi3_sq, b.xi3_sq));
    concurrence = std::max(concurrence, gap(a.concurrence, b.concurrence));
  }
};

struct InitialConformance {
  Deviation deviation;
  double quoted_u0_vs_conj_u = 0.0;  ///< max |u0_quoted - conj(u_oracle)|
  double quoted_u0_vs_u = 0.0;       ///< max |u0_quoted - u_oracle|
  int points = 0;
  bool pass = false;
};

struct ChannelConformance {
  ChannelKind kind{};
  Deviation deviation;
  double block_residual_max = 0.0;
  /// max |xi3 with min - xi3 without min| over the closed-form grid
  double min_over_msq_discrepancy = 0.0;
  int min_active_points = 0;  ///< points where varsigma^2 < xi1^2
  int unphysical_closed_points = 0;
  int points = 0;
  int zero_probability_points = 0;
  double dual_path_max = 0.0;
};

struct ConformanceReport {
  VerifyOptions options;
  InitialConformance initial;
  std::vector<ChannelConformance> channels;
  std::optional<bool> adc_exact;
  double dual_path_max = 0.0;
  bool pass = false;
};

namespace detail {

/// Strength settings exercised per channel; nullopt is the bypass.
inline std::vector<std::optional<StrengthKnob>> verify_strengths(ChannelKind kind) {
  using W = StrengthKnob::Which;
  switch (kind) {
    case ChannelKind::AmplitudeDamping:
      return {std::nullopt, StrengthKnob{W::M, 1.0}, StrengthKnob{W::M, 2.0},
              StrengthKnob{W::M, 4.0}, StrengthKnob{W::M, 8.0}};
    case ChannelKind::Depolarizing:
      return {std::nullopt, StrengthKnob{W::N, 2.0}, StrengthKnob{W::N, 10.0}};
    case ChannelKind::PhaseDamping:
      return {std::nullopt, StrengthKnob{W::M, 1.0}, StrengthKnob{W::M, 0.5},
              StrengthKnob{W::M, 0.1}};
  }
  return {};
}

inline ProtectedChannel make_channel(ChannelKind kind, double p,
                                     const std::optional<StrengthKnob>& knob) {
  return knob ? solve_strengths(kind, p, *knob)
              : ProtectedChannel::without_measurement(kind, p);
}

}  // namespace detail

inline InitialConformance verify_initial_state(const VerifyOptions& opt) {
  InitialConformance out;
  std::vector<int> spins = opt.initial_spins;
  spins.push_back(opt.n_spins);
  std::sort(spins.begin(), spins.end());
  spins.erase(std::unique(spins.begin(), spins.end()), spins.end());
  for (int n : spins) {
    for (int k = 0; k <= 20; ++k) {
      const SystemConfig cfg = SystemConfig::make(n, 0.1 * k * pi);
      const CorrelationSet closed = closed_initial_correlations(cfg);
      const CorrelationSet exact = oracle_initial_correlations(twisted_state_dicke(cfg));
      out.deviation.absorb(closed, exact);
      const cplx quoted = quoted_pair_coherence(cfg);
      out.quoted_u0_vs_conj_u =
          std::max(out.quoted_u0_vs_conj_u, std::abs(quoted - std::conj(exact.u)));
      out.quoted_u0_vs_u = std::max(out.quoted_u0_vs_u, std::abs(quoted - exact.u));
      ++out.points;
    }
  }
  out.pass = out.deviation.max_correlation() < exactness_tolerance;
  return out;
}

inline ChannelConformance verify_channel(ChannelKind kind, const VerifyOptions& opt) {
  ChannelConformance out;
  out.kind = kind;
  for (double theta : opt.thetas) {
    const SystemConfig cfg = SystemConfig::make(opt.n_spins, theta);
    const CorrelationSet c0 = closed_initial_correlations(cfg);
    for (const auto& knob : detail::verify_strengths(kind)) {
      for (double p : opt.grid.points()) {
        ProtectedChannel ch;
        try {
          ch = detail::make_channel(kind, p, knob);
        } catch (const ConstraintError&) {
          continue;
        }
        ++out.points;
        const SqueezingReport closed = closed_form_report(ch, cfg);
        const CorrelationSet evolved = evolve_correlations(ch, c0);
        out.min_over_msq_discrepancy =
            std::max(out.min_over_msq_discrepancy,
                     Deviation::gap(closed.xi3_sq, closed.xi3_sq_without_min));
        if (closed.varsigma_sq < closed.xi1_sq) ++out.min_active_points;
        if (!evolved.is_physical()) ++out.unphysical_closed_points;

        TwoQubitState rho;
        try {
          rho = post_selected_state(cfg, ch);
        } catch (const ZeroProbability&) {
          ++out.zero_probability_points;
          continue;
        }
        const BlockFormCheck check = block_form_check(rho);
        out.block_residual_max = std::max(out.block_residual_max, check.residual);
        out.deviation.absorb(evolved, check.correlations);
        out.deviation.absorb(closed, report_from_correlations(check.correlations, cfg.n_spins));
      }
    }
  }
  return out;
}

/// Max entrywise gap between the Dicke fast path and the full-matrix path.
inline double verify_dual_path(ChannelKind kind, const VerifyOptions& opt) {
  const int n = std::min(opt.n_spins, opt.dual_path_spins);
  double worst = 0.0;
  for (double theta : opt.thetas) {
    const SystemConfig cfg = SystemConfig::make(n, theta);
    const CollectiveState full = full_twisted_state(cfg);
    for (const auto& knob : detail::verify_strengths(kind)) {
      for (double p : {0.0, 0.3, 0.6, 0.9}) {
        ProtectedChannel ch;
        try {
          ch = detail::make_channel(kind, p, knob);
        } catch (const ConstraintError&) {
          continue;
        }
        const TwoQubitState fast = post_selected_state(cfg, ch);
        const TwoQubitState slow = pair_marginal(apply_sandwich(full, ch));
        worst = std::max(worst, (fast.rho - slow.rho).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

/// Closed forms against the exact post-selected oracle. Only the promised
/// invariants decide `pass`: the initial-state match, ADC exactness and
/// fast/full oracle agreement. DPC and PDC deviations are reported as data.
inline ConformanceReport verify(const VerifyOptions& opt) {
  if (opt.n_spins < 2 || opt.n_spins > max_oracle_spins)
    throw InvalidArgument("verify needs 2 <= n_spins <= " + std::to_string(max_oracle_spins));
  opt.grid.validate();
  ConformanceReport rep;
  rep.options = opt;
  rep.initial = verify_initial_state(opt);
  for (ChannelKind kind : opt.channels) {
    ChannelConformance cc = verify_channel(kind, opt);
    cc.dual_path_max = verify_dual_path(kind, opt);
    rep.dual_path_max = std::max(rep.dual_path_max, cc.dual_path_max);
    if (kind == ChannelKind::AmplitudeDamping)
      rep.adc_exact = cc.deviation.max_all() < exactness_tolerance;
    rep.channels.push_back(cc);
  }
  rep.pass = rep.initial.pass && rep.adc_exact.value_or(true) &&
             rep.dual_path_max < dual_path_tolerance;
  return rep;
}

inline nlohmann::ordered_json to_json(const Deviation& d) {
  return {{"sz", d.sz},         {"szz", d.szz},       {"y", d.y},
          {"u", d.u},           {"q", d.q},           {"xi1_sq", d.xi1_sq},
          {"xi2_sq", d.xi2_sq}, {"xi3_sq", d.xi3_sq}, {"concurrence", d.concurrence}};
}

inline nlohmann::ordered_json to_json(const ConformanceReport& r) {
  nlohmann::ordered_json j;
  j["version"] = std::string(version);
  j["n_spins"] = r.options.n_spins;
  j["thetas"] = r.options.thetas;
  j["p_grid"] = r.options.grid.points();

  auto& init = j["initial_state"];
  init["points"] = r.initial.points;
  init["max_deviation"] = to_json(r.initial.deviation);
  init["quoted_u0_vs_conj_u"] = r.initial.quoted_u0_vs_conj_u;
  init["quoted_u0_vs_u"] = r.initial.quoted_u0_vs_u;
  init["quoted_u0_is"] = r.initial.quoted_u0_vs_conj_u < exactness_tolerance
                             ? "<sigma_1- sigma_2-> (conjugate of u)"
                             : (r.initial.quoted_u0_vs_u < exactness_tolerance
                                    ? "<sigma_1+ sigma_2+>"
                                    : "neither");
  init["pass"] = r.initial.pass;

  auto& chans = j["channels"] = nlohmann::ordered_json::object();
  for (const ChannelConformance& c : r.channels) {
    nlohmann::ordered_json o;
    o["points"] = c.points;
    o["zero_probability_points"] = c.zero_probability_points;
    o["max_deviation"] = to_json(c.deviation);
    o["block_residual_max"] = c.block_residual_max;
    o["min_over_msq_discrepancy"] = c.min_over_msq_discrepancy;
    o["min_active_points"] = c.min_active_points;
    o["unphysical_closed_points"] = c.unphysical_closed_points;
    o["dual_path_max"] = c.dual_path_max;
    chans[std::string(short_name(c.kind))] = std::move(o);
  }
  if (r.adc_exact)
    j["adc_exact"] = *r.adc_exact;
  else
    j["adc_exact"] = nullptr;
  j["dual_path_max"] = r.dual_path_max;
  j["dual_path_spins"] = std::min(r.options.n_spins, r.options.dual_path_spins);
  j["pass"] = r.pass;
  return j;
}

}  // namespace spinsq
