#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "spinsq/channels.hpp"
#include "spinsq/metrics.hpp"
#include "spinsq/oracle.hpp"
#include "spinsq/types.hpp"

#ifndef SPINSQ_VERSION
#define SPINSQ_VERSION "0.1.0"
#endif

namespace spinsq {

inline constexpr std::string_view version = SPINSQ_VERSION;

/// Largest ensemble for which sweeps may request the exact oracle.
inline constexpr int max_oracle_spins = 14;

//=========================================================================
// Parsing helpers
//=========================================================================

namespace detail {

inline double parse_double(std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

}  // namespace detail

/// Radians, or a multiple of pi written as "<x>pi" (e.g. "1.8pi", "pi").
inline double parse_angle(std::string_view text) {
  if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
    const std::string_view factor = text.substr(0, text.size() - 2);
    if (factor.empty()) return pi;
    if (factor == "-") return -pi;
    return detail::parse_double(factor) * pi;
  }
  return detail::parse_double(text);
}

//=========================================================================
// Sweep specification
//=========================================================================

enum class Source { Closed, Oracle, Both };
enum class OutputFormat { Csv, Json };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::Closed: return "closed";
    case Source::Oracle: return "oracle";
    case Source::Both: return "both";
  }
  return "?";
}

inline Source parse_source(std::string_view s) {
  if (s == "closed") return Source::Closed;
  if (s == "oracle") return Source::Oracle;
  if (s == "both") return Source::Both;
  throw InvalidArgument("unknown source '" + std::string(s) + "'");
}

inline std::string_view to_string(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json";
}

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidArgument("unknown format '" + std::string(s) + "'");
}

/// Grid over the decoherence strength: either start:stop:step or an
/// explicit list.
struct PGrid {
  double start = 0.0;
  double stop = 1.0;
  double step = 0.005;
  std::vector<double> explicit_points;

  void validate() const {
    if (!explicit_points.empty()) {
      for (double p : explicit_points)
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("grid point outside [0, 1]");
      return;
    }
    if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
    if (!(start >= 0.0 && stop <= 1.0 && start <= stop))
      throw InvalidArgument("grid must satisfy 0 <= start <= stop <= 1");
  }

  std::vector<double> points() const {
    validate();
    if (!explicit_points.empty()) return explicit_points;
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (long i = 0; i < count; ++i) {
      double p = start + static_cast<double>(i) * step;
      if (std::abs(p - stop) < 1e-9 * step) p = stop;
      out.push_back(std::min(p, 1.0));
    }
    return out;
  }

  /// "start:stop:step" or "p1,p2,...".
  static PGrid parse(std::string_view text) {
    PGrid g;
    auto split = [](std::string_view t, char sep) {
      std::vector<std::string_view> parts;
      std::size_t pos = 0;
      while (true) {
        const std::size_t next = t.find(sep, pos);
        parts.push_back(t.substr(pos, next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
      }
      return parts;
    };
    if (text.find(':') != std::string_view::npos) {
      const auto parts = split(text, ':');
      if (parts.size() != 3) throw InvalidArgument("p grid must be start:stop:step");
      g.start = detail::parse_double(parts[0]);
      g.stop = detail::parse_double(parts[1]);
      g.step = detail::parse_double(parts[2]);
    } else {
      for (auto part : split(text, ',')) g.explicit_points.push_back(detail::parse_double(part));
    }
    g.validate();
    return g;
  }
};

struct SweepSpec {
  std::string label = "custom";
  ChannelKind kind = ChannelKind::AmplitudeDamping;
  SystemConfig cfg{12, 0.1 * pi};
  std::optional<StrengthKnob> knob;  ///< empty: without weak measurement
  PGrid grid;
  Source source = Source::Closed;
  OutputFormat format = OutputFormat::Csv;
  std::string out_path;

  bool bypass() const { return !knob.has_value(); }

  void validate() const {
    cfg.validate();
    grid.validate();
    if (knob && !(knob->value > 0.0))
      throw InvalidArgument("weak-measurement strength must be positive");
    if (source != Source::Closed && cfg.n_spins > max_oracle_spins)
      throw InvalidArgument("oracle sweeps are limited to n_spins <= " +
                            std::to_string(max_oracle_spins));
  }

  /// The constraint couples the strengths to s, so they are re-solved per p.
  ProtectedChannel channel_at(double p) const {
    if (!knob) return ProtectedChannel::without_measurement(kind, p);
    return solve_strengths(kind, p, *knob);
  }
};

//=========================================================================
// Figure presets
//=========================================================================

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {
      "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d",
      "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d"};
  return ids;
}

/// fig1: ADC at theta = 0.1 pi; fig2: ADC, fig3: DPC, fig4: PDC at 1.8 pi.
/// Panel a is always without weak measurement. N = 12 throughout.
inline SweepSpec figure_preset(std::string_view id) {
  using W = StrengthKnob::Which;
  struct Row {
    ChannelKind kind;
    double theta_over_pi;
    W which;
    std::array<double, 3> strengths;  // panels b, c, d
  };
  static const std::map<char, Row> table = {
      {'1', {ChannelKind::AmplitudeDamping, 0.1, W::M, {2.0, 4.0, 30.0}}},
      {'2', {ChannelKind::AmplitudeDamping, 1.8, W::M, {4.0, 8.0, 70.0}}},
      {'3', {ChannelKind::Depolarizing, 1.8, W::N, {2.0, 10.0, 500.0}}},
      {'4', {ChannelKind::PhaseDamping, 1.8, W::M, {1.0, 0.5, 0.01}}},
  };
  if (id.size() != 5 || id.substr(0, 3) != "fig" || !table.count(id[3]) ||
      id[4] < 'a' || id[4] > 'd')
    throw InvalidArgument("unknown figure preset '" + std::string(id) +
                          "' (expected fig1a..fig4d)");
  const Row& row = table.at(id[3]);
  SweepSpec spec;
  spec.label = std::string(id);
  spec.kind = row.kind;
  spec.cfg = SystemConfig::make(12, row.theta_over_pi * pi);
  if (id[4] != 'a') spec.knob = StrengthKnob{row.which, row.strengths[id[4] - 'b']};
  spec.grid = PGrid{0.0, 1.0, 0.005, {}};
  return spec;
}

//=========================================================================
// Sweeps
//=========================================================================

struct SweepRow {
  double p = 0.0;
  std::string source;
  std::string error;  ///< empty on success
  SqueezingReport report;
  CorrelationSet correlations;

  bool ok() const { return error.empty(); }
};

namespace detail {

inline std::string error_token(const std::exception& e) {
  if (dynamic_cast<const ConstraintError*>(&e)) return "infeasible_constraint";
  if (dynamic_cast<const ZeroProbability*>(&e)) return "zero_probability";
  if (dynamic_cast<const PositivityViolation*>(&e)) return "positivity_violation";
  return "error";
}

}  // namespace detail

inline SweepRow closed_row(const SweepSpec& spec, double p) {
  SweepRow row{p, "closed", {}, {}, {}};
  try {
    const ProtectedChannel ch = spec.channel_at(p);
    row.report = closed_form_report(ch, spec.cfg);
    row.correlations = evolve_correlations(ch, closed_initial_correlations(spec.cfg));
  } catch (const Error& e) {
    row.error = detail::error_token(e);
  }
  return row;
}

inline SweepRow oracle_row(const SweepSpec& spec, double p) {
  SweepRow row{p, "oracle", {}, {}, {}};
  try {
    const ProtectedChannel ch = spec.channel_at(p);
    row.correlations = post_selected_correlations(spec.cfg, ch);
    row.report = report_from_correlations(row.correlations, spec.cfg.n_spins);
  } catch (const Error& e) {
    row.error = detail::error_token(e);
  }
  return row;
}

/// One row per grid point and source, in grid order. Rows whose point is
/// infeasible carry an error token instead of aborting the sweep.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (double p : spec.grid.points()) {
    if (spec.source != Source::Oracle) rows.push_back(closed_row(spec, p));
    if (spec.source != Source::Closed) rows.push_back(oracle_row(spec, p));
  }
  return rows;
}

//=========================================================================
// Output
//=========================================================================

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return fmt::format("{:.15g}", v);
}

inline constexpr std::string_view csv_header =
    "p,xi1_sq,xi2_sq,xi3_sq,zeta2_sq,zeta3_sq,concurrence,source,error";

inline std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out(csv_header);
  out += '\n';
  for (const SweepRow& r : rows) {
    out += format_number(r.p);
    const auto& rep = r.report;
    for (double v : {rep.xi1_sq, rep.xi2_sq, rep.xi3_sq, rep.zeta2_sq, rep.zeta3_sq,
                     rep.concurrence}) {
      out += ',';
      out += r.ok() ? format_number(v) : "nan";
    }
    out += ',';
    out += r.source;
    out += ',';
    out += r.error;
    out += '\n';
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return v;
}

}  // namespace detail

inline nlohmann::ordered_json spec_to_json(const SweepSpec& spec) {
  nlohmann::ordered_json meta;
  meta["label"] = spec.label;
  meta["channel"] = short_name(spec.kind);
  meta["theta"] = spec.cfg.theta;
  meta["n_spins"] = spec.cfg.n_spins;
  if (spec.knob)
    meta[spec.knob->which == StrengthKnob::Which::M ? "m" : "n"] = spec.knob->value;
  meta["bypass"] = spec.bypass();
  if (spec.grid.explicit_points.empty())
    meta["p_grid"] = {{"start", spec.grid.start}, {"stop", spec.grid.stop},
                      {"step", spec.grid.step}};
  else
    meta["p_grid"] = spec.grid.explicit_points;
  meta["source"] = to_string(spec.source);
  meta["format"] = to_string(spec.format);
  meta["version"] = std::string(version);
  return meta;
}

inline std::string to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json doc;
  doc["meta"] = spec_to_json(spec);
  auto& arr = doc["rows"] = nlohmann::ordered_json::array();
  for (const SweepRow& r : rows) {
    nlohmann::ordered_json o;
    o["p"] = r.p;
    const auto& rep = r.report;
    const std::pair<const char*, double> fields[] = {
        {"xi1_sq", rep.xi1_sq},     {"xi2_sq", rep.xi2_sq},
        {"xi3_sq", rep.xi3_sq},     {"zeta2_sq", rep.zeta2_sq},
        {"zeta3_sq", rep.zeta3_sq}, {"concurrence", rep.concurrence}};
    for (const auto& [name, v] : fields)
      o[name] = detail::json_number(r.ok() ? v : std::nan(""));
    o["source"] = r.source;
    if (!r.ok()) o["error"] = r.error;
    arr.push_back(std::move(o));
  }
  return doc.dump(2) + "\n";
}

inline std::string render(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  return spec.format == OutputFormat::Csv ? to_csv(rows) : to_json(spec, rows);
}

//=========================================================================
// Sudden-death point
//=========================================================================

enum class SssdQuantity { Zeta2, Zeta3, Concurrence };

inline SssdQuantity parse_sssd_quantity(std::string_view s) {
  if (s == "zeta2") return SssdQuantity::Zeta2;
  if (s == "zeta3") return SssdQuantity::Zeta3;
  if (s == "concurrence") return SssdQuantity::Concurrence;
  throw InvalidArgument("unknown quantity '" + std::string(s) + "'");
}

inline double sssd_value(const SweepSpec& spec, SssdQuantity which, double p) {
  const SqueezingReport r = closed_form_report(spec.channel_at(p), spec.cfg);
  switch (which) {
    case SssdQuantity::Zeta2: return r.zeta2_sq;
    case SssdQuantity::Zeta3: return r.zeta3_sq;
    case SssdQuantity::Concurrence: return r.concurrence;
  }
  return 0.0;
}

struct SssdResult {
  std::optional<double> p_star;       ///< smallest p in (0, 1) where it vanishes
  bool vanishes_at_boundary = false;  ///< zero only at p = 1
};

/// Scans [0, 1] on a 1e-3 grid for the first point where the closed-form
/// quantity is no longer positive, then bisects the bracket to `tol` in p.
inline SssdResult find_sssd(const SweepSpec& spec, SssdQuantity which,
                            double tol = 1e-8) {
  spec.validate();
  if (!(sssd_value(spec, which, 0.0) > 0.0))
    throw InvalidArgument("quantity is not positive at p = 0");
  constexpr int steps = 1000;
  double lo = 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double hi_grid = static_cast<double>(i) / steps;
    if (sssd_value(spec, which, hi_grid) > 0.0) {
      lo = hi_grid;
      continue;
    }
    double hi = hi_grid;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (sssd_value(spec, which, mid) > 0.0 ? lo : hi) = mid;
    }
    SssdResult res;
    if (i == steps && 1.0 - hi < 10.0 * tol)
      res.vanishes_at_boundary = true;
    else
      res.p_star = 0.5 * (lo + hi);
    return res;
  }
  return {};
}

}  // namespace spinsq
