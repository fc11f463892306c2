// Command-line front end: sweeps, figure presets, sudden-death points and the
// closed-form vs exact-oracle conformance report.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinsq/spinsq.hpp"

namespace {

struct ChannelArgs {
  std::string channel = "adc";
  std::string theta = "0.1pi";
  int n_spins = 12;
  std::optional<double> m;
  std::optional<double> n;
  bool bypass = false;

  void attach(CLI::App* app) {
    app->add_option("--channel", channel, "Decoherence channel")
        ->check(CLI::IsMember({"adc", "dpc", "pdc"}))
        ->required();
    app->add_option("--theta", theta, "Twist angle in radians, or <x>pi");
    app->add_option("--n-spins", n_spins, "Number of spins")->check(CLI::Range(2, 1 << 20));
    auto* om = app->add_option("--m", m, "Pre-measurement strength (other strength from the constraint)");
    auto* on = app->add_option("--n", n, "Reversal strength (other strength from the constraint)");
    auto* ob = app->add_flag("--bypass", bypass,
                             "Without weak measurement: M = N = identity, no constraint");
    om->excludes(on)->excludes(ob);
    on->excludes(ob);
  }

  spinsq::SweepSpec to_spec() const {
    using spinsq::StrengthKnob;
    spinsq::SweepSpec spec;
    spec.kind = spinsq::parse_channel_kind(channel);
    spec.cfg = spinsq::SystemConfig::make(n_spins, spinsq::parse_angle(theta));
    if (m)
      spec.knob = StrengthKnob{StrengthKnob::Which::M, *m};
    else if (n)
      spec.knob = StrengthKnob{StrengthKnob::Which::N, *n};
    else if (!bypass)
      throw spinsq::InvalidArgument("one of --m, --n or --bypass is required");
    return spec;
  }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw spinsq::InvalidArgument("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin squeezing and pair entanglement under decoherence with weak-measurement reversal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(spinsq::version));

  // sweep
  ChannelArgs sweep_args;
  std::string grid_text = "0:1:0.005", source = "closed", format = "csv", out_path;
  auto* sweep = app.add_subcommand("sweep", "Sweep the decoherence strength p");
  sweep_args.attach(sweep);
  sweep->add_option("--p-grid", grid_text, "start:stop:step or a comma list");
  sweep->add_option("--source", source)->check(CLI::IsMember({"closed", "oracle", "both"}));
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", out_path, "Output file ('-' for stdout)")->required();

  // figure
  std::string figure_id, fig_out, fig_format = "csv", fig_source = "closed";
  auto* figure = app.add_subcommand(
      "figure", "Run a figure preset (fig1a..fig4d); panel a is without weak measurement");
  figure->add_option("id", figure_id)->required()->check(CLI::IsMember(spinsq::figure_ids()));
  figure->add_option("--out", fig_out, "Output file (default stdout)");
  figure->add_option("--format", fig_format)->check(CLI::IsMember({"csv", "json"}));
  figure->add_option("--source", fig_source)->check(CLI::IsMember({"closed", "oracle", "both"}));

  // sssd
  ChannelArgs sssd_args;
  std::string quantity = "zeta3";
  auto* sssd = app.add_subcommand("sssd", "Locate the sudden-death point p*");
  sssd_args.attach(sssd);
  sssd->add_option("--quantity", quantity)
      ->check(CLI::IsMember({"zeta2", "zeta3", "concurrence"}));

  // verify
  std::vector<std::string> verify_channels;
  int verify_spins = 6;
  auto* verify = app.add_subcommand("verify", "Compare closed forms with the exact oracle (JSON)");
  verify->add_option("--channel", verify_channels, "Restrict to these channels")
      ->check(CLI::IsMember({"adc", "dpc", "pdc"}));
  verify->add_option("--n-spins", verify_spins)->check(CLI::Range(2, spinsq::max_oracle_spins));

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      spinsq::SweepSpec spec = sweep_args.to_spec();
      spec.grid = spinsq::PGrid::parse(grid_text);
      spec.source = spinsq::parse_source(source);
      spec.format = spinsq::parse_format(format);
      spec.out_path = out_path;
      emit(spinsq::render(spec, spinsq::run_sweep(spec)), out_path);
    } else if (figure->parsed()) {
      spinsq::SweepSpec spec = spinsq::figure_preset(figure_id);
      spec.source = spinsq::parse_source(fig_source);
      spec.format = spinsq::parse_format(fig_format);
      spec.out_path = fig_out;
      emit(spinsq::render(spec, spinsq::run_sweep(spec)), fig_out);
    } else if (sssd->parsed()) {
      const spinsq::SweepSpec spec = sssd_args.to_spec();
      const auto res = spinsq::find_sssd(spec, spinsq::parse_sssd_quantity(quantity));
      if (res.p_star)
        std::cout << spinsq::format_number(*res.p_star) << "\n";
      else
        std::cout << "none\n";
    } else if (verify->parsed()) {
      spinsq::VerifyOptions opt;
      opt.n_spins = verify_spins;
      if (!verify_channels.empty()) {
        opt.channels.clear();
        for (const auto& c : verify_channels) opt.channels.push_back(spinsq::parse_channel_kind(c));
      }
      const auto report = spinsq::verify(opt);
      std::cout << spinsq::to_json(report).dump(2) << "\n";
      return report.pass ? 0 : 1;
    }
  } catch (const spinsq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
