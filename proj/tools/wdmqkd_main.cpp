// wdmqkd: command-line driver for the entangled-pair WDM-QKD simulator.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wdmqkd/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kIoError = 2 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled photon-pair source and WDM-QKD simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> period;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--period", period, "fit period in degrees")
      ->check(CLI::IsMember({180, 360}));

  auto* theory = app.add_subcommand("theory-scan", "analytic idler scans at fixed signal angles");
  double f = 1.0;
  double alpha_deg = 0.0;
  std::vector<double> theta_s{0.0, 45.0, 90.0, 135.0};
  std::string source_kind = "entangled";
  theory->add_option("--f", f, "amplitude ratio f")->check(CLI::NonNegativeNumber);
  theory->add_option("--alpha", alpha_deg, "relative phase alpha in degrees");
  theory->add_option("--theta-s", theta_s, "signal polarizer angles in degrees")
      ->delimiter(',');
  theory->add_option("--source", source_kind, "entangled or product")
      ->check(CLI::IsMember({"entangled", "product"}));

  auto* simfit = app.add_subcommand("simulate-fit", "simulate polarizer scans and fit them");
  auto* spectrum = app.add_subcommand("spectrum", "per-channel HV/VH rates and f estimates");
  auto* qkd = app.add_subcommand("qkd", "BBM92 key distribution per WDM channel");
  auto* figures = app.add_subcommand("reproduce-figures",
                                     "theory scans for the four reference (f, alpha) sets");

  CLI11_PARSE(app, argc, argv);

  wdmqkd::RunConfig config;
  try {
    if (!config_path.empty()) config = wdmqkd::load_config(config_path);
    if (seed) config.set_seed(*seed);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (period) config.fit.period_deg = *period;
    wdmqkd::validate(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (theory->parsed()) {
      wdmqkd::write_config_echo(config);
      const wdmqkd::Source source =
          source_kind == "product" ? wdmqkd::Source{wdmqkd::ProductState{}}
                                   : wdmqkd::Source{wdmqkd::BiphotonPureState::from_degrees(f, alpha_deg)};
      const auto summary = wdmqkd::cmd_theory_scan(source, theta_s, config.output_dir);
      std::cout << summary.dump(2) << '\n';
    } else if (simfit->parsed()) {
      wdmqkd::cmd_simulate_and_fit(config);
      std::cout << "wrote scans and fits to " << config.output_dir.string() << '\n';
    } else if (spectrum->parsed()) {
      const auto channels = wdmqkd::cmd_spectrum(config);
      std::cout << "wrote " << channels.size() << " channels to "
                << (config.output_dir / "spectrum.csv").string() << '\n';
    } else if (qkd->parsed()) {
      const auto summary = wdmqkd::cmd_qkd(config);
      std::cout << "total secret bits " << summary.total_secret_bits << " over "
                << summary.channels.size() << " channels\n";
    } else if (figures->parsed()) {
      wdmqkd::cmd_reproduce_figures(config);
      std::cout << "wrote figure data to " << config.output_dir.string() << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
