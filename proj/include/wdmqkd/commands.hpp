#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "wdmqkd/config.hpp"

namespace wdmqkd {

/// Writes `resolved_config.json` into the output directory.
void write_config_echo(const RunConfig& config);

/// One `theory_ts<theta_s>.csv` per signal angle (columns theta_i_deg,rate on
/// a 1 degree grid) and `theory_summary.json` with Theta_i, shifts and
/// visibilities. Returns the summary.
nlohmann::json cmd_theory_scan(const Source& source, const std::vector<double>& theta_s_list,
                               const std::filesystem::path& out_dir);

/// Simulates and fits one scan per channel and fixed-arm angle. Fit failures
/// are recorded in the summary, not thrown.
nlohmann::json cmd_simulate_and_fit(const RunConfig& config);

/// `spectrum.csv`; returns the channel list it describes.
std::vector<SpectralChannel> cmd_spectrum(const RunConfig& config);

/// `qkd_channels.csv`, `qkd_channels.json` and `qkd_summary.json`.
WdmSummary cmd_qkd(const RunConfig& config);

/// Theory scans for (f, alpha) = (1, 0), (1, 180), (1, 60), (1.73, 0) into
/// fig2a..fig2d under the output directory.
nlohmann::json cmd_reproduce_figures(const RunConfig& config);

}  // namespace wdmqkd
