#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wdmqkd/correlation.hpp"
#include "wdmqkd/detection.hpp"
#include "wdmqkd/qkd.hpp"
#include "wdmqkd/spectral.hpp"

namespace wdmqkd {

enum class SourceKind { entangled, product };

struct SourceSection {
  SourceKind kind = SourceKind::entangled;
  PumpConfig pump;
  double alpha_deg = 0.0;
  FConvention f_convention = FConvention::ratio_as_inverse_f;
  SpectralProfile hv_profile = default_profiles().first;
  SpectralProfile vh_profile = default_profiles().second;
  /// Tabulated spectrum; when set the Gaussian profiles are ignored.
  std::optional<std::filesystem::path> spectrum_file;
  double lambda_min_nm = 862.0;
  double lambda_max_nm = 876.0;
  int n_channels = 8;

  bool operator==(const SourceSection&) const = default;
};

struct FitSection {
  double period_deg = 180.0;
  Arm fixed_arm = Arm::signal;
  std::vector<double> fixed_angles_deg{0.0, 45.0, 90.0, 135.0};
  double scan_step_deg = 10.0;  ///< scanned arm covers [0, 180] in this step

  bool operator==(const FitSection&) const = default;
};

struct QkdSection {
  ProtocolConfig protocol;
  /// Derive the flips per channel from the sign of correlation_E.
  bool calibrate_flips = false;

  bool operator==(const QkdSection&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  SourceSection source;
  DetectionConfig detection;
  FitSection fit;
  QkdSection qkd;

  /// Copies the master seed into the detection and protocol sections.
  void set_seed(std::uint64_t s);

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON config. Omitted keys take defaults; unknown keys, type
/// mismatches and constraint violations raise ConfigError naming the dotted
/// key path (parse errors carry line and column). Relative spectrum paths are
/// resolved against `base_dir`.
RunConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Checks every numeric constraint; throws ConfigError.
void validate(const RunConfig& config);

/// Fully resolved config; parse_config(to_json(c).dump()) == c.
nlohmann::json to_json(const RunConfig& config);

/// The sampled channel list for the configured source.
std::vector<SpectralChannel> make_channels(const RunConfig& config);

/// The state used for a channel under the configured source kind.
Source channel_source(const RunConfig& config, const SpectralChannel& channel);

}  // namespace wdmqkd
