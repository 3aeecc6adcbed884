#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wdmqkd/biphoton.hpp"
#include "wdmqkd/correlation.hpp"
#include "wdmqkd/random.hpp"

namespace wdmqkd {

struct DetectionConfig {
  double pair_rate = 2000.0;  ///< generated pairs/s
  double efficiency_signal = 1.0;
  double efficiency_idler = 1.0;
  double accidental_rate = 0.0;  ///< counts/s
  double integration_time = 1.0;  ///< s per scan point
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Expected counts for coincidence probability p.
  double expected_counts(double p) const;

  bool operator==(const DetectionConfig&) const = default;
};

struct ScanData {
  Arm theta_fixed_arm = Arm::signal;
  double theta_fixed = 0.0;    ///< degrees
  std::vector<double> angles;  ///< scanned arm, degrees
  std::vector<std::uint64_t> counts;
  DetectionConfig config;
};

/// Poisson(T * (pair_rate * eta_s * eta_i * p + accidental_rate)).
std::uint64_t simulate_counts(double p, const DetectionConfig& config, Stream& stream);

/// One count per angle. Each angle draws from its own stream derived from
/// (config.seed, detection domain, channel_id, angle value, repeat count of
/// that value), so results do not depend on evaluation order and permuting
/// the angle list permutes the counts. Throws std::invalid_argument for fewer
/// than three angles.
ScanData simulate_scan(const Source& source, Arm fixed_arm, double fixed_deg,
                       const std::vector<double>& angles, const DetectionConfig& config,
                       std::uint64_t channel_id = 0);

/// `# fixed_arm=`, `# fixed_theta_deg=`, `# seed=` comments, then
/// `theta_deg,counts` rows.
void write_scan_csv(std::ostream& os, const ScanData& data);

std::string to_string(Arm arm);
Arm parse_arm(const std::string& s);

}  // namespace wdmqkd
