#include "wdmqkd/detection.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "wdmqkd/format.hpp"

namespace wdmqkd {

void DetectionConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("detection.") + key + ": " + what);
  };
  require(std::isfinite(pair_rate) && pair_rate >= 0.0, "pair_rate", "must be >= 0");
  require(efficiency_signal >= 0.0 && efficiency_signal <= 1.0, "efficiency_signal",
          "must be in [0, 1]");
  require(efficiency_idler >= 0.0 && efficiency_idler <= 1.0, "efficiency_idler",
          "must be in [0, 1]");
  require(std::isfinite(accidental_rate) && accidental_rate >= 0.0, "accidental_rate",
          "must be >= 0");
  require(std::isfinite(integration_time) && integration_time > 0.0, "integration_time",
          "must be > 0");
}

double DetectionConfig::expected_counts(double p) const {
  return integration_time *
         (pair_rate * efficiency_signal * efficiency_idler * p + accidental_rate);
}

std::uint64_t simulate_counts(double p, const DetectionConfig& config, Stream& stream) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("simulate_counts: probability outside [0, 1]");
  }
  return sample_poisson(config.expected_counts(p), stream);
}

ScanData simulate_scan(const Source& source, Arm fixed_arm, double fixed_deg,
                       const std::vector<double>& angles, const DetectionConfig& config,
                       std::uint64_t channel_id) {
  if (angles.size() < 3) {
    throw std::invalid_argument("simulate_scan: need at least three angles");
  }
  config.validate();
  ScanData data{fixed_arm, fixed_deg, angles, {}, config};
  data.counts.reserve(angles.size());
  std::map<std::uint64_t, std::uint64_t> occurrences;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    // keyed by the angle itself (plus a repeat counter), so permuting the
    // list permutes the counts
    const auto angle_key = std::bit_cast<std::uint64_t>(angles[k] + 0.0);
    const std::uint64_t repeat = occurrences[angle_key]++;
    const MeasurementSetting setting = fixed_arm == Arm::signal
                                           ? MeasurementSetting(fixed_deg, angles[k])
                                           : MeasurementSetting(angles[k], fixed_deg);
    // clamp roundoff just above 1 for states at a transmission maximum
    const double p = std::min(1.0, coincidence_probability(source, setting));
    auto stream = derive_stream(config.seed, StreamDomain::detection, channel_id,
                                splitmix64(angle_key) ^ repeat);
    data.counts.push_back(simulate_counts(p, config, stream));
  }
  return data;
}

void write_scan_csv(std::ostream& os, const ScanData& data) {
  os << "# fixed_arm=" << to_string(data.theta_fixed_arm) << '\n'
     << "# fixed_theta_deg=" << format_number(data.theta_fixed) << '\n'
     << "# seed=" << data.config.seed << '\n'
     << "# units: angles in degrees, counts per integration window of "
     << format_number(data.config.integration_time) << " s\n"
     << "theta_deg,counts\n";
  for (std::size_t k = 0; k < data.angles.size(); ++k) {
    os << format_number(data.angles[k]) << ',' << data.counts[k] << '\n';
  }
}

std::string to_string(Arm arm) { return arm == Arm::signal ? "signal" : "idler"; }

Arm parse_arm(const std::string& s) {
  if (s == "signal") return Arm::signal;
  if (s == "idler") return Arm::idler;
  throw std::invalid_argument("unknown arm '" + s + "' (expected signal or idler)");
}

}  // namespace wdmqkd
