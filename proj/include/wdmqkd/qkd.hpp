#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wdmqkd/biphoton.hpp"

namespace wdmqkd {

struct ProtocolConfig {
  std::uint64_t n_pairs = 100000;
  double rectilinear_deg = 0.0;
  double diagonal_deg = 45.0;
  /// Bob inverts his bit in that basis.
  bool flip_rectilinear = true;
  bool flip_diagonal = false;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ProtocolConfig&) const = default;
};

struct ChannelKeyReport {
  double lambda_signal = 0.0;  ///< nm
  std::uint64_t n_pairs = 0;
  std::uint64_t sifted_bits = 0;
  std::uint64_t sifted_rect = 0;
  std::uint64_t sifted_diag = 0;
  /// Empty when no pair was sifted in that basis.
  std::optional<double> qber_rect;
  std::optional<double> qber_diag;
  double secret_fraction = 0.0;
  double secret_bits_estimate = 0.0;
};

/// Binary entropy in bits; h2(0) = h2(1) = 0.
double binary_entropy(double q);

/// max(0, 1 - h2(qber_rect) - h2(qber_diag)).
double secret_fraction(double qber_rect, double qber_diag);

/// Flips that make every basis positively correlated after inversion: a basis
/// is flipped when correlation_E there is negative.
std::pair<bool, bool> calibrate_flips(const Source& source, const ProtocolConfig& config);

/// Expected per-basis QBER given the flips, from the joint outcome
/// distribution.
std::pair<double, double> expected_qber(const Source& source, const ProtocolConfig& config);

/// BBM92 over one channel: random independent bases per pair, outcomes drawn
/// from the joint distribution at the chosen analyzer angles, mismatched
/// bases discarded. Deterministic in (config.seed, channel_id).
ChannelKeyReport run_bbm92(const Source& source, const ProtocolConfig& config,
                           std::uint64_t channel_id, double lambda_signal = 0.0);

struct WdmSummary {
  std::vector<ChannelKeyReport> channels;
  std::uint64_t total_sifted_bits = 0;
  double total_secret_bits = 0.0;
};

/// Sums in channel order. Throws std::invalid_argument for an empty list.
WdmSummary wdm_aggregate(std::vector<ChannelKeyReport> reports);

nlohmann::json to_json(const ChannelKeyReport& report);
nlohmann::json to_json(const WdmSummary& summary);

/// Header `lambda_nm,sifted_bits,qber_rect,qber_diag,secret_fraction,secret_bits`;
/// undefined QBERs are written as `nan`.
void write_reports_csv(std::ostream& os, const std::vector<ChannelKeyReport>& reports);

}  // namespace wdmqkd
