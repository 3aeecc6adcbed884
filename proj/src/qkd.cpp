#include "wdmqkd/qkd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "wdmqkd/format.hpp"
#include "wdmqkd/random.hpp"

namespace wdmqkd {

void ProtocolConfig::validate() const {
  if (n_pairs < 1) throw std::invalid_argument("qkd.n_pairs: must be >= 1");
  if (!std::isfinite(rectilinear_deg) || !std::isfinite(diagonal_deg)) {
    throw std::invalid_argument("qkd: basis angles must be finite");
  }
}

double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double secret_fraction(double qber_rect, double qber_diag) {
  if (!(qber_rect >= 0.0 && qber_rect <= 1.0) || !(qber_diag >= 0.0 && qber_diag <= 1.0)) {
    throw std::invalid_argument("secret_fraction: QBER outside [0, 1]");
  }
  return std::max(0.0, 1.0 - binary_entropy(qber_rect) - binary_entropy(qber_diag));
}

std::pair<bool, bool> calibrate_flips(const Source& source, const ProtocolConfig& config) {
  const double e_rect =
      correlation_E(source, MeasurementSetting(config.rectilinear_deg, config.rectilinear_deg));
  const double e_diag =
      correlation_E(source, MeasurementSetting(config.diagonal_deg, config.diagonal_deg));
  return {e_rect < 0.0, e_diag < 0.0};
}

std::pair<double, double> expected_qber(const Source& source, const ProtocolConfig& config) {
  auto qber = [&](double angle, bool flip) {
    const auto d = joint_outcome_distribution(source, MeasurementSetting(angle, angle));
    const double differ = d.p_tr + d.p_rt;
    return flip ? 1.0 - differ : differ;
  };
  return {qber(config.rectilinear_deg, config.flip_rectilinear),
          qber(config.diagonal_deg, config.flip_diagonal)};
}

ChannelKeyReport run_bbm92(const Source& source, const ProtocolConfig& config,
                           std::uint64_t channel_id, double lambda_signal) {
  config.validate();
  const std::array<double, 2> basis_angle{config.rectilinear_deg, config.diagonal_deg};
  const std::array<bool, 2> flip{config.flip_rectilinear, config.flip_diagonal};

  // cumulative outcome tables for every (alice basis, bob basis) pair
  std::array<std::array<std::array<double, 3>, 2>, 2> cumulative{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto d =
          joint_outcome_distribution(source, MeasurementSetting(basis_angle[a], basis_angle[b]));
      const double total = d.total();
      cumulative[a][b] = {d.p_tt / total, (d.p_tt + d.p_tr) / total,
                          (d.p_tt + d.p_tr + d.p_rt) / total};
    }
  }

  auto stream = derive_stream(config.seed, StreamDomain::protocol, channel_id, 0);
  std::array<std::uint64_t, 2> kept{};
  std::array<std::uint64_t, 2> errors{};
  for (std::uint64_t n = 0; n < config.n_pairs; ++n) {
    const std::uint64_t bits = stream.next_u64();
    const int a = static_cast<int>(bits & 1U);
    const int b = static_cast<int>((bits >> 1) & 1U);
    const double u = stream.uniform();
    if (a != b) continue;
    const auto& cdf = cumulative[a][b];
    // outcome index: 0 tt, 1 tr, 2 rt, 3 rr; t is bit 0
    const int outcome = u < cdf[0] ? 0 : u < cdf[1] ? 1 : u < cdf[2] ? 2 : 3;
    const bool alice = (outcome & 2) != 0;
    const bool bob = ((outcome & 1) != 0) != flip[a];
    ++kept[a];
    if (alice != bob) ++errors[a];
  }

  ChannelKeyReport r;
  r.lambda_signal = lambda_signal;
  r.n_pairs = config.n_pairs;
  r.sifted_rect = kept[0];
  r.sifted_diag = kept[1];
  r.sifted_bits = kept[0] + kept[1];
  if (kept[0] > 0) r.qber_rect = static_cast<double>(errors[0]) / static_cast<double>(kept[0]);
  if (kept[1] > 0) r.qber_diag = static_cast<double>(errors[1]) / static_cast<double>(kept[1]);
  if (r.qber_rect && r.qber_diag) {
    r.secret_fraction = secret_fraction(*r.qber_rect, *r.qber_diag);
  }
  r.secret_bits_estimate = static_cast<double>(r.sifted_bits) * r.secret_fraction;
  return r;
}

WdmSummary wdm_aggregate(std::vector<ChannelKeyReport> reports) {
  if (reports.empty()) throw std::invalid_argument("wdm_aggregate: no channel reports");
  WdmSummary s;
  for (const auto& r : reports) {
    s.total_sifted_bits += r.sifted_bits;
    s.total_secret_bits += r.secret_bits_estimate;
  }
  s.channels = std::move(reports);
  return s;
}

nlohmann::json to_json(const ChannelKeyReport& r) {
  auto opt = [](const std::optional<double>& q) -> nlohmann::json {
    if (q) return *q;
    return nullptr;
  };
  return {{"lambda_nm", r.lambda_signal},
          {"n_pairs", r.n_pairs},
          {"sifted_bits", r.sifted_bits},
          {"sifted_rect", r.sifted_rect},
          {"sifted_diag", r.sifted_diag},
          {"qber_rect", opt(r.qber_rect)},
          {"qber_diag", opt(r.qber_diag)},
          {"secret_fraction", r.secret_fraction},
          {"secret_bits", r.secret_bits_estimate}};
}

nlohmann::json to_json(const WdmSummary& s) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& r : s.channels) channels.push_back(to_json(r));
  return {{"channels", channels},
          {"total_sifted_bits", s.total_sifted_bits},
          {"total_secret_bits", s.total_secret_bits}};
}

void write_reports_csv(std::ostream& os, const std::vector<ChannelKeyReport>& reports) {
  auto opt = [](const std::optional<double>& q) {
    return format_number(q ? *q : std::numeric_limits<double>::quiet_NaN());
  };
  os << "# units: wavelengths in nm, bits are counts over the simulated pairs\n"
     << "lambda_nm,sifted_bits,qber_rect,qber_diag,secret_fraction,secret_bits\n";
  for (const auto& r : reports) {
    os << format_number(r.lambda_signal) << ',' << r.sifted_bits << ',' << opt(r.qber_rect)
       << ',' << opt(r.qber_diag) << ',' << format_number(r.secret_fraction) << ','
       << format_number(r.secret_bits_estimate) << '\n';
  }
}

}  // namespace wdmqkd
