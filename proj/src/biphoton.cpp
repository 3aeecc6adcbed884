#include "wdmqkd/biphoton.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wdmqkd/angles.hpp"

namespace wdmqkd {

BiphotonPureState::BiphotonPureState(double f, double alpha_rad)
    : f_(f), alpha_(wrap(alpha_rad, 2.0 * kPi)) {
  if (!std::isfinite(f) || f < 0.0) {
    throw std::invalid_argument("biphoton state: f must be finite and >= 0, got " +
                                std::to_string(f));
  }
  if (!std::isfinite(alpha_rad)) {
    throw std::invalid_argument("biphoton state: alpha must be finite");
  }
}

BiphotonPureState BiphotonPureState::from_degrees(double f, double alpha_deg) {
  return BiphotonPureState(f, deg_to_rad(alpha_deg));
}

double BiphotonPureState::alpha_deg() const { return rad_to_deg(alpha_); }

MeasurementSetting::MeasurementSetting(double theta_s_deg, double theta_i_deg)
    : theta_s_(wrap(theta_s_deg, 180.0)), theta_i_(wrap(theta_i_deg, 180.0)) {
  if (!std::isfinite(theta_s_deg) || !std::isfinite(theta_i_deg)) {
    throw std::invalid_argument("measurement setting: angles must be finite");
  }
}

MeasurementSetting MeasurementSetting::orthogonal(bool signal, bool idler) const {
  return {theta_s_ + (signal ? 90.0 : 0.0), theta_i_ + (idler ? 90.0 : 0.0)};
}

std::complex<double> coincidence_amplitude(const BiphotonPureState& state,
                                           const MeasurementSetting& setting) {
  const double ts = deg_to_rad(setting.theta_s());
  const double ti = deg_to_rad(setting.theta_i());
  const double hv = std::sin(ts) * std::cos(ti);
  const double vh = std::cos(ts) * std::sin(ti);
  const std::complex<double> phase = std::polar(state.f(), state.alpha());
  return (hv + phase * vh) / std::sqrt(1.0 + state.f() * state.f());
}

double coincidence_probability(const BiphotonPureState& state,
                               const MeasurementSetting& setting) {
  return std::norm(coincidence_amplitude(state, setting));
}

double coincidence_probability(const ProductState&,
                               const MeasurementSetting& setting) {
  return rate_product_eq6(setting);
}

double coincidence_probability(const Source& source,
                               const MeasurementSetting& setting) {
  return std::visit(
      [&](const auto& s) { return coincidence_probability(s, setting); }, source);
}

double rate_expanded_eq4(double f, double alpha_rad,
                         const MeasurementSetting& setting) {
  const double ts = deg_to_rad(setting.theta_s());
  const double ti = deg_to_rad(setting.theta_i());
  const double sum = std::sin(ts + ti);
  const double diff = std::sin(ts - ti);
  const double f2 = f * f;
  const double cross = 2.0 * f * std::cos(alpha_rad);
  return (1.0 + f2 + cross) / 4.0 * sum * sum +
         (1.0 + f2 - cross) / 4.0 * diff * diff + (1.0 - f2) / 2.0 * sum * diff;
}

double rate_product_eq6(const MeasurementSetting& setting) {
  const double si = std::sin(deg_to_rad(setting.theta_i() + 45.0));
  const double ss = std::sin(deg_to_rad(setting.theta_s() + 45.0));
  return si * si * ss * ss;
}

JointOutcomeDistribution joint_outcome_distribution(
    const Source& source, const MeasurementSetting& setting) {
  return {coincidence_probability(source, setting),
          coincidence_probability(source, setting.orthogonal(false, true)),
          coincidence_probability(source, setting.orthogonal(true, false)),
          coincidence_probability(source, setting.orthogonal(true, true))};
}

double correlation_E(const Source& source, const MeasurementSetting& setting) {
  const auto d = joint_outcome_distribution(source, setting);
  return d.p_tt + d.p_rr - d.p_tr - d.p_rt;
}

}  // namespace wdmqkd
