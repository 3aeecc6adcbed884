#pragma once

#include <complex>
#include <variant>

namespace wdmqkd {

/// Two-photon polarization state
///   (|H>_s|V>_i + f e^{i alpha} |V>_s|H>_i) / sqrt(1 + f^2).
///
/// f is the amplitude ratio of the VH term to the HV term. The f -> infinity
/// limit is never stored; callers swap the H/V labels and use 1/f instead.
class BiphotonPureState {
 public:
  /// f = 1, alpha = 0: the maximally entangled Bell state.
  BiphotonPureState() : BiphotonPureState(1.0, 0.0) {}
  /// Throws std::invalid_argument if f is negative or not finite.
  BiphotonPureState(double f, double alpha_rad);

  static BiphotonPureState from_degrees(double f, double alpha_deg);

  double f() const { return f_; }
  /// Relative phase in [0, 2pi).
  double alpha() const { return alpha_; }
  double alpha_deg() const;

  double weight_hv() const { return 1.0 / (1.0 + f_ * f_); }
  double weight_vh() const { return f_ * f_ / (1.0 + f_ * f_); }

  bool operator==(const BiphotonPureState&) const = default;

 private:
  double f_;
  double alpha_;
};

/// The separable state (|H>_s + |V>_s)(|H>_i + |V>_i). Its coincidence
/// rate factorizes, so the maximizing idler angle does not depend on the
/// signal angle.
struct ProductState {
  bool operator==(const ProductState&) const = default;
};

using Source = std::variant<BiphotonPureState, ProductState>;

/// Polarizer angles in degrees from the vertical axis, stored modulo 180.
class MeasurementSetting {
 public:
  MeasurementSetting(double theta_s_deg, double theta_i_deg);

  double theta_s() const { return theta_s_; }
  double theta_i() const { return theta_i_; }

  /// Same setting with the signal and/or idler analyzer rotated by 90 degrees.
  MeasurementSetting orthogonal(bool signal, bool idler) const;

 private:
  double theta_s_;
  double theta_i_;
};

/// Probabilities of (signal, idler) each being transmitted (t) or found in
/// the orthogonal polarization (r).
struct JointOutcomeDistribution {
  double p_tt = 0.0;
  double p_tr = 0.0;
  double p_rt = 0.0;
  double p_rr = 0.0;

  double total() const { return p_tt + p_tr + p_rt + p_rr; }
};

std::complex<double> coincidence_amplitude(const BiphotonPureState& state,
                                           const MeasurementSetting& setting);

/// |coincidence_amplitude|^2, the normalized coincidence probability.
double coincidence_probability(const BiphotonPureState& state,
                               const MeasurementSetting& setting);
double coincidence_probability(const ProductState& state,
                               const MeasurementSetting& setting);
double coincidence_probability(const Source& source,
                               const MeasurementSetting& setting);

/// Literal three-term expanded rate; equals (1 + f^2) times the probability.
double rate_expanded_eq4(double f, double alpha_rad,
                         const MeasurementSetting& setting);

/// sin^2(theta_i + 45) sin^2(theta_s + 45). This is already normalized: the
/// four orthogonal outcomes sum to one.
double rate_product_eq6(const MeasurementSetting& setting);

JointOutcomeDistribution joint_outcome_distribution(
    const Source& source, const MeasurementSetting& setting);

/// E = p_tt + p_rr - p_tr - p_rt.
double correlation_E(const Source& source, const MeasurementSetting& setting);

}  // namespace wdmqkd
