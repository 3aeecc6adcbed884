#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wdmqkd/biphoton.hpp"

namespace wdmqkd {

enum class Arm { signal, idler };

/// A polarizer scan at a fixed angle on one arm is exactly
///   rate(theta) = mean + cos_amp * cos(2 theta) + sin_amp * sin(2 theta)
/// in the scanned angle theta.
struct SinusoidCoefficients {
  double mean = 0.0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;

  double amplitude() const;
  double operator()(double theta_deg) const;
};

/// Coefficients of the scan over the non-fixed arm, read off from the rate at
/// scanned angles 0, 45, 90 and 135 degrees.
SinusoidCoefficients scan_coefficients(const Source& source, Arm fixed_arm,
                                       double fixed_deg);

/// Zero scan, or one flat to within rounding.
bool is_degenerate(const SinusoidCoefficients& k);

struct ThetaMaxResult {
  double theta_max = 0.0;  ///< degrees in [0, 180); meaningless if degenerate
  double r_max = 0.0;
  double r_min = 0.0;
  double visibility = 0.0;
  bool degenerate = false;
};

/// Idler angle maximizing the coincidence rate at fixed signal angle.
///
/// For the pure state this is the closed form
///   0.5 * atan2(f cos(alpha) sin(2 theta_s), sin^2 theta_s - f^2 cos^2 theta_s),
/// cross-checked against a 0.01 degree grid scan (std::logic_error on
/// disagreement). A scan whose peak-to-peak amplitude is below 1e-12 of its
/// mean, or which is identically zero, is flagged degenerate.
///
/// For the product state the rate factorizes and theta_max is the maximizer
/// of the idler factor (45 degrees) for every theta_s; degenerate is still set
/// where the signal factor vanishes (theta_s = 135).
ThetaMaxResult find_theta_max(const BiphotonPureState& state, double theta_s_deg);
ThetaMaxResult find_theta_max(const ProductState& state, double theta_s_deg);
ThetaMaxResult find_theta_max(const Source& source, double theta_s_deg);

struct ShiftRow {
  double theta_s = 0.0;
  ThetaMaxResult result;
  /// Signed minimal difference to the reference row, in (-90, 90]. Empty when
  /// either row is degenerate.
  std::optional<double> shift;
};

/// Theta_i for each signal angle, with shifts relative to theta_s =
/// `reference_deg` (which is evaluated even when absent from the list).
std::vector<ShiftRow> shift_table(const Source& source,
                                  const std::vector<double>& theta_s_list,
                                  double reference_deg = 0.0);

/// (r_max - r_min) / (r_max + r_min) of the idler scan. Throws
/// std::domain_error for a degenerate scan.
double visibility(const Source& source, double theta_s_deg);

struct ChshSettings {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
double chsh_value(const Source& source, const ChshSettings& settings);

struct ChshOptimum {
  ChshSettings settings;
  double s_max = 0.0;  ///< max |S| found
};

/// 5 degree grid over all four angles, then pattern search with step halving
/// down to 1e-4 degrees.
ChshOptimum chsh_optimize(const Source& source);

struct FEstimate {
  double f_hat = 0.0;
  double f_hat_inverse = 0.0;
  /// rate_HV == 0: f is infinite; use the label-swapped state with 1/f = 0.
  bool infinite = false;
  /// rate_VH == 0: f = 0 and its reciprocal is infinite.
  bool inverse_infinite = false;
};

/// f = sqrt(rate_VH / rate_HV) from the state weights 1/(1+f^2), f^2/(1+f^2).
/// Throws std::invalid_argument when both rates are zero or either is negative.
FEstimate estimate_f(double rate_hv, double rate_vh);

}  // namespace wdmqkd
