#pragma once

#include <array>
#include <span>

#include "json.hpp"

#include "wdmqkd/detection.hpp"

namespace wdmqkd {

/// counts(theta) = c * (1 + v * cos(2 pi (theta - theta0) / period)).
struct FitResult {
  double c = 0.0;
  double v = 0.0;
  double theta0 = 0.0;  ///< degrees in [0, period)
  /// Parameter order (c, v, theta0); theta0 in degrees.
  std::array<std::array<double, 3>, 3> covariance{};
  double chi2_reduced = 0.0;
  double period = 180.0;
  bool converged = false;
  int iterations = 0;

  double c_err() const;
  double v_err() const;
  double theta0_err() const;
  double model(double theta_deg) const;
};

/// Weighted least squares with weights 1/max(y, 1); Fourier initial guess at
/// the fit period, then damped Gauss-Newton until the relative step drops
/// below 1e-10 or 200 iterations. Returns canonical v >= 0,
/// theta0 in [0, period). Throws std::invalid_argument for fewer than four
/// points, mismatched lengths, or angles spanning less than half a period.
FitResult fit_sinusoid(std::span<const double> angles_deg, std::span<const double> values,
                       double period_deg = 180.0);

FitResult fit_scan(const ScanData& data, double period_deg = 180.0);

struct ScanMetrics {
  double theta_max = 0.0;  ///< degrees in [0, 180)
  double visibility = 0.0;
  double theta_max_err = 0.0;
  double visibility_err = 0.0;
};

/// Throws std::domain_error for an unconverged fit.
ScanMetrics scan_metrics(const FitResult& fit);

nlohmann::json to_json(const FitResult& fit);

}  // namespace wdmqkd
