#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wdmqkd/biphoton.hpp"

namespace wdmqkd {

/// Second harmonic of the 859.4 nm Ti:sapphire line.
inline constexpr double kDefaultPumpNm = 429.7;

struct PumpConfig {
  double lambda_pump = kDefaultPumpNm;  ///< nm

  bool operator==(const PumpConfig&) const = default;
};

/// Gaussian rate profile peak * exp(-4 ln2 (lambda - center)^2 / width^2).
struct SpectralProfile {
  double center = 0.0;  ///< nm
  double width = 0.0;   ///< FWHM, nm
  double peak = 0.0;    ///< counts/s

  double operator()(double lambda_nm) const;

  bool operator==(const SpectralProfile&) const = default;
};

/// HV and VH profiles whose rate ratio is exactly 3 at 866 nm and 1 at 870 nm.
std::pair<SpectralProfile, SpectralProfile> default_profiles();

/// Tabulated HV/VH rates keyed by signal wavelength, linearly interpolated.
class TabulatedSpectrum {
 public:
  struct Row {
    double lambda_nm;
    double rate_hv;
    double rate_vh;
  };

  /// Rows must have strictly increasing wavelengths; at least two rows.
  explicit TabulatedSpectrum(std::vector<Row> rows);

  /// CSV with header `lambda_nm,rate_hv,rate_vh`; '#' lines are comments.
  static TabulatedSpectrum load_csv(const std::filesystem::path& path);

  /// Throws std::out_of_range outside the tabulated wavelength range.
  Row at(double lambda_nm) const;

  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;
};

struct SpectralChannel {
  double lambda_signal = 0.0;  ///< nm
  double lambda_idler = 0.0;   ///< nm
  double rate_hv = 0.0;        ///< counts/s
  double rate_vh = 0.0;        ///< counts/s
  double alpha = 0.0;          ///< radians
};

enum class FConvention { ratio_as_f, ratio_as_inverse_f };

/// Energy conservation 1/lambda_p = 1/lambda_s + 1/lambda_i. Symmetric in
/// signal and idler. Throws std::invalid_argument if lambda <= lambda_pump.
double idler_wavelength(double lambda_signal_nm, const PumpConfig& pump);

/// Uniform signal-wavelength grid over [lo, hi] (a single channel sits at the
/// midpoint). Throws std::invalid_argument for an empty or unphysical range or
/// a channel where both rates vanish.
std::vector<SpectralChannel> build_channels(const SpectralProfile& hv,
                                            const SpectralProfile& vh, double alpha_rad,
                                            std::pair<double, double> lambda_range,
                                            int n_channels, const PumpConfig& pump);

std::vector<SpectralChannel> build_channels(const TabulatedSpectrum& spectrum,
                                            double alpha_rad,
                                            std::pair<double, double> lambda_range,
                                            int n_channels, const PumpConfig& pump);

/// ratio_as_f: f = sqrt(rate_VH / rate_HV); ratio_as_inverse_f: its reciprocal.
/// Throws std::domain_error when the chosen ratio has a zero denominator.
BiphotonPureState channel_state(const SpectralChannel& channel, FConvention convention);

std::string to_string(FConvention c);
FConvention parse_f_convention(const std::string& s);

}  // namespace wdmqkd
