#include "wdmqkd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wdmqkd {

double SpectralProfile::operator()(double lambda_nm) const {
  const double d = (lambda_nm - center) / width;
  return peak * std::exp(-4.0 * std::numbers::ln2 * d * d);
}

std::pair<SpectralProfile, SpectralProfile> default_profiles() {
  constexpr double kWidth = 12.0;
  constexpr double kPeak = 1000.0;
  constexpr double kBalanced = 870.0;
  // ln(hv/vh) is linear in lambda for equal widths: zero at 870, ln 3 at 866
  const double sep = std::log(3.0) * kWidth * kWidth / (32.0 * std::numbers::ln2);
  return {SpectralProfile{kBalanced - sep / 2.0, kWidth, kPeak},
          SpectralProfile{kBalanced + sep / 2.0, kWidth, kPeak}};
}

TabulatedSpectrum::TabulatedSpectrum(std::vector<Row> rows) : rows_(std::move(rows)) {
  if (rows_.size() < 2) {
    throw std::invalid_argument("tabulated spectrum: need at least two rows");
  }
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const auto& r = rows_[k];
    if (!(r.rate_hv >= 0.0) || !(r.rate_vh >= 0.0)) {
      throw std::invalid_argument("tabulated spectrum: negative rate in row " +
                                  std::to_string(k + 1));
    }
    if (k > 0 && !(r.lambda_nm > rows_[k - 1].lambda_nm)) {
      throw std::invalid_argument(
          "tabulated spectrum: wavelengths must be strictly increasing (row " +
          std::to_string(k + 1) + ")");
    }
  }
}

TabulatedSpectrum TabulatedSpectrum::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectrum file " + path.string());
  std::vector<Row> rows;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "lambda_nm,rate_hv,rate_vh") {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": expected header lambda_nm,rate_hv,rate_vh");
      }
      header_seen = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    Row r{};
    std::string extra;
    if (!(fields >> r.lambda_nm >> r.rate_hv >> r.rate_vh) || (fields >> extra)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected three numeric fields");
    }
    rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error(path.string() + ": missing header");
  return TabulatedSpectrum(std::move(rows));
}

TabulatedSpectrum::Row TabulatedSpectrum::at(double lambda_nm) const {
  if (lambda_nm < rows_.front().lambda_nm || lambda_nm > rows_.back().lambda_nm) {
    throw std::out_of_range("tabulated spectrum: " + std::to_string(lambda_nm) +
                            " nm outside the tabulated range");
  }
  auto hi = std::lower_bound(rows_.begin(), rows_.end(), lambda_nm,
                             [](const Row& r, double x) { return r.lambda_nm < x; });
  if (hi->lambda_nm == lambda_nm) return *hi;
  auto lo = std::prev(hi);
  const double t = (lambda_nm - lo->lambda_nm) / (hi->lambda_nm - lo->lambda_nm);
  return {lambda_nm, std::lerp(lo->rate_hv, hi->rate_hv, t),
          std::lerp(lo->rate_vh, hi->rate_vh, t)};
}

double idler_wavelength(double lambda_signal_nm, const PumpConfig& pump) {
  if (!(pump.lambda_pump > 0.0)) {
    throw std::invalid_argument("pump wavelength must be > 0");
  }
  if (!(lambda_signal_nm > pump.lambda_pump) || !std::isfinite(lambda_signal_nm)) {
    throw std::invalid_argument("idler_wavelength: signal wavelength " +
                                std::to_string(lambda_signal_nm) +
                                " nm must exceed the pump wavelength");
  }
  return 1.0 / (1.0 / pump.lambda_pump - 1.0 / lambda_signal_nm);
}

namespace {

using RateFn = std::function<std::pair<double, double>(double)>;

std::vector<SpectralChannel> build_grid(const RateFn& rates, double alpha_rad,
                                        std::pair<double, double> range, int n,
                                        const PumpConfig& pump) {
  const auto [lo, hi] = range;
  if (n < 1) throw std::invalid_argument("build_channels: n_channels must be >= 1");
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw std::invalid_argument("build_channels: invalid wavelength range");
  }
  if (!(lo > pump.lambda_pump)) {
    throw std::invalid_argument("build_channels: range must lie above the pump wavelength");
  }
  std::vector<SpectralChannel> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double ls = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n - 1);
    const auto [hv, vh] = rates(ls);
    if (!(hv >= 0.0) || !(vh >= 0.0) || (hv == 0.0 && vh == 0.0)) {
      throw std::invalid_argument("build_channels: no pair rate at " +
                                  std::to_string(ls) + " nm");
    }
    out.push_back({ls, idler_wavelength(ls, pump), hv, vh, alpha_rad});
  }
  return out;
}

}  // namespace

std::vector<SpectralChannel> build_channels(const SpectralProfile& hv,
                                            const SpectralProfile& vh, double alpha_rad,
                                            std::pair<double, double> lambda_range,
                                            int n_channels, const PumpConfig& pump) {
  for (const auto* p : {&hv, &vh}) {
    if (!(p->width > 0.0) || !(p->peak >= 0.0)) {
      throw std::invalid_argument("spectral profile: width must be > 0 and peak >= 0");
    }
  }
  return build_grid([&](double l) { return std::pair{hv(l), vh(l)}; }, alpha_rad,
                    lambda_range, n_channels, pump);
}

std::vector<SpectralChannel> build_channels(const TabulatedSpectrum& spectrum,
                                            double alpha_rad,
                                            std::pair<double, double> lambda_range,
                                            int n_channels, const PumpConfig& pump) {
  return build_grid(
      [&](double l) {
        const auto r = spectrum.at(l);
        return std::pair{r.rate_hv, r.rate_vh};
      },
      alpha_rad, lambda_range, n_channels, pump);
}

BiphotonPureState channel_state(const SpectralChannel& ch, FConvention convention) {
  const bool direct = convention == FConvention::ratio_as_f;
  const double num = direct ? ch.rate_vh : ch.rate_hv;
  const double den = direct ? ch.rate_hv : ch.rate_vh;
  if (den == 0.0) {
    throw std::domain_error(
        "channel_state: zero denominator rate; use the other f convention");
  }
  return BiphotonPureState(std::sqrt(num / den), ch.alpha);
}

std::string to_string(FConvention c) {
  return c == FConvention::ratio_as_f ? "ratio_as_f" : "ratio_as_inverse_f";
}

FConvention parse_f_convention(const std::string& s) {
  if (s == "ratio_as_f") return FConvention::ratio_as_f;
  if (s == "ratio_as_inverse_f") return FConvention::ratio_as_inverse_f;
  throw std::invalid_argument("unknown f convention '" + s + "'");
}

}  // namespace wdmqkd
