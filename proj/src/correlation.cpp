#include "wdmqkd/correlation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wdmqkd/angles.hpp"

namespace wdmqkd {
namespace {

constexpr double kDegenerateRatio = 1e-12;
// probabilities below this are rounding residue of an exact zero
constexpr double kZeroRate = 1e-14;

MeasurementSetting make_setting(Arm fixed_arm, double fixed_deg, double scanned_deg) {
  return fixed_arm == Arm::signal ? MeasurementSetting(fixed_deg, scanned_deg)
                                  : MeasurementSetting(scanned_deg, fixed_deg);
}

}  // namespace

bool is_degenerate(const SinusoidCoefficients& k) {
  return !(k.mean > kZeroRate) || 2.0 * k.amplitude() < kDegenerateRatio * k.mean;
}

namespace {

ThetaMaxResult from_coefficients(const SinusoidCoefficients& k, double theta_max) {
  ThetaMaxResult r;
  const double amp = k.amplitude();
  r.r_max = k.mean + amp;
  r.r_min = std::max(0.0, k.mean - amp);
  r.theta_max = theta_max;
  r.degenerate = is_degenerate(k);
  r.visibility = r.degenerate ? 0.0 : std::min(1.0, amp / k.mean);
  return r;
}

void verify_on_grid(const BiphotonPureState& state, double theta_s,
                    const ThetaMaxResult& r) {
  if (r.degenerate || r.visibility < 1e-6) return;
  double best_theta = 0.0;
  double best = -1.0;
  for (int k = 0; k < 18000; ++k) {
    const double ti = 0.01 * k;
    const double p = coincidence_probability(state, MeasurementSetting(theta_s, ti));
    if (p > best) {
      best = p;
      best_theta = ti;
    }
  }
  if (std::abs(signed_diff_mod180(best_theta, r.theta_max)) > 0.01 + 1e-9) {
    throw std::logic_error("find_theta_max: closed form disagrees with grid scan");
  }
}

}  // namespace

double SinusoidCoefficients::amplitude() const { return std::hypot(cos_amp, sin_amp); }

double SinusoidCoefficients::operator()(double theta_deg) const {
  const double x = deg_to_rad(2.0 * theta_deg);
  return mean + cos_amp * std::cos(x) + sin_amp * std::sin(x);
}

SinusoidCoefficients scan_coefficients(const Source& source, Arm fixed_arm,
                                       double fixed_deg) {
  std::array<double, 4> p{};
  for (int k = 0; k < 4; ++k) {
    p[k] = coincidence_probability(source, make_setting(fixed_arm, fixed_deg, 45.0 * k));
  }
  return {(p[0] + p[2]) / 2.0, (p[0] - p[2]) / 2.0, (p[1] - p[3]) / 2.0};
}

ThetaMaxResult find_theta_max(const BiphotonPureState& state, double theta_s_deg) {
  const double ts = deg_to_rad(theta_s_deg);
  const double f = state.f();
  const double s = std::sin(ts);
  const double c = std::cos(ts);
  const double norm = 1.0 + f * f;
  // rate(theta_i) = A + B cos 2theta_i + C sin 2theta_i
  const SinusoidCoefficients k{(s * s + f * f * c * c) / (2.0 * norm),
                               (s * s - f * f * c * c) / (2.0 * norm),
                               f * std::cos(state.alpha()) * std::sin(2.0 * ts) / (2.0 * norm)};
  const double theta =
      wrap(0.5 * rad_to_deg(std::atan2(f * std::cos(state.alpha()) * std::sin(2.0 * ts),
                                       s * s - f * f * c * c)),
           180.0);
  auto r = from_coefficients(k, theta);
  verify_on_grid(state, theta_s_deg, r);
  return r;
}

ThetaMaxResult find_theta_max(const ProductState& state, double theta_s_deg) {
  const auto k = scan_coefficients(Source{state}, Arm::signal, theta_s_deg);
  // sin^2(theta_i + 45) peaks at 45 regardless of the signal factor
  return from_coefficients(k, 45.0);
}

ThetaMaxResult find_theta_max(const Source& source, double theta_s_deg) {
  return std::visit([&](const auto& s) { return find_theta_max(s, theta_s_deg); },
                    source);
}

std::vector<ShiftRow> shift_table(const Source& source,
                                  const std::vector<double>& theta_s_list,
                                  double reference_deg) {
  const auto ref = find_theta_max(source, reference_deg);
  std::vector<ShiftRow> rows;
  rows.reserve(theta_s_list.size());
  for (double ts : theta_s_list) {
    ShiftRow row{ts, find_theta_max(source, ts), std::nullopt};
    if (!row.result.degenerate && !ref.degenerate) {
      row.shift = signed_diff_mod180(row.result.theta_max, ref.theta_max);
    }
    rows.push_back(row);
  }
  return rows;
}

double visibility(const Source& source, double theta_s_deg) {
  const auto r = find_theta_max(source, theta_s_deg);
  if (r.degenerate) {
    throw std::domain_error("visibility: degenerate scan at theta_s = " +
                            std::to_string(theta_s_deg));
  }
  return r.visibility;
}

double chsh_value(const Source& source, const ChshSettings& st) {
  auto e = [&](double a, double b) { return correlation_E(source, MeasurementSetting(a, b)); };
  return e(st.a, st.b) - e(st.a, st.b_prime) + e(st.a_prime, st.b) +
         e(st.a_prime, st.b_prime);
}

ChshOptimum chsh_optimize(const Source& source) {
  constexpr int kGrid = 36;
  constexpr double kStep = 5.0;
  std::array<std::array<double, kGrid>, kGrid> table{};
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      table[i][j] = correlation_E(source, MeasurementSetting(kStep * i, kStep * j));
    }
  }

  double best = -1.0;
  std::array<int, 4> arg{};
  for (int a = 0; a < kGrid; ++a) {
    for (int ap = 0; ap < kGrid; ++ap) {
      for (int b = 0; b < kGrid; ++b) {
        const double partial = table[a][b] + table[ap][b];
        for (int bp = 0; bp < kGrid; ++bp) {
          const double s = std::abs(partial - table[a][bp] + table[ap][bp]);
          if (s > best) {
            best = s;
            arg = {a, ap, b, bp};
          }
        }
      }
    }
  }

  std::array<double, 4> x{kStep * arg[0], kStep * arg[1], kStep * arg[2], kStep * arg[3]};
  auto objective = [&](const std::array<double, 4>& v) {
    return std::abs(chsh_value(source, {v[0], v[1], v[2], v[3]}));
  };
  best = objective(x);
  for (double step = kStep / 2.0; step >= 1e-4; step /= 2.0) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int d = 0; d < 4; ++d) {
        for (double dir : {1.0, -1.0}) {
          auto trial = x;
          trial[d] += dir * step;
          const double s = objective(trial);
          if (s > best) {
            best = s;
            x = trial;
            improved = true;
          }
        }
      }
    }
  }
  return {{wrap(x[0], 180.0), wrap(x[1], 180.0), wrap(x[2], 180.0), wrap(x[3], 180.0)},
          best};
}

FEstimate estimate_f(double rate_hv, double rate_vh) {
  if (!(rate_hv >= 0.0) || !(rate_vh >= 0.0)) {
    throw std::invalid_argument("estimate_f: rates must be nonnegative");
  }
  if (rate_hv == 0.0 && rate_vh == 0.0) {
    throw std::invalid_argument("estimate_f: both rates are zero");
  }
  if (rate_hv == 0.0) {
    return {std::numeric_limits<double>::infinity(), 0.0, true, false};
  }
  const double inverse = rate_vh > 0.0 ? std::sqrt(rate_hv / rate_vh)
                                       : std::numeric_limits<double>::infinity();
  return {std::sqrt(rate_vh / rate_hv), inverse, false, rate_vh == 0.0};
}

}  // namespace wdmqkd
