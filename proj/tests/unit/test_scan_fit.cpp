#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wdmqkd/angles.hpp"
#include "wdmqkd/correlation.hpp"
#include "wdmqkd/scan_fit.hpp"

using namespace wdmqkd;

namespace {

std::vector<double> grid(double step, double stop = 180.0) {
  std::vector<double> a;
  for (int k = 0; k * step <= stop + 1e-9; ++k) a.push_back(k * step);
  return a;
}

std::vector<double> model(const std::vector<double>& x, double c, double v, double t0,
                          double period) {
  std::vector<double> y;
  for (double t : x) y.push_back(c * (1 + v * std::cos(2 * kPi * (t - t0) / period)));
  return y;
}

}  // namespace

TEST_CASE("noiseless round trip") {
  const auto x = grid(10.0);
  const auto fit = fit_sinusoid(x, model(x, 100.0, 0.9, 20.0, 180.0), 180.0);
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.c / 100.0 - 1) < 1e-6);
  CHECK(std::abs(fit.v / 0.9 - 1) < 1e-6);
  CHECK(std::abs(fit.theta0 / 20.0 - 1) < 1e-6);
  CHECK(fit.chi2_reduced < 1e-12);
}

TEST_CASE("round trip over random parameters, both periods") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uc(5.0, 5000.0), uv(0.01, 1.0), ut(0.0, 1.0);
  for (double period : {180.0, 360.0}) {
    const auto x = grid(10.0, period == 180.0 ? 180.0 : 350.0);
    for (int n = 0; n < 200; ++n) {
      const double c = uc(rng), v = uv(rng), t0 = ut(rng) * period;
      const auto fit = fit_sinusoid(x, model(x, c, v, t0, period), period);
      REQUIRE(fit.converged);
      REQUIRE(std::abs(fit.c / c - 1) < 1e-6);
      REQUIRE(std::abs(fit.v / v - 1) < 1e-6);
      const double d = wrap(fit.theta0 - t0 + period / 2, period) - period / 2;
      REQUIRE(std::abs(d) < 1e-6 * std::max(1.0, t0));
    }
  }
}

TEST_CASE("canonical form and fixed point") {
  const auto x = grid(10.0);
  // negative visibility parametrization of the same curve
  const auto y = model(x, 50.0, -0.6, 30.0, 180.0);
  const auto fit = fit_sinusoid(x, y, 180.0);
  CHECK(fit.v == doctest::Approx(0.6));
  CHECK(fit.theta0 == doctest::Approx(120.0));
  CHECK(fit.theta0 >= 0.0);
  CHECK(fit.theta0 < 180.0);

  const auto refit = fit_sinusoid(x, model(x, fit.c, fit.v, fit.theta0, 180.0), 180.0);
  CHECK(std::abs(refit.c - fit.c) <= 1e-9 * fit.c);
  CHECK(std::abs(refit.v - fit.v) <= 1e-9);
  CHECK(std::abs(refit.theta0 - fit.theta0) <= 1e-9 * 180.0);
}

TEST_CASE("constant data: v near zero and phase unidentifiable") {
  const auto x = grid(10.0);
  const std::vector<double> y(x.size(), 250.0);
  const auto fit = fit_sinusoid(x, y, 180.0);
  CHECK(fit.c == doctest::Approx(250.0));
  CHECK(fit.v < 1e-9);
  CHECK((std::isinf(fit.theta0_err()) || fit.theta0_err() > 1e6));
  CHECK(std::isfinite(fit.c_err()));
}

TEST_CASE("input errors") {
  const std::vector<double> x{0, 10, 20, 30, 40};
  const std::vector<double> y{1, 2, 3, 4, 5};
  CHECK_THROWS_AS(fit_sinusoid(x, y, 180.0), std::invalid_argument);  // spans 40 < 90
  CHECK_THROWS_AS(fit_sinusoid(std::vector<double>{0, 90, 180}, std::vector<double>{1, 2, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_sinusoid(x, std::vector<double>{1, 2}, 180.0), std::invalid_argument);
}

TEST_CASE("scan_metrics") {
  FitResult f;
  f.c = 100;
  f.v = 1;
  f.theta0 = 45;
  f.converged = true;
  const auto m = scan_metrics(f);
  CHECK(m.theta_max == 45.0);
  CHECK(m.visibility == 1.0);
  f.converged = false;
  CHECK_THROWS_AS(scan_metrics(f), std::domain_error);
}

TEST_CASE("fit of a fine noiseless theory scan reproduces visibility()") {
  for (const auto& [f, alpha, ts] : {std::tuple{1.73, 0.0, 45.0}, std::tuple{1.0, kPi / 3, 45.0},
                                     std::tuple{0.6, 2.0, 20.0}, std::tuple{2.5, 0.3, 100.0}}) {
    const Source s = BiphotonPureState(f, alpha);
    const auto x = grid(1.0);
    std::vector<double> y;
    for (double ti : x) y.push_back(1e4 * coincidence_probability(s, MeasurementSetting(ts, ti)));
    const auto fit = fit_sinusoid(x, y, 180.0);
    REQUIRE(fit.converged);
    CHECK(std::abs(fit.v - visibility(s, ts)) < 1e-6);
    CHECK(std::abs(signed_diff_mod180(scan_metrics(fit).theta_max,
                                      find_theta_max(s, ts).theta_max)) < 1e-6);
  }
}

TEST_CASE("simulated f=1.73 scan peaks near 60 degrees") {
  DetectionConfig c;
  c.pair_rate = 2000.0;
  c.seed = 17;
  const auto scan = simulate_scan(BiphotonPureState(1.73, 0.0), Arm::signal, 45.0, grid(10.0), c);
  const auto fit = fit_scan(scan);
  REQUIRE(fit.converged);
  const auto m = scan_metrics(fit);
  CHECK(std::abs(m.theta_max - 59.9705982384853) < 4 * m.theta_max_err);
  CHECK(m.theta_max_err < 2.0);
}

TEST_CASE("fit result JSON fields") {
  const auto x = grid(10.0);
  const auto j = to_json(fit_sinusoid(x, model(x, 100, 0.5, 10, 180), 180));
  for (const char* key : {"c", "v", "theta0_deg", "period_deg", "c_err", "v_err",
                          "theta0_err_deg", "chi2_reduced", "converged"}) {
    CHECK(j.contains(key));
  }
}
