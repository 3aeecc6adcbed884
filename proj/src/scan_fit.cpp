#include "wdmqkd/scan_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wdmqkd/angles.hpp"

namespace wdmqkd {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;

struct Problem {
  std::span<const double> x;
  std::span<const double> y;
  std::vector<double> weight;
  double omega;  // radians per degree of scan angle

  double cost(const Eigen::Vector3d& p) const {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double r = y[k] - p[0] * (1.0 + p[1] * std::cos(omega * (x[k] - p[2])));
      s += weight[k] * r * r;
    }
    return s;
  }

  // Normal matrix J^T W J and gradient J^T W r at p.
  void linearize(const Eigen::Vector3d& p, Eigen::Matrix3d& h, Eigen::Vector3d& g) const {
    h.setZero();
    g.setZero();
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double phase = omega * (x[k] - p[2]);
      const double cs = std::cos(phase);
      const double r = y[k] - p[0] * (1.0 + p[1] * cs);
      const Eigen::Vector3d j(1.0 + p[1] * cs, p[0] * cs, p[0] * p[1] * omega * std::sin(phase));
      h.noalias() += weight[k] * j * j.transpose();
      g.noalias() += weight[k] * r * j;
    }
  }
};

Eigen::Matrix3d covariance_of(const Eigen::Matrix3d& h) {
  Eigen::FullPivLU<Eigen::Matrix3d> lu(h);
  lu.setThreshold(1e-14);
  if (lu.isInvertible()) return lu.inverse();
  // unidentifiable direction (e.g. phase at v = 0): report unbounded variance
  Eigen::Matrix3d cov = Eigen::Matrix3d::Constant(std::numeric_limits<double>::infinity());
  const Eigen::Matrix2d sub = h.topLeftCorner<2, 2>();
  Eigen::FullPivLU<Eigen::Matrix2d> lu2(sub);
  if (lu2.isInvertible()) cov.topLeftCorner<2, 2>() = lu2.inverse();
  return cov;
}

}  // namespace

double FitResult::c_err() const { return std::sqrt(covariance[0][0]); }
double FitResult::v_err() const { return std::sqrt(covariance[1][1]); }
double FitResult::theta0_err() const { return std::sqrt(covariance[2][2]); }

double FitResult::model(double theta_deg) const {
  return c * (1.0 + v * std::cos(2.0 * kPi * (theta_deg - theta0) / period));
}

FitResult fit_sinusoid(std::span<const double> angles, std::span<const double> values,
                       double period) {
  if (angles.size() != values.size()) {
    throw std::invalid_argument("fit: angles and values differ in length");
  }
  if (angles.size() < 4) throw std::invalid_argument("fit: need at least four points");
  if (!(period > 0.0)) throw std::invalid_argument("fit: period must be > 0");
  const auto [lo, hi] = std::minmax_element(angles.begin(), angles.end());
  if (*hi - *lo < period / 2.0) {
    throw std::invalid_argument("fit: scan spans less than half a period");
  }

  Problem prob{angles, values, {}, 2.0 * kPi / period};
  prob.weight.reserve(values.size());
  for (double y : values) prob.weight.push_back(1.0 / std::max(y, 1.0));

  // discrete Fourier component at the fit period
  const double n = static_cast<double>(angles.size());
  double mean = 0.0, re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    mean += values[k];
    re += values[k] * std::cos(prob.omega * angles[k]);
    im += values[k] * std::sin(prob.omega * angles[k]);
  }
  mean /= n;
  re *= 2.0 / n;
  im *= 2.0 / n;
  Eigen::Vector3d p(mean, mean != 0.0 ? std::hypot(re, im) / mean : 0.0,
                    std::atan2(im, re) / prob.omega);

  FitResult fit;
  fit.period = period;
  double cost = prob.cost(p);
  double lambda = 1e-3;
  Eigen::Matrix3d h;
  Eigen::Vector3d g;
  for (fit.iterations = 0; fit.iterations < kMaxIterations; ++fit.iterations) {
    prob.linearize(p, h, g);
    const double floor = 1e-15 * std::max(h.trace(), 1e-300);
    bool accepted = false;
    Eigen::Vector3d step;
    while (lambda < 1e16) {
      Eigen::Matrix3d damped = h;
      for (int d = 0; d < 3; ++d) damped(d, d) += lambda * std::max(h(d, d), floor);
      step = damped.ldlt().solve(g);
      const double trial = prob.cost(p + step);
      if (std::isfinite(trial) && trial <= cost) {
        p += step;
        cost = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // no descent direction left: at the optimum to working precision
      fit.converged = true;
      break;
    }
    if (step.norm() <= kStepTolerance * (p.norm() + kStepTolerance)) {
      fit.converged = true;
      break;
    }
  }

  prob.linearize(p, h, g);
  Eigen::Matrix3d cov = covariance_of(h);
  if (p[1] < 0.0) {
    p[1] = -p[1];
    p[2] += period / 2.0;
    // v -> -v flips the sign of its covariances
    cov.row(1) *= -1.0;
    cov.col(1) *= -1.0;
  }
  p[2] = wrap(p[2], period);

  fit.c = p[0];
  fit.v = p[1];
  fit.theta0 = p[2];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) fit.covariance[r][c] = cov(r, c);
  fit.chi2_reduced = n > 3.0 ? cost / (n - 3.0) : 0.0;
  return fit;
}

FitResult fit_scan(const ScanData& data, double period) {
  std::vector<double> values(data.counts.begin(), data.counts.end());
  return fit_sinusoid(data.angles, values, period);
}

ScanMetrics scan_metrics(const FitResult& fit) {
  if (!fit.converged) throw std::domain_error("scan_metrics: fit did not converge");
  return {wrap(fit.theta0, 180.0), fit.v, fit.theta0_err(), fit.v_err()};
}

nlohmann::json to_json(const FitResult& fit) {
  auto num = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  return {{"c", num(fit.c)},
          {"v", num(fit.v)},
          {"theta0_deg", num(fit.theta0)},
          {"period_deg", fit.period},
          {"c_err", num(fit.c_err())},
          {"v_err", num(fit.v_err())},
          {"theta0_err_deg", num(fit.theta0_err())},
          {"chi2_reduced", num(fit.chi2_reduced)},
          {"converged", fit.converged}};
}

}  // namespace wdmqkd
