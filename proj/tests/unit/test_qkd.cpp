#include <cmath>
#include <sstream>

#include "doctest.h"
#include "wdmqkd/angles.hpp"
#include "wdmqkd/qkd.hpp"

using namespace wdmqkd;

namespace {

ProtocolConfig config(std::uint64_t n, std::uint64_t seed = 1) {
  ProtocolConfig c;
  c.n_pairs = n;
  c.seed = seed;
  return c;
}

// Direct evaluation of 1 - h2(q) with h2 written out.
double entropy_oracle(double q) {
  if (q == 0.0 || q == 1.0) return 0.0;
  return -(q * std::log(q) + (1 - q) * std::log(1 - q)) / std::log(2.0);
}

}  // namespace

TEST_CASE("secret_fraction examples") {
  CHECK(secret_fraction(0.0, 0.0) == 1.0);
  CHECK(secret_fraction(0.5, 0.0) == 0.0);
  CHECK(secret_fraction(0.0, 0.0667) == doctest::Approx(1 - entropy_oracle(0.0667)));
  // tests/oracles/derive_values.py
  CHECK(secret_fraction(0.0, 0.0667) == doctest::Approx(0.646513766027056).epsilon(1e-12));
  CHECK(secret_fraction(1.0, 1.0) == 1.0);
  CHECK_THROWS(secret_fraction(-0.1, 0.0));
}

TEST_CASE("secret_fraction is non-increasing in each QBER") {
  for (double fixed : {0.0, 0.03, 0.1}) {
    double prev_a = 2.0, prev_b = 2.0;
    for (double q = 0.0; q <= 0.5; q += 0.001) {
      const double a = secret_fraction(q, fixed);
      const double b = secret_fraction(fixed, q);
      REQUIRE(a <= prev_a + 1e-15);
      REQUIRE(b <= prev_b + 1e-15);
      prev_a = a;
      prev_b = b;
    }
  }
}

TEST_CASE("ideal Bell state with default flips has zero QBER") {
  const auto r = run_bbm92(BiphotonPureState(1.0, 0.0), config(100000), 0);
  REQUIRE(r.qber_rect);
  REQUIRE(r.qber_diag);
  CHECK(*r.qber_rect == 0.0);
  CHECK(*r.qber_diag == 0.0);
  CHECK(r.secret_fraction == 1.0);
  CHECK(r.secret_bits_estimate == static_cast<double>(r.sifted_bits));
}

TEST_CASE("alpha = pi exposes the diagonal calibration mismatch") {
  const Source s = BiphotonPureState(1.0, kPi);
  const auto r = run_bbm92(s, config(100000), 0);
  CHECK(*r.qber_rect == 0.0);
  CHECK(*r.qber_diag == 1.0);
  const auto [flip_rect, flip_diag] = calibrate_flips(s, config(1));
  CHECK(flip_rect);
  CHECK(flip_diag);
}

TEST_CASE("f = 1.73 diagonal QBER matches the joint distribution") {
  const Source s = BiphotonPureState(1.73, 0.0);
  const auto cfg = config(100000, 8);
  const auto [q_rect, q_diag] = expected_qber(s, cfg);
  CHECK(q_rect == doctest::Approx(0.0));
  CHECK(q_diag == doctest::Approx(0.0667309474316913).epsilon(1e-12));

  const auto r = run_bbm92(s, cfg, 0);
  CHECK(*r.qber_rect == 0.0);
  const double sigma = std::sqrt(q_diag * (1 - q_diag) / r.sifted_diag);
  CHECK(std::abs(*r.qber_diag - q_diag) < 4 * sigma);
  CHECK(r.secret_fraction == doctest::Approx(0.6464).epsilon(0.02));
}

TEST_CASE("sifting ratio and QBER convergence over a parameter grid") {
  for (double f : {0.3, 1.0, 1.73}) {
    for (double alpha : {0.0, 0.7, 2.0, kPi}) {
      const Source s = BiphotonPureState(f, alpha);
      const auto cfg = config(100000, 11);
      const auto r = run_bbm92(s, cfg, 5);
      const double n = static_cast<double>(cfg.n_pairs);
      REQUIRE(std::abs(r.sifted_bits - n / 2) < 4 * std::sqrt(n / 4));
      const auto [qr, qd] = expected_qber(s, cfg);
      for (auto [sampled, expected, kept] :
           {std::tuple{*r.qber_rect, qr, r.sifted_rect}, std::tuple{*r.qber_diag, qd, r.sifted_diag}}) {
        const double sigma = std::sqrt(expected * (1 - expected) / kept);
        REQUIRE(std::abs(sampled - expected) <= 4 * sigma + 1e-15);
      }
    }
  }
}

TEST_CASE("determinism and channel independence") {
  const Source s = BiphotonPureState(1.3, 0.4);
  const auto a = run_bbm92(s, config(20000, 3), 2);
  const auto b = run_bbm92(s, config(20000, 3), 2);
  const auto c = run_bbm92(s, config(20000, 3), 4);
  CHECK(a.sifted_bits == b.sifted_bits);
  CHECK(*a.qber_diag == *b.qber_diag);
  CHECK(a.secret_bits_estimate == b.secret_bits_estimate);
  CHECK((a.sifted_bits != c.sifted_bits || *a.qber_diag != *c.qber_diag));
}

TEST_CASE("undefined QBER when a basis is never sifted") {
  const auto r = run_bbm92(BiphotonPureState(1.0, 0.0), config(1, 0), 0);
  CHECK((!r.qber_rect || !r.qber_diag));
  CHECK(r.secret_fraction == 0.0);
  CHECK(r.secret_bits_estimate == 0.0);
  CHECK_THROWS(run_bbm92(BiphotonPureState(), config(0), 0));
}

TEST_CASE("wdm_aggregate additivity") {
  ChannelKeyReport ideal;
  ideal.sifted_bits = 10000;
  ideal.qber_rect = 0.0;
  ideal.qber_diag = 0.0;
  ideal.secret_fraction = 1.0;
  ideal.secret_bits_estimate = 10000.0;
  const auto s = wdm_aggregate({ideal, ideal, ideal, ideal});
  CHECK(s.total_secret_bits == 40000.0);
  CHECK(s.channels.size() == 4);

  const auto r1 = run_bbm92(BiphotonPureState(1.0, 0.0), config(50000), 0, 870.0);
  const auto r2 = run_bbm92(BiphotonPureState(1.73, 0.0), config(50000), 1, 866.0);
  ChannelKeyReport dead = r2;
  dead.qber_diag = 0.5;
  dead.qber_rect = 0.2;
  dead.secret_fraction = secret_fraction(0.2, 0.5);
  dead.secret_bits_estimate = 0.0;
  const auto mixed = wdm_aggregate({r1, r2, dead});
  CHECK(mixed.total_secret_bits == r1.secret_bits_estimate + r2.secret_bits_estimate);
  CHECK(dead.secret_fraction == 0.0);
  CHECK_THROWS(wdm_aggregate({}));
}

TEST_CASE("report CSV header and undefined QBER") {
  ChannelKeyReport r;
  r.lambda_signal = 866.0;
  r.qber_rect = 0.0;
  std::ostringstream os;
  write_reports_csv(os, {r});
  const auto text = os.str();
  CHECK(text.find("lambda_nm,sifted_bits,qber_rect,qber_diag,secret_fraction,secret_bits\n") !=
        std::string::npos);
  CHECK(text.find("866,0,0,nan,0,0\n") != std::string::npos);
  CHECK(to_json(r)["qber_diag"].is_null());
}
