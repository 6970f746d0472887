#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lorasg/channel.hpp"
#include "lorasg/rng.hpp"
#include "support/quadrature.hpp"

using namespace lorasg::channel;
using lorasg::rng::Stream;

namespace {

FadingModel none_model() { return {FadingKind::None, 0.0}; }
FadingModel rayleigh_model() { return {FadingKind::Rayleigh, 0.0}; }
FadingModel lognormal_model(double sigma_db) {
  return {FadingKind::LogNormal, sigma_db};
}

}  // namespace

TEST_CASE("path gain fixtures") {
  PathLossParams pl;  // beta 3.5, kappa 0.5

  // (0.5 * 8000)^3.5 expressed in dB
  CHECK(10.0 * std::log10(path_gain(8000.0, pl)) ==
        doctest::Approx(126.07209969647869).epsilon(1e-13));

  CHECK(path_gain(2.0, pl) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(path_gain(0.0, pl) == 0.0);
  CHECK_THROWS_AS(path_gain(-1.0, pl), std::invalid_argument);
}

TEST_CASE("received power fixtures") {
  PathLossParams pl;

  // At r = 2*10^4.2 m with unit fading, 10 mW lands exactly on -137 dBm.
  double r_edge = 31697.863849222238;
  double p = received_power_mw(10.0, 1.0, r_edge, pl);
  CHECK(mw_to_dbm(p) == doctest::Approx(-137.0).epsilon(1e-12));

  // r = 0 is treated as unbounded power
  CHECK(std::isinf(received_power_mw(10.0, 1.0, 0.0, pl)));

  // fading scales linearly
  double p1 = received_power_mw(10.0, 1.0, 5000.0, pl);
  double p2 = received_power_mw(10.0, 2.5, 5000.0, pl);
  CHECK(p2 == doctest::Approx(2.5 * p1).epsilon(1e-15));
}

TEST_CASE("dbm and mw conversions round trip") {
  CHECK(dbm_to_mw(0.0) == 1.0);
  CHECK(dbm_to_mw(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(dbm_to_mw(-137.0) ==
        doctest::Approx(std::pow(10.0, -13.7)).epsilon(1e-15));
  for (double dbm : {-137.0, -121.0, -30.0, 0.0, 10.0, 27.5}) {
    CHECK(mw_to_dbm(dbm_to_mw(dbm)) == doctest::Approx(dbm).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mw_to_dbm(0.0), std::invalid_argument);
  CHECK_THROWS_AS(mw_to_dbm(-1.0), std::invalid_argument);
}

TEST_CASE("fading moments agree with independent quadrature") {
  double s = 4.0 / 7.0;

  CHECK(fading_moment(none_model(), s) == 1.0);
  CHECK(fading_moment(none_model(), 3.2) == 1.0);

  double ray = fading_moment(rayleigh_model(), s);
  CHECK(ray == doctest::Approx(0.89061773308712855).epsilon(1e-13));
  CHECK(std::abs(ray - testsupport::rayleigh_moment_quad(s)) < 1e-9);

  double ln2 = fading_moment(lognormal_model(2.0), s);
  CHECK(ln2 == doctest::Approx(0.97436580060753752).epsilon(1e-13));
  CHECK(std::abs(ln2 - testsupport::lognormal_moment_quad(2.0, s)) < 1e-9);

  for (double sv : {0.2, 4.0 / 7.0, 0.9}) {
    CAPTURE(sv);
    CHECK(std::abs(fading_moment(rayleigh_model(), sv) -
                   testsupport::rayleigh_moment_quad(sv)) < 1e-9);
    for (double sig : {1.0, 2.0, 6.0}) {
      CAPTURE(sig);
      CHECK(std::abs(fading_moment(lognormal_model(sig), sv) -
                     testsupport::lognormal_moment_quad(sig, sv)) < 1e-9);
    }
  }
}

TEST_CASE("fractional moments of mean-1 laws stay at or below one") {
  // Jensen: E[F^s] <= E[F]^s = 1 for concave x^s, s in (0,1)
  for (double sv : {0.1, 0.3, 0.5, 4.0 / 7.0, 0.8, 0.99}) {
    CAPTURE(sv);
    CHECK(fading_moment(rayleigh_model(), sv) <= 1.0 + 1e-12);
    CHECK(fading_moment(lognormal_model(2.0), sv) <= 1.0 + 1e-12);
    CHECK(fading_moment(lognormal_model(6.0), sv) <= 1.0 + 1e-12);
  }
  // s = 1 recovers the mean exactly
  CHECK(fading_moment(rayleigh_model(), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fading_moment(lognormal_model(2.0), 1.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(fading_moment(rayleigh_model(), -1.0), std::invalid_argument);
}

TEST_CASE("sampled fading matches its analytic moments") {
  const int n = 1000000;
  double s = 4.0 / 7.0;
  int stream_id = 100;
  for (const FadingModel& model :
       {none_model(), rayleigh_model(), lognormal_model(2.0)}) {
    CAPTURE(int(model.kind));
    Stream st(4242, std::uint64_t(++stream_id));
    double sum = 0.0;
    double frac = 0.0;
    for (int i = 0; i < n; ++i) {
      double f = sample_fading(model, st);
      REQUIRE(f > 0.0);
      sum += f;
      frac += std::pow(f, s);
    }
    CHECK(std::abs(sum / n - 1.0) < 0.01);
    CHECK(std::abs(frac / n - fading_moment(model, s)) < 0.005);
  }
}

TEST_CASE("fading quantiles") {
  CHECK(fading_quantile(none_model(), 0.3) == 1.0);
  CHECK(fading_quantile(none_model(), 1.0 - 1e-7) == 1.0);

  // -log(1e-7)
  CHECK(fading_quantile(rayleigh_model(), 1.0 - 1e-7) ==
        doctest::Approx(16.11809565095832).epsilon(1e-10));
  CHECK(fading_quantile(rayleigh_model(), 1.0 - std::exp(-1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK(fading_quantile(lognormal_model(2.0), 1.0 - 1e-7) ==
        doctest::Approx(9.8586129068189088).epsilon(1e-10));

  for (const FadingModel& model : {rayleigh_model(), lognormal_model(2.0)}) {
    double prev = 0.0;
    for (double q : {0.1, 0.4, 0.7, 0.9, 0.99}) {
      double v = fading_quantile(model, q);
      CHECK(v > prev);
      prev = v;
    }
  }

  CHECK_THROWS_AS(fading_quantile(rayleigh_model(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fading_quantile(rayleigh_model(), 1.0), std::invalid_argument);

  // empirical CDF at the 0.9 quantile should sit near 0.9
  Stream st(9090, 1);
  const int n = 100000;
  double q90 = fading_quantile(rayleigh_model(), 0.9);
  int below = 0;
  for (int i = 0; i < n; ++i)
    if (sample_fading(rayleigh_model(), st) <= q90) ++below;
  double phat = double(below) / n;
  CHECK(std::abs(phat - 0.9) < 4.0 * std::sqrt(0.9 * 0.1 / n));
}

TEST_CASE("antenna-height path-loss exponent") {
  CHECK(hata_exponent(30.0) == doctest::Approx(3.5224855781586215).epsilon(1e-13));
  CHECK(hata_exponent(10.0) == doctest::Approx(3.835).epsilon(1e-13));
  // 10^(9.9/6.55) meters maps back to beta = 3.5
  CHECK(hata_exponent(32.467614566743876) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK_THROWS_AS(hata_exponent(0.0), std::invalid_argument);
  CHECK_THROWS_AS(hata_exponent(-3.0), std::invalid_argument);
}

TEST_CASE("lognormal sigma conversion") {
  CHECK(lognormal_sigma_nat(2.0) ==
        doctest::Approx(2.0 * std::log(10.0) / 10.0).epsilon(1e-15));
  CHECK(lognormal_sigma_nat(0.0) == 0.0);
}

TEST_CASE("parameter validation") {
  PathLossParams pl;
  CHECK_NOTHROW(validate(pl));
  pl.beta = 2.0;
  CHECK_THROWS_AS(validate(pl), std::invalid_argument);
  pl.beta = 3.5;
  pl.kappa = 0.0;
  CHECK_THROWS_AS(validate(pl), std::invalid_argument);

  FadingModel f = lognormal_model(2.0);
  CHECK_NOTHROW(validate(f));
  f.sigma_db = -1.0;
  CHECK_THROWS_AS(validate(f), std::invalid_argument);
  f.sigma_db = std::nan("");
  CHECK_THROWS_AS(validate(f), std::invalid_argument);
  CHECK_NOTHROW(validate(rayleigh_model()));
}
