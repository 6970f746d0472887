#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lorasg/rng.hpp"
#include "support/quadrature.hpp"

using lorasg::rng::normal_quantile;
using lorasg::rng::Stream;

TEST_CASE("streams are reproducible and decorrelated by sequence id") {
  Stream a(42, 7);
  Stream b(42, 7);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());

  Stream c(42, 8);
  Stream d(43, 7);
  int same_c = 0;
  int same_d = 0;
  Stream a2(42, 7);
  for (int i = 0; i < 16; ++i) {
    std::uint64_t ref = a2.next_u64();
    if (c.next_u64() == ref) ++same_c;
    if (d.next_u64() == ref) ++same_d;
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("uniform01 stays strictly inside the open unit interval") {
  Stream s(1, 0);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = s.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  double mean = sum / n;
  // sd of the mean is 1/sqrt(12 n)
  CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("exponential and normal draws match their first two moments") {
  Stream s(2026, 3);
  const int n = 200000;

  double esum = 0.0;
  double esq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = s.exponential();
    REQUIRE(x > 0.0);
    esum += x;
    esq += x * x;
  }
  double emean = esum / n;
  double evar = esq / n - emean * emean;
  CHECK(std::abs(emean - 1.0) < 4.0 / std::sqrt(double(n)));
  CHECK(evar == doctest::Approx(1.0).epsilon(0.05));

  double nsum = 0.0;
  double nsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = s.normal();
    nsum += x;
    nsq += x * x;
  }
  double nmean = nsum / n;
  double nvar = nsq / n - nmean * nmean;
  CHECK(std::abs(nmean) < 4.0 / std::sqrt(double(n)));
  CHECK(nvar == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("poisson sampling is calibrated across small and large means") {
  const int n = 20000;
  int stream_id = 0;
  for (double mean : {0.5, 3.0, 15.7, 40.0, 120.0, 500.0}) {
    CAPTURE(mean);
    Stream s(77, std::uint64_t(++stream_id));
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      long k = s.poisson(mean);
      REQUIRE(k >= 0);
      sum += double(k);
      sq += double(k) * double(k);
    }
    double m = sum / n;
    double v = sq / n - m * m;
    // mean of a Poisson sample has sd sqrt(mean/n)
    CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
    CHECK(v / mean == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("poisson edge cases") {
  Stream s(5, 5);
  for (int i = 0; i < 100; ++i) CHECK(s.poisson(0.0) == 0);
  CHECK_THROWS_AS(s.poisson(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(s.poisson(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(s.poisson(HUGE_VAL), std::invalid_argument);
}

TEST_CASE("normal quantile inverts the normal cdf") {
  for (double q : {1e-9, 1e-7, 1e-3, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999,
                   1.0 - 1e-7, 1.0 - 1e-9}) {
    CAPTURE(q);
    double x = normal_quantile(q);
    CHECK(testsupport::normal_cdf(x) == doctest::Approx(q).epsilon(1e-9));
  }
  CHECK(std::abs(normal_quantile(0.5)) < 1e-14);
  CHECK(normal_quantile(1.0 - 1e-7) ==
        doctest::Approx(5.1993375823364163).epsilon(1e-10));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.2) ==
        doctest::Approx(-normal_quantile(0.8)).epsilon(1e-13));
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(-0.5), std::invalid_argument);
}
