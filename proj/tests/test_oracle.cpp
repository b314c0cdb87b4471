#include <doctest.h>

#include <cmath>
#include <random>

#include "noncoh/errors.hpp"
#include "noncoh/mi_closed.hpp"
#include "noncoh/oracle.hpp"

using namespace noncoh;

namespace {
const ChannelParams kUnit{1.0, std::nullopt};
}

TEST_CASE("integrate basics") {
  const auto r = integrate([](double x) { return std::exp(-x); }, 0.0, 5.0, QuadratureConfig{1e-14, 1000});
  CHECK(std::abs(r.value - (1.0 - std::exp(-5.0))) < 1e-14);
  CHECK(r.error_estimate >= 0.0);
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, QuadratureConfig{1e-15, 3}),
                  ToleranceNotMet);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((QuadratureConfig{0.0, 10}.validate()), DomainError);
  CHECK_THROWS_AS((QuadratureConfig{1e-8, 0}.validate()), DomainError);
  CHECK_THROWS_AS((MonteCarloConfig{0, 1}.validate()), DomainError);
}

TEST_CASE("j_quadrature examples") {
  // Single mass point at x2: J = -1 - log(x2^2 + sigma2).
  for (double x2 : {0.5, 2.0}) {
    for (double s2 : {1.0, 3.0}) {
      const ChannelParams ch{s2, std::nullopt};
      const double j = j_quadrature(x2, TwoPointInput{1.0, x2}, ch);
      CHECK(std::abs(j - (-1.0 - std::log(x2 * x2 + s2))) <= 1e-10);
    }
  }
  const TwoPointInput in{0.5, 2.0};
  const double j = j_quadrature(0.0, in, kUnit, QuadratureConfig{1e-12, 200000});
  CHECK(std::abs(j - (-1.255782641646827741)) <= 1e-11);

  // Halving the tolerance moves the value by less than the old tolerance.
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    const double a = j_quadrature(0.0, in, kUnit, QuadratureConfig{tol, 100000});
    const double b = j_quadrature(0.0, in, kUnit, QuadratureConfig{tol / 2, 100000});
    CHECK(std::abs(a - b) < tol);
  }
}

TEST_CASE("mi_quadrature examples") {
  CHECK(mi_quadrature(TwoPointInput{0.0, 2.0}, kUnit) == 0.0);
  const double i = mi_quadrature(TwoPointInput{0.4, 2.0}, kUnit, QuadratureConfig{1e-12, 200000});
  CHECK(std::abs(i - 0.216665323508380162) <= 1e-10);
  for (double c : {0.01, 4.0, 250.0}) {
    const double ic = mi_quadrature(TwoPointInput{0.4, 2.0 * std::sqrt(c)}, ChannelParams{c, std::nullopt},
                                    QuadratureConfig{1e-12, 200000});
    CHECK(std::abs(ic - i) <= 1e-10);
  }
}

TEST_CASE("direct and substituted quadrature agree") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.05, 0.95), ulx(std::log(0.2), std::log(20.0)), us(0.5, 2.0);
  const QuadratureConfig cfg{1e-12, 200000};
  for (int i = 0; i < 20; ++i) {
    const TwoPointInput in{ua(rng), std::exp(ulx(rng))};
    const ChannelParams ch{us(rng), std::nullopt};
    const double x = (i % 2 == 0) ? 0.0 : in.x2;
    CAPTURE(in.a2);
    CAPTURE(in.x2);
    CHECK(std::abs(j_quadrature(x, in, ch, cfg) - j_quadrature_direct(x, in, ch, cfg)) <= 1e-9);
  }
}

TEST_CASE("Monte Carlo agrees with the closed form") {
  const TwoPointInput in{0.5, 1.0};
  const MonteCarloEstimate e = mi_monte_carlo(in, kUnit, MonteCarloConfig{10'000'000, 42});
  const double closed = mutual_information(in, kUnit).nats;
  CHECK(e.std_error > 0.0);
  CHECK(std::abs(e.estimate - closed) <= 4.0 * e.std_error);
}

TEST_CASE("Monte Carlo near a degenerate input") {
  const MonteCarloEstimate e = mi_monte_carlo(TwoPointInput{0.999, 1.0}, kUnit, MonteCarloConfig{2000, 9});
  CHECK(std::isfinite(e.estimate));
  CHECK(std::abs(e.estimate) < 0.05);
  CHECK(mi_monte_carlo(TwoPointInput{1.0, 1.0}, kUnit, MonteCarloConfig{10, 1}).estimate == 0.0);
}

TEST_CASE("Monte Carlo is seed-deterministic") {
  const TwoPointInput in{0.3, 2.5};
  const ChannelParams ch{1.7, std::nullopt};
  const MonteCarloEstimate a = mi_monte_carlo(in, ch, MonteCarloConfig{100000, 77});
  const MonteCarloEstimate b = mi_monte_carlo(in, ch, MonteCarloConfig{100000, 77});
  const MonteCarloEstimate c = mi_monte_carlo(in, ch, MonteCarloConfig{100000, 78});
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(a.estimate != c.estimate);
}

TEST_CASE("Monte Carlo z-scores on random configurations") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ua(0.05, 0.95), ulx(std::log(0.3), std::log(10.0)), us(0.5, 2.0);
  int within = 0;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    const TwoPointInput in{ua(rng), std::exp(ulx(rng))};
    const ChannelParams ch{us(rng), std::nullopt};
    const MonteCarloEstimate e = mi_monte_carlo(in, ch, MonteCarloConfig{200000, 1000u + i});
    if (std::abs(e.estimate - mutual_information(in, ch).nats) <= 4.0 * e.std_error) ++within;
  }
  CHECK(within >= 19);
}

TEST_CASE("fd_derivative examples") {
  CHECK(std::abs(fd_derivative([](double x) { return x * x; }, 3.0) - 6.0) <= 1e-9);
  CHECK(std::abs(fd_derivative([](double x) { return x * x; }, 3.0, FdOrder::central3) - 6.0) <= 1e-9);
  CHECK(std::abs(fd_derivative([](double) { return 2.5; }, 0.7)) <= 1e-12);
  CHECK(std::abs(fd_derivative([](double x) { return std::sin(x); }, 1.0) - std::cos(1.0)) <= 1e-10);

  const double fd = fd_derivative(
      [](double a) { return mutual_information(TwoPointInput{a, 2.0}, ChannelParams{1.0, std::nullopt}).nats; }, 0.4);
  const double an = mi_derivative_a2(TwoPointInput{0.4, 2.0}, ChannelParams{1.0, std::nullopt});
  CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
}
