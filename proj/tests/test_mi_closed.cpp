#include <doctest.h>

#include <cmath>
#include <random>

#include "noncoh/capacity.hpp"
#include "noncoh/errors.hpp"
#include "noncoh/mi_closed.hpp"
#include "noncoh/oracle.hpp"
#include "noncoh/verify.hpp"

using namespace noncoh;

namespace {

const ChannelParams kUnit{1.0, std::nullopt};
const QuadratureConfig kOracle{1e-12, 200000};

double hb(double a) { return -a * std::log(a) - (1.0 - a) * std::log1p(-a); }

struct Frozen {
  bool at_x2;
  double a2, x2, sigma2, j;
};

// High-precision reference values of J(x).
const Frozen kFrozen[] = {
    {true, 0.5, 1.0, 1.0, -1.738375928117726082},
    {true, 0.9, 1.0, 1.0, -1.694818871175940224},
    {false, 0.5, 2.0, 1.0, -1.255782641646827741},
    {false, 0.3, 3.0, 2.0, -1.832580270782705827},
    {false, 0.9, 1.0, 1.0, -1.161418583864181465},
};

}  // namespace

TEST_CASE("frozen J values") {
  for (const Frozen& f : kFrozen) {
    const TwoPointInput in{f.a2, f.x2};
    const ChannelParams ch{f.sigma2, std::nullopt};
    const double x = f.at_x2 ? f.x2 : 0.0;
    CAPTURE(f.a2);
    CAPTURE(f.x2);
    CHECK(std::abs(j_closed(x, in, ch).value - f.j) <= 1e-13);
    CHECK(std::abs(j_case3(x, in, ch) - f.j) <= 1e-13);
    CHECK(std::abs(j_quadrature(x, in, ch, kOracle) - f.j) <= 1e-10);
  }
}

TEST_CASE("j_case1 examples") {
  // alpha = 1 at x = x2 = sigma.
  for (double a2 : {0.5, 0.9}) {
    const TwoPointInput in{a2, 1.0};
    const double oracle = j_quadrature(1.0, in, kUnit, kOracle);
    CHECK(std::abs(j_case1(1.0, in, kUnit) - oracle) <= 1e-8);
    CHECK(std::abs(j_case1(1.0, in, kUnit) - j_case3(1.0, in, kUnit)) <= 1e-8);
  }
  // alpha = 1/2 at x = 0: routed to Case I.
  const JResult r = j_closed(0.0, TwoPointInput{0.5, 1.0}, kUnit);
  CHECK(r.diagnostics.route == JCase::CaseI);
  CHECK_THROWS_AS(j_case1(0.0, TwoPointInput{0.5, 2.0}, kUnit), CaseMismatch);
}

TEST_CASE("j_case2 examples") {
  CHECK_THROWS_AS(j_case2(0.0, TwoPointInput{0.5, 1.0}, kUnit), CaseMismatch);
  const TwoPointInput a{0.5, 2.0};
  CHECK(std::abs(j_case2(0.0, a, kUnit) - j_quadrature(0.0, a, kUnit, kOracle)) <= 1e-8);
  const TwoPointInput b{0.3, 3.0};
  const ChannelParams ch2{2.0, std::nullopt};
  CHECK(std::abs(j_case2(0.0, b, ch2) - j_quadrature(0.0, b, ch2, kOracle)) <= 1e-8);
}

TEST_CASE("j_case2 refuses the guard band") {
  const double x2 = std::sqrt(0.5 + 1e-7);
  CHECK_THROWS_AS(j_case2(x2, TwoPointInput{0.2, x2}, kUnit), NearSingularAlpha);
}

TEST_CASE("j_case3 examples") {
  const TwoPointInput a{0.9, 1.0};
  CHECK(std::abs(j_case3(0.0, a, kUnit) - j_quadrature(0.0, a, kUnit, kOracle)) <= 1e-8);
  CHECK(std::abs(j_case3(1.0, a, kUnit) - j_quadrature(1.0, a, kUnit, kOracle)) <= 1e-8);
  // beta = 0.2 < 1: still valid by continuation.
  const TwoPointInput b{0.5, 2.0};
  CHECK(std::abs(j_case3(0.0, b, kUnit) - j_quadrature(0.0, b, kUnit, kOracle)) <= 1e-8);
}

TEST_CASE("mutual_information examples") {
  CHECK(mutual_information(TwoPointInput{0.0, 3.0}, kUnit).nats == 0.0);
  CHECK(mutual_information(TwoPointInput{1.0, 3.0}, kUnit).nats == 0.0);
  CHECK(mutual_information(TwoPointInput{0.4, 0.0}, kUnit).nats == 0.0);
  CHECK(mutual_information(TwoPointInput{0.0, 3.0}, kUnit).diagnostics.degenerate);

  const TwoPointInput in{0.4, 2.0};
  const double i = mutual_information(in, kUnit).nats;
  CHECK(std::abs(i - mi_quadrature(in, kUnit, kOracle)) <= 1e-7);
  CHECK(std::abs(i - 0.216665323508380162) <= 1e-13);
  CHECK(std::abs(mutual_information(TwoPointInput{0.5, 1.0}, kUnit).nats - 0.053781946088294561) <= 1e-13);

  const double far = mutual_information(TwoPointInput{0.3, 1000.0}, kUnit).nats;
  CHECK(std::abs(far - hb(0.3)) <= 2e-3);
}

TEST_CASE("entropies") {
  CHECK(input_entropy(TwoPointInput{0.5, 1.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(input_entropy(TwoPointInput{0.0, 1.0}) == 0.0);
  CHECK(input_entropy(TwoPointInput{1.0, 1.0}) == 0.0);
  CHECK(input_entropy(TwoPointInput{0.3, 1.0}) == doctest::Approx(0.6108643020548935).epsilon(1e-14));

  CHECK(conditional_entropy(TwoPointInput{0.0, 2.0}, kUnit) == 0.0);
  const TwoPointInput in{0.4, 2.0};
  const double hxy = conditional_entropy(in, kUnit);
  CHECK(hxy >= 0.0);
  CHECK(std::abs(hxy - (hb(0.4) - mi_quadrature(in, kUnit, kOracle))) <= 1e-7);

  double prev = INFINITY;
  for (double x2 : {10.0, 100.0, 1e3, 1e4}) {
    const double h = conditional_entropy(TwoPointInput{0.5, x2}, kUnit);
    CHECK(h < prev);
    prev = h;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("continuation examples") {
  CHECK(std::abs(continuation_residual(1.7, 0.4)) <= 1e-8);
  CHECK(std::abs(continuation_residual(0.37, 2.5)) <= 1e-8);
  CHECK(std::abs(continuation_residual(3.2, 1.0)) <= 1e-8);
  CHECK_THROWS_AS(continuation_residual(0.5 + 1e-7, 0.3), NearSingularAlpha);
}

TEST_CASE("continuation grid") {
  double worst = 0.0;
  for (const auto& [a, b] : continuation_grid()) worst = std::max(worst, std::abs(continuation_residual(a, b)));
  CHECK(continuation_grid().size() == 100);
  CHECK(worst <= 1e-8);
}

TEST_CASE("psi-function identity") {
  for (double a : identity_alphas()) {
    CAPTURE(a);
    CHECK(std::abs(psi_identity_residual(a)) <= 1e-8);
  }
  CHECK_THROWS_AS(psi_identity_residual(1.0 / 3.0 + 1e-8), NearSingularAlpha);
}

TEST_CASE("route consistency between Case II and Case III") {
  int compared = 0;
  for (double a2 : {0.1, 0.3, 0.5, 0.7}) {
    for (double x2 : {0.4, 0.9, 1.6, 3.0, 7.0}) {
      const TwoPointInput in{a2, x2};
      for (double x : {0.0, x2}) {
        const DerivedParams d = derive_params(x, in, kUnit);
        if (d.route == JCase::CaseI || d.near_singular) continue;
        CAPTURE(a2);
        CAPTURE(x2);
        CAPTURE(x);
        double j2;
        try {
          j2 = j_case2(x, in, kUnit);
        } catch (const NearSingularAlpha&) {
          continue;
        }
        CHECK(std::abs(j2 - j_case3(x, in, kUnit)) <= 1e-8);
        ++compared;
      }
    }
  }
  CHECK(compared > 30);
}

TEST_CASE("bounds on a grid") {
  for (double a2 = 0.02; a2 < 0.99; a2 += 0.08) {
    for (double x2 = 0.1; x2 < 40.0; x2 *= 1.7) {
      const double i = mutual_information(TwoPointInput{a2, x2}, kUnit).nats;
      CAPTURE(a2);
      CAPTURE(x2);
      CHECK(i >= 0.0);
      CHECK(i <= std::min(hb(a2), std::log(2.0)) + 1e-12);
    }
  }
}

TEST_CASE("monotone approach to the input entropy") {
  double prev = -1.0;
  for (double x2 : {1.0, 10.0, 100.0, 1000.0}) {
    const double i = mutual_information(TwoPointInput{0.3, x2}, kUnit).nats;
    CHECK(i > prev);
    CHECK(i < hb(0.3));
    prev = i;
  }
  double gap = INFINITY;
  for (double x2 : {10.0, 100.0, 1000.0}) {
    const double g = std::abs(mutual_information(TwoPointInput{0.3, x2}, kUnit).nats - hb(0.3));
    CHECK(g < gap);
    gap = g;
  }
  CHECK(gap <= 2e-3);
}

TEST_CASE("Case I is bracketed by Case II at alpha = 1/n +- 1e-4") {
  const double a2 = 0.3;
  for (int n : {1, 2, 3}) {
    const double xc = std::sqrt(1.0 / n);
    const TwoPointInput in_c{a2, xc};
    const double jc = j_case1(xc, in_c, kUnit);
    double side[2];
    int k = 0;
    for (double d : {-1e-4, 1e-4}) {
      const double xs = std::sqrt(1.0 / n + d);
      const TwoPointInput in{a2, xs};
      const double closed = j_case2(xs, in, kUnit);
      const double quad = j_quadrature(xs, in, kUnit, kOracle);
      CHECK(std::abs(closed - quad) <= 1e-9);
      side[k++] = quad;
    }
    CAPTURE(n);
    CHECK(std::min(side[0], side[1]) < jc);
    CHECK(jc < std::max(side[0], side[1]));
    CHECK(std::abs(jc - j_quadrature(xc, in_c, kUnit, kOracle)) <= 1e-9);
  }
}

TEST_CASE("near 1/n the pole-cancelled form matches quadrature") {
  for (int n : {1, 2, 3, 5}) {
    for (double d : {-3e-2, -1e-6, -2e-9, 3e-9, 4e-6, 2e-2}) {
      const double x2 = std::sqrt(1.0 / n + d);
      const TwoPointInput in{0.25, x2};
      const JResult r = j_closed(x2, in, kUnit);
      CAPTURE(n);
      CAPTURE(d);
      CHECK_FALSE(r.diagnostics.fallback);
      CHECK(std::abs(r.value - j_quadrature(x2, in, kUnit, kOracle)) <= 1e-9);
    }
  }
}

TEST_CASE("derivative examples") {
  const TwoPointInput in{0.4, 2.0};
  const double analytic = mi_derivative_a2(in, kUnit);
  const double fd = fd_derivative([&](double a) { return mutual_information(TwoPointInput{a, 2.0}, kUnit).nats; },
                                  0.4, FdOrder::central5);
  CHECK(std::abs(analytic - fd) <= 1e-5 * std::abs(fd));

  // Signs around the single interior maximum at 5 dB.
  const double snr5 = snr_from_db(5.0);
  CHECK(mi_derivative_at_snr(0.1, snr5).value > 0.0);
  CHECK(mi_derivative_at_snr(0.9, snr5).value < 0.0);

  // Zero at the solved optimum for SNR = 1.
  const CapacityPoint p = solve_a2_star(1.0, SweepConfig{});
  CHECK(std::abs(mi_derivative_at_snr(p.a2_star, 1.0).value) <= 1e-9);

  CHECK_THROWS_AS(mi_derivative_a2(TwoPointInput{0.0, 2.0}, kUnit), DegenerateInput);
  CHECK_THROWS_AS(mi_derivative_a2(TwoPointInput{1.0, 2.0}, kUnit), DegenerateInput);
}

TEST_CASE("derivative in capacity mode via the power budget") {
  // x2^2 = P/a2 when a power budget is present.
  const ChannelParams ch{1.0, 3.0};
  const double a2 = 0.35;
  const double with_budget = mi_derivative_a2(TwoPointInput{a2, 123.0}, ch);
  CHECK(std::abs(with_budget - mi_derivative_at_snr(a2, 3.0).value) <= 1e-12 * std::abs(with_budget));
}

TEST_CASE("derivative against finite differences on random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(0.05, 0.95), ulx(std::log(0.3), std::log(10.0));
  for (int i = 0; i < 25; ++i) {
    const double a2 = ua(rng);
    const double x2 = std::exp(ulx(rng));
    const double analytic = mi_derivative_a2(TwoPointInput{a2, x2}, kUnit);
    const double fd = fd_derivative(
        [&](double a) { return mutual_information(TwoPointInput{a, x2}, kUnit).nats; }, a2, FdOrder::central5);
    CAPTURE(a2);
    CAPTURE(x2);
    CHECK(std::abs(analytic - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
  }
}
