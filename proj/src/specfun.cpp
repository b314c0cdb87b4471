#include "noncoh/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "noncoh/errors.hpp"

namespace noncoh::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

// Partial sums kept for the alternating-tail acceleration.
constexpr std::size_t kAccelDepth = 16;

class AlternatingAccelerator {
 public:
  AlternatingAccelerator() {
    // Binomial weights C(M-1, j) / 2^(M-1).
    double w = 1.0;
    for (std::size_t j = 0; j < kAccelDepth; ++j) {
      weights_[j] = w;
      w = w * static_cast<double>(kAccelDepth - 1 - j) / static_cast<double>(j + 1);
    }
    const double norm = std::ldexp(1.0, -static_cast<int>(kAccelDepth - 1));
    for (auto& x : weights_) x *= norm;
  }

  void reset() { count_ = 0; }

  void push(double partial_sum) {
    sums_[count_ % kAccelDepth] = partial_sum;
    ++count_;
  }

  bool ready() const { return count_ >= kAccelDepth; }

  // Iterated pairwise average of the last kAccelDepth partial sums.
  double estimate() const {
    double e = 0.0;
    for (std::size_t j = 0; j < kAccelDepth; ++j) {
      e += weights_[j] * sums_[(count_ - 1 - j) % kAccelDepth];
    }
    return e;
  }

 private:
  std::array<double, kAccelDepth> weights_{};
  std::array<double, kAccelDepth> sums_{};
  std::size_t count_ = 0;
};

}  // namespace

void SpecfunConfig::validate() const {
  if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw DomainError("SpecfunConfig: abs_tol must lie in (0, 1)");
  if (max_terms < 1) throw DomainError("SpecfunConfig: max_terms must be >= 1");
  if (!(transform_threshold > 0.0 && transform_threshold < 1.0)) {
    throw DomainError("SpecfunConfig: transform_threshold must lie in (0, 1)");
  }
}

double pochhammer(double a, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r *= a + static_cast<double>(i);
  return r;
}

SeriesResult hyp_pfq(std::span<const double> numer, std::span<const double> denom, double z,
                     const SpecfunConfig& cfg) {
  cfg.validate();
  const std::size_t p = numer.size();
  const std::size_t q = denom.size();

  const bool terminating = std::any_of(numer.begin(), numer.end(), is_nonpositive_integer);
  if (!terminating && z != 0.0) {
    if (p > q + 1) throw DivergenceError("pFq: p > q+1 series diverges for z != 0");
    if (p == q + 1 && std::abs(z) > 1.0) throw DivergenceError("pFq: p = q+1 series diverges for |z| > 1");
  }
  if (z == 0.0) return {1.0, 1, 0.0};

  // Past this index every (param + k) is positive, so term ratios have a
  // fixed sign and the magnitude trend is settled.
  double max_param = 0.0;
  for (double v : numer) max_param = std::max(max_param, std::abs(v));
  for (double v : denom) max_param = std::max(max_param, std::abs(v));
  const std::size_t settled_after = static_cast<std::size_t>(std::ceil(max_param)) + 1;

  const double rho_inf = (p == q + 1) ? std::abs(z) : 0.0;
  const bool accelerate = (p == q + 1) && z <= -0.5;

  AlternatingAccelerator accel;
  double term = 1.0;
  double sum = 1.0;
  double max_abs_sum = 1.0;
  double prev_estimate = std::numeric_limits<double>::quiet_NaN();
  int accel_hits = 0;

  for (std::size_t k = 0;; ++k) {
    if (k + 1 >= cfg.max_terms) {
      throw NoConvergence("pFq: max_terms (" + std::to_string(cfg.max_terms) + ") reached, z = " +
                          std::to_string(z));
    }
    const double kd = static_cast<double>(k);
    double ratio = z / (kd + 1.0);
    for (double v : numer) {
      if (v + kd == 0.0) return {sum, k + 1, 0.0};  // polynomial: exact
      ratio *= v + kd;
    }
    for (double v : denom) {
      if (v + kd == 0.0) throw DomainError("pFq: denominator parameter is a nonpositive integer");
      ratio /= v + kd;
    }
    term *= ratio;
    sum += term;
    max_abs_sum = std::max(max_abs_sum, std::abs(sum));
    const std::size_t used = k + 2;

    if (!std::isfinite(sum)) throw NoConvergence("pFq: partial sum overflowed");
    if (used < settled_after) continue;

    const double rho = std::max(std::abs(ratio), rho_inf);
    const double at = std::abs(term);
    if (rho < 1.0 && at <= cfg.abs_tol) {
      // Alternating tails are bounded by the next term; monotone ones by the
      // geometric majorant.
      const double bound = (z < 0.0) ? at * rho : at * rho / (1.0 - rho);
      if (bound <= cfg.abs_tol) return {sum, used, bound};
    }

    if (accelerate) {
      accel.push(sum);
      if (accel.ready()) {
        const double e = accel.estimate();
        const double floor = 32.0 * kEps * max_abs_sum;
        const double diff = std::abs(e - prev_estimate);
        if (diff <= std::max(cfg.abs_tol, floor)) {
          if (++accel_hits >= 2) return {e, used, diff};
        } else {
          accel_hits = 0;
        }
        prev_estimate = e;
      }
    }
  }
}

SeriesResult gauss_2f1_series(double a, double b, double c, double z, const SpecfunConfig& cfg) {
  cfg.validate();
  if (!(z < 1.0)) throw DomainError("2F1: z must be < 1 (branch cut [1, inf))");
  if (is_nonpositive_integer(c)) throw DomainError("2F1: c is a nonpositive integer");

  if (std::abs(z) <= cfg.transform_threshold || z > 0.0) {
    const std::array<double, 2> num{a, b};
    const std::array<double, 1> den{c};
    return hyp_pfq(num, den, z, cfg);
  }

  // Pfaff: 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))
  //                     = (1-z)^-b 2F1(c-a, b; c; z/(z-1)).
  // Keep the positive, smaller numerator in place: the transformed
  // coefficients then decay like k^(a-b-1).
  const double zeta = z / (z - 1.0);
  const bool keep_a = (b <= 0.0) || (a > 0.0 && a < b);
  const std::array<double, 2> num = keep_a ? std::array<double, 2>{a, c - b} : std::array<double, 2>{c - a, b};
  const std::array<double, 1> den{c};
  const double prefactor = std::pow(1.0 - z, keep_a ? -a : -b);
  SeriesResult s = hyp_pfq(num, den, zeta, cfg);
  s.value *= prefactor;
  s.truncation_bound *= std::abs(prefactor);
  return s;
}

double gauss_2f1(double a, double b, double c, double z, const SpecfunConfig& cfg) {
  return gauss_2f1_series(a, b, c, z, cfg).value;
}

double digamma(double x) {
  if (is_nonpositive_integer(x)) throw PoleError("digamma: pole at nonpositive integer");
  if (x < 0.0) {
    // psi(x) = psi(1 - x) - pi cot(pi x)
    return digamma(1.0 - x) - pi * cos_pi(x) / sin_pi(x);
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double x2 = inv * inv;
  // Bernoulli-number asymptotic expansion; the x^-14 term is ~1e-15 at x = 10.
  const double tail =
      x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 * (1.0 / 132 - x2 * (691.0 / 32760 - x2 / 12))))));
  return shift + std::log(x) - 0.5 * inv - tail;
}

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 4.0 * kEps) return h;
  }
  throw NoConvergence("incomplete_beta: continued fraction did not converge");
}

// B_x(a, b) for 0 < x < 1, a > 0, any real b.
double incomplete_beta_unit(double x, double a, double b) {
  const bool reflect = b > 0.0 && (a + b + 2.0) > 0.0 && x > (a + 1.0) / (a + b + 2.0);
  if (reflect) {
    const double complete = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    const double y = 1.0 - x;
    return complete - std::pow(y, b) * std::pow(x, a) / b * beta_continued_fraction(b, a, y);
  }
  return std::pow(x, a) * std::pow(1.0 - x, b) / a * beta_continued_fraction(a, b, x);
}

}  // namespace

double incomplete_beta(double z, double b, double one_minus_a) {
  if (!(b > 0.0)) throw DomainError("incomplete_beta: b must be > 0");
  if (!(z < 1.0)) throw DomainError("incomplete_beta: z must be < 1");
  if (z == 0.0) return 0.0;
  if (z > 0.0) return incomplete_beta_unit(z, b, one_minus_a);
  // int_0^X s^(b-1) (1+s)^(-a) ds with s = u/(1-u) becomes B_u(b, a-b).
  const double big_x = -z;
  const double u = big_x / (1.0 + big_x);
  const double a = 1.0 - one_minus_a;
  return incomplete_beta_unit(u, b, a - b);
}

double log_partial_sum(double q, int n) {
  double sum = 0.0;
  double power = 1.0;
  for (int k = 1; k <= n; ++k) {
    power *= q;
    const double t = power / k;
    sum += (k % 2 == 1) ? t : -t;
  }
  return sum;
}

double sin_pi(double x) {
  double r = std::remainder(x, 2.0);  // exact, in [-1, 1]
  if (r > 0.5) {
    r = 1.0 - r;
  } else if (r < -0.5) {
    r = -1.0 - r;
  }
  return std::sin(pi * r);
}

double cos_pi(double x) {
  const double r = std::abs(std::remainder(x, 2.0));
  return sin_pi(0.5 - r);
}

}  // namespace noncoh::specfun
