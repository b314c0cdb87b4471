#include "noncoh/mi_closed.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "detail.hpp"
#include "noncoh/errors.hpp"

namespace noncoh {

namespace sf = specfun;

namespace detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Taylor coefficients of x/sin(x) - 1 in powers x^2, x^4, ...
constexpr std::array<double, 5> kCscSeries{1.0 / 6, 7.0 / 360, 31.0 / 15120, 127.0 / 604800, 73.0 / 3421440};
constexpr double kCscSeriesLimit = 0.05;

}  // namespace

double csc_minus_pole(double r) {
  if (std::abs(r) < kCscSeriesLimit) {
    const double x = sf::pi * r;
    const double x2 = x * x;
    double s = 0.0;
    for (auto it = kCscSeries.rbegin(); it != kCscSeries.rend(); ++it) s = s * x2 + *it;
    return sf::pi * x * s;
  }
  return sf::pi / sf::sin_pi(r) - 1.0 / r;
}

double csc_minus_pole_dr(double r) {
  if (std::abs(r) < kCscSeriesLimit) {
    const double x = sf::pi * r;
    const double x2 = x * x;
    double s = 0.0;
    for (int k = static_cast<int>(kCscSeries.size()); k >= 1; --k) s = s * x2 + kCscSeries[k - 1] * (2 * k - 1);
    return sf::pi * sf::pi * s;
  }
  const double sn = sf::sin_pi(r);
  return 1.0 / (r * r) - sf::pi * sf::pi * sf::cos_pi(r) / (sn * sn);
}

double sin_pi_q(const JPoint& p) {
  const double s = sf::sin_pi(p.r);
  return (p.n % 2 == 0) ? s : -s;
}

double pole_minus_alpha(const JPoint& p) {
  const double lb = std::log(p.beta);
  if (p.q < 0.01) return p.alpha * std::expm1(p.q * lb + log_sinc_ratio(p.q));
  return sf::pi * std::exp(p.q * lb) / sin_pi_q(p) - p.alpha;
}

double log_sinc_ratio(double q) {
  const double x = sf::pi * q;
  if (std::abs(q) < 0.01) {
    const double x2 = x * x;
    return x2 * (1.0 / 6 + x2 * (1.0 / 180 + x2 * (1.0 / 2835 + x2 / 37800)));
  }
  return std::log(x / std::sin(x));
}

double log_sinc_ratio_dq(double q) {
  const double x = sf::pi * q;
  if (std::abs(q) < 0.01) {
    const double x2 = x * x;
    return sf::pi * x * (1.0 / 3 + x2 * (1.0 / 45 + x2 * (2.0 / 945 + x2 / 4725)));
  }
  return 1.0 / q - sf::pi * sf::cos_pi(q) / sf::sin_pi(q);
}

double j_case1_n(const JPoint& p) {
  const int n = p.n;
  const double b = p.beta;
  double sum = 0.0;
  double pw = 1.0;  // (-beta)^(n-k), k running down from n
  for (int k = n; k >= 1; --k) {
    sum += pw / k;
    pw *= -b;
  }
  // pw == (-beta)^n now
  const double j13 = (1.0 - pw) * std::log1p(1.0 / b) - sum;
  return -p.wn / p.vn + std::log(p.a2) - p.log_vn + j13;
}

JValue j_case2_n(const JPoint& p, const sf::SpecfunConfig& sc) {
  // h = (alpha - 1)/alpha; for x = 0 this is -sigma2/x2^2 exactly.
  const double h = p.at_x2 ? 1.0 - p.q : -1.0 / p.r2;
  const sf::SeriesResult g = sf::gauss_2f1_series(1.0, h, h + 1.0, -p.beta, sc);
  JValue v;
  v.route = JCase::CaseII;
  v.terms = g.terms_used;
  v.bound = std::abs(p.beta / h) * g.truncation_bound;
  v.value = -p.wn / p.vn + std::log(p.a1) + std::log1p(p.beta) - (p.beta / h) * g.value + pole_minus_alpha(p);
  return v;
}

JValue j_case2_regularized_n(const JPoint& p, const sf::SpecfunConfig& sc) {
  // The 2F1 series term with k = n-1 has denominator (n - q) = -r; it and the
  // pole of pi/sin(pi q) are combined analytically.
  const int n = p.n;
  const double r = p.r;
  const double b = p.beta;
  const double lb = std::log(b);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const double beta_n = std::exp(n * lb);

  double a_fin = 0.0;
  double pw = 1.0;
  for (int k = 0; k <= n - 2; ++k) {
    a_fin += pw / ((k + 1 - n) - r);
    pw *= -b;
  }
  a_fin *= -b;

  const sf::SeriesResult tail = sf::gauss_2f1_series(1.0, 1.0 - r, 2.0 - r, -b, sc);
  const double a_tail = -b * sign * beta_n / (1.0 - r) * tail.value;
  const double b_reg = sign * std::exp(p.q * lb) * csc_minus_pole(r);
  const double sing = (r == 0.0) ? sign * beta_n * lb : sign * beta_n * std::expm1(r * lb) / r;

  JValue v;
  v.route = JCase::CaseII;
  v.regularized = true;
  v.terms = tail.terms_used;
  v.bound = b * beta_n * tail.truncation_bound;
  v.value = -p.wn / p.vn - p.alpha + std::log(p.a1) + std::log1p(b) + a_fin + a_tail + b_reg + sing;
  return v;
}

JValue j_case3_n(const JPoint& p, const sf::SpecfunConfig& sc) {
  const double bb = 1.0 + p.q;
  const sf::SeriesResult g = sf::gauss_2f1_series(1.0, bb, bb + 1.0, -1.0 / p.beta, sc);
  const double head = -p.wn / p.vn + std::log(p.a2) - p.log_vn + std::log1p(1.0 / p.beta);
  JValue v;
  v.route = JCase::CaseIII;
  v.terms = g.terms_used;
  v.bound = g.truncation_bound / (bb * p.beta);
#ifdef NONCOH_INJECT_FAULT
  v.value = head + g.value / (bb * p.beta);
#else
  v.value = head - g.value / (bb * p.beta);
#endif
  return v;
}

JValue eval_j(const JPoint& p, const EvalConfig& cfg) {
  const Route rt = classify(p, cfg.routing);
  JValue v;
  try {
    switch (rt.route) {
      case JCase::CaseI:
        v.value = j_case1_n(p);
        v.route = JCase::CaseI;
        break;
      case JCase::CaseII:
        v = rt.regularized ? j_case2_regularized_n(p, cfg.specfun) : j_case2_n(p, cfg.specfun);
        break;
      default:
        v = j_case3_n(p, cfg.specfun);
        break;
    }
  } catch (const NoConvergence&) {
    v.value = kNaN;
  } catch (const DivergenceError&) {
    v.value = kNaN;
  }
  if (!std::isfinite(v.value)) {
    const TwoPointInput in{p.a2, std::sqrt(p.r2)};
    const ChannelParams unit{1.0, std::nullopt};
    v = JValue{};
    v.value = j_quadrature(p.at_x2 ? in.x2 : 0.0, in, unit, cfg.fallback);
    v.route = JCase::OracleFallback;
    v.fallback = true;
  }
  return v;
}

double mi_normalized(double a2, double r2, const EvalConfig& cfg, MIResult* out) {
  if (a2 == 0.0 || a2 == 1.0 || r2 == 0.0) {
    if (out) {
      *out = MIResult{};
      out->diagnostics.degenerate = true;
    }
    return 0.0;
  }
  const JPoint p0 = make_point(a2, r2, false);
  const JPoint p2 = make_point(a2, r2, true);
  const JValue j0 = eval_j(p0, cfg);
  const JValue j2 = eval_j(p2, cfg);
  double nats = -1.0 - a2 * p0.log_vn - p0.a1 * j0.value - a2 * j2.value;
  if (nats < 0.0) {
    if (nats < -1e-10) {
      throw ConsistencyError("mutual information evaluated to " + std::to_string(nats));
    }
    nats = 0.0;
  }
  if (out) {
    out->nats = nats;
    out->j0 = j0.value;
    out->j_x2 = j2.value;
    out->case_j0 = j0.route;
    out->case_jx2 = j2.route;
    auto fill = [](JDiagnostics& d, const JValue& v) {
      d.route = v.route;
      d.regularized = v.regularized;
      d.fallback = v.fallback;
      d.series_terms = v.terms;
      d.truncation_bound = v.bound;
    };
    fill(out->diagnostics.j0, j0);
    fill(out->diagnostics.j_x2, j2);
  }
  return nats;
}

}  // namespace detail

namespace {

detail::JPoint point_for(double x, const TwoPointInput& input, const ChannelParams& ch) {
  ch.validate();
  input.validate();
  if (input.degenerate()) throw DegenerateInput("input has a single mass point (a2 in {0,1} or x2 = 0)");
  bool at_x2;
  if (x == 0.0) {
    at_x2 = false;
  } else if (x == input.x2) {
    at_x2 = true;
  } else {
    throw DomainError("J(x) is only needed at x = 0 and x = x2");
  }
  return detail::make_point(input.a2, input.x2 * input.x2 / ch.sigma2, at_x2);
}

}  // namespace

double j_case1(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  const detail::JPoint p = point_for(x, input, ch);
  if (!detail::is_snapped(p, cfg.routing)) throw CaseMismatch("j_case1: alpha is not 1/n within the snap tolerance");
  return detail::j_case1_n(p) - std::log(ch.sigma2);
}

double j_case2(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  const detail::JPoint p = point_for(x, input, ch);
  if (detail::is_snapped(p, cfg.routing)) throw CaseMismatch("j_case2: alpha = 1/n, use the Case I form");
  if (detail::in_guard_band(p, cfg.routing)) throw NearSingularAlpha("j_case2: alpha inside the 1/n guard band");
  return detail::j_case2_n(p, cfg.specfun).value - std::log(ch.sigma2);
}

double j_case3(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  const detail::JPoint p = point_for(x, input, ch);
  return detail::j_case3_n(p, cfg.specfun).value - std::log(ch.sigma2);
}

JResult j_closed(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  const detail::JPoint p = point_for(x, input, ch);
  const detail::JValue v = detail::eval_j(p, cfg);
  JResult out;
  out.value = v.value - std::log(ch.sigma2);
  out.diagnostics.route = v.route;
  out.diagnostics.regularized = v.regularized;
  out.diagnostics.fallback = v.fallback;
  out.diagnostics.series_terms = v.terms;
  out.diagnostics.truncation_bound = v.bound;
  return out;
}

MIResult mutual_information(const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  ch.validate();
  input.validate();
  MIResult res;
  detail::mi_normalized(input.a2, input.x2 * input.x2 / ch.sigma2, cfg, &res);
  if (!res.diagnostics.degenerate) {
    const double ls = std::log(ch.sigma2);
    res.j0 -= ls;
    res.j_x2 -= ls;
  }
  return res;
}

double input_entropy(const TwoPointInput& input) {
  input.validate();
  auto h = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  return h(input.a2) + h(input.a1());
}

double conditional_entropy(const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  const double h = input_entropy(input) - mutual_information(input, ch, cfg).nats;
  if (h < 0.0) {
    if (h < -1e-10) throw ConsistencyError("H(X|Y) evaluated to " + std::to_string(h));
    return 0.0;
  }
  return h;
}

namespace {

// Reciprocal-integer check shared by the two identity residuals.
void require_off_band(double alpha, const EvalConfig& cfg, const char* who) {
  const double q = 1.0 / alpha;
  const long n = std::lround(q);
  if (n >= 1 && std::abs(alpha - 1.0 / static_cast<double>(n)) < cfg.routing.guard_band) {
    throw NearSingularAlpha(std::string(who) + ": alpha within the guard band of 1/" + std::to_string(n));
  }
}

}  // namespace

double continuation_residual(double alpha, double beta, const EvalConfig& cfg) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("continuation_residual: alpha, beta must be > 0");
  require_off_band(alpha, cfg, "continuation_residual");
  detail::JPoint p;
  p.alpha = alpha;
  p.q = 1.0 / alpha;
  p.n = static_cast<int>(std::lround(p.q));
  p.r = p.q - p.n;
  p.beta = beta;
  const double h = 1.0 - p.q;
  const double b = 1.0 + p.q;
  const double g_small = sf::gauss_2f1(1.0, h, h + 1.0, -beta, cfg.specfun);
  const double g_big = sf::gauss_2f1(1.0, b, b + 1.0, -1.0 / beta, cfg.specfun);
  const double lhs = (beta / h) * g_small - detail::pole_minus_alpha(p);
  return lhs - g_big / (b * beta);
}

double psi_identity_residual(double alpha, const EvalConfig& cfg) {
  if (!(alpha > 0.0)) throw DomainError("psi_identity_residual: alpha must be > 0");
  require_off_band(alpha, cfg, "psi_identity_residual");
  const double q = 1.0 / alpha;
  const double h = 1.0 - q;
  const std::array<double, 3> num1{1.0, 1.0, h};
  const std::array<double, 2> den1{2.0, h + 1.0};
  const std::array<double, 3> num2{1.0, 1.0, 1.0 + q};
  const std::array<double, 2> den2{2.0, 2.0 + q};
  const double f1 = sf::hyp_pfq(num1, den1, -1.0, cfg.specfun).value;
  const double f2 = sf::hyp_pfq(num2, den2, -1.0, cfg.specfun).value;
  const double s = alpha + f1 / (alpha - 1.0) + f2 / (alpha + 1.0);
  return s - sf::pi / sf::sin_pi(q);
}

}  // namespace noncoh
