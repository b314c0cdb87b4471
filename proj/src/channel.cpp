#include "noncoh/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "noncoh/errors.hpp"
#include "noncoh/specfun.hpp"

namespace noncoh {

void ChannelParams::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be a finite value > 0");
  if (power_budget && (!(*power_budget > 0.0) || !std::isfinite(*power_budget))) {
    throw DomainError("power budget must be a finite value > 0");
  }
}

void TwoPointInput::validate() const {
  if (!(a2 >= 0.0 && a2 <= 1.0)) throw DomainError("a2 must lie in [0, 1]");
  if (!(x2 >= 0.0) || !std::isfinite(x2)) throw DomainError("x2 must be finite and >= 0");
}

std::string_view to_string(JCase c) {
  switch (c) {
    case JCase::CaseI:
      return "CaseI";
    case JCase::CaseII:
      return "CaseII";
    case JCase::CaseIII:
      return "CaseIII";
    case JCase::OracleFallback:
      return "OracleFallback";
  }
  return "?";
}

void RoutingConfig::validate() const {
  if (!(snap_tol > 0.0)) throw DomainError("snap_tol must be > 0");
  if (!(guard_band >= snap_tol)) throw DomainError("guard_band must be >= snap_tol");
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  if (!(regularize_width >= 0.0 && regularize_width <= 0.5)) {
    throw DomainError("regularize_width must lie in [0, 0.5]");
  }
}

namespace detail {

JPoint make_point(double a2, double r2, bool at_x2) {
  JPoint p;
  p.a2 = a2;
  p.a1 = 1.0 - a2;
  p.r2 = r2;
  p.at_x2 = at_x2;
  p.vn = 1.0 + r2;
  p.log_vn = std::log1p(r2);
  p.wn = at_x2 ? p.vn : 1.0;
  const double inv = 1.0 / r2;
  if (at_x2) {
    p.alpha = r2;
    p.q = inv;
    p.n = static_cast<int>(std::lround(std::min(p.q, 1e9)));
    p.r = inv - p.n;
  } else {
    p.alpha = r2 / p.vn;
    p.q = 1.0 + inv;
    p.n = static_cast<int>(std::lround(std::min(p.q, 1e9)));
    p.r = inv - (p.n - 1);
  }
  p.beta = (a2 / p.a1) / p.vn;
  return p;
}

double distance_to_reciprocal(const JPoint& p) {
  // 1/q - 1/n = -r / (q n)
  return std::abs(p.r) / (p.q * p.n);
}

bool is_snapped(const JPoint& p, const RoutingConfig& rc) {
  return p.n >= 1 && p.n <= rc.n_max && distance_to_reciprocal(p) < rc.snap_tol;
}

bool in_guard_band(const JPoint& p, const RoutingConfig& rc) {
  if (p.n < 1) return false;
  if (p.n <= rc.n_max && distance_to_reciprocal(p) < rc.guard_band) return true;
  // Size of the two cancelling pole terms relative to machine precision.
  // The 2F1 term carries its own rounding at the same magnitude, so the
  // threshold sits ~100x below the target accuracy.
  const double s = std::abs(specfun::sin_pi(p.r));
  const double pole = specfun::pi * std::exp(p.q * std::log(p.beta));
  return std::numeric_limits<double>::epsilon() * pole > 1e-12 * s;
}

Route classify(const JPoint& p, const RoutingConfig& rc) {
  Route out;
  if (p.beta >= 1.0) {
    out.route = JCase::CaseIII;
    return out;
  }
  if (is_snapped(p, rc)) {
    out.route = JCase::CaseI;
    out.snap_n = p.n;
    return out;
  }
  out.route = JCase::CaseII;
  out.near_singular = in_guard_band(p, rc);
  out.regularized = out.near_singular || (p.n >= 1 && std::abs(p.r) < rc.regularize_width);
  return out;
}

}  // namespace detail

DerivedParams derive_params(double x, const TwoPointInput& input, const ChannelParams& ch,
                            const RoutingConfig& routing) {
  ch.validate();
  input.validate();
  routing.validate();
  if (input.degenerate()) throw DegenerateInput("input has a single mass point (a2 in {0,1} or x2 = 0)");
  bool at_x2;
  if (x == 0.0) {
    at_x2 = false;
  } else if (x == input.x2) {
    at_x2 = true;
  } else {
    throw DomainError("derive_params: x must be 0 or x2");
  }
  const double r2 = input.x2 * input.x2 / ch.sigma2;
  const detail::JPoint p = detail::make_point(input.a2, r2, at_x2);
  const detail::Route route = detail::classify(p, routing);

  DerivedParams d;
  d.alpha = p.alpha;
  d.beta = p.beta;
  d.route = route.route;
  d.snap_n = route.snap_n;
  d.near_singular = route.near_singular;
  d.regularized = route.regularized;
  if (p.beta < 1.0) d.y_star_sq = -ch.sigma2 * (p.vn / r2) * std::log(p.beta);
  return d;
}

double transition_density(double y, double x, const ChannelParams& ch) {
  const double w = x * x + ch.sigma2;
  return 2.0 * y / w * std::exp(-y * y / w);
}

double snr_of(const ChannelParams& ch) {
  if (!ch.power_budget) throw MissingPowerBudget("SNR requires a power budget P");
  return *ch.power_budget / ch.sigma2;
}

double snr_from_db(double db) { return std::pow(10.0, db / 10.0); }

double snr_to_db(double snr_linear) { return 10.0 * std::log10(snr_linear); }

}  // namespace noncoh
