// Analytic dI/da2. Each J(x) is differentiated in the same closed form that
// evaluates it; the hypergeometric pieces use
//   d/dz 2F1(1,h;h+1;z) = h/(h+1) 2F1(2,h+1;h+2;z),
//   d/dh 2F1(1,h;h+1;z) = z/(h+1)^2 3F2(2,h+1,h+1;h+2,h+2;z).

#include <array>
#include <cmath>
#include <functional>

#include "detail.hpp"
#include "noncoh/errors.hpp"
#include "noncoh/mi_closed.hpp"
#include "noncoh/oracle.hpp"

namespace noncoh {

namespace sf = specfun;

namespace {

using detail::JPoint;

struct GParts {
  double g = 0.0;   // 2F1(1,h;h+1;z)
  double gz = 0.0;  // d/dz
  double gh = 0.0;  // d/dh
};

GParts g_parts(double h, double z, const sf::SpecfunConfig& sc) {
  GParts o;
  o.g = sf::gauss_2f1(1.0, h, h + 1.0, z, sc);
  o.gz = h / (h + 1.0) * sf::gauss_2f1(2.0, h + 1.0, h + 2.0, z, sc);
  const std::array<double, 3> num{2.0, 1.0 + h, 1.0 + h};
  const std::array<double, 2> den{2.0 + h, 2.0 + h};
  o.gh = z / ((1.0 + h) * (1.0 + h)) * sf::hyp_pfq(num, den, z, sc).value;
  return o;
}

// a2-derivatives of the quantities a J(x) point depends on.
struct Partials {
  double dr2 = 0.0;
  double dwv = 0.0;  // d(wn/vn)
  double dalpha = 0.0;
  double dq = 0.0;
  double dbeta = 0.0;
};

Partials partials(const JPoint& p, double dr2) {
  Partials d;
  d.dr2 = dr2;
  d.dwv = p.at_x2 ? 0.0 : -dr2 / (p.vn * p.vn);
  d.dalpha = p.at_x2 ? dr2 : dr2 / (p.vn * p.vn);
  d.dq = -dr2 / (p.r2 * p.r2);
  d.dbeta = p.beta * (1.0 / (p.a1 * p.a2) - dr2 / p.vn);
  return d;
}

double dj_case3(const JPoint& p, const Partials& d, const sf::SpecfunConfig& sc) {
  const double b = 1.0 + p.q;
  const double db = d.dq;
  const double beta = p.beta;
  const double z = -1.0 / beta;
  const double dz = d.dbeta / (beta * beta);
  const GParts g = g_parts(b, z, sc);
  const double dg = g.gz * dz + g.gh * db;
  const double bracket = dg / (b * beta) - g.g * db / (b * b * beta) - g.g * d.dbeta / (b * beta * beta);
  return -d.dwv + 1.0 / p.a2 - d.dr2 / p.vn - d.dbeta / (beta * (1.0 + beta)) - bracket;
}

double dj_case2(const JPoint& p, const Partials& d, const sf::SpecfunConfig& sc) {
  const double h = p.at_x2 ? 1.0 - p.q : -1.0 / p.r2;
  const double dh = -d.dq;
  const double beta = p.beta;
  const GParts g = g_parts(h, -beta, sc);
  const double dg = -g.gz * d.dbeta + g.gh * dh;
  const double dterm = d.dbeta * g.g / h - beta * g.g * dh / (h * h) + (beta / h) * dg;

  const double lb = std::log(beta);
  const double dlb = d.dbeta / beta;
  double dt;
  if (p.q < 0.01) {
    const double e = p.q * lb + detail::log_sinc_ratio(p.q);
    dt = d.dalpha * std::expm1(e) +
         p.alpha * std::exp(e) * (d.dq * lb + p.q * dlb + detail::log_sinc_ratio_dq(p.q) * d.dq);
  } else {
    const double s = detail::sin_pi_q(p);
    const double c = (p.n % 2 == 0) ? sf::cos_pi(p.r) : -sf::cos_pi(p.r);
    const double pole = sf::pi * std::exp(p.q * lb) / s;
    dt = pole * (d.dq * lb + p.q * dlb - sf::pi * d.dq * c / s) - d.dalpha;
  }
  return -d.dwv - 1.0 / p.a1 + d.dbeta / (1.0 + beta) - dterm + dt;
}

// (t e^t - expm1(t)) / t^2
double expm1_slope(double t) {
  if (std::abs(t) < 0.1) {
    // sum_{k>=2} (k-1)/k! t^(k-2)
    double s = 0.0;
    double fact = 2.0;
    double tp = 1.0;
    for (int k = 2; k <= 12; ++k) {
      s += (k - 1) / fact * tp;
      tp *= t;
      fact *= k + 1;
    }
    return s;
  }
  return (t * std::exp(t) - std::expm1(t)) / (t * t);
}

double dj_case2_regularized(const JPoint& p, const Partials& d, const sf::SpecfunConfig& sc) {
  const int n = p.n;
  const double r = p.r;
  const double dr = d.dq;
  const double beta = p.beta;
  const double lb = std::log(beta);
  const double dlb = d.dbeta / beta;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const double beta_n = std::exp(n * lb);

  double da_fin = 0.0;
  double pw = 1.0;
  for (int k = 0; k <= n - 2; ++k) {
    const double den = (k + 1 - n) - r;
    const double ck = -beta * pw / den;
    da_fin += ck * ((k + 1) * dlb + dr / den);
    pw *= -beta;
  }

  const GParts g = g_parts(1.0 - r, -beta, sc);
  const double kt = -sign * beta * beta_n / (1.0 - r);
  const double a_tail = kt * g.g;
  const double da_tail = a_tail * ((n + 1) * dlb + dr / (1.0 - r)) + kt * (-g.gz * d.dbeta - g.gh * dr);

  const double bq = std::exp(p.q * lb);
  const double db_reg =
      sign * bq * (detail::csc_minus_pole(r) * (d.dq * lb + p.q * dlb) + detail::csc_minus_pole_dr(r) * dr);

  const double t = r * lb;
  const double e = (r == 0.0) ? lb : std::expm1(t) / r;
  const double de = std::exp(t) * dlb + lb * lb * expm1_slope(t) * dr;
  const double d_sing = sign * beta_n * (n * dlb * e + de);

  return -d.dwv - d.dalpha - 1.0 / p.a1 + d.dbeta / (1.0 + beta) + da_fin + da_tail + db_reg + d_sing;
}

bool dj_point(const JPoint& p, double dr2, const EvalConfig& cfg, double& out) {
  const detail::Route rt = detail::classify(p, cfg.routing);
  const Partials d = partials(p, dr2);
  try {
    switch (rt.route) {
      case JCase::CaseIII:
        out = dj_case3(p, d, cfg.specfun);
        break;
      case JCase::CaseII:
        out = rt.regularized ? dj_case2_regularized(p, d, cfg.specfun) : dj_case2(p, d, cfg.specfun);
        break;
      default:
        // Case I is the r -> 0 limit of the pole-cancelled form.
        out = dj_case2_regularized(p, d, cfg.specfun);
        break;
    }
  } catch (const NoConvergence&) {
    return false;
  } catch (const DivergenceError&) {
    return false;
  } catch (const DomainError&) {
    return false;
  }
  return std::isfinite(out);
}

DerivativeResult derivative_normalized(double a2, double r2, double dr2, const EvalConfig& cfg,
                                       const std::function<double(double)>& value_fn) {
  const JPoint p0 = detail::make_point(a2, r2, false);
  const JPoint p2 = detail::make_point(a2, r2, true);
  double dj0 = 0.0;
  double dj2 = 0.0;
  if (dj_point(p0, dr2, cfg, dj0) && dj_point(p2, dr2, cfg, dj2)) {
    const detail::JValue j0 = detail::eval_j(p0, cfg);
    const detail::JValue j2 = detail::eval_j(p2, cfg);
    const double v = -p0.log_vn - a2 * dr2 / p0.vn + j0.value - j2.value - p0.a1 * dj0 - a2 * dj2;
    if (std::isfinite(v)) return {v, false};
  }
  // Steps shrink toward the ends of (0, 1) so the stencil stays inside.
  const double h = 7.4e-4 * std::min(a2, 1.0 - a2);
  return {fd_derivative_step(value_fn, a2, h, FdOrder::central5), true};
}

}  // namespace

DerivativeResult mi_derivative_a2_detail(const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  ch.validate();
  input.validate();
  if (input.a2 == 0.0 || input.a2 == 1.0) throw DegenerateInput("dI/da2 needs 0 < a2 < 1");
  if (ch.power_budget) return mi_derivative_at_snr(input.a2, snr_of(ch), cfg);
  if (input.x2 == 0.0) throw DegenerateInput("dI/da2 needs x2 > 0");
  const double r2 = input.x2 * input.x2 / ch.sigma2;
  auto f = [r2, &cfg](double a) { return detail::mi_normalized(a, r2, cfg); };
  return derivative_normalized(input.a2, r2, 0.0, cfg, f);
}

double mi_derivative_a2(const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg) {
  return mi_derivative_a2_detail(input, ch, cfg).value;
}

double mi_at_snr(double a2, double snr_linear, const EvalConfig& cfg) {
  if (!(snr_linear > 0.0)) throw DomainError("SNR must be > 0");
  if (!(a2 >= 0.0 && a2 <= 1.0)) throw DomainError("a2 must lie in [0, 1]");
  if (a2 == 0.0) return 0.0;
  return detail::mi_normalized(a2, snr_linear / a2, cfg);
}

DerivativeResult mi_derivative_at_snr(double a2, double snr_linear, const EvalConfig& cfg) {
  if (!(snr_linear > 0.0)) throw DomainError("SNR must be > 0");
  if (!(a2 > 0.0 && a2 < 1.0)) throw DegenerateInput("dI/da2 needs 0 < a2 < 1");
  const double r2 = snr_linear / a2;
  auto f = [snr_linear, &cfg](double a) { return detail::mi_normalized(a, snr_linear / a, cfg); };
  return derivative_normalized(a2, r2, -r2 / a2, cfg, f);
}

}  // namespace noncoh
