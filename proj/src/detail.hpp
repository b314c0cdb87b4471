#pragma once

// Internal helpers shared by the closed-form, derivative and capacity code.
// Everything here works in units of sigma2 = 1 (all J values are shifted by
// log sigma2 at the public boundary).

#include <cstddef>

#include "noncoh/channel.hpp"
#include "noncoh/mi_closed.hpp"

namespace noncoh::detail {

struct JPoint {
  double a1 = 0.0;
  double a2 = 0.0;
  double r2 = 0.0;     // x2^2 / sigma2
  bool at_x2 = false;  // x == x2 (otherwise x == 0)
  double vn = 0.0;     // 1 + r2
  double log_vn = 0.0;
  double wn = 0.0;     // 1 + x^2/sigma2
  double alpha = 0.0;
  double q = 0.0;      // 1/alpha
  int n = 0;           // nearest integer to q
  double r = 0.0;      // q - n, computed without cancellation
  double beta = 0.0;
};

JPoint make_point(double a2, double r2, bool at_x2);

struct Route {
  JCase route = JCase::CaseII;
  int snap_n = 0;
  bool near_singular = false;
  bool regularized = false;
};

// |alpha - 1/n| for the nearest n (meaningful for n >= 1).
double distance_to_reciprocal(const JPoint& p);
bool is_snapped(const JPoint& p, const RoutingConfig& rc);
bool in_guard_band(const JPoint& p, const RoutingConfig& rc);
Route classify(const JPoint& p, const RoutingConfig& rc);

struct JValue {
  double value = 0.0;
  JCase route = JCase::CaseII;
  bool regularized = false;
  bool fallback = false;
  std::size_t terms = 0;
  double bound = 0.0;
};

// Normalized J for the individual formulas.
double j_case1_n(const JPoint& p);
JValue j_case2_n(const JPoint& p, const specfun::SpecfunConfig& sc);
JValue j_case2_regularized_n(const JPoint& p, const specfun::SpecfunConfig& sc);
JValue j_case3_n(const JPoint& p, const specfun::SpecfunConfig& sc);

// Routed evaluation with the non-finite fallback to quadrature.
JValue eval_j(const JPoint& p, const EvalConfig& cfg);

// I in nats for a2 and r2 = x2^2/sigma2; fills `out` when given.
double mi_normalized(double a2, double r2, const EvalConfig& cfg, MIResult* out = nullptr);

// sin(pi q) from the reduced offset r.
double sin_pi_q(const JPoint& p);
// pi beta^q / sin(pi q) - alpha; the small-q form avoids the cancellation
// between pi/sin(pi q) ~ 1/q and alpha = 1/q.
double pole_minus_alpha(const JPoint& p);

// pi/sin(pi r) - 1/r and its r-derivative, |r| <= 1/2.
double csc_minus_pole(double r);
double csc_minus_pole_dr(double r);

// log(pi q / sin(pi q)) for small q, and its q-derivative.
double log_sinc_ratio(double q);
double log_sinc_ratio_dq(double q);

}  // namespace noncoh::detail
