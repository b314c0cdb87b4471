#pragma once

#include <optional>
#include <string_view>

namespace noncoh {

struct ChannelParams {
  double sigma2 = 1.0;                  // noise power
  std::optional<double> power_budget;   // P, capacity mode only

  void validate() const;
};

// Input magnitude law: mass a1 = 1 - a2 at 0, mass a2 at x2.
struct TwoPointInput {
  double a2 = 0.5;
  double x2 = 1.0;

  double a1() const { return 1.0 - a2; }
  // E[X^2]
  double second_moment() const { return a2 * x2 * x2; }
  // Single mass point: the mutual information is exactly zero.
  bool degenerate() const { return a2 == 0.0 || a2 == 1.0 || x2 == 0.0; }
  void validate() const;
};

enum class JCase { CaseI, CaseII, CaseIII, OracleFallback };

std::string_view to_string(JCase c);

// Case selection around the reciprocal-integer values alpha = 1/n.
struct RoutingConfig {
  double snap_tol = 1e-9;    // |alpha - 1/n| below this: Case I
  double guard_band = 1e-5;  // below this: flagged near-singular
  int n_max = 64;
  // |1/alpha - n| below this evaluates Case II in its pole-cancelled form.
  double regularize_width = 0.05;

  void validate() const;
};

struct DerivedParams {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> y_star_sq;  // present iff beta < 1
  JCase route = JCase::CaseII;
  int snap_n = 0;                   // n with alpha ~ 1/n when route == CaseI
  bool near_singular = false;       // inside the guard band of some 1/n
  bool regularized = false;         // Case II in its pole-cancelled form
};

/// alpha, beta, y*^2 and the evaluation route for J(x), x in {0, x2}.
/// Throws DegenerateInput for a2 in {0, 1} or x2 == 0 and DomainError for
/// any other abscissa.
DerivedParams derive_params(double x, const TwoPointInput& input, const ChannelParams& ch,
                            const RoutingConfig& routing = {});

/// f_{Y|X}(y|x) = 2y/(x^2+sigma2) exp(-y^2/(x^2+sigma2)).
double transition_density(double y, double x, const ChannelParams& ch);

/// P / sigma2; throws MissingPowerBudget without P.
double snr_of(const ChannelParams& ch);
double snr_from_db(double db);
double snr_to_db(double snr_linear);

}  // namespace noncoh
