#pragma once

#include <cstddef>

#include "noncoh/channel.hpp"
#include "noncoh/oracle.hpp"
#include "noncoh/specfun.hpp"

namespace noncoh {

struct EvalConfig {
  specfun::SpecfunConfig specfun;
  RoutingConfig routing;
  // Used only when a closed form produces a non-finite value.
  QuadratureConfig fallback{1e-13, 100000};
};

struct JDiagnostics {
  JCase route = JCase::CaseII;
  bool regularized = false;  // pole-cancelled Case II near alpha = 1/n
  bool fallback = false;     // closed form was non-finite, quadrature used
  std::size_t series_terms = 0;
  double truncation_bound = 0.0;
};

struct MIDiagnostics {
  bool degenerate = false;
  JDiagnostics j0;
  JDiagnostics j_x2;
};

struct MIResult {
  double nats = 0.0;
  double j0 = 0.0;    // J(0); 0 for degenerate inputs
  double j_x2 = 0.0;  // J(x2)
  JCase case_j0 = JCase::CaseII;
  JCase case_jx2 = JCase::CaseII;
  MIDiagnostics diagnostics;
};

// Individual closed forms of J(x), x in {0, x2}.
/// Finite-sum form at alpha = 1/n. CaseMismatch unless alpha is snapped.
double j_case1(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg = {});
/// 2F1 at -beta plus the pi beta^(1/alpha)/sin(pi/alpha) term. CaseMismatch
/// when snapped, NearSingularAlpha inside the guard band. Valid for any beta.
double j_case2(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg = {});
/// 2F1 at -1/beta. Valid for every alpha, beta > 0.
double j_case3(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg = {});

struct JResult {
  double value = 0.0;
  JDiagnostics diagnostics;
};

/// J(x) through the routing of derive_params.
JResult j_closed(double x, const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg = {});

/// I(X;Y) in nats. Exactly 0 for degenerate inputs.
MIResult mutual_information(const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg = {});

/// Binary entropy of the input law, nats.
double input_entropy(const TwoPointInput& input);

/// H(X) - I(X;Y); rounding below zero down to -1e-10 is clamped, anything
/// lower throws ConsistencyError.
double conditional_entropy(const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg = {});

/// Difference between the beta < 1 and beta > 1 closed forms (zero in exact
/// arithmetic). NearSingularAlpha within the guard band of alpha = 1/n.
double continuation_residual(double alpha, double beta, const EvalConfig& cfg = {});

/// S - pi/sin(pi/alpha) with S built from two 3F2 series at -1.
double psi_identity_residual(double alpha, const EvalConfig& cfg = {});

struct DerivativeResult {
  double value = 0.0;
  bool finite_difference = false;  // analytic form unreliable here, FD of the closed form used
};

/// dI/da2. With ch.power_budget set, x2^2 = P/a2 moves with a2 (input.x2 is
/// ignored); otherwise x2 is held fixed. DegenerateInput at a2 in {0, 1}.
double mi_derivative_a2(const TwoPointInput& input, const ChannelParams& ch, const EvalConfig& cfg = {});
DerivativeResult mi_derivative_a2_detail(const TwoPointInput& input, const ChannelParams& ch,
                                         const EvalConfig& cfg = {});

// Capacity parameterization: sigma2 = 1, x2^2 = snr / a2.
double mi_at_snr(double a2, double snr_linear, const EvalConfig& cfg = {});
DerivativeResult mi_derivative_at_snr(double a2, double snr_linear, const EvalConfig& cfg = {});

}  // namespace noncoh
