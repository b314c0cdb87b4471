#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "noncoh/channel.hpp"
#include "noncoh/mi_closed.hpp"

namespace noncoh {

// Outcome of one family of residual checks.
struct FamilyReport {
  std::string name;
  double worst = 0.0;      // worst residual observed
  double tolerance = 0.0;  // pass threshold for `worst`
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_list;  // first few failing cases
  double seconds = 0.0;

  bool passed() const { return failures == 0 && cases > 0; }
};

struct VerifyOptions {
  bool quick = false;
  EvalConfig eval;
  std::uint64_t seed = 20240611;
};

struct GridCase {
  TwoPointInput input;
  ChannelParams channel;
};

/// a2 in [0.02, 0.98] (10 values) x x2/sigma in [0.1, 30] (20 log-spaced
/// values); sigma2 alternates between 1 and 2.5. Quick mode keeps every
/// other a2 and every fourth x2.
std::vector<GridCase> oracle_grid(bool quick);

/// 10 alpha values in [0.3, 4.5] kept outside the 1/n guard bands, times 10
/// beta values log-spaced in [0.1, 10].
std::vector<std::pair<double, double>> continuation_grid();

/// alpha set {0.3, 0.6, 1.4, 2, 3.7, 5.5, 8.9}.
std::vector<double> identity_alphas();

// |J_closed - J_quadrature| <= 1e-8 and |I_closed - I_quadrature| <= 1e-7.
FamilyReport verify_oracle_j(const std::vector<GridCase>& grid, const EvalConfig& eval);
FamilyReport verify_oracle_i(const std::vector<GridCase>& grid, const EvalConfig& eval);
// Case II and Case III formulas agree where both are evaluable.
FamilyReport verify_route_consistency(const std::vector<GridCase>& grid, const EvalConfig& eval);
FamilyReport verify_continuation(const EvalConfig& eval);
FamilyReport verify_identity(const EvalConfig& eval);
FamilyReport verify_partial_sums(std::size_t cases, std::uint64_t seed);
// Analytic dI/da2 against a 5-point finite difference, relative error 1e-5
// (denominator floored at 1e-3).
FamilyReport verify_derivative(std::size_t cases, std::uint64_t seed, const EvalConfig& eval);
// u-substituted and direct quadrature agree to 1e-9.
FamilyReport verify_quadrature_forms(std::size_t cases, std::uint64_t seed);

std::vector<FamilyReport> run_verification(const VerifyOptions& opts);

}  // namespace noncoh
