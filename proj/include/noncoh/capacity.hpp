#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noncoh/channel.hpp"
#include "noncoh/mi_closed.hpp"

namespace noncoh {

// Capacity  : two mass points achieve capacity (SNR <= 0 dB).
// LowerBound: two-point optimum is a tight lower bound (0 < SNR <= 10 dB).
// TwoPointOptimum: best two-point input, no capacity claim.
enum class Regime { Capacity, LowerBound, TwoPointOptimum, Failed };

std::string_view to_string(Regime r);
Regime regime_for_db(double snr_db);

struct CapacityPoint {
  double snr_db = 0.0;
  double snr_linear = 0.0;
  double a2_star = 0.0;
  double x2_star = 0.0;  // sqrt(P / a2_star)
  double i_star_nats = 0.0;
  Regime regime = Regime::Failed;
  int roots_found = 0;
  double solver_residual = 0.0;  // |dI/da2| at a2_star
  bool golden_fallback = false;  // no sign change found, maximized I directly
  std::string failure;           // set when regime == Failed
};

struct SweepConfig {
  double snr_db_start = -10.0;
  double snr_db_stop = 30.0;
  double snr_db_step = 1.0;
  double solver_tol = 1e-10;
  int grid_points_for_bracketing = 64;
  unsigned threads = 0;  // 0: NONCOH_THREADS or hardware concurrency
  EvalConfig eval;

  void validate() const;
  std::vector<double> snr_db_grid() const;
};

// Bounds of the a2 search domain.
inline constexpr double kA2Min = 1e-6;
inline constexpr double kA2Max = 1.0 - 1e-6;

/// Maximizer of I over a2 with x2^2 = SNR/a2 (sigma2 = 1).
/// Throws SolverFailure if no point with I > 0 is found.
CapacityPoint solve_a2_star(double snr_linear, const SweepConfig& cfg = {});
/// Same, with SNR = P/sigma2 and x2_star in the channel's units.
CapacityPoint solve_a2_star(const ChannelParams& ch, const SweepConfig& cfg = {});

struct SweepResult {
  std::vector<CapacityPoint> points;  // ascending SNR
  std::vector<std::string> warnings;
};

/// One independently solved point per grid SNR; failures are kept as
/// Regime::Failed entries.
SweepResult sweep(const SweepConfig& cfg, const ChannelParams& ch = {});

/// (a2, I) with x2^2 = SNR/a2.
std::vector<std::pair<double, double>> mi_profile(double snr_linear, const std::vector<double>& a2_grid,
                                                  const EvalConfig& cfg = {});

/// NONCOH_THREADS if set to a positive integer, else hardware concurrency.
unsigned default_thread_count();

}  // namespace noncoh
