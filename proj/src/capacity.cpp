#include "noncoh/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "noncoh/errors.hpp"

namespace noncoh {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Capacity:
      return "Capacity";
    case Regime::LowerBound:
      return "LowerBound";
    case Regime::TwoPointOptimum:
      return "TwoPointOptimum";
    case Regime::Failed:
      return "FAILED";
  }
  return "?";
}

Regime regime_for_db(double snr_db) {
  if (snr_db <= 0.0) return Regime::Capacity;
  if (snr_db <= 10.0) return Regime::LowerBound;
  return Regime::TwoPointOptimum;
}

void SweepConfig::validate() const {
  if (!(snr_db_step > 0.0)) throw DomainError("snr_db_step must be > 0");
  if (!(snr_db_start <= snr_db_stop)) throw DomainError("snr_db_start must be <= snr_db_stop");
  if (!(solver_tol > 0.0)) throw DomainError("solver_tol must be > 0");
  if (grid_points_for_bracketing < 3) throw DomainError("grid_points_for_bracketing must be >= 3");
  eval.specfun.validate();
  eval.routing.validate();
  eval.fallback.validate();
}

std::vector<double> SweepConfig::snr_db_grid() const {
  const auto count = static_cast<long>(std::floor((snr_db_stop - snr_db_start) / snr_db_step + 1e-9)) + 1;
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) g.push_back(snr_db_start + static_cast<double>(i) * snr_db_step);
  return g;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("NONCOH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Bracketed root of f. Stops once |f| <= ftol / 100 or the bracket has
// collapsed to rounding level; returns the bracket end with smaller |f|.
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb, double ftol) {
  double last = std::min(std::abs(fa), std::abs(fb));
  auto g = [&](double x) {
    const double v = f(x);
    last = std::abs(v);
    return v;
  };
  const auto tol = [&](double lo, double hi) {
    return last <= 0.01 * ftol || hi - lo <= 4.0 * kEps * std::max(std::abs(lo), std::abs(hi));
  };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, fa, fb, tol, iters);
  if (lo == hi) return lo;
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

// Maximizer of f on [a, b].
template <class F>
double bracketed_max(F&& f, double a, double b) {
  const int bits = std::numeric_limits<double>::digits / 2;
  return boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, a, b, bits).first;
}

std::vector<double> logit_grid(int n) {
  const double lo = std::log(kA2Min / (1.0 - kA2Min));
  const double hi = std::log(kA2Max / (1.0 - kA2Max));
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    g[static_cast<std::size_t>(i)] = 1.0 / (1.0 + std::exp(-t));
  }
  g.front() = kA2Min;
  g.back() = kA2Max;
  return g;
}

CapacityPoint solve_impl(double snr, double sigma2, const SweepConfig& cfg) {
  cfg.validate();
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("SNR must be finite and > 0");
  const EvalConfig& ev = cfg.eval;
  auto dI = [&](double a) { return mi_derivative_at_snr(a, snr, ev).value; };
  auto I = [&](double a) { return mi_at_snr(a, snr, ev); };

  const std::vector<double> grid = logit_grid(cfg.grid_points_for_bracketing);
  std::vector<double> dv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) dv[i] = dI(grid[i]);

  CapacityPoint pt;
  pt.snr_linear = snr;
  pt.snr_db = snr_to_db(snr);

  double best_a = grid.front();
  double best_i = I(grid.front());
  double best_res = std::abs(dv.front());
  if (const double ie = I(grid.back()); ie > best_i) {
    best_a = grid.back();
    best_i = ie;
    best_res = std::abs(dv.back());
  }

  int roots = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double root;
    if (dv[i] == 0.0) {
      root = grid[i];
    } else if ((dv[i] > 0.0 && dv[i + 1] < 0.0) || (dv[i] < 0.0 && dv[i + 1] > 0.0)) {
      root = bracketed_root(dI, grid[i], grid[i + 1], dv[i], dv[i + 1], cfg.solver_tol);
    } else {
      continue;
    }
    ++roots;
    const double iv = I(root);
    if (iv > best_i) {
      best_a = root;
      best_i = iv;
      best_res = std::abs(dI(root));
    }
  }

  if (roots == 0) {
    // No sign change: maximize I around the best grid point instead.
    std::size_t k = 0;
    double ik = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = I(grid[i]);
      if (v > ik) {
        ik = v;
        k = i;
      }
    }
    const double lo = grid[k == 0 ? 0 : k - 1];
    const double hi = grid[std::min(k + 1, grid.size() - 1)];
    const double a = bracketed_max(I, lo, hi);
    const double iv = I(a);
    if (iv > best_i) {
      best_a = a;
      best_i = iv;
      best_res = std::abs(dI(a));
    }
    pt.golden_fallback = true;
  }

  if (!(best_i > 0.0)) throw SolverFailure("no a2 with I > 0 at SNR " + std::to_string(snr));
  pt.a2_star = best_a;
  pt.x2_star = std::sqrt(snr * sigma2 / best_a);
  pt.i_star_nats = best_i;
  pt.roots_found = roots;
  pt.solver_residual = best_res;
  pt.regime = regime_for_db(pt.snr_db);
  return pt;
}

}  // namespace

CapacityPoint solve_a2_star(double snr_linear, const SweepConfig& cfg) { return solve_impl(snr_linear, 1.0, cfg); }

CapacityPoint solve_a2_star(const ChannelParams& ch, const SweepConfig& cfg) {
  ch.validate();
  return solve_impl(snr_of(ch), ch.sigma2, cfg);
}

SweepResult sweep(const SweepConfig& cfg, const ChannelParams& ch) {
  cfg.validate();
  ch.validate();
  const std::vector<double> dbs = cfg.snr_db_grid();
  SweepResult out;
  out.points.resize(dbs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < dbs.size(); i = next++) {
      const double snr = snr_from_db(dbs[i]);
      CapacityPoint& pt = out.points[i];
      try {
        pt = solve_impl(snr, ch.sigma2, cfg);
      } catch (const std::exception& e) {
        pt = CapacityPoint{};
        pt.snr_linear = snr;
        pt.regime = Regime::Failed;
        pt.failure = e.what();
      }
      pt.snr_db = dbs[i];  // report the grid value, not its round trip
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(cfg.threads ? cfg.threads : default_thread_count(), static_cast<unsigned>(dbs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 1; i < out.points.size(); ++i) {
    const CapacityPoint& a = out.points[i - 1];
    const CapacityPoint& b = out.points[i];
    if (a.regime == Regime::Failed || b.regime == Regime::Failed) continue;
    if (b.i_star_nats < a.i_star_nats - 1e-9) {
      out.warnings.push_back("i_star decreases between " + std::to_string(a.snr_db) + " dB and " +
                             std::to_string(b.snr_db) + " dB");
    }
  }
  for (const CapacityPoint& p : out.points) {
    if (p.regime == Regime::Failed) {
      out.warnings.push_back("solver failed at " + std::to_string(p.snr_db) + " dB: " + p.failure);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> mi_profile(double snr_linear, const std::vector<double>& a2_grid,
                                                  const EvalConfig& cfg) {
  std::vector<std::pair<double, double>> out;
  out.reserve(a2_grid.size());
  for (double a : a2_grid) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("mi_profile: a2 values must lie in (0, 1)");
    out.emplace_back(a, mi_at_snr(a, snr_linear, cfg));
  }
  return out;
}

}  // namespace noncoh
