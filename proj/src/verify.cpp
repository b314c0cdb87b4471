#include "noncoh/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "noncoh/errors.hpp"
#include "noncoh/oracle.hpp"

namespace noncoh {

namespace {

constexpr std::size_t kMaxListed = 10;
const QuadratureConfig kOracleTol{1e-12, 200000};

class Recorder {
 public:
  Recorder(std::string name, double tol) : start_(std::chrono::steady_clock::now()) {
    r_.name = std::move(name);
    r_.tolerance = tol;
  }

  void add(double residual, const std::string& label) {
    ++r_.cases;
    const double a = std::isfinite(residual) ? std::abs(residual) : INFINITY;
    r_.worst = std::max(r_.worst, a);
    if (!(a <= r_.tolerance)) fail(label + " residual=" + fmt(residual));
  }

  void fail(const std::string& label) {
    ++r_.failures;
    if (r_.failure_list.size() < kMaxListed) r_.failure_list.push_back(label);
  }

  void count() { ++r_.cases; }

  FamilyReport finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return r_;
  }

  static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  }

 private:
  FamilyReport r_;
  std::chrono::steady_clock::time_point start_;
};

std::string label(const GridCase& c, const char* what) {
  std::ostringstream os;
  os.precision(10);
  os << what << "(a2=" << c.input.a2 << ", x2=" << c.input.x2 << ", sigma2=" << c.channel.sigma2 << ")";
  return os.str();
}

}  // namespace

std::vector<GridCase> oracle_grid(bool quick) {
  std::vector<GridCase> g;
  const int na = 10;
  const int nx = 20;
  for (int i = 0; i < na; ++i) {
    if (quick && i % 2 == 1) continue;
    const double a2 = 0.02 + (0.98 - 0.02) * i / (na - 1);
    for (int j = 0; j < nx; ++j) {
      if (quick && j % 4 != 0) continue;
      const double ratio = 0.1 * std::pow(300.0, static_cast<double>(j) / (nx - 1));  // x2/sigma
      const double sigma2 = ((i + j) % 2 == 0) ? 1.0 : 2.5;
      g.push_back({TwoPointInput{a2, ratio * std::sqrt(sigma2)}, ChannelParams{sigma2, std::nullopt}});
    }
  }
  return g;
}

std::vector<std::pair<double, double>> continuation_grid() {
  // 1/alpha stays at least 0.2 away from every integer.
  const double alphas[] = {0.3, 0.37, 0.45, 0.62, 0.8, 1.3, 1.7, 2.4, 3.2, 4.5};
  std::vector<std::pair<double, double>> g;
  for (double a : alphas) {
    for (int k = 0; k < 10; ++k) g.emplace_back(a, std::pow(10.0, -1.0 + 2.0 * k / 9.0));
  }
  return g;
}

std::vector<double> identity_alphas() { return {0.3, 0.6, 1.4, 2.0, 3.7, 5.5, 8.9}; }

FamilyReport verify_oracle_j(const std::vector<GridCase>& grid, const EvalConfig& eval) {
  Recorder rec("oracle_j", 1e-8);
  for (const GridCase& c : grid) {
    for (double x : {0.0, c.input.x2}) {
      const std::string lbl = label(c, x == 0.0 ? "J(0)" : "J(x2)");
      try {
        const double closed = j_closed(x, c.input, c.channel, eval).value;
        const double quad = j_quadrature(x, c.input, c.channel, kOracleTol);
        rec.add(closed - quad, lbl);
      } catch (const std::exception& e) {
        rec.fail(lbl + " threw: " + e.what());
      }
    }
  }
  return rec.finish();
}

FamilyReport verify_oracle_i(const std::vector<GridCase>& grid, const EvalConfig& eval) {
  Recorder rec("oracle_i", 1e-7);
  for (const GridCase& c : grid) {
    const std::string lbl = label(c, "I");
    try {
      const double closed = mutual_information(c.input, c.channel, eval).nats;
      const double quad = mi_quadrature(c.input, c.channel, kOracleTol);
      rec.add(closed - quad, lbl);
      if (closed < 0.0 || closed > std::log(2.0) + 1e-12 || closed > input_entropy(c.input) + 1e-10) {
        rec.fail(lbl + " outside [0, min(H(X), log 2)]: " + Recorder::fmt(closed));
      }
    } catch (const std::exception& e) {
      rec.fail(lbl + " threw: " + e.what());
    }
  }
  return rec.finish();
}

FamilyReport verify_route_consistency(const std::vector<GridCase>& grid, const EvalConfig& eval) {
  Recorder rec("route_consistency", 1e-8);
  for (const GridCase& c : grid) {
    for (double x : {0.0, c.input.x2}) {
      const DerivedParams d = derive_params(x, c.input, c.channel, eval.routing);
      // Off the 1/n bands, and where both 2F1 arguments stay away from -1/0
      // extremes that only cost time.
      if (d.route == JCase::CaseI || d.near_singular) continue;
      if (d.beta < 0.02 || d.beta > 50.0) continue;
      const std::string lbl = label(c, x == 0.0 ? "J(0)" : "J(x2)");
      try {
        rec.add(j_case2(x, c.input, c.channel, eval) - j_case3(x, c.input, c.channel, eval), lbl);
      } catch (const NearSingularAlpha&) {
        // literal Case II form not evaluable here (pole cancellation)
      } catch (const std::exception& e) {
        rec.fail(lbl + " threw: " + e.what());
      }
    }
  }
  return rec.finish();
}

FamilyReport verify_continuation(const EvalConfig& eval) {
  Recorder rec("continuation", 1e-8);
  for (const auto& [a, b] : continuation_grid()) {
    const std::string lbl = "alpha=" + Recorder::fmt(a) + " beta=" + Recorder::fmt(b);
    try {
      rec.add(continuation_residual(a, b, eval), lbl);
    } catch (const std::exception& e) {
      rec.fail(lbl + " threw: " + e.what());
    }
  }
  return rec.finish();
}

FamilyReport verify_identity(const EvalConfig& eval) {
  Recorder rec("psi_identity", 1e-8);
  for (double a : identity_alphas()) {
    const std::string lbl = "alpha=" + Recorder::fmt(a);
    try {
      rec.add(psi_identity_residual(a, eval), lbl);
    } catch (const std::exception& e) {
      rec.fail(lbl + " threw: " + e.what());
    }
  }
  return rec.finish();
}

FamilyReport verify_partial_sums(std::size_t cases, std::uint64_t seed) {
  Recorder rec("partial_sums", 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  std::uniform_int_distribution<int> un(1, 500);
  for (std::size_t i = 0; i < cases; ++i) {
    const double q = uq(rng);
    const int n = un(rng);
    const double t = specfun::log_partial_sum(q, n);
    rec.count();
    if (!(t >= 0.0 && t <= q)) rec.fail("q=" + Recorder::fmt(q) + " n=" + std::to_string(n) + " T=" + Recorder::fmt(t));
  }
  return rec.finish();
}

FamilyReport verify_derivative(std::size_t cases, std::uint64_t seed, const EvalConfig& eval) {
  Recorder rec("derivative", 1e-5);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.05, 0.95);
  std::uniform_real_distribution<double> ulx(std::log(0.3), std::log(10.0));
  std::uniform_real_distribution<double> udb(-10.0, 30.0);
  for (std::size_t i = 0; i < cases; ++i) {
    const double a2 = ua(rng);
    const bool capacity_mode = (i % 2 == 1);
    const double x2 = std::exp(ulx(rng));
    const double db = udb(rng);
    std::string lbl;
    try {
      double analytic;
      double fd;
      if (capacity_mode) {
        const double snr = snr_from_db(db);
        lbl = "a2=" + Recorder::fmt(a2) + " snr_db=" + Recorder::fmt(db);
        analytic = mi_derivative_at_snr(a2, snr, eval).value;
        fd = fd_derivative([&](double a) { return mi_at_snr(a, snr, eval); }, a2, FdOrder::central5);
      } else {
        const ChannelParams ch{1.0, std::nullopt};
        lbl = "a2=" + Recorder::fmt(a2) + " x2=" + Recorder::fmt(x2);
        analytic = mi_derivative_a2(TwoPointInput{a2, x2}, ch, eval);
        fd = fd_derivative([&](double a) { return mutual_information(TwoPointInput{a, x2}, ch, eval).nats; }, a2,
                           FdOrder::central5);
      }
      rec.add((analytic - fd) / std::max(std::abs(fd), 1e-3), lbl);
    } catch (const std::exception& e) {
      rec.fail(lbl + " threw: " + e.what());
    }
  }
  return rec.finish();
}

FamilyReport verify_quadrature_forms(std::size_t cases, std::uint64_t seed) {
  Recorder rec("quadrature_forms", 1e-9);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.05, 0.95);
  std::uniform_real_distribution<double> ulx(std::log(0.2), std::log(20.0));
  std::uniform_real_distribution<double> us(0.5, 2.0);
  for (std::size_t i = 0; i < cases; ++i) {
    const TwoPointInput in{ua(rng), std::exp(ulx(rng))};
    const ChannelParams ch{us(rng), std::nullopt};
    const double x = (i % 2 == 0) ? 0.0 : in.x2;
    const GridCase c{in, ch};
    const std::string lbl = label(c, x == 0.0 ? "J(0)" : "J(x2)");
    try {
      rec.add(j_quadrature(x, in, ch, kOracleTol) - j_quadrature_direct(x, in, ch, kOracleTol), lbl);
    } catch (const std::exception& e) {
      rec.fail(lbl + " threw: " + e.what());
    }
  }
  return rec.finish();
}

std::vector<FamilyReport> run_verification(const VerifyOptions& opts) {
  const std::vector<GridCase> grid = oracle_grid(opts.quick);
  std::vector<FamilyReport> out;
  out.push_back(verify_oracle_j(grid, opts.eval));
  out.push_back(verify_oracle_i(grid, opts.eval));
  out.push_back(verify_route_consistency(grid, opts.eval));
  out.push_back(verify_continuation(opts.eval));
  out.push_back(verify_identity(opts.eval));
  out.push_back(verify_partial_sums(1000, opts.seed));
  out.push_back(verify_derivative(opts.quick ? 20 : 50, opts.seed + 1, opts.eval));
  out.push_back(verify_quadrature_forms(opts.quick ? 6 : 20, opts.seed + 2));
  return out;
}

}  // namespace noncoh
