// noncoh: command-line frontend for the two-point noncoherent Rayleigh
// mutual-information library.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "noncoh/capacity.hpp"
#include "noncoh/errors.hpp"
#include "noncoh/mi_closed.hpp"
#include "noncoh/oracle.hpp"
#include "noncoh/verify.hpp"

namespace {

using nlohmann::json;
using namespace noncoh;

constexpr const char* kSchemaVersion = "1.0";

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadArgs = 2;
constexpr int kExitConsistency = 3;

// Shortest round-trip decimal, independent of the C++ locale.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// 17 significant digits, for CSV.
std::string num17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct Tunables {
  std::optional<double> abs_tol, transform_threshold, snap_tol, guard_band, regularize_width, quad_tol, solver_tol;
  std::optional<std::size_t> max_terms, quad_max_subdivisions;
  std::optional<int> n_max, grid_points;
  unsigned threads = 0;

  EvalConfig eval() const {
    EvalConfig e;
    if (abs_tol) e.specfun.abs_tol = *abs_tol;
    if (max_terms) e.specfun.max_terms = *max_terms;
    if (transform_threshold) e.specfun.transform_threshold = *transform_threshold;
    if (snap_tol) e.routing.snap_tol = *snap_tol;
    if (guard_band) e.routing.guard_band = *guard_band;
    if (n_max) e.routing.n_max = *n_max;
    if (regularize_width) e.routing.regularize_width = *regularize_width;
    if (quad_tol) e.fallback.abs_tol = *quad_tol;
    if (quad_max_subdivisions) e.fallback.max_subdivisions = *quad_max_subdivisions;
    e.specfun.validate();
    e.routing.validate();
    e.fallback.validate();
    return e;
  }

  json echo() const {
    const EvalConfig e = eval();
    return {{"abs_tol", e.specfun.abs_tol},
            {"max_terms", e.specfun.max_terms},
            {"transform_threshold", e.specfun.transform_threshold},
            {"snap_tol", e.routing.snap_tol},
            {"guard_band", e.routing.guard_band},
            {"n_max", e.routing.n_max},
            {"regularize_width", e.routing.regularize_width}};
  }
};

json j_diag(const JDiagnostics& d) {
  return {{"route", std::string(to_string(d.route))},
          {"regularized", d.regularized},
          {"oracle_fallback", d.fallback},
          {"series_terms", d.series_terms},
          {"truncation_bound", d.truncation_bound}};
}

json record(const std::string& command, json inputs, json results, json diagnostics = json::object()) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"inputs", std::move(inputs)},
          {"results", std::move(results)},
          {"diagnostics", std::move(diagnostics)}};
}

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------- mi
struct MiArgs {
  double a2 = 0.5, x2 = 1.0, sigma2 = 1.0;
  bool verify = false;
};

int cmd_mi(const MiArgs& a, const Tunables& t, bool as_json) {
  const TwoPointInput in{a.a2, a.x2};
  const ChannelParams ch{a.sigma2, std::nullopt};
  const EvalConfig ev = t.eval();
  const MIResult r = mutual_information(in, ch, ev);
  const double hx = input_entropy(in);
  const double hxy = conditional_entropy(in, ch, ev);

  json results = {{"i_nats", r.nats}, {"h_x", hx}, {"h_x_given_y", hxy}};
  json diag = {{"degenerate", r.diagnostics.degenerate}};
  if (!r.diagnostics.degenerate) {
    results["j0"] = r.j0;
    results["j_x2"] = r.j_x2;
    diag["j0"] = j_diag(r.diagnostics.j0);
    diag["j_x2"] = j_diag(r.diagnostics.j_x2);
  }

  bool consistent = true;
  if (a.verify) {
    const QuadratureConfig qc{1e-12, 200000};
    const double oracle = mi_quadrature(in, ch, qc);
    const double delta = r.nats - oracle;
    consistent = std::abs(delta) <= 1e-7;
    results["oracle_i_nats"] = oracle;
    results["oracle_delta"] = delta;
    if (!r.diagnostics.degenerate) {
      results["oracle_delta_j0"] = r.j0 - j_quadrature(0.0, in, ch, qc);
      results["oracle_delta_j_x2"] = r.j_x2 - j_quadrature(in.x2, in, ch, qc);
    }
    results["oracle_ok"] = consistent;
  }

  if (as_json) {
    json inputs = {{"a2", a.a2}, {"x2", a.x2}, {"sigma2", a.sigma2}, {"verify", a.verify}, {"config", t.echo()}};
    emit_json(record("mi", inputs, results, diag));
  } else {
    std::cout << "I(X;Y)   " << num(r.nats) << "\n";
    std::cout << "H(X)     " << num(hx) << "\n";
    std::cout << "H(X|Y)   " << num(hxy) << "\n";
    if (!r.diagnostics.degenerate) {
      std::cout << "J(0)     " << num(r.j0) << "  [" << to_string(r.case_j0)
                << (r.diagnostics.j0.regularized ? ", pole-cancelled" : "") << "]\n";
      std::cout << "J(x2)    " << num(r.j_x2) << "  [" << to_string(r.case_jx2)
                << (r.diagnostics.j_x2.regularized ? ", pole-cancelled" : "") << "]\n";
    }
    if (a.verify) {
      std::cout << "oracle   " << num(results["oracle_i_nats"].get<double>()) << "  delta "
                << num(results["oracle_delta"].get<double>()) << (consistent ? "  ok" : "  MISMATCH") << "\n";
    }
  }
  if (!consistent) {
    std::cerr << "error: closed form and quadrature oracle disagree beyond 1e-7\n";
    return kExitConsistency;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- deriv
struct DerivArgs {
  double a2 = 0.5, x2 = 1.0, sigma2 = 1.0;
  std::optional<double> snr_db;
};

int cmd_deriv(const DerivArgs& a, const Tunables& t, bool as_json) {
  const EvalConfig ev = t.eval();
  DerivativeResult d;
  double fd;
  json inputs = {{"a2", a.a2}, {"config", t.echo()}};
  if (a.snr_db) {
    const double snr = snr_from_db(*a.snr_db);
    d = mi_derivative_at_snr(a.a2, snr, ev);
    fd = fd_derivative([&](double v) { return mi_at_snr(v, snr, ev); }, a.a2, FdOrder::central5);
    inputs["snr_db"] = *a.snr_db;
  } else {
    const ChannelParams ch{a.sigma2, std::nullopt};
    d = mi_derivative_a2_detail(TwoPointInput{a.a2, a.x2}, ch, ev);
    fd = fd_derivative([&](double v) { return mutual_information(TwoPointInput{v, a.x2}, ch, ev).nats; }, a.a2,
                       FdOrder::central5);
    inputs["x2"] = a.x2;
    inputs["sigma2"] = a.sigma2;
  }
  if (as_json) {
    emit_json(record("deriv", inputs, {{"dI_da2", d.value}, {"finite_difference_check", fd}},
                     {{"finite_difference_fallback", d.finite_difference}}));
  } else {
    std::cout << "dI/da2   " << num(d.value) << (d.finite_difference ? "  [finite-difference fallback]" : "") << "\n";
    std::cout << "FD check " << num(fd) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- profile
struct ProfileArgs {
  double snr_db = 0.0;
  int points = 400;
  std::string out;
};

int cmd_profile(const ProfileArgs& a, const Tunables& t, bool as_json) {
  if (a.points < 1) throw DomainError("--points must be >= 1");
  std::vector<double> grid;
  for (int i = 1; i <= a.points; ++i) grid.push_back(static_cast<double>(i) / (a.points + 1));
  const auto prof = mi_profile(snr_from_db(a.snr_db), grid, t.eval());

  std::ostringstream csv;
  csv << "a2,i_nats\n";
  double best_a = 0.0, best_i = -1.0;
  for (const auto& [a2, iv] : prof) {
    csv << num17(a2) << ',' << num17(iv) << '\n';
    if (iv > best_i) {
      best_i = iv;
      best_a = a2;
    }
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw DomainError("cannot open --out file " + a.out);
    f << csv.str();
  }
  if (as_json) {
    emit_json(record("profile", {{"snr_db", a.snr_db}, {"points", a.points}, {"out", a.out}},
                     {{"rows", prof.size()}, {"argmax_a2", best_a}, {"max_i_nats", best_i}}));
  } else if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::cout << "wrote " << prof.size() << " rows to " << a.out << "; max I = " << num(best_i) << " at a2 = "
              << num(best_a) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sweep
struct SweepArgs {
  double from_db = -10.0, to_db = 30.0, step_db = 1.0;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, const Tunables& t, bool as_json) {
  SweepConfig cfg;
  cfg.snr_db_start = a.from_db;
  cfg.snr_db_stop = a.to_db;
  cfg.snr_db_step = a.step_db;
  if (t.solver_tol) cfg.solver_tol = *t.solver_tol;
  if (t.grid_points) cfg.grid_points_for_bracketing = *t.grid_points;
  cfg.threads = t.threads;
  cfg.eval = t.eval();
  const SweepResult res = sweep(cfg, ChannelParams{});

  std::ostringstream csv;
  csv << "snr_db,snr_linear,a2_star,x2_star,i_star_nats,regime,roots_found,solver_residual\n";
  json rows = json::array();
  std::size_t failed = 0;
  for (const CapacityPoint& p : res.points) {
    if (p.regime == Regime::Failed) ++failed;
    csv << num17(p.snr_db) << ',' << num17(p.snr_linear) << ',' << num17(p.a2_star) << ',' << num17(p.x2_star) << ','
        << num17(p.i_star_nats) << ',' << to_string(p.regime) << ',' << p.roots_found << ','
        << num17(p.solver_residual) << '\n';
    rows.push_back({{"snr_db", p.snr_db},
                    {"snr_linear", p.snr_linear},
                    {"a2_star", p.a2_star},
                    {"x2_star", p.x2_star},
                    {"i_star_nats", p.i_star_nats},
                    {"regime", std::string(to_string(p.regime))},
                    {"roots_found", p.roots_found},
                    {"solver_residual", p.solver_residual},
                    {"golden_fallback", p.golden_fallback},
                    {"failure", p.failure}});
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw DomainError("cannot open --out file " + a.out);
    f << csv.str();
  }
  for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
  if (as_json) {
    emit_json(record("sweep", {{"from_db", a.from_db}, {"to_db", a.to_db}, {"step_db", a.step_db}, {"out", a.out},
                               {"solver_tol", cfg.solver_tol}, {"config", t.echo()}},
                     {{"rows", res.points.size()}, {"points", rows}},
                     {{"warnings", res.warnings}, {"failed_points", failed}}));
  } else if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::cout << "wrote " << res.points.size() << " rows to " << a.out << " (" << failed << " failed)\n";
  }
  return failed ? kExitConsistency : kExitOk;
}

// ---------------------------------------------------------------- verify
int cmd_verify(bool quick, const Tunables& t, bool as_json) {
  VerifyOptions opts;
  opts.quick = quick;
  opts.eval = t.eval();
  const std::vector<FamilyReport> reports = run_verification(opts);
  bool ok = true;
  json fams = json::array();
  json failures = json::array();
  for (const FamilyReport& r : reports) {
    ok = ok && r.passed();
    fams.push_back({{"family", r.name},
                    {"worst", r.worst},
                    {"tolerance", r.tolerance},
                    {"cases", r.cases},
                    {"failures", r.failures},
                    {"passed", r.passed()},
                    {"seconds", r.seconds}});
    for (const std::string& f : r.failure_list) failures.push_back({{"family", r.name}, {"case", f}});
  }
  if (as_json) {
    emit_json(record("verify", {{"quick", quick}, {"config", t.echo()}}, {{"passed", ok}, {"families", fams}},
                     {{"failures", failures}}));
  } else {
    for (const FamilyReport& r : reports) {
      std::printf("%-18s worst %-12.4g tol %-8.1g cases %-5zu %s\n", r.name.c_str(), r.worst, r.tolerance, r.cases,
                  r.passed() ? "PASS" : "FAIL");
    }
    for (const auto& f : failures) {
      std::cout << "failure: " << f["family"].get<std::string>() << ": " << f["case"].get<std::string>() << "\n";
    }
    std::cout << (ok ? "verify: all families passed" : "verify: FAILED") << "\n";
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------- mc
struct McArgs {
  double a2 = 0.5, x2 = 1.0, sigma2 = 1.0;
  std::size_t samples = 10'000'000;
  std::uint64_t seed = 0;
};

int cmd_mc(const McArgs& a, const Tunables& t, bool as_json) {
  const TwoPointInput in{a.a2, a.x2};
  const ChannelParams ch{a.sigma2, std::nullopt};
  const MonteCarloEstimate est = mi_monte_carlo(in, ch, MonteCarloConfig{a.samples, a.seed});
  const double closed = mutual_information(in, ch, t.eval()).nats;
  const double z = est.std_error > 0.0 ? (est.estimate - closed) / est.std_error : 0.0;
  if (as_json) {
    emit_json(record("mc", {{"a2", a.a2}, {"x2", a.x2}, {"sigma2", a.sigma2}, {"samples", a.samples}, {"seed", a.seed}},
                     {{"estimate", est.estimate}, {"std_error", est.std_error}, {"closed_form", closed}, {"z_score", z}}));
  } else {
    std::cout << "estimate " << num(est.estimate) << " +- " << num(est.std_error) << "\n";
    std::cout << "closed   " << num(closed) << "  (z = " << num(z) << ")\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutual information and two-point capacity of the noncoherent Rayleigh channel"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file with tolerance overrides (flags take precedence)");

  bool as_json = false;
  Tunables t;
  app.add_flag("--json", as_json, "Emit a JSON record instead of text");
  app.add_option("--abs-tol,--abs_tol", t.abs_tol, "Series truncation target");
  app.add_option("--max-terms,--max_terms", t.max_terms, "Series term cap");
  app.add_option("--transform-threshold,--transform_threshold", t.transform_threshold, "|z| above which 2F1 is transformed");
  app.add_option("--snap-tol,--snap_tol", t.snap_tol, "|alpha - 1/n| below which Case I is used");
  app.add_option("--guard-band,--guard_band", t.guard_band, "|alpha - 1/n| flagged as near-singular");
  app.add_option("--n-max,--n_max", t.n_max, "Largest n considered for Case I");
  app.add_option("--regularize-width,--regularize_width", t.regularize_width, "|1/alpha - n| using the pole-cancelled form");
  app.add_option("--quad-tol,--quad_tol", t.quad_tol, "Absolute tolerance of the quadrature fallback");
  app.add_option("--quad-max-subdivisions,--quad_max_subdivisions", t.quad_max_subdivisions, "Quadrature subdivision cap");
  app.add_option("--solver-tol,--solver_tol", t.solver_tol, "Root-finder tolerance on |dI/da2|");
  app.add_option("--grid-points,--grid_points", t.grid_points, "Bracketing grid size");
  app.add_option("--threads", t.threads, "Worker threads (0: NONCOH_THREADS or all cores)");

  MiArgs mi;
  auto* s_mi = app.add_subcommand("mi", "Mutual information of one two-point input");
  s_mi->add_option("--a2", mi.a2, "Probability of the nonzero mass point")->required();
  s_mi->add_option("--x2", mi.x2, "Nonzero mass-point magnitude")->required();
  s_mi->add_option("--sigma2", mi.sigma2, "Noise power")->capture_default_str();
  s_mi->add_flag("--verify", mi.verify, "Cross-check against the quadrature oracle");

  DerivArgs dv;
  auto* s_dv = app.add_subcommand("deriv", "dI/da2 at fixed x2, or with x2^2 = SNR/a2 (--snr-db)");
  s_dv->add_option("--a2", dv.a2)->required();
  auto* o_x2 = s_dv->add_option("--x2", dv.x2);
  s_dv->add_option("--sigma2", dv.sigma2)->capture_default_str();
  s_dv->add_option("--snr-db", dv.snr_db)->excludes(o_x2);

  ProfileArgs pr;
  auto* s_pr = app.add_subcommand("profile", "I as a function of a2 at fixed SNR (CSV a2,i_nats)");
  s_pr->add_option("--snr-db", pr.snr_db)->required();
  s_pr->add_option("--points", pr.points)->capture_default_str();
  s_pr->add_option("--out", pr.out, "CSV path (default: stdout)");

  SweepArgs sw;
  auto* s_sw = app.add_subcommand("sweep", "Optimal two-point input over an SNR grid (CSV)");
  s_sw->add_option("--from-db", sw.from_db)->capture_default_str();
  s_sw->add_option("--to-db", sw.to_db)->capture_default_str();
  s_sw->add_option("--step-db", sw.step_db)->capture_default_str();
  s_sw->add_option("--out", sw.out, "CSV path (default: stdout)");

  bool quick = false;
  auto* s_vf = app.add_subcommand("verify", "Run the residual families; exit 1 on any failure");
  s_vf->add_flag("--quick", quick, "Reduced grids");

  McArgs mc;
  auto* s_mc = app.add_subcommand("mc", "Monte-Carlo estimate of I");
  s_mc->add_option("--a2", mc.a2)->required();
  s_mc->add_option("--x2", mc.x2)->required();
  s_mc->add_option("--sigma2", mc.sigma2)->capture_default_str();
  s_mc->add_option("--samples", mc.samples)->capture_default_str();
  s_mc->add_option("--seed", mc.seed)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadArgs;
  }

  try {
    if (*s_mi) return cmd_mi(mi, t, as_json);
    if (*s_dv) {
      if (!s_dv->count("--x2") && !dv.snr_db) throw DomainError("deriv needs --x2 or --snr-db");
      return cmd_deriv(dv, t, as_json);
    }
    if (*s_pr) return cmd_profile(pr, t, as_json);
    if (*s_sw) return cmd_sweep(sw, t, as_json);
    if (*s_vf) return cmd_verify(quick, t, as_json);
    if (*s_mc) return cmd_mc(mc, t, as_json);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const DegenerateInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const MissingPowerBudget& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConsistency;
  }
  return kExitBadArgs;
}
