#include "noncoh/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "noncoh/errors.hpp"

namespace noncoh {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0)) throw DomainError("QuadratureConfig: abs_tol must be > 0");
  if (max_subdivisions < 1) throw DomainError("QuadratureConfig: max_subdivisions must be >= 1");
}

void MonteCarloConfig::validate() const {
  if (samples < 1) throw DomainError("MonteCarloConfig: samples must be >= 1");
}

namespace {

// Kronrod 15-point abscissae (descending, last is the centre) and weights;
// the odd-indexed abscissae are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = hw * kXgk[j];
    const double fs = f(c - dx) + f(c + dx);
    k += kWgk[j] * fs;
    if (j % 2 == 1) g += kWg[j / 2] * fs;
  }
  return {a, b, k * hw, std::abs((k - g) * hw)};
}

QuadratureResult integrate_segments(const std::function<double(double)>& f, const std::vector<double>& pts,
                                    const QuadratureConfig& cfg) {
  cfg.validate();
  std::priority_queue<Segment> heap;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Segment s = gk15(f, pts[i], pts[i + 1]);
    total_err += s.error;
    heap.push(s);
  }
  std::size_t splits = 0;
  while (total_err > cfg.abs_tol) {
    if (splits >= cfg.max_subdivisions) {
      throw ToleranceNotMet("quadrature: " + std::to_string(cfg.max_subdivisions) +
                            " subdivisions exhausted, error estimate " + std::to_string(total_err));
    }
    Segment s = heap.top();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) {
      throw ToleranceNotMet("quadrature: interval cannot be bisected further, error estimate " +
                            std::to_string(total_err));
    }
    heap.pop();
    const Segment left = gk15(f, s.a, mid);
    const Segment right = gk15(f, mid, s.b);
    total_err += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
    ++splits;
    if (total_err < 0.0) total_err = 0.0;
  }
  // Re-sum from the surviving segments; the running total drifts.
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  double err = 0.0;
  while (!heap.empty()) {
    segs.push_back(heap.top());
    err += heap.top().error;
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  double sum = 0.0;
  double comp = 0.0;
  for (const Segment& s : segs) {
    const double yv = s.value - comp;
    const double t = sum + yv;
    comp = (t - sum) - yv;
    sum = t;
  }
  return {sum, err, splits};
}

double logsumexp(double x, double y) {
  const double m = std::max(x, y);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

void check_oracle_inputs(double x, const TwoPointInput& input, const ChannelParams& ch) {
  ch.validate();
  input.validate();
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("oracle: x must be finite and >= 0");
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg) {
  return integrate_segments(f, {a, b}, cfg);
}

double j_quadrature(double x, const TwoPointInput& input, const ChannelParams& ch, const QuadratureConfig& cfg) {
  check_oracle_inputs(x, input, ch);
  const double w = (x * x + ch.sigma2) / ch.sigma2;
  const double v = (input.x2 * input.x2 + ch.sigma2) / ch.sigma2;
  const double la1 = safe_log(input.a1());
  const double la2 = safe_log(input.a2 / v);
  const double e1 = w;
  const double e2 = w / v;
  // u = exp(-y^2/(x^2+sigma2)); the log u singularity at 0 is left to the
  // adaptive bisection.
  auto integrand = [=](double u) {
    const double lu = std::log(u);
    return logsumexp(la1 + e1 * lu, la2 + e2 * lu);
  };
  return integrate(integrand, 0.0, 1.0, cfg).value - std::log(ch.sigma2);
}

double j_quadrature_direct(double x, const TwoPointInput& input, const ChannelParams& ch,
                           const QuadratureConfig& cfg) {
  check_oracle_inputs(x, input, ch);
  const double s = ch.sigma2;
  const double wx = x * x + s;
  const double vx = input.x2 * input.x2 + s;
  const double la1 = safe_log(input.a1() / s);
  const double la2 = safe_log(input.a2 / vx);
  auto integrand = [=](double y) {
    const double y2 = y * y;
    return 2.0 * y / wx * std::exp(-y2 / wx) * logsumexp(la1 - y2 / s, la2 - y2 / vx);
  };
  const double y_max = std::sqrt(200.0 * vx);
  // Geometric breakpoints so the bulk near sqrt(wx) is resolved from the start.
  std::vector<double> pts{0.0};
  for (double p = std::sqrt(wx) / 16.0; p < y_max; p *= 2.0) pts.push_back(p);
  pts.push_back(y_max);
  return integrate_segments(integrand, pts, cfg).value;
}

double mi_quadrature(const TwoPointInput& input, const ChannelParams& ch, const QuadratureConfig& cfg) {
  ch.validate();
  input.validate();
  if (input.degenerate()) return 0.0;
  const double a1 = input.a1();
  const double a2 = input.a2;
  const double j0 = j_quadrature(0.0, input, ch, cfg);
  const double j2 = j_quadrature(input.x2, input, ch, cfg);
  return -a1 - a1 * std::log(ch.sigma2) - a2 - a2 * std::log(input.x2 * input.x2 + ch.sigma2) - a1 * j0 - a2 * j2;
}

MonteCarloEstimate mi_monte_carlo(const TwoPointInput& input, const ChannelParams& ch, const MonteCarloConfig& cfg) {
  ch.validate();
  input.validate();
  cfg.validate();
  if (input.degenerate()) return {0.0, 0.0};
  const double s = ch.sigma2;
  const double vx = input.x2 * input.x2 + s;
  const double la1 = std::log(input.a1() / s);
  const double la2 = std::log(input.a2 / vx);
  const double log_s = std::log(s);
  const double log_v = std::log(vx);

  std::mt19937_64 rng(cfg.seed);
  // Uniform on (0, 1), never exactly 0.
  auto uniform = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };

  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const bool at_x2 = uniform() < input.a2;
    const double w = at_x2 ? vx : s;
    const double y2 = -w * std::log(uniform());
    const double log_cond = -y2 / w - (at_x2 ? log_v : log_s);
    const double log_marg = logsumexp(la1 - y2 / s, la2 - y2 / vx);
    const double val = log_cond - log_marg;
    const double delta = val - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (val - mean);
  }
  const double n = static_cast<double>(cfg.samples);
  const double var = cfg.samples > 1 ? m2 / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double fd_derivative_step(const std::function<double(double)>& f, double x, double h, FdOrder order) {
  // Make x +/- h exactly representable so the divisor matches the stencil.
  volatile double xp = x + h;
  h = xp - x;
  if (order == FdOrder::central3) return (f(x + h) - f(x - h)) / (2.0 * h);
  return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

double fd_derivative(const std::function<double(double)>& f, double x, FdOrder order) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(1.0, std::abs(x));
  const double h = (order == FdOrder::central3 ? std::cbrt(eps) : std::pow(eps, 0.2)) * scale;
  return fd_derivative_step(f, x, h, order);
}

}  // namespace noncoh
