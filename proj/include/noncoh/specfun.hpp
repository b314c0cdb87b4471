#pragma once

#include <cstddef>
#include <span>

namespace noncoh::specfun {

inline constexpr double pi = 3.14159265358979323846264338327950288;
// Euler-Mascheroni constant.
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

struct SeriesResult {
  double value = 0.0;
  std::size_t terms_used = 0;
  double truncation_bound = 0.0;  // estimated |remainder|
};

struct SpecfunConfig {
  double abs_tol = 1e-14;
  std::size_t max_terms = 10'000'000;
  // |z| above which 2F1 switches to the Pfaff transformation.
  double transform_threshold = 0.5;

  void validate() const;
};

/// Rising factorial a(a+1)...(a+k-1); 1 for k == 0.
double pochhammer(double a, std::size_t k);

/// Partial sum of the generalized hypergeometric series pFq(numer; denom; z).
///
/// Terms are generated from their ratio. Summation stops once the last term
/// and a geometric remainder estimate are both below cfg.abs_tol. For
/// p = q+1 series at z <= -1/2 whose terms strictly alternate, the partial
/// sums are additionally accelerated by iterated pairwise averaging, which
/// is what makes z = -1 practical.
///
/// Throws DomainError when a denominator parameter hits a nonpositive integer
/// before the series terminates, DivergenceError for p = q+1 with |z| > 1 (or
/// p > q+1 with z != 0), and NoConvergence when max_terms is exhausted.
SeriesResult hyp_pfq(std::span<const double> numer, std::span<const double> denom, double z,
                     const SpecfunConfig& cfg = {});

/// Gauss 2F1(a, b; c; z) on the real axis z < 1.
///
/// |z| <= transform_threshold sums the series directly; z < -threshold uses
/// the Pfaff transformation to the argument z/(z-1) in (0, 1).
SeriesResult gauss_2f1_series(double a, double b, double c, double z, const SpecfunConfig& cfg = {});
double gauss_2f1(double a, double b, double c, double z, const SpecfunConfig& cfg = {});

/// psi(x) to ~1e-13 absolute; PoleError at 0, -1, -2, ...
double digamma(double x);

/// Incomplete beta B_z(b, one_minus_a) = int_0^z t^(b-1) (1-t)^(one_minus_a - 1) dt.
///
/// For z < 0 the common phase (-1)^b is dropped: the returned value is
/// int_0^|z| s^(b-1) (1+s)^(one_minus_a - 1) ds, so that
/// 2F1(a, b; b+1; z) = b |z|^-b B_z(b, 1-a) holds on the whole half-line.
/// Evaluated by a continued fraction, independent of the 2F1 series.
double incomplete_beta(double z, double b, double one_minus_a);

/// T_n = sum_{k=1..n} (-1)^(k+1) q^k / k.
double log_partial_sum(double q, int n);

// sin(pi x), cos(pi x) with exact argument reduction.
double sin_pi(double x);
double cos_pi(double x);

}  // namespace noncoh::specfun
