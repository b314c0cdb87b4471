#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "noncoh/channel.hpp"

namespace noncoh {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  std::size_t max_subdivisions = 100000;

  void validate() const;
};

struct MonteCarloConfig {
  std::size_t samples = 10'000'000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Throws ToleranceNotMet when max_subdivisions is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureConfig& cfg = {});

/// J(x) for x in {0, x2} by quadrature of the u = exp(-y^2/(x^2+sigma2))
/// form on [0, 1]. Accepts a2 in [0, 1].
double j_quadrature(double x, const TwoPointInput& input, const ChannelParams& ch,
                    const QuadratureConfig& cfg = {});

/// Same integral in the original variable y on [0, sqrt(200 (x2^2+sigma2))].
double j_quadrature_direct(double x, const TwoPointInput& input, const ChannelParams& ch,
                           const QuadratureConfig& cfg = {});

/// I(X;Y) assembled from the two quadrature J values.
double mi_quadrature(const TwoPointInput& input, const ChannelParams& ch, const QuadratureConfig& cfg = {});

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Sample average of log f(Y|X) - log f(Y) under the two-point input.
MonteCarloEstimate mi_monte_carlo(const TwoPointInput& input, const ChannelParams& ch,
                                  const MonteCarloConfig& cfg = {});

enum class FdOrder { central3, central5 };

/// Central finite difference with step eps^(1/3) (3-point) or eps^(1/5)
/// (5-point) times max(1, |x|).
double fd_derivative(const std::function<double(double)>& f, double x, FdOrder order = FdOrder::central5);

/// Same stencils with an explicit step.
double fd_derivative_step(const std::function<double(double)>& f, double x, double h,
                          FdOrder order = FdOrder::central5);

}  // namespace noncoh
