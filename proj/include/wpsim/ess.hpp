#ifndef WPSIM_ESS_HPP
#define WPSIM_ESS_HPP

#include <span>
#include <utility>

namespace wpsim {

double log4(double z);

// Accuracy-curve model f(u) = a1*exp(-b1*u) + a2*exp(-b2*u) with
// u = log4(zeta). All parameters are non-negative, so the fitted curve is
// non-increasing by construction.
struct BiexpFit {
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  double residual_norm = 0.0;  // sqrt of the sum of squared residuals
  int iterations = 0;
  double zeta_min = 0.0, zeta_max = 0.0;  // fit range

  double eval_u(double u) const;
  double eval_zeta(double zeta) const { return eval_u(log4(zeta)); }
};

// Damped Gauss-Newton (Levenberg-Marquardt) on squared-parameter
// coordinates, 16 starts from log-spaced decay-rate pairs with amplitudes
// solved linearly; best residual wins, ties by parameter norm.
// Requires >= 4 points with distinct zeta.
BiexpFit fit_biexponential(std::span<const std::pair<double, double>> points);

// Grid check that the fitted curve never increases over its fit range.
bool non_increasing(const BiexpFit& fit, int grid_points = 1000);

struct EssResult {
  double zeta = 0.0;        // games of the clustered dataset
  double zeta_prime = 0.0;  // effective games of independent outcomes
  double ratio = 0.0;       // zeta_prime / zeta
  bool ratio_above_one = false;
};

// Solves curve_k1(zeta') = curve_kt(zeta) by bisection on the K=1 curve's
// own zeta axis. Throws if the target is outside the searchable range
// (never extrapolates silently).
EssResult effective_sample_size(const BiexpFit& curve_k1, const BiexpFit& curve_kt,
                                double zeta);

}  // namespace wpsim

#endif  // WPSIM_ESS_HPP
