#include "wpsim/ess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpsim {

double log4(double z) { return std::log(z) / std::log(4.0); }

double BiexpFit::eval_u(double u) const {
  return a1 * std::exp(-b1 * u) + a2 * std::exp(-b2 * u);
}

namespace {

// Parameters live as squares: p = (sa1, sb1, sa2, sb2), a = sa^2, b = sb^2.
struct Params {
  std::array<double, 4> p{};

  double a1() const { return p[0] * p[0]; }
  double b1() const { return p[1] * p[1]; }
  double a2() const { return p[2] * p[2]; }
  double b2() const { return p[3] * p[3]; }

  double eval(double u) const {
    return a1() * std::exp(-b1() * u) + a2() * std::exp(-b2() * u);
  }

  double norm() const {
    return std::sqrt(a1() * a1() + b1() * b1() + a2() * a2() + b2() * b2());
  }
};

double sum_squared_residuals(const Params& q, std::span<const double> us,
                             std::span<const double> ys) {
  double s = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double r = ys[i] - q.eval(us[i]);
    s += r * r;
  }
  return s;
}

// 4x4 linear solve, Gaussian elimination with partial pivoting.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> b,
            std::array<double, 4>& x) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 3; r >= 0; --r) {
    double v = b[r];
    for (int c = r + 1; c < 4; ++c) v -= a[r][c] * x[c];
    x[r] = v / a[r][r];
  }
  return true;
}

// Levenberg-Marquardt from one start; returns the achieved sum of squared
// residuals and writes iterations taken.
double levenberg_marquardt(Params& q, std::span<const double> us,
                           std::span<const double> ys, int& iterations) {
  double mu = 1e-3;
  double s = sum_squared_residuals(q, us, ys);
  const int max_iters = 400;
  int it = 0;
  bool done = false;
  for (; it < max_iters && !done; ++it) {
    // Jacobian of the model wrt the square-root parameters.
    std::array<std::array<double, 4>, 4> jtj{};
    std::array<double, 4> jtr{};
    for (std::size_t i = 0; i < us.size(); ++i) {
      const double u = us[i];
      const double e1 = std::exp(-q.b1() * u);
      const double e2 = std::exp(-q.b2() * u);
      const std::array<double, 4> j{
          2.0 * q.p[0] * e1,
          -q.a1() * u * e1 * 2.0 * q.p[1],
          2.0 * q.p[2] * e2,
          -q.a2() * u * e2 * 2.0 * q.p[3],
      };
      const double r = ys[i] - q.eval(u);
      for (int a = 0; a < 4; ++a) {
        jtr[a] += j[a] * r;
        for (int b = 0; b < 4; ++b) jtj[a][b] += j[a] * j[b];
      }
    }

    double grad_norm = 0.0;
    for (double g : jtr) grad_norm = std::max(grad_norm, std::fabs(g));
    if (grad_norm < 1e-14 * (1.0 + s)) break;

    bool moved = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      auto damped = jtj;
      for (int d = 0; d < 4; ++d) damped[d][d] += mu * (jtj[d][d] + 1e-12);
      std::array<double, 4> delta{};
      if (solve4(damped, jtr, delta)) {
        Params trial = q;
        for (int d = 0; d < 4; ++d) trial.p[d] += delta[d];
        const double trial_s = sum_squared_residuals(trial, us, ys);
        if (trial_s <= s) {
          double step = 0.0;
          for (double d : delta) step = std::max(step, std::fabs(d));
          done = s - trial_s < 1e-18 * (1.0 + s) && step < 1e-12;
          q = trial;
          s = trial_s;
          mu = std::max(mu * 0.3, 1e-12);
          moved = true;
          break;
        }
      }
      mu *= 4.0;
      if (mu > 1e12) break;
    }
    if (!moved) break;
  }
  iterations = it;
  return s;
}

// Amplitudes for fixed decay rates via 2x2 normal equations, clamped to be
// non-negative. Falls back to a single-term fit when the basis is
// degenerate (b1 == b2).
std::pair<double, double> solve_amplitudes(double b1, double b2,
                                           std::span<const double> us,
                                           std::span<const double> ys) {
  double m11 = 0.0, m12 = 0.0, m22 = 0.0, v1 = 0.0, v2 = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double e1 = std::exp(-b1 * us[i]);
    const double e2 = std::exp(-b2 * us[i]);
    m11 += e1 * e1;
    m12 += e1 * e2;
    m22 += e2 * e2;
    v1 += e1 * ys[i];
    v2 += e2 * ys[i];
  }
  const double det = m11 * m22 - m12 * m12;
  double a1, a2;
  if (std::fabs(det) < 1e-12 * std::max(1.0, m11 * m22)) {
    a1 = m11 > 0.0 ? v1 / m11 : 0.0;
    a2 = 0.0;
  } else {
    a1 = (v1 * m22 - v2 * m12) / det;
    a2 = (v2 * m11 - v1 * m12) / det;
  }
  return {std::max(a1, 0.0), std::max(a2, 0.0)};
}

}  // namespace

BiexpFit fit_biexponential(std::span<const std::pair<double, double>> points) {
  std::vector<double> us, ys;
  std::vector<double> zetas;
  for (const auto& [zeta, rmse] : points) {
    if (!(zeta > 0.0) || !std::isfinite(rmse))
      throw std::invalid_argument("fit_biexponential: points need zeta > 0 and finite rmse");
    zetas.push_back(zeta);
    us.push_back(log4(zeta));
    ys.push_back(rmse);
  }
  std::vector<double> distinct = zetas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4)
    throw std::invalid_argument("fit_biexponential: need >= 4 points with distinct zeta");

  constexpr std::array<double, 4> fast_rates{4.0, 1.0, 0.25, 0.0};
  constexpr std::array<double, 4> slow_rates{1.0, 0.25, 0.0625, 0.0};

  double best_s = std::numeric_limits<double>::infinity();
  double best_norm = std::numeric_limits<double>::infinity();
  Params best{};
  int best_iters = 0;
  bool found = false;

  for (double b1 : fast_rates)
    for (double b2 : slow_rates) {
      const auto [a1, a2] = solve_amplitudes(b1, b2, us, ys);
      Params q;
      q.p = {std::sqrt(a1), std::sqrt(b1), std::sqrt(a2), std::sqrt(b2)};
      int iters = 0;
      const double s = levenberg_marquardt(q, us, ys, iters);
      if (!std::isfinite(s)) continue;
      const double tol = 1e-12 * (1.0 + best_s);
      const bool better = s < best_s - tol;
      const bool tied = std::fabs(s - best_s) <= tol;
      if (!found || better || (tied && q.norm() < best_norm)) {
        best = q;
        best_s = s;
        best_norm = q.norm();
        best_iters = iters;
        found = true;
      }
    }

  if (!found)
    throw std::runtime_error(
        "fit_biexponential: no start converged to a finite residual over " +
        std::to_string(points.size()) + " points");

  BiexpFit fit;
  fit.a1 = best.a1();
  fit.b1 = best.b1();
  fit.a2 = best.a2();
  fit.b2 = best.b2();
  fit.residual_norm = std::sqrt(best_s);
  fit.iterations = best_iters;
  fit.zeta_min = distinct.front();
  fit.zeta_max = distinct.back();
  return fit;
}

bool non_increasing(const BiexpFit& fit, int grid_points) {
  const double u_lo = log4(fit.zeta_min);
  const double u_hi = log4(fit.zeta_max);
  double prev = fit.eval_u(u_lo);
  for (int i = 1; i < grid_points; ++i) {
    const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) /
                                static_cast<double>(grid_points - 1);
    const double v = fit.eval_u(u);
    if (v > prev + 1e-12) return false;
    prev = v;
  }
  return true;
}

EssResult effective_sample_size(const BiexpFit& curve_k1, const BiexpFit& curve_kt,
                                double zeta) {
  if (!non_increasing(curve_k1) || !non_increasing(curve_kt))
    throw std::invalid_argument("effective_sample_size: curves must be non-increasing");
  const double target = curve_kt.eval_zeta(zeta);

  double lo = curve_k1.zeta_min;
  double hi = curve_k1.zeta_max;
  const double f_lo = curve_k1.eval_zeta(lo);
  const double f_hi = curve_k1.eval_zeta(hi);
  if (target > f_lo || target < f_hi)
    throw std::runtime_error(
        "effective_sample_size: extrapolation required; target " +
        std::to_string(target) + " outside K=1 curve range [" + std::to_string(f_hi) +
        ", " + std::to_string(f_lo) + "] over zeta in [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "]");

  for (int i = 0; i < 200 && hi - lo > 1e-12 * lo; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (curve_k1.eval_zeta(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  const double root = 0.5 * (lo + hi);
  EssResult result;
  result.zeta = zeta;
  result.zeta_prime = root;
  result.ratio = root / zeta;
  result.ratio_above_one = result.ratio > 1.0;
  return result;
}

}  // namespace wpsim
