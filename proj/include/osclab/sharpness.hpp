#pragma once

// Sharpness construction for the Zygmund case: the oscillation Υ_ε of the
// Weierstrass-type series Σ b^{-k} cos(b^k x), its coefficients
// a_k(ε) = -2 ∫_{b^k ε}^{b^k} (1-cos t)/t² dt, the cutoff N(ε), the lacunary
// approximation gap, and the lower-bound LIL experiment.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "osclab/martingale.hpp"
#include "osclab/oscillation.hpp"
#include "osclab/oscillatory.hpp"

namespace osclab {

// a_k(ε) = -2 ∫_{b^k ε}^{b^k} (1-cos t)/t² dt; a_k(0) -> -π as b^k -> ∞.
inline double a_coeff(double b, int k, double eps) {
  if (k < 1) throw std::invalid_argument("a_coeff: k >= 1");
  if (!(b > 1.0)) throw std::invalid_argument("a_coeff: b > 1");
  if (eps < 0.0) throw std::invalid_argument("a_coeff: eps >= 0");
  if (eps >= 1.0) return 0.0;  // empty interval
  const double bk = std::pow(b, k);
  const double upper_tail = (bk > 1e15) ? 1.0 / bk : one_minus_cos_tail(bk);
  const double z = bk * eps;
  const double lower_tail = (z > 1e15) ? 1.0 / z : one_minus_cos_tail(z);
  return -2.0 * (lower_tail - upper_tail);
}

inline double a_zero(double b, int k) { return a_coeff(b, k, 0.0); }

// Smallest integer n >= 0 with ε b^n >= 1.
inline int n_of_eps(double b, double eps) {
  if (!(b > 1.0)) throw std::invalid_argument("n_of_eps: b > 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("n_of_eps: eps in (0,1]");
  int n = std::max(0, static_cast<int>(std::ceil(-std::log(eps) / std::log(b) - 1e-12)));
  while (std::pow(b, n) * eps < 1.0) ++n;
  while (n > 0 && std::pow(b, n - 1) * eps >= 1.0) --n;
  return n;
}

// Υ_ε f(x) for f = Σ_{k>=1} b^{-k} cos(b^k x): Θ with σ = δ_1+δ_{-1}-2δ_0
// and exponent 1.
inline double upsilon(double b, double x, double eps, double quad_tol = 1e-8) {
  if (eps >= 1.0) return 0.0;  // empty h-interval
  const FunctionSpec f = FunctionSpec::zygmund_weierstrass(b);
  const SignedMeasure s2 = make_named(NamedMeasure::sym2);
  ThetaSeriesEvaluator ev(f, s2, 0, 1.0, eps, 1.0, 0.5 * quad_tol);
  return ev.value_at(x);
}

// |Υ_ε f(x) - Σ_{k<=N(ε)} a_k(0) cos(b^k x)|
inline double lacunary_gap(double b, double x, double eps, double quad_tol = 1e-8) {
  const double ups = upsilon(b, x, eps, quad_tol);
  const int N = n_of_eps(b, eps);
  double partial = 0.0;
  for (int k = 1; k <= N; ++k)
    partial += a_zero(b, k) * std::cos(std::pow(b, k) * x);
  return std::fabs(ups - partial);
}

struct SharpnessConfig {
  double b = 2.0;
  std::vector<double> eps_grid;  // sorted decreasing
  std::vector<double> xs;
  double quad_tol = 1e-8;
  double theta0_factor = 0.5;  // θ0 = factor * median of final running maxima
};

struct SharpnessRow {
  double x;
  int n;  // index into the eps grid
  double eps;
  double upsilon;
  double partial_sum;
  double gap;
  double ratio;  // signed, Υ_ε / sqrt(log(1/ε) logloglog(1/ε))
};

struct SharpnessResult {
  std::vector<SharpnessRow> rows;
  std::vector<double> final_running_max;  // per x
  double theta0 = 0.0;
  double fraction_above = 0.0;
};

// Per-x running max of the signed LIL ratio of Υ_ε over the ε grid; reports
// the fraction of samples whose final running max exceeds θ0.
inline SharpnessResult lil_lower_experiment(const SharpnessConfig& cfg) {
  if (cfg.eps_grid.empty() || cfg.xs.empty())
    throw std::invalid_argument("lil_lower_experiment: empty grids");
  for (size_t i = 1; i < cfg.eps_grid.size(); ++i)
    if (!(cfg.eps_grid[i] < cfg.eps_grid[i - 1]))
      throw std::invalid_argument("lil_lower_experiment: eps grid must decrease");
  const double e_cut = std::exp(-std::exp(1.0));
  for (double e : cfg.eps_grid)
    if (!(e < e_cut))
      throw std::invalid_argument("lil_lower_experiment: needs eps < e^{-e}");

  const FunctionSpec f = FunctionSpec::zygmund_weierstrass(cfg.b);
  const SignedMeasure s2 = make_named(NamedMeasure::sym2);

  SharpnessResult res;
  std::vector<double> run(cfg.xs.size(), -1e300);
  // a_k(0) cache up to the largest cutoff
  const int n_top = n_of_eps(cfg.b, cfg.eps_grid.back());
  std::vector<double> az(n_top + 1, 0.0);
  for (int k = 1; k <= n_top; ++k) az[k] = a_zero(cfg.b, k);

  for (size_t ei = 0; ei < cfg.eps_grid.size(); ++ei) {
    const double eps = cfg.eps_grid[ei];
    ThetaSeriesEvaluator ev(f, s2, 0, 1.0, eps, 1.0, 0.5 * cfg.quad_tol);
    const double L = std::log(1.0 / eps);
    const double denom = std::sqrt(L * std::log(std::log(L)));
    const int N = n_of_eps(cfg.b, eps);
    for (size_t xi = 0; xi < cfg.xs.size(); ++xi) {
      const double x = cfg.xs[xi];
      const double ups = ev.value_at(x);
      double partial = 0.0;
      for (int k = 1; k <= std::min(N, n_top); ++k)
        partial += az[k] * std::cos(std::pow(cfg.b, k) * x);
      const double ratio = ups / denom;
      run[xi] = std::max(run[xi], ratio);
      res.rows.push_back({x, static_cast<int>(ei), eps, ups, partial,
                          std::fabs(ups - partial), ratio});
    }
  }
  res.final_running_max = run;
  std::vector<double> sorted = run;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  res.theta0 = cfg.theta0_factor * median;
  size_t above = 0;
  for (double v : run)
    if (v > res.theta0) ++above;
  res.fraction_above = static_cast<double>(above) / run.size();
  return res;
}

}  // namespace osclab
