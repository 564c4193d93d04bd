#pragma once

// Oscillatory integrals with power-law weights.  These evaluate, with near
// machine accuracy and O(1) cost per frequency, the h-integrals
//
//     ∫_lo^hi  Σ_i μ_i e^{i ω a_i h}  h^{-(1+β)} dh,
//
// which is what the oscillation functionals reduce to term by term on
// trigonometric (lacunary) series.  Direct panel quadrature cannot resolve
// these once ω h >> 1; here the oscillatory range is handled through the
// tail integral E(w;β) = ∫_w^∞ e^{it} t^{-(1+β)} dt (asymptotic expansion
// for large w, panel quadrature below), and the non-oscillatory range
// through the Taylor series of Σ μ_i e^{i a_i v}, whose first q coefficients
// vanish when the measure has q vanishing moments.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "osclab/quadrature.hpp"

namespace osclab {

using cdouble = std::complex<double>;

namespace detail {

inline constexpr double kAsymSwitch = 50.0;  // asymptotic series valid beyond

// prefactor * E(w;β) with E(w;β) = ∫_w^∞ e^{it} t^{-(1+β)} dt, w ≥ kAsymSwitch.
// The prefactor is folded into the leading term so that huge w (up to ~2^90)
// cause no intermediate under/overflow.
inline cdouble exp_tail_asymptotic_scaled(double w, double beta, double lead_mag) {
  // E = i e^{iw} Σ_j (-i)^j (ν)_j w^{-ν-j},  ν = 1+β; lead_mag = pref·w^{-ν}.
  const double nu = 1.0 + beta;
  const cdouble eiw(std::cos(w), std::sin(w));
  cdouble term = cdouble(0.0, 1.0) * eiw * lead_mag;
  cdouble sum = term;
  double prev_mag = std::abs(term);
  for (int j = 0; j < 60; ++j) {
    const cdouble next = term * (cdouble(0.0, -1.0) * ((nu + j) / w));
    const double mag = std::abs(next);
    if (mag >= prev_mag) break;  // past the smallest term
    sum += next;
    term = next;
    prev_mag = mag;
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// E(w;β) for 0 < w < kAsymSwitch via panel quadrature up to the switch point.
inline cdouble exp_tail_quad(double w, double beta) {
  const double nu = 1.0 + beta;
  std::vector<double> knots;
  double t = w;
  while (t < 1.0) {  // resolve the t^{-ν} steepness
    knots.push_back(t);
    t *= 4.0;
  }
  t = std::max(w, 1.0);
  while (t < kAsymSwitch) {  // resolve the oscillation
    knots.push_back(t);
    t += M_PI;
  }
  knots.push_back(kAsymSwitch);
  QuadOptions opt;
  opt.abs_tol = 1e-15 * (1.0 + std::pow(w, -beta));
  opt.max_evals = 200000;
  cdouble val;
  integrate_panels_complex(
      [nu](double s) {
        return cdouble(std::cos(s), std::sin(s)) * std::pow(s, -nu);
      },
      knots, opt, &val);
  return val + exp_tail_asymptotic_scaled(kAsymSwitch, beta,
                                          std::pow(kAsymSwitch, -nu));
}

}  // namespace detail

// E(w;β) = ∫_w^∞ e^{it} t^{-(1+β)} dt for w > 0, 0 < β ≤ 3.5.
inline cdouble exp_tail_integral(double w, double beta) {
  if (!(w > 0.0)) throw std::domain_error("exp_tail_integral: w must be > 0");
  if (!(beta > 0.0 && beta <= 3.5))
    throw std::domain_error("exp_tail_integral: beta out of range");
  if (w >= detail::kAsymSwitch)
    return detail::exp_tail_asymptotic_scaled(w, beta, std::pow(w, -(1.0 + beta)));
  return detail::exp_tail_quad(w, beta);
}

// (1-cos t)/t^2, stable near t = 0.
inline double one_minus_cos_over_t2(double t) {
  const double a = std::fabs(t);
  if (a < 1e-4) {
    const double t2 = t * t;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  return (1.0 - std::cos(t)) / (t * t);
}

// T(z) = ∫_z^∞ (1-cos t)/t^2 dt;  T(0) = π/2.
inline double one_minus_cos_tail(double z) {
  if (z < 0.0) throw std::domain_error("one_minus_cos_tail: z must be >= 0");
  if (z >= detail::kAsymSwitch)
    return 1.0 / z - exp_tail_integral(z, 1.0).real();
  if (z <= 1.0) {
    // π/2 minus the head; the head integrand is smooth and bounded by 1/2.
    if (z == 0.0) return M_PI_2;
    QuadResult head = integrate_adaptive(
        [](double t) { return one_minus_cos_over_t2(t); }, 0.0, z,
        {1e-15, 100000});
    return M_PI_2 - head.value;
  }
  std::vector<double> knots;
  for (double t = z; t < detail::kAsymSwitch; t += M_PI) knots.push_back(t);
  knots.push_back(detail::kAsymSwitch);
  QuadResult mid = integrate_panels(
      [](double t) { return one_minus_cos_over_t2(t); }, knots,
      {1e-15, 200000});
  return mid.value + 1.0 / detail::kAsymSwitch -
         exp_tail_integral(detail::kAsymSwitch, 1.0).real();
}

// A one-dimensional atomic measure as seen by the h-integrals: positions,
// weights, and the number q of vanishing moments (Σ μ_i a_i^r = 0 for r < q).
struct AtomSet1d {
  std::vector<double> pos;
  std::vector<double> wt;
  int vanishing = 1;        // q
  double max_abs_pos = 0.0; // A
  double total_var = 0.0;
};

namespace detail {

// ∫_{u1}^{u2} e^{iBh} h^{-(1+β)} dh, 0 < u1 < u2.
inline cdouble single_exp_integral(double B, double beta, double u1, double u2) {
  const double nu = 1.0 + beta;
  if (B == 0.0)
    return cdouble((std::pow(u1, -beta) - std::pow(u2, -beta)) / beta, 0.0);
  const bool neg = B < 0.0;
  const double Ba = std::fabs(B);
  const double w1 = Ba * u1, w2 = Ba * u2;
  // value = Ba^β (E(w1) - E(w2)); fold the prefactor into the leading
  // magnitudes Ba^β w^{-ν} = u^{-ν}/Ba so huge B causes no under/overflow.
  auto scaled_tail = [&](double w, double u) -> cdouble {
    if (w >= kAsymSwitch)
      return exp_tail_asymptotic_scaled(w, beta, std::pow(u, -nu) / Ba);
    return std::pow(Ba, beta) * exp_tail_quad(w, beta);  // w < 50 keeps both sane
  };
  const cdouble val = scaled_tail(w1, u1) - scaled_tail(w2, u2);
  return neg ? std::conj(val) : val;
}

// ∫_{u1}^{u2} Σ_i μ_i e^{i ω a_i h} h^{-(1+β)} dh via the Taylor series of
// g(v) = Σ μ_i e^{i a_i v}; requires ω·A·u2 ≤ 1 (non-oscillatory range) and
// q > β.  Coefficients of index < q are exactly zero by the moment
// conditions and are skipped to avoid amplifying float dust at large ω.
inline cdouble series_integral(const AtomSet1d& s, double omega, double beta,
                               double u1, double u2) {
  // Everything is kept in the bounded variables v_i(r) = (i a_i ω u2)^r / r!
  // (|a_i ω u2| ≤ 1 in this range) and ρ^r = (u1/u2)^r, so that
  //   g_r ω^r (u2^{r-β} - u1^{r-β}) = Σ_i μ_i v_i(r) (u2^{-β} - u1^{-β} ρ^r).
  const size_t n = s.pos.size();
  std::vector<cdouble> v(n, cdouble(1.0, 0.0));
  const double c2 = std::pow(u2, -beta);
  const double c1 = (u1 > 0.0) ? std::pow(u1, -beta) : 0.0;
  const double rho = (u1 > 0.0) ? u1 / u2 : 0.0;
  double rho_r = 1.0;
  cdouble acc(0.0, 0.0);
  int tiny_streak = 0;
  for (int r = 0; r <= 70; ++r) {
    if (r >= s.vanishing) {
      cdouble g(0.0, 0.0);
      for (size_t i = 0; i < n; ++i) g += s.wt[i] * v[i];
      const cdouble term = g * ((c2 - c1 * rho_r) / (r - beta));
      acc += term;
      if (std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) {
        if (++tiny_streak >= 2) break;
      } else {
        tiny_streak = 0;
      }
    }
    for (size_t i = 0; i < n; ++i)
      v[i] *= cdouble(0.0, s.pos[i] * omega * u2) / double(r + 1);
    rho_r *= rho;
  }
  return acc;
}

}  // namespace detail

// ∫_lo^hi Σ_i μ_i e^{i ω a_i h} h^{-(1+β)} dh for 0 ≤ lo < hi ≤ 1.
// Requires q > β when lo = 0 (the integral is improper there); the same
// condition is kept for lo > 0 so the series split below always applies.
inline cdouble oscillation_h_integral(const AtomSet1d& s, double omega,
                                      double beta, double lo, double hi) {
  if (!(beta > 0.0 && beta <= 3.5))
    throw std::domain_error("oscillation_h_integral: beta out of range");
  if (!(0.0 <= lo && lo < hi && hi <= 1.0))
    throw std::domain_error("oscillation_h_integral: bad [lo,hi]");
  if (!(s.vanishing > beta))
    throw std::domain_error(
        "oscillation_h_integral: needs more vanishing moments than beta");
  if (omega == 0.0) return cdouble(0.0, 0.0);  // g(0) = Σ μ_i = 0 (q ≥ 1)
  if (omega < 0.0) return std::conj(oscillation_h_integral(s, -omega, beta, lo, hi));

  const double A = s.max_abs_pos;
  if (A == 0.0) return cdouble(0.0, 0.0);  // only a (zero-mass) atom at 0

  double h_star = hi;
  if (omega * A * hi > 1.0) h_star = std::max(lo, 1.0 / (omega * A));

  cdouble acc(0.0, 0.0);
  if (h_star > lo) acc += detail::series_integral(s, omega, beta, lo, h_star);
  if (h_star < hi) {
    for (size_t i = 0; i < s.pos.size(); ++i)
      acc += s.wt[i] *
             detail::single_exp_integral(omega * s.pos[i], beta, h_star, hi);
  }
  return acc;
}

}  // namespace osclab
