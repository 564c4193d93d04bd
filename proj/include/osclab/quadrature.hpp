#pragma once

// Adaptive Gauss-Kronrod quadrature plus the fixed rules (tensor
// Gauss-Legendre, periodic trapezoid) used by the oscillation and
// martingale integrals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <vector>

namespace osclab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;          // accumulated error estimate
  long long evals = 0;         // integrand evaluations spent
  bool converged = true;       // false when the budget ran out first
};

struct QuadOptions {
  double abs_tol = 1e-10;
  long long max_evals = 1'000'000;
};

namespace detail {

// G7/K15 on [0,1] half-axis: {abscissa, gauss weight, kronrod weight}.
inline constexpr double kGK15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class T>
inline double norm_of(const T& v) {
  if constexpr (std::is_same_v<T, std::complex<double>>)
    return std::abs(v);
  else
    return std::fabs(v);
}

}  // namespace detail

// One G7K15 panel. T is double or std::complex<double>.
template <class T = double, class F>
inline T gauss_kronrod_15(F&& f, double a, double b, double& err) {
  const double mid = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  T y0 = f(mid);
  T g7 = detail::kGK15[0][1] * y0;
  T k15 = detail::kGK15[0][2] * y0;
  for (int i = 1; i < 8; ++i) {
    const double dx = hw * detail::kGK15[i][0];
    T yi = f(mid + dx) + f(mid - dx);
    g7 += detail::kGK15[i][1] * yi;
    k15 += detail::kGK15[i][2] * yi;
  }
  g7 *= hw;
  k15 *= hw;
  // QUADPACK-style estimate, capped by the raw G-K difference
  const double diff = detail::norm_of<T>(k15 - g7);
  err = std::min(diff, std::pow(200.0 * diff, 1.5));
  return k15;
}

// Globally adaptive refinement over an initial panel list.  Panels with the
// largest error estimates are bisected until the summed estimate drops below
// abs_tol or the evaluation budget is exhausted.
template <class T = double, class F>
inline QuadResult integrate_panels_t(F&& f, std::vector<double> knots,
                                     const QuadOptions& opt, T* value_out) {
  struct Seg {
    double a, b, err;
    T val;
    bool operator<(const Seg& o) const { return err < o.err; }
  };
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  if (knots.size() < 2) throw std::invalid_argument("integrate: empty panel list");

  std::priority_queue<Seg> heap;
  QuadResult res;
  T total{};
  double total_err = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    double e;
    T v = gauss_kronrod_15<T>(f, knots[i], knots[i + 1], e);
    res.evals += 15;
    heap.push({knots[i], knots[i + 1], e, v});
    total += v;
    total_err += e;
  }
  const double min_width = 1e-15;
  while (total_err > opt.abs_tol && res.evals + 30 <= opt.max_evals) {
    Seg s = heap.top();
    if (s.b - s.a <= min_width * (1.0 + std::fabs(s.a))) break;  // roundoff floor
    heap.pop();
    total -= s.val;
    total_err -= s.err;
    const double m = 0.5 * (s.a + s.b);
    double e1, e2;
    T v1 = gauss_kronrod_15<T>(f, s.a, m, e1);
    T v2 = gauss_kronrod_15<T>(f, m, s.b, e2);
    res.evals += 30;
    heap.push({s.a, m, e1, v1});
    heap.push({m, s.b, e2, v2});
    total += v1 + v2;
    total_err += e1 + e2;
  }
  res.error = total_err;
  res.converged = total_err <= opt.abs_tol;
  *value_out = total;
  res.value = detail::norm_of<T>(total);  // overwritten for real case below
  return res;
}

template <class F>
inline QuadResult integrate_panels(F&& f, std::vector<double> knots,
                                   const QuadOptions& opt = {}) {
  double v = 0;
  QuadResult r = integrate_panels_t<double>(f, std::move(knots), opt, &v);
  r.value = v;
  return r;
}

template <class F>
inline QuadResult integrate_adaptive(F&& f, double a, double b,
                                     const QuadOptions& opt = {}) {
  return integrate_panels(std::forward<F>(f), {a, b}, opt);
}

template <class F>
inline QuadResult integrate_panels_complex(F&& f, std::vector<double> knots,
                                           const QuadOptions& opt,
                                           std::complex<double>* out) {
  return integrate_panels_t<std::complex<double>>(f, std::move(knots), opt, out);
}

// ---------------------------------------------------------------------------
// Fixed Gauss-Legendre rules (used for cube averages).

namespace detail {
// {node, weight} on [-1,1], positive half; full rule by symmetry.
inline constexpr double kGL8[4][2] = {
    {0.183434642495650, 0.362683783378362},
    {0.525532409916329, 0.313706645877887},
    {0.796666477413627, 0.222381034453374},
    {0.960289856497536, 0.101228536290376},
};
inline constexpr double kGL16[8][2] = {
    {0.095012509837637440185, 0.189450610455068496285},
    {0.281603550779258913230, 0.182603415044923588867},
    {0.458016777657227386342, 0.169156519395002538189},
    {0.617876244402643748447, 0.149595988816576732081},
    {0.755404408355003033895, 0.124628971255533872052},
    {0.865631202387831743880, 0.095158511682492784810},
    {0.944575023073232576078, 0.062253523938647892863},
    {0.989400934991649932596, 0.027152459411754094852},
};
}  // namespace detail

// ∫_a^b f, fixed-order Gauss-Legendre (order 8 or 16).
template <class F>
inline double gauss_legendre(F&& f, double a, double b, int order = 8) {
  const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
  double s = 0.0;
  if (order <= 8) {
    for (const auto& nw : detail::kGL8)
      s += nw[1] * (f(mid + hw * nw[0]) + f(mid - hw * nw[0]));
  } else {
    for (const auto& nw : detail::kGL16)
      s += nw[1] * (f(mid + hw * nw[0]) + f(mid - hw * nw[0]));
  }
  return s * hw;
}

// Average of a periodic function over [0, 2π) with N equispaced nodes.
// Spectrally accurate for smooth periodic integrands.
template <class F>
inline double periodic_average(F&& f, int n) {
  double s = 0.0;
  const double step = 2.0 * M_PI / n;
  for (int i = 0; i < n; ++i) s += f(i * step);
  return s / n;
}

}  // namespace osclab
