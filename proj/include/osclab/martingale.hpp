#pragma once

// The dyadic martingale S_Q = ∫_0^1 avg_Q Δ_σf(·,h) dh/h^{m+α+1} on the unit
// cube, with martingale-property, increment and comparison diagnostics, and
// the Law of the Iterated Logarithm ratio tables.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "osclab/oscillation.hpp"
#include "osclab/parallel.hpp"
#include "osclab/random.hpp"

namespace osclab {

struct DyadicCube {
  int n = 0;
  std::vector<int> idx;  // per-axis index in [0, 2^n)
  double side() const { return std::ldexp(1.0, -n); }
  double lower(int j) const { return idx[j] * side(); }
};

namespace detail {

inline size_t flat_index(const std::vector<int>& idx, int n) {
  size_t f = 0;
  for (int v : idx) f = (f << n) | static_cast<size_t>(v);
  return f;
}

inline std::vector<int> unflatten(size_t flat, int n, int d) {
  std::vector<int> idx(d);
  const size_t mask = (size_t{1} << n) - 1;
  for (int j = d - 1; j >= 0; --j) {
    idx[j] = static_cast<int>(flat & mask);
    flat >>= n;
  }
  return idx;
}

// (1/s) ∫_a^{a+s} e^{iωx} dx
inline cdouble interval_avg_exp(double omega, double a, double s) {
  const double t = omega * s;
  cdouble factor;
  if (std::fabs(t) < 1e-4) {
    factor = cdouble(1.0 - t * t / 6.0, 0.5 * t - t * t * t / 24.0);
  } else {
    factor = (cdouble(std::cos(t), std::sin(t)) - 1.0) / cdouble(0.0, t);
  }
  return cdouble(std::cos(omega * a), std::sin(omega * a)) * factor;
}

}  // namespace detail

struct SValueOutcome {
  double value = 0.0;
  double error = 0.0;
  long long evals = 0;
  bool converged = true;
};

// ∫_Q Δ_σ f(x,h) dm_d(x) at fixed h (not the average).  Closed form per
// cosine term for series kinds, tensor Gauss-Legendre otherwise.  By the
// moment cancellation this decays like h^{m+1} (an extra log at α = 1),
// which is what makes the S_Q integral converge at h = 0.
inline double integral_delta_over_cube(const FunctionSpec& f,
                                       const SignedMeasure& sigma,
                                       const DyadicCube& cube, double h) {
  const int d = sigma.dim();
  const double s = cube.side();
  const double vol = std::pow(s, d);
  if (f.has_cosine_series() && !sigma.sphere()) {
    const AtomSet1d atoms = project_atoms(sigma);
    double acc = 0.0;
    for (int k = 0; k < 4000; ++k) {
      const TrigTerm t = f.cosine_term(k);
      if (t.freq > 1e290) break;
      cdouble g(0.0, 0.0);
      for (size_t i = 0; i < atoms.pos.size(); ++i) {
        const double ph = t.freq * atoms.pos[i] * h;
        g += atoms.wt[i] * cdouble(std::cos(ph), std::sin(ph));
      }
      const cdouble eq = detail::interval_avg_exp(t.freq, cube.lower(0), s);
      acc += t.coeff * (eq * g).real();
      const double bound =
          t.coeff * atoms.total_var * std::min(1.0, 2.0 / (t.freq * s));
      if (bound < 1e-15 && t.freq * s > 2.0) break;
    }
    return acc * vol;
  }
  double acc = 0.0;
  std::vector<int> node(d, 0);
  std::vector<double> x(d);
  while (true) {
    double wprod = 1.0;
    for (int j = 0; j < d; ++j) {
      const int i = node[j];
      const double t = (i < 8) ? osclab::detail::kGL16[i][0]
                               : -osclab::detail::kGL16[i - 8][0];
      x[j] = cube.lower(j) + 0.5 * s * (1.0 + t);
      wprod *= osclab::detail::kGL16[(i < 8) ? i : i - 8][1];
    }
    acc += wprod * delta_sigma(f, sigma, x, h);
    int j = d - 1;
    while (j >= 0 && ++node[j] == 16) node[j--] = 0;
    if (j < 0) break;
  }
  return acc * std::pow(0.5, d) * vol;
}

namespace detail {

// Generic-path S_Q: tensor Gauss cube average, log-substituted adaptive
// h-integral above ℓ(Q)/2, geometric panels with a fitted tail majorant
// below (the integrand decays like h^{m+1-β}, or with an extra log factor
// when α = 1, so the improper endpoint is integrable).
inline SValueOutcome s_value_adaptive(const FunctionSpec& f,
                                      const SignedMeasure& sigma,
                                      const DyadicCube& cube, int m, double alpha,
                                      double quad_tol, long long budget) {
  const int d = sigma.dim();
  const double beta = m + alpha;
  const double s = cube.side();
  std::vector<double> lo(d);
  for (int j = 0; j < d; ++j) lo[j] = cube.lower(j);

  long long evals = 0;
  double ratio_panel = 0.0;  // max |A(h)| / majorant-weight(h), current panel

  // magnitude scale of f near the cube, for the rounding floor of the
  // cube-average refinement
  double fscale = 0.0;
  {
    const double A = sigma.support_radius();
    for (int i = 0; i < 8; ++i) {
      std::vector<double> x(d);
      for (int j = 0; j < d; ++j)
        x[j] = lo[j] + s * (i + 0.5) / 8.0;
      for (double shift : {-0.5 * A, 0.0, 0.5 * A}) {
        std::vector<double> xs = x;
        xs[0] += shift;
        fscale = std::max(fscale, std::fabs(f.eval_point(xs.data(), d)));
      }
    }
  }
  const double avg_floor = 2e-15 * (1.0 + fscale) * sigma.total_variation();

  // composite tensor Gauss-Legendre average over the cube: 2^r uniform
  // subcells per axis, order 8 within each
  auto avg_level = [&](double h, int r) {
    const int cells = 1 << r;
    const double sub = s / cells;
    double acc = 0.0;
    std::vector<int> cell(d, 0), node(d, 0);
    std::vector<double> x(d);
    while (true) {
      node.assign(d, 0);
      double cell_acc = 0.0;
      while (true) {
        double wprod = 1.0;
        for (int j = 0; j < d; ++j) {
          const int i = node[j];
          const double t = (i < 4) ? osclab::detail::kGL8[i][0]
                                   : -osclab::detail::kGL8[i - 4][0];
          x[j] = lo[j] + (cell[j] + 0.5 * (1.0 + t)) * sub;
          wprod *= osclab::detail::kGL8[(i < 4) ? i : i - 4][1];
        }
        cell_acc += wprod * delta_sigma(f, sigma, x, h);
        ++evals;
        int j = d - 1;
        while (j >= 0 && ++node[j] == 8) node[j--] = 0;
        if (j < 0) break;
      }
      acc += cell_acc;
      int j = d - 1;
      while (j >= 0 && ++cell[j] == cells) cell[j--] = 0;
      if (j < 0) break;
    }
    // GL weights sum to 2 per axis; divide by cell count for the average
    return acc * std::pow(0.5, d) / std::pow(cells, d);
  };

  auto cube_avg = [&](double h) {
    // refine by subdividing until two successive levels agree; the average
    // error is amplified by h^{-β-1} in the outer integral, so the agreement
    // threshold scales with h^β down to the Δ-evaluation rounding floor
    const int r_cap = (d == 1) ? 9 : (d == 2 ? 3 : 2);
    const double thresh =
        std::max(0.01 * quad_tol * std::pow(h, beta), avg_floor);
    double prev = avg_level(h, 0);
    double val = prev;
    for (int r = 1; r <= r_cap; ++r) {
      val = avg_level(h, r);
      if (std::fabs(val - prev) <= thresh) break;
      prev = val;
    }
    const double w = (alpha < 1.0)
                         ? std::pow(h, m + 1)
                         : std::pow(h, m + 2) * (std::log(s / h) + 1.0);
    if (h < 0.5 * s && w > 0.0)
      ratio_panel = std::max(ratio_panel, std::fabs(val) / w);
    return val;
  };

  auto integrand_u = [&](double u) {
    const double h = std::exp(u);
    return cube_avg(h) * std::exp(-beta * u);
  };

  SValueOutcome out;
  // the cube average costs ~24 Δ-evaluations per integrand call
  const long long calls_budget = std::max<long long>(512, budget / 24);

  // upper range [ℓ(Q)/2, 1]
  {
    std::vector<double> knots;
    knots.push_back(std::log(0.5 * s));
    for (int j = 0; std::ldexp(1.0, -j) > 0.5 * s; ++j)
      if (std::ldexp(1.0, -j) < 1.0) knots.push_back(-j * M_LN2);
    knots.push_back(0.0);
    QuadOptions opt{0.5 * quad_tol, calls_budget};
    QuadResult qr = integrate_panels(integrand_u, knots, opt);
    out.value += qr.value;
    out.error += qr.error;
  }

  // improper range (0, ℓ(Q)/2): geometric panels until both the panel
  // contribution and the fitted analytic tail drop below quad_tol/4.  The
  // panel values of the true integrand decay (it is O(h^{2-α} log(ℓ/h)) by
  // the moment cancellation), while float cancellation noise in Δ_σ f amplified by
  // h^{-β} grows geometrically; a turnaround in |panel| marks the rounding
  // floor and the descent stops there, with the tail majorant as the error.
  double h_hi = 0.5 * s;
  double prev_abs = 1e300;
  double last_ratio = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double h_lo = 0.5 * h_hi;
    ratio_panel = 0.0;
    QuadOptions opt{quad_tol / 8.0, calls_budget / 8};
    QuadResult qr =
        integrate_panels(integrand_u, {std::log(h_lo), std::log(h_hi)}, opt);
    auto tail_of = [&](double ratio, double h) {
      const double C = 2.0 * ratio;
      return (alpha < 1.0) ? C * std::pow(h, 1.0 - alpha) / (1.0 - alpha)
                           : C * h * (std::log(s / h) + 2.0);
    };
    const double mag = std::fabs(qr.value);
    if (j >= 1 && mag >= prev_abs && mag <= 1e-4 * (1.0 + std::fabs(out.value))) {
      out.error += mag + tail_of(last_ratio, h_lo);  // discard the noise panel
      break;
    }
    out.value += qr.value;
    out.error += qr.error;
    last_ratio = ratio_panel;
    prev_abs = mag;
    if (mag < 0.25 * quad_tol && tail_of(last_ratio, h_lo) < 0.25 * quad_tol) {
      out.error += tail_of(last_ratio, h_lo);
      break;
    }
    h_hi = h_lo;
  }
  out.evals = evals;
  if (evals >= budget) out.converged = false;  // only budget exhaustion errors
  return out;
}

}  // namespace detail

struct MartingaleBuildOptions {
  double quad_tol = 1e-8;
  long long budget_per_cube = 400'000;
  int threads = 1;  // generic-path cubes are independent tasks
};

class DyadicMartingale {
 public:
  // Builds S_n for n = 0..n_max.  Series-kind functions go through the
  // term-wise path (exact cube averages of cosines, shared per-frequency
  // h-integrals); everything else through per-cube adaptive quadrature.
  static DyadicMartingale build(const FunctionSpec& f, const SignedMeasure& sigma,
                                int n_max, int m, double alpha,
                                const MartingaleBuildOptions& opt = {});

  int dim() const { return dim_; }
  int n_max() const { return n_max_; }
  double quad_tol() const { return quad_tol_; }
  const std::vector<double>& level(int n) const { return levels_.at(n); }

  double value(int n, size_t flat) const { return levels_.at(n).at(flat); }

  double value_at(int n, const std::vector<double>& x) const {
    size_t flat = 0;
    for (int j = 0; j < dim_; ++j) {
      if (x[j] < 0.0 || x[j] >= 1.0)
        throw std::domain_error("value_at: point outside [0,1)^d");
      const int i = std::min((1 << n) - 1,
                             static_cast<int>(std::floor(std::ldexp(x[j], n))));
      flat = (flat << n) | static_cast<size_t>(i);
    }
    return levels_[n][flat];
  }

  // max over generation-n parents of |S_parent - mean(children)|
  double martingale_defect(int n) const {
    if (n < 1 || n > n_max_) throw std::invalid_argument("defect: bad n");
    double worst = 0.0;
    const auto& parents = levels_[n - 1];
    const auto& kids = levels_[n];
    for (size_t pf = 0; pf < parents.size(); ++pf) {
      const auto pidx = detail::unflatten(pf, n - 1, dim_);
      double mean = 0.0;
      const int combos = 1 << dim_;
      for (int c = 0; c < combos; ++c) {
        std::vector<int> kidx(dim_);
        for (int j = 0; j < dim_; ++j)
          kidx[j] = 2 * pidx[j] + ((c >> j) & 1);
        mean += kids[detail::flat_index(kidx, n)];
      }
      mean /= combos;
      worst = std::max(worst, std::fabs(parents[pf] - mean));
    }
    return worst;
  }

  // ||S_n - S_{n-1}||_∞
  double increment_sup(int n) const {
    if (n < 1 || n > n_max_) throw std::invalid_argument("increment: bad n");
    double worst = 0.0;
    for (size_t cf = 0; cf < levels_[n].size(); ++cf) {
      const auto cidx = detail::unflatten(cf, n, dim_);
      std::vector<int> pidx(dim_);
      for (int j = 0; j < dim_; ++j) pidx[j] = cidx[j] / 2;
      worst = std::max(worst, std::fabs(levels_[n][cf] -
                                        levels_[n - 1][detail::flat_index(pidx, n - 1)]));
    }
    return worst;
  }

  // sup_n ||S_n - S_{n-1}||_∞ over the built generations
  double norm_B() const {
    double worst = 0.0;
    for (int n = 1; n <= n_max_; ++n) worst = std::max(worst, increment_sup(n));
    return worst;
  }

  // max over same-generation pairs sharing a (d-1)-face of |S_Q - S_Q'|
  double adjacent_increment_sup(int n) const {
    if (n < 0 || n > n_max_) throw std::invalid_argument("adjacent: bad n");
    const auto& lv = levels_[n];
    double worst = 0.0;
    const int side = 1 << n;
    for (size_t cf = 0; cf < lv.size(); ++cf) {
      const auto cidx = detail::unflatten(cf, n, dim_);
      for (int j = 0; j < dim_; ++j) {
        if (cidx[j] + 1 >= side) continue;
        auto nb = cidx;
        nb[j] += 1;
        worst = std::max(worst, std::fabs(lv[cf] - lv[detail::flat_index(nb, n)]));
      }
    }
    return worst;
  }

  const std::vector<std::string>& failed_cubes() const { return failed_; }
  const FunctionSpec* function() const { return f_; }
  const SignedMeasure* measure() const { return sigma_; }
  int order_m() const { return m_; }
  double order_alpha() const { return alpha_; }

 private:
  const FunctionSpec* f_ = nullptr;
  const SignedMeasure* sigma_ = nullptr;
  int dim_ = 1, n_max_ = 0, m_ = 0;
  double alpha_ = 1.0, quad_tol_ = 1e-8;
  std::vector<std::vector<double>> levels_;
  std::vector<std::string> failed_;
};

// Standalone S_Q for one cube.
inline SValueOutcome s_value(const FunctionSpec& f, const SignedMeasure& sigma,
                             const DyadicCube& cube, int m, double alpha,
                             double quad_tol = 1e-8, long long budget = 400'000) {
  detail::check_admissible(sigma, m, alpha);
  if (f.has_cosine_series() && !sigma.sphere()) {
    AtomSet1d atoms = project_atoms(sigma);
    atoms.vanishing =
        std::max(atoms.vanishing, required_moment_order(m, alpha) + 1);
    const double beta = m + alpha;
    SValueOutcome out;
    const double cap = std::ldexp(2.0, cube.n);  // |avg_Q e^{iωx}| <= 2^{n+1}/ω
    for (int k = 0; k < 2000; ++k) {
      const TrigTerm t = f.cosine_term(k);
      if (t.freq > 1e290) break;
      const cdouble phi = oscillation_h_integral(atoms, t.freq, beta, 0.0, 1.0);
      const cdouble eq = detail::interval_avg_exp(t.freq, cube.lower(0), cube.side());
      out.value += t.coeff * (eq * phi).real();
      out.evals += static_cast<long long>(atoms.pos.size());
      const double bound = t.coeff * std::abs(phi) * std::min(1.0, cap / t.freq);
      if (bound < 0.25 * quad_tol && t.freq > cap) {
        out.error = bound;
        break;
      }
    }
    out.error += 1e-13;
    return out;
  }
  return detail::s_value_adaptive(f, sigma, cube, m, alpha, quad_tol, budget);
}

inline DyadicMartingale DyadicMartingale::build(const FunctionSpec& f,
                                                const SignedMeasure& sigma,
                                                int n_max, int m, double alpha,
                                                const MartingaleBuildOptions& opt) {
  detail::check_admissible(sigma, m, alpha);
  const int d = sigma.dim();
  if (f.dim() != d) throw std::invalid_argument("build: dimension mismatch");
  const int n_cap = (d == 1) ? 14 : (d == 2 ? 8 : 5);
  if (n_max < 0 || n_max > n_cap)
    throw std::invalid_argument("build: n_max exceeds the cube budget (" +
                                std::to_string(n_cap) + " for d=" +
                                std::to_string(d) + ")");

  DyadicMartingale M;
  M.f_ = &f;
  M.sigma_ = &sigma;
  M.dim_ = d;
  M.n_max_ = n_max;
  M.m_ = m;
  M.alpha_ = alpha;
  M.quad_tol_ = opt.quad_tol;
  M.levels_.resize(n_max + 1);

  const bool series = f.has_cosine_series() && !sigma.sphere();
  if (series) {
    AtomSet1d atoms = project_atoms(sigma);
    atoms.vanishing =
        std::max(atoms.vanishing, required_moment_order(m, alpha) + 1);
    const double beta = m + alpha;
    // shared per-frequency h-integrals, truncated against the deepest level
    std::vector<double> coeff, freq;
    std::vector<cdouble> phi;
    const double cap = std::ldexp(2.0, n_max);
    for (int k = 0; k < 2000; ++k) {
      const TrigTerm t = f.cosine_term(k);
      if (t.freq > 1e290) break;
      coeff.push_back(t.coeff);
      freq.push_back(t.freq);
      phi.push_back(oscillation_h_integral(atoms, t.freq, beta, 0.0, 1.0));
      const double bound =
          t.coeff * std::abs(phi.back()) * std::min(1.0, cap / t.freq);
      if (bound < 0.25 * opt.quad_tol && t.freq > cap) break;
    }
    for (int n = 0; n <= n_max; ++n) {
      const size_t count = size_t{1} << (n * d);
      auto& lv = M.levels_[n];
      lv.assign(count, 0.0);
      const double s = std::ldexp(1.0, -n);
      for (size_t cf = 0; cf < count; ++cf) {
        // only the first axis matters: lifted series depend on x_1
        const size_t i1 = cf >> (n * (d - 1));
        const double a = static_cast<double>(i1) * s;
        double val = 0.0;
        for (size_t k = 0; k < coeff.size(); ++k)
          val += coeff[k] * (detail::interval_avg_exp(freq[k], a, s) * phi[k]).real();
        lv[cf] = val;
      }
    }
    return M;
  }

  for (int n = 0; n <= n_max; ++n) {
    const size_t count = size_t{1} << (n * d);
    auto& lv = M.levels_[n];
    lv.assign(count, 0.0);
    std::vector<char> ok(count, 1);
    parallel_for(count, opt.threads, [&](size_t cf) {
      DyadicCube cube{n, detail::unflatten(cf, n, d)};
      SValueOutcome o = detail::s_value_adaptive(f, sigma, cube, m, alpha,
                                                 opt.quad_tol, opt.budget_per_cube);
      lv[cf] = o.value;
      ok[cf] = o.converged ? 1 : 0;
    });
    for (size_t cf = 0; cf < count; ++cf)
      if (!ok[cf])
        M.failed_.push_back("n=" + std::to_string(n) +
                            " cube=" + std::to_string(cf));
  }
  return M;
}

// max over samples of |S_n(x) - Θ_ε f(x)| with ε = 2^{-n-2}, the midpoint
// of the window ℓ(Q)/4 <= ε <= ℓ(Q)/2 matching generation n.
inline double comparison_gap(const DyadicMartingale& M, int n,
                             const std::vector<std::vector<double>>& samples,
                             double quad_tol = 1e-8) {
  if (n < 0 || n > M.n_max()) throw std::invalid_argument("comparison_gap: bad n");
  const double eps = std::ldexp(1.0, -n - 2);
  const FunctionSpec& f = *M.function();
  const SignedMeasure& sigma = *M.measure();
  double worst = 0.0;
  if (f.has_cosine_series() && !sigma.sphere()) {
    ThetaSeriesEvaluator ev(f, sigma, M.order_m(), M.order_alpha(), eps, 1.0,
                            0.5 * quad_tol);
    for (const auto& x : samples)
      worst = std::max(worst, std::fabs(M.value_at(n, x) - ev.value_at(x[0])));
    return worst;
  }
  for (const auto& x : samples) {
    OscillationRequest req;
    req.f = &f;
    req.sigma = &sigma;
    req.x = x;
    req.eps = eps;
    req.m = M.order_m();
    req.alpha = M.order_alpha();
    req.quad_tol = quad_tol;
    OscillationResult th = theta(req);
    worst = std::max(worst, std::fabs(M.value_at(n, x) - th.value));
  }
  return worst;
}

// Cube centers plus 8 seeded uniform points per cube (d = 1).
inline std::vector<std::vector<double>> default_comparison_samples(int n,
                                                                   uint64_t seed) {
  std::vector<std::vector<double>> xs;
  SplitMix64 rng(seed);
  const int count = 1 << n;
  const double s = std::ldexp(1.0, -n);
  for (int i = 0; i < count; ++i) {
    xs.push_back({(i + 0.5) * s});
    for (int r = 0; r < 8; ++r) xs.push_back({(i + rng.u01()) * s});
  }
  return xs;
}

// ---------------------------------------------------------------------------
// LIL ratio tables.

enum class LilMode { martingale, theta };

struct LilRatioTable {
  std::vector<int> ns;
  std::vector<std::vector<double>> ratio;        // [sample][generation]
  std::vector<std::vector<double>> running_max;  // same shape
};

inline double lil_denominator(int n, LilMode mode) {
  if (mode == LilMode::martingale) {
    if (n < 3) throw std::domain_error("lil_ratio: martingale mode needs n >= 3");
    return std::sqrt(n * std::log(std::log(static_cast<double>(n))));
  }
  const double L = n * M_LN2;  // log(1/ε) at ε = 2^{-n}
  if (!(std::log(std::log(L)) > 0.0))
    throw std::domain_error("lil_ratio: theta mode needs eps < e^{-e} (n >= 4)");
  return std::sqrt(L * std::log(std::log(L)));
}

// values[sample][generation index] -> |value| / LIL denominator, plus the
// per-sample running max across generations.
inline LilRatioTable lil_ratio(const std::vector<int>& ns,
                               const std::vector<std::vector<double>>& values,
                               LilMode mode) {
  LilRatioTable t;
  t.ns = ns;
  for (const auto& row : values) {
    if (row.size() != ns.size())
      throw std::invalid_argument("lil_ratio: ragged value table");
    std::vector<double> r, rm;
    double run = 0.0;
    for (size_t i = 0; i < ns.size(); ++i) {
      const double v = std::fabs(row[i]) / lil_denominator(ns[i], mode);
      run = std::max(run, v);
      r.push_back(v);
      rm.push_back(run);
    }
    t.ratio.push_back(std::move(r));
    t.running_max.push_back(std::move(rm));
  }
  return t;
}

}  // namespace osclab
