#pragma once

// Experiment drivers shared by the CLI: each one produces tabular rows,
// one-line PASS/FAIL assertions, and optional plot series.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "osclab/csv.hpp"
#include "osclab/czkernel.hpp"
#include "osclab/martingale.hpp"
#include "osclab/oscillation.hpp"
#include "osclab/parallel.hpp"
#include "osclab/random.hpp"
#include "osclab/sharpness.hpp"
#include "osclab/svg.hpp"

namespace osclab {

struct ExperimentOutcome {
  bool pass = true;        // every assertion held
  bool budget_ok = true;   // no quadrature budget exhaustion
  std::vector<std::string> summary;  // PASS/FAIL lines
  std::vector<std::string> csv_header;
  std::vector<std::vector<CsvCell>> csv_rows;
  std::vector<SvgSeries> plot;
  std::string plot_xlabel, plot_ylabel;
  bool plot_log_x = false, plot_log_y = false;
};

namespace detail {

inline void assert_line(ExperimentOutcome& out, bool ok, const std::string& what) {
  out.summary.push_back(std::string(ok ? "PASS" : "FAIL") + ": " + what);
  out.pass = out.pass && ok;
}

inline std::string multiindex_str(const MultiIndex& k) {
  std::string s = "(";
  for (size_t i = 0; i < k.size(); ++i)
    s += std::to_string(k[i]) + (i + 1 < k.size() ? "," : "");
  return s + ")";
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0.0 : v[v.size() / 2];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// moments: check_vanishing report

inline ExperimentOutcome run_moments(const SignedMeasure& sigma, int order) {
  ExperimentOutcome out;
  const MomentReport rep = check_vanishing(sigma, order);
  out.csv_header = {"degree", "multiindex", "moment"};
  for (const auto& e : rep.entries) {
    int deg = 0;
    for (int k : e.k) deg += k;
    out.csv_rows.push_back({static_cast<long long>(deg),
                            detail::multiindex_str(e.k), e.value});
  }
  detail::assert_line(out, rep.pass,
                      "moments of degree <= " + std::to_string(order) +
                          " vanish (tol " + csv_format(rep.tol) + ")");
  return out;
}

// ---------------------------------------------------------------------------
// fn check: membership diagnostics

inline ExperimentOutcome run_fn_check(const FunctionSpec& f, int m, double alpha,
                                      int ell) {
  ExperimentOutcome out;
  const MembershipReport rep = membership_check(f, m, alpha, ell,
                                                standard_probe_plan());
  out.csv_header = {"h", "ratio"};
  for (const auto& [h, r] : rep.per_h) out.csv_rows.push_back({h, r});
  out.plot_xlabel = "h";
  out.plot_ylabel = "sup_x |Delta_l f| / h^(m+alpha)";
  out.plot_log_x = true;
  out.plot_log_y = true;
  SvgSeries s{"ratio", {}};
  for (const auto& [h, r] : rep.per_h)
    if (r > 0) s.points.emplace_back(h, r);
  out.plot.push_back(std::move(s));
  detail::assert_line(
      out, rep.pass,
      "membership at (m=" + std::to_string(m) + ", alpha=" + csv_format(alpha) +
          "): slope " + csv_format(rep.exponent_fit) + " vs required " +
          csv_format(m + alpha - 0.1) + ", ratio sup " + csv_format(rep.ratio_sup));
  return out;
}

// ---------------------------------------------------------------------------
// theta sweep over (x, eps)

inline ExperimentOutcome run_theta_sweep(const FunctionSpec& f,
                                         const SignedMeasure& sigma,
                                         const std::vector<double>& xs,
                                         const std::vector<double>& eps_grid,
                                         int m, double alpha, double quad_tol,
                                         long long budget, int threads) {
  ExperimentOutcome out;
  out.csv_header = {"x", "eps", "value", "error_estimate", "evals"};
  const size_t n = xs.size() * eps_grid.size();
  std::vector<OscillationResult> results(n);
  parallel_for(n, threads, [&](size_t i) {
    OscillationRequest req;
    req.f = &f;
    req.sigma = &sigma;
    req.x = {xs[i / eps_grid.size()]};
    req.eps = eps_grid[i % eps_grid.size()];
    req.m = m;
    req.alpha = alpha;
    req.quad_tol = quad_tol;
    req.budget = budget;
    results[i] = theta(req);
  });
  for (size_t i = 0; i < n; ++i) {
    out.csv_rows.push_back({xs[i / eps_grid.size()], eps_grid[i % eps_grid.size()],
                            results[i].value, results[i].quad_error_estimate,
                            results[i].evaluations});
    out.budget_ok = out.budget_ok && results[i].converged;
  }
  detail::assert_line(out, out.budget_ok, "all quadratures converged in budget");

  out.plot_xlabel = "eps";
  out.plot_ylabel = "theta";
  out.plot_log_x = true;
  for (size_t xi = 0; xi < std::min<size_t>(xs.size(), 8); ++xi) {
    SvgSeries s{"x=" + csv_format(xs[xi]), {}};
    for (size_t ei = 0; ei < eps_grid.size(); ++ei)
      s.points.emplace_back(eps_grid[ei],
                            results[xi * eps_grid.size() + ei].value);
    out.plot.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// martingale build with diagnostics

inline ExperimentOutcome run_martingale(const FunctionSpec& f,
                                        const SignedMeasure& sigma, int n_max,
                                        int m, double alpha, double quad_tol,
                                        uint64_t seed, int threads = 1,
                                        long long budget_per_cube = 400'000) {
  ExperimentOutcome out;
  MartingaleBuildOptions opt;
  opt.quad_tol = quad_tol;
  opt.threads = threads;
  opt.budget_per_cube = budget_per_cube;
  const DyadicMartingale M = DyadicMartingale::build(f, sigma, n_max, m, alpha, opt);
  out.budget_ok = M.failed_cubes().empty();

  out.csv_header = {"n", "cube_index", "S", "increment", "adjacent_max",
                    "comparison_gap"};
  double defect_worst = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double adj = M.adjacent_increment_sup(n);
    const double gap =
        (n >= 2 && sigma.dim() == 1)
            ? comparison_gap(M, n, default_comparison_samples(n, seed ^ n),
                             quad_tol)
            : 0.0;
    if (n >= 1) defect_worst = std::max(defect_worst, M.martingale_defect(n));
    for (size_t c = 0; c < M.level(n).size(); ++c) {
      double inc = 0.0;
      if (n >= 1) {
        std::vector<int> idx = detail::unflatten(c, n, M.dim());
        for (int& v : idx) v /= 2;
        inc = M.level(n)[c] - M.level(n - 1)[detail::flat_index(idx, n - 1)];
      }
      out.csv_rows.push_back({static_cast<long long>(n),
                              static_cast<long long>(c), M.level(n)[c], inc, adj,
                              gap});
    }
  }
  const double defect_tol = std::ldexp(1.0, M.dim() + 1) * quad_tol;
  detail::assert_line(out, defect_worst <= defect_tol,
                      "martingale property: max defect " + csv_format(defect_worst) +
                          " <= " + csv_format(defect_tol));
  detail::assert_line(out, std::isfinite(M.norm_B()),
                      "increments bounded: ||S||_B = " + csv_format(M.norm_B()));
  detail::assert_line(out, out.budget_ok,
                      "all cube quadratures converged (" +
                          std::to_string(M.failed_cubes().size()) + " failures)");
  return out;
}

// ---------------------------------------------------------------------------
// LIL ratio experiment (theta or martingale mode)

struct LilConfig {
  LilMode mode = LilMode::theta;
  int n_min = 4;
  int n_max = 16;
  int samples = 256;
  uint64_t seed = 1;
  double quad_tol = 1e-8;
  long long budget = 1'000'000;
  int threads = 1;
  double stabilization_slack = 0.20;  // running-max growth over last 3 gens
  double stabilization_fraction = 0.90;
};

inline ExperimentOutcome run_lil(const FunctionSpec& f, const SignedMeasure& sigma,
                                 int m, double alpha, const LilConfig& cfg) {
  ExperimentOutcome out;
  if (sigma.dim() != 1)
    throw std::invalid_argument("lil: the sweep samples scalar x (d = 1)");
  if (cfg.mode == LilMode::martingale && cfg.n_min < 3)
    throw std::invalid_argument("lil: martingale mode needs n >= 3");
  if (cfg.mode == LilMode::theta && cfg.n_min < 4)
    throw std::invalid_argument("lil: theta mode needs n >= 4 (eps < e^-e)");

  SplitMix64 rng(cfg.seed);
  std::vector<double> xs;
  for (int i = 0; i < cfg.samples; ++i) xs.push_back(rng.u01());

  std::vector<int> ns;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) ns.push_back(n);

  std::vector<std::vector<double>> values(xs.size(),
                                          std::vector<double>(ns.size(), 0.0));
  if (cfg.mode == LilMode::theta) {
    std::vector<char> ok(xs.size(), 1);
    for (size_t ni = 0; ni < ns.size(); ++ni) {
      const double eps = std::ldexp(1.0, -ns[ni]);
      if (f.has_cosine_series() && !sigma.sphere()) {
        ThetaSeriesEvaluator ev(f, sigma, m, alpha, eps, 1.0, 0.5 * cfg.quad_tol);
        parallel_for(xs.size(), cfg.threads,
                     [&](size_t xi) { values[xi][ni] = ev.value_at(xs[xi]); });
      } else {
        parallel_for(xs.size(), cfg.threads, [&](size_t xi) {
          OscillationRequest req;
          req.f = &f;
          req.sigma = &sigma;
          req.x = {xs[xi]};
          req.eps = eps;
          req.m = m;
          req.alpha = alpha;
          req.quad_tol = cfg.quad_tol;
          req.budget = cfg.budget;
          const OscillationResult r = theta(req);
          values[xi][ni] = r.value;
          if (!r.converged) ok[xi] = 0;
        });
      }
    }
    for (char c : ok)
      if (!c) out.budget_ok = false;
  } else {
    MartingaleBuildOptions opt;
    opt.quad_tol = cfg.quad_tol;
    opt.threads = cfg.threads;
    const DyadicMartingale M =
        DyadicMartingale::build(f, sigma, cfg.n_max, m, alpha, opt);
    out.budget_ok = M.failed_cubes().empty();
    for (size_t ni = 0; ni < ns.size(); ++ni)
      for (size_t xi = 0; xi < xs.size(); ++xi)
        values[xi][ni] = M.value_at(ns[ni], {xs[xi]});
  }

  const LilRatioTable table = lil_ratio(ns, values, cfg.mode);

  out.csv_header = {"x", "n", "eps",
                    cfg.mode == LilMode::theta ? "theta" : "s", "ratio"};
  for (size_t xi = 0; xi < xs.size(); ++xi)
    for (size_t ni = 0; ni < ns.size(); ++ni)
      out.csv_rows.push_back({xs[xi], static_cast<long long>(ns[ni]),
                              std::ldexp(1.0, -ns[ni]), values[xi][ni],
                              table.ratio[xi][ni]});

  // stabilization: per-x running max increases < slack over the last 3 gens
  size_t stable = 0;
  for (size_t xi = 0; xi < xs.size(); ++xi) {
    const auto& rm = table.running_max[xi];
    if (rm.size() < 4) continue;
    const double early = rm[rm.size() - 4];
    const double late = rm.back();
    if (late <= (1.0 + cfg.stabilization_slack) * early ||
        late < 1e-12)  // identically zero ratios count as stable
      ++stable;
  }
  const double frac = xs.empty() ? 1.0 : double(stable) / xs.size();
  detail::assert_line(
      out, frac >= cfg.stabilization_fraction,
      "LIL running max stabilized for " + csv_format(100.0 * frac) +
          "% of samples (need >= " +
          csv_format(100.0 * cfg.stabilization_fraction) + "%)");

  // the set of points with small oscillation is non-negligible; report its
  // sampled share
  {
    std::vector<double> finals;
    for (const auto& rm : table.running_max) finals.push_back(rm.back());
    const double med = detail::median_of(finals);
    size_t small = 0;
    for (double v : finals)
      if (v <= 0.5 * med) ++small;
    out.summary.push_back(
        "NOTE: " + csv_format(100.0 * double(small) / finals.size()) +
        "% of samples kept a running max below half the median (bounded-"
        "oscillation set)");
  }

  // plot: quantiles of the running max per generation
  out.plot_xlabel = "n";
  out.plot_ylabel = "running max of |value| / LIL denominator";
  std::vector<std::pair<std::string, double>> quants = {
      {"q10", 0.10}, {"median", 0.50}, {"q90", 0.90}, {"max", 1.0}};
  for (const auto& [name, q] : quants) {
    SvgSeries s{name, {}};
    for (size_t ni = 0; ni < ns.size(); ++ni) {
      std::vector<double> col;
      for (size_t xi = 0; xi < xs.size(); ++xi)
        col.push_back(table.running_max[xi][ni]);
      std::sort(col.begin(), col.end());
      const size_t idx = std::min(col.size() - 1,
                                  static_cast<size_t>(q * (col.size() - 1)));
      s.points.emplace_back(ns[ni], col[idx]);
    }
    out.plot.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// kernel comparison sweep (Calderón-Zygmund form)

inline ExperimentOutcome run_kernel_compare(const FunctionSpec& f,
                                            const SignedMeasure& sigma,
                                            const std::vector<double>& eps_grid,
                                            const std::vector<double>& xs,
                                            double quad_tol, int threads,
                                            long long budget = 1'000'000) {
  ExperimentOutcome out;
  if (sigma.declared_moment_order() < 1 && !check_vanishing(sigma, 1).pass)
    throw std::invalid_argument(
        "kernel compare: measure needs vanishing moments k = 0,1");
  if (!f.support_interval())
    throw std::invalid_argument("kernel compare: f must be compactly supported");
  const KernelEngine eng(sigma);
  const auto [slo, shi] = *f.support_interval();
  const double sup_fp = sup_abs_derivative(f, slo, shi);
  const double bound =
      sup_fp * 2.0 * eng.M() * eng.total_variation() + 4.0 * quad_tol;

  out.csv_header = {"x", "eps", "theta_tilde", "transform", "gap"};
  const size_t n = xs.size() * eps_grid.size();
  struct Row {
    double tt, tr, gap;
    bool ok;
  };
  std::vector<Row> rows(n);
  parallel_for(n, threads, [&](size_t i) {
    const double x = xs[i / eps_grid.size()];
    const double eps = eps_grid[i % eps_grid.size()];
    const OscillationResult tt = theta_tilde(f, sigma, x, eps, quad_tol, budget);
    const double tr = truncated_transform(f, eng, x, eps, quad_tol, budget);
    rows[i] = {tt.value, tr, std::fabs(tt.value - tr), tt.converged};
  });
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out.csv_rows.push_back({xs[i / eps_grid.size()], eps_grid[i % eps_grid.size()],
                            rows[i].tt, rows[i].tr, rows[i].gap});
    worst = std::max(worst, rows[i].gap);
    out.budget_ok = out.budget_ok && rows[i].ok;
  }
  detail::assert_line(out, worst <= bound,
                      "CZ comparison: max gap " + csv_format(worst) +
                          " <= ||f'||_inf 2M||sigma|| + 4 tol = " +
                          csv_format(bound));

  out.plot_xlabel = "eps";
  out.plot_ylabel = "max_x |theta_tilde - transform|";
  out.plot_log_x = true;
  SvgSeries s{"gap", {}};
  for (size_t ei = 0; ei < eps_grid.size(); ++ei) {
    double g = 0.0;
    for (size_t xi = 0; xi < xs.size(); ++xi)
      g = std::max(g, rows[xi * eps_grid.size() + ei].gap);
    s.points.emplace_back(eps_grid[ei], g);
  }
  out.plot.push_back(std::move(s));
  return out;
}

// ---------------------------------------------------------------------------
// sharpness experiment

inline ExperimentOutcome run_sharpness(const SharpnessConfig& cfg) {
  ExperimentOutcome out;
  const SharpnessResult res = lil_lower_experiment(cfg);
  out.csv_header = {"x", "n", "eps", "upsilon", "partial_sum", "gap", "ratio"};
  for (const auto& r : res.rows)
    out.csv_rows.push_back({r.x, static_cast<long long>(r.n), r.eps, r.upsilon,
                            r.partial_sum, r.gap, r.ratio});

  detail::assert_line(out, res.fraction_above >= 0.9,
                      "lower LIL: " + csv_format(100.0 * res.fraction_above) +
                          "% of samples above theta0 = " + csv_format(res.theta0) +
                          " (need >= 90%)");

  // lacunary gap boundedness: max over the grid <= 2x median
  std::vector<double> per_eps(cfg.eps_grid.size(), 0.0);
  for (const auto& r : res.rows)
    per_eps[r.n] = std::max(per_eps[r.n], r.gap);
  const double med = detail::median_of(per_eps);
  const double mx = *std::max_element(per_eps.begin(), per_eps.end());
  detail::assert_line(out, mx <= 2.0 * med,
                      "lacunary gap bounded: max " + csv_format(mx) +
                          " <= 2 x median " + csv_format(med));

  out.plot_xlabel = "n (eps = 2^-n grid index)";
  out.plot_ylabel = "max_x lacunary gap";
  SvgSeries s{"gap", {}};
  for (size_t i = 0; i < per_eps.size(); ++i)
    s.points.emplace_back(static_cast<double>(i), per_eps[i]);
  out.plot.push_back(std::move(s));
  return out;
}

}  // namespace osclab
