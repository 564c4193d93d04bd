#pragma once

// Generalized differences Δ_σ f(x,h) and the oscillation integrals
// Θ_ε^σ f, Θ̃_ε^σ f and the corollary special forms.
//
// Two evaluation paths coexist behind theta():
//  * an adaptive Gauss-Kronrod path in u = log h with panels aligned to
//    dyadic h-levels (any function kind, bounded oscillation only);
//  * a term-wise path for trigonometric (lacunary) series, which reduces
//    each frequency to the oscillatory h-integrals of oscillatory.hpp.
// The second is the only practical route for Weierstrass-type functions:
// Θ amplifies the k-th frequency by b^{(m+α)k}, so at quad_tol accuracy a
// sampling rule would need ~(1/quad_tol)^{1/α} points per dyadic level.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "osclab/funcspace.hpp"
#include "osclab/measure.hpp"
#include "osclab/oscillatory.hpp"
#include "osclab/quadrature.hpp"

namespace osclab {

struct OscillationResult {
  double value = 0.0;
  double quad_error_estimate = 0.0;
  long long evaluations = 0;
  bool converged = true;
};

enum class ThetaMethod { automatic, series, adaptive };

struct OscillationRequest {
  const FunctionSpec* f = nullptr;
  const SignedMeasure* sigma = nullptr;
  std::vector<double> x;
  double eps = 0.25;
  int m = 0;
  double alpha = 0.5;
  double quad_tol = 1e-8;
  long long budget = 1'000'000;
  ThetaMethod method = ThetaMethod::automatic;
};

// Moment order the oscillation bounds require: [m+alpha], [.] = floor: m for
// alpha < 1 and m+1 in the Zygmund case alpha = 1.
inline int required_moment_order(int m, double alpha) {
  return m + (alpha >= 1.0 ? 1 : 0);
}

namespace detail {

inline void check_admissible(const SignedMeasure& sigma, int m, double alpha) {
  const int need = required_moment_order(m, alpha);
  if (sigma.declared_moment_order() >= need) return;  // validated at build
  if (!check_vanishing(sigma, need).pass)
    throw std::invalid_argument(
        "oscillation: measure lacks the required vanishing moments (order " +
        std::to_string(need) + ")");
}

// Average of f over the sphere x + h r S^{d-1}, adaptive order doubling.
inline double sphere_average(const FunctionSpec& f, const std::vector<double>& x,
                             double rad, double tol) {
  const int d = static_cast<int>(x.size());
  if (d == 1) return 0.5 * (f.eval1(x[0] + rad) + f.eval1(x[0] - rad));
  if (d == 2) {
    double prev = 0.0;
    for (int n = 64; n <= (1 << 16); n *= 2) {
      double cur = periodic_average(
          [&](double th) {
            const double p[2] = {x[0] + rad * std::cos(th),
                                 x[1] + rad * std::sin(th)};
            return f.eval_point(p, 2);
          },
          n);
      if (n > 64 && std::fabs(cur - prev) <= tol) return cur;
      prev = cur;
    }
    return prev;
  }
  if (d == 3) {
    // Gauss-Legendre in cosθ times trapezoid in φ, both doubled to tolerance
    double prev = 0.0;
    for (int lev = 0; lev < 6; ++lev) {
      const int order = 8 << lev, nphi = 32 << lev;
      double cur = 0.5 * gauss_legendre(
                             [&](double c) {
                               const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
                               return periodic_average(
                                   [&](double ph) {
                                     const double p[3] = {
                                         x[0] + rad * s * std::cos(ph),
                                         x[1] + rad * s * std::sin(ph),
                                         x[2] + rad * c};
                                     return f.eval_point(p, 3);
                                   },
                                   nphi);
                             },
                             -1.0, 1.0, order > 8 ? 16 : 8);
      if (lev > 0 && std::fabs(cur - prev) <= tol) return cur;
      prev = cur;
    }
    return prev;
  }
  throw std::invalid_argument("sphere_average: d > 3 unsupported");
}

}  // namespace detail

// Δ_σ f(x,h) = ∫ f(x+hw) dσ(w).
inline double delta_sigma(const FunctionSpec& f, const SignedMeasure& sigma,
                          const std::vector<double>& x, double h) {
  if (static_cast<int>(x.size()) != sigma.dim() || f.dim() != sigma.dim())
    throw std::invalid_argument("delta_sigma: dimension mismatch");
  if (!(h > 0)) throw std::invalid_argument("delta_sigma: h must be > 0");
  const int d = sigma.dim();
  double s = 0.0;
  std::vector<double> xp(d);
  for (const auto& a : sigma.atoms()) {
    for (int j = 0; j < d; ++j) xp[j] = x[j] + h * a.point[j];
    s += a.weight * f.eval_point(xp.data(), d);
  }
  if (sigma.sphere()) {
    const auto& sc = *sigma.sphere();
    s += sc.weight *
         detail::sphere_average(f, x, h * sc.radius,
                                std::max(1e-12, 0.1 * f.eval_tol()));
  }
  return s;
}

// First-coordinate projection of an atomic measure, as used by the series
// path (a lifted series depends on x_1 only).
inline AtomSet1d project_atoms(const SignedMeasure& sigma) {
  if (sigma.sphere())
    throw std::invalid_argument("project_atoms: sphere component unsupported");
  AtomSet1d s;
  for (const auto& a : sigma.atoms()) {
    s.pos.push_back(a.point[0]);
    s.wt.push_back(a.weight);
    s.max_abs_pos = std::max(s.max_abs_pos, std::fabs(a.point[0]));
    s.total_var += std::fabs(a.weight);
  }
  s.vanishing = sigma.declared_moment_order() + 1;
  return s;
}

// Term-wise evaluator for Θ on cosine series: precomputes the per-frequency
// h-integrals once, then each x costs O(#terms).
class ThetaSeriesEvaluator {
 public:
  ThetaSeriesEvaluator(const FunctionSpec& f, const SignedMeasure& sigma,
                       int m, double alpha, double lo, double hi,
                       double tail_tol)
      : beta_(m + alpha) {
    if (!f.has_cosine_series())
      throw std::invalid_argument("ThetaSeriesEvaluator: not a series kind");
    detail::check_admissible(sigma, m, alpha);
    AtomSet1d atoms = project_atoms(sigma);
    atoms.vanishing =
        std::max(atoms.vanishing, required_moment_order(m, alpha) + 1);
    if (!(atoms.vanishing > beta_))
      throw std::invalid_argument(
          "ThetaSeriesEvaluator: not enough vanishing moments");
    const double gamma = f.series_decay();
    const double b = f.series_base();
    const double lo_pow = std::pow(std::max(lo, 1e-300), -beta_);
    // |c_k Φ_k| <= c_k ||σ|| lo^{-β}/β; geometric in k with ratio b^{-γ}
    const double tail_factor =
        atoms.total_var * lo_pow / (beta_ * (1.0 - std::pow(b, -gamma)));
    for (int k = 0; k < 2000; ++k) {
      const TrigTerm t = f.cosine_term(k);
      if (t.freq > 1e290) break;
      coeff_.push_back(t.coeff);
      freq_.push_back(t.freq);
      phi_.push_back(oscillation_h_integral(atoms, t.freq, beta_, lo, hi));
      evals_ += static_cast<long long>(atoms.pos.size());
      const double next_coeff = t.coeff * std::pow(b, -gamma);
      tail_bound_ = next_coeff * tail_factor;
      if (tail_bound_ < tail_tol) break;
    }
  }

  double value_at(double x1) const {
    double s = 0.0;
    for (size_t k = 0; k < coeff_.size(); ++k) {
      const double ph = freq_[k] * x1;
      s += coeff_[k] *
           (std::cos(ph) * phi_[k].real() - std::sin(ph) * phi_[k].imag());
    }
    return s;
  }

  double error_bound() const { return tail_bound_ + 1e-13 * scale(); }
  long long evaluations() const { return evals_; }
  int terms() const { return static_cast<int>(coeff_.size()); }

 private:
  double scale() const {
    double s = 0.0;
    for (size_t k = 0; k < coeff_.size(); ++k)
      s += coeff_[k] * std::abs(phi_[k]);
    return s;
  }
  double beta_;
  std::vector<double> coeff_, freq_;
  std::vector<cdouble> phi_;
  double tail_bound_ = 0.0;
  long long evals_ = 0;
};

namespace detail {

inline OscillationResult theta_adaptive(const OscillationRequest& req, double lo,
                                        double hi) {
  const double beta = req.m + req.alpha;
  const FunctionSpec& f = *req.f;
  const SignedMeasure& sigma = *req.sigma;
  // u = log h; panel knots aligned to dyadic h-levels
  std::vector<double> knots;
  knots.push_back(std::log(lo));
  const int j_hi = static_cast<int>(std::ceil(-std::log2(hi)));
  for (int j = j_hi; std::ldexp(1.0, -j) > lo; ++j) {
    const double u = -j * M_LN2;
    if (u > std::log(lo) && u < std::log(hi)) knots.push_back(u);
  }
  knots.push_back(std::log(hi));
  long long evals = 0;
  auto integrand = [&](double u) {
    ++evals;
    const double h = std::exp(u);
    return delta_sigma(f, sigma, req.x, h) * std::exp(-beta * u);
  };
  QuadOptions opt;
  opt.abs_tol = req.quad_tol;
  opt.max_evals = req.budget;
  QuadResult qr = integrate_panels(integrand, knots, opt);
  OscillationResult out;
  out.value = qr.value;
  out.quad_error_estimate = qr.error;
  out.evaluations = evals;
  out.converged = qr.converged;
  return out;
}

inline bool series_path_applicable(const OscillationRequest& req) {
  return req.f->has_cosine_series() && !req.sigma->sphere();
}

}  // namespace detail

// Θ over the h-interval [lo,hi] (theta itself uses [ε,1]; the split form
// supports the interval-additivity identity).
inline OscillationResult theta_interval(const OscillationRequest& req, double lo,
                                        double hi) {
  if (!req.f || !req.sigma) throw std::invalid_argument("theta: null inputs");
  if (static_cast<int>(req.x.size()) != req.sigma->dim() ||
      req.f->dim() != req.sigma->dim())
    throw std::invalid_argument("theta: dimension mismatch");
  if (!(lo > 0.0 && lo < hi && hi <= 1.0))
    throw std::invalid_argument("theta: need 0 < eps < hi <= 1");
  if (req.m < 0 || !(req.alpha > 0.0 && req.alpha <= 1.0))
    throw std::invalid_argument("theta: need m >= 0 and alpha in (0,1]");
  if (!(req.quad_tol > 0.0)) throw std::invalid_argument("theta: quad_tol <= 0");
  detail::check_admissible(*req.sigma, req.m, req.alpha);

  const bool series = (req.method == ThetaMethod::series) ||
                      (req.method == ThetaMethod::automatic &&
                       detail::series_path_applicable(req));
  if (series) {
    ThetaSeriesEvaluator ev(*req.f, *req.sigma, req.m, req.alpha, lo, hi,
                            0.5 * req.quad_tol);
    OscillationResult out;
    out.value = ev.value_at(req.x[0]);
    out.quad_error_estimate = ev.error_bound();
    out.evaluations = ev.evaluations();
    out.converged = true;
    return out;
  }
  return detail::theta_adaptive(req, lo, hi);
}

// Θ_ε^σ f(x) = ∫_ε^1 Δ_σ f(x,h) h^{-(m+α)} dh/h.  Any ε in (0,1) is
// accepted; the quantitative growth bounds are only claimed for ε < 1/2.
inline OscillationResult theta(const OscillationRequest& req) {
  return theta_interval(req, req.eps, 1.0);
}

// Θ̃_ε^σ f(x) = ∫_ε^1 Δ_σ f(x,h) dh/h² (Lipschitz / Calderón-Zygmund form).
inline OscillationResult theta_tilde(const FunctionSpec& f,
                                     const SignedMeasure& sigma,
                                     double x, double eps, double quad_tol = 1e-8,
                                     long long budget = 1'000'000) {
  if (sigma.dim() != 1 || f.dim() != 1)
    throw std::invalid_argument("theta_tilde: requires d = 1");
  if (!f.is_lipschitz())
    throw std::invalid_argument("theta_tilde: requires a Lipschitz function");
  if (sigma.declared_moment_order() < 1 && !check_vanishing(sigma, 1).pass)
    throw std::invalid_argument("theta_tilde: needs vanishing moments k = 0,1");
  OscillationRequest req;
  req.f = &f;
  req.sigma = &sigma;
  req.x = {x};
  req.eps = eps;
  req.m = 0;
  req.alpha = 1.0;
  req.quad_tol = quad_tol;
  req.budget = budget;
  return theta(req);
}

enum class CorollaryForm { gamma, omega, sphere };

struct CorollaryParams {
  std::vector<std::vector<double>> points;  // a_i (gamma/omega)
  std::vector<double> weights;              // μ_i (gamma/omega)
  double alpha = 0.5;                       // exponent (gamma/sphere)
  int dim = 1;                              // sphere form
};

// Γ_ε (Σμ_i = 0, exponent α), Ω_ε (also Σμ_i a_i = 0, exponent 1) and the
// sphere form M_ε (σ = ω - δ_0), all as Θ with the corresponding measure.
inline OscillationResult corollary_form(CorollaryForm form, const FunctionSpec& f,
                                        const std::vector<double>& x, double eps,
                                        const CorollaryParams& p,
                                        double quad_tol = 1e-8,
                                        long long budget = 1'000'000) {
  OscillationRequest req;
  req.f = &f;
  req.x = x;
  req.eps = eps;
  req.quad_tol = quad_tol;
  req.budget = budget;
  switch (form) {
    case CorollaryForm::gamma: {
      SignedMeasure sigma = make_general(p.points, p.weights);
      req.sigma = &sigma;
      req.m = 0;
      req.alpha = p.alpha;
      return theta(req);
    }
    case CorollaryForm::omega: {
      SignedMeasure sigma = make_general(p.points, p.weights);
      if (sigma.declared_moment_order() < 1)
        throw std::invalid_argument(
            "corollary_form: omega needs sum(mu_i a_i) = 0");
      req.sigma = &sigma;
      req.m = 0;
      req.alpha = 1.0;
      return theta(req);
    }
    case CorollaryForm::sphere: {
      SignedMeasure sigma = make_named(NamedMeasure::sphere_minus_delta, p.dim);
      req.sigma = &sigma;
      req.m = 0;
      req.alpha = p.alpha;
      return theta(req);
    }
  }
  throw std::invalid_argument("corollary_form: unknown form");
}

}  // namespace osclab
