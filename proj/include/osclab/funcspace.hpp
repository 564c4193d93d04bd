#pragma once

// Test-function corpus: Weierstrass-type lacunary series, cusps,
// polynomials, bumps, hats and cubic-spline samples, with controlled
// evaluation error, derivatives where meaningful, and empirical
// smoothness-class diagnostics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace osclab {

enum class FnKind {
  weierstrass,           // Σ_{k>=0} b^{-αk} cos(b^k x)
  zygmund_weierstrass,   // Σ_{k>=1} b^{-k}  cos(b^k x)
  smoothed_weierstrass,  // Σ_{k>=0} b^{-(m+α)k} cos(b^k x)
  cusp,                  // |x|^α sgn(x)
  polynomial,            // Σ c_j x^j
  bump,                  // radial C^∞ bump, peak 1
  hat,                   // piecewise-linear tent
  sampled,               // natural cubic spline through samples
};

// One cosine term coeff * cos(freq * x + phase).
struct TrigTerm {
  double coeff;
  double freq;
  double phase;
};

// Marker for kinds smooth to all orders (polynomial, bump).
inline constexpr int kSmoothAllOrders = 1000;

class FunctionSpec {
 public:
  static FunctionSpec weierstrass(double b, double alpha, double eval_tol = 1e-10,
                                  int dim = 1) {
    if (!(b > 1.0) || !(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("weierstrass: need b > 1, alpha in (0,1]");
    FunctionSpec f(FnKind::weierstrass, dim, eval_tol);
    f.b_ = b;
    f.alpha_ = alpha;
    f.declared_m_ = 0;
    f.declared_alpha_ = alpha;
    return f;
  }

  static FunctionSpec zygmund_weierstrass(double b, double eval_tol = 1e-10,
                                          int dim = 1) {
    if (!(b > 1.0)) throw std::invalid_argument("zygmund_weierstrass: need b > 1");
    FunctionSpec f(FnKind::zygmund_weierstrass, dim, eval_tol);
    f.b_ = b;
    f.alpha_ = 1.0;
    f.declared_m_ = 0;
    f.declared_alpha_ = 1.0;
    return f;
  }

  static FunctionSpec smoothed_weierstrass(double b, double alpha, int m,
                                           double eval_tol = 1e-10, int dim = 1) {
    if (!(b > 1.0) || !(alpha > 0.0 && alpha <= 1.0) || m < 0)
      throw std::invalid_argument("smoothed_weierstrass: bad parameters");
    FunctionSpec f(FnKind::smoothed_weierstrass, dim, eval_tol);
    f.b_ = b;
    f.alpha_ = alpha;
    f.m_ = m;
    f.declared_m_ = m;
    f.declared_alpha_ = alpha;
    return f;
  }

  static FunctionSpec cusp(double alpha, int dim = 1) {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("cusp: alpha in (0,1]");
    FunctionSpec f(FnKind::cusp, dim, 0.0);
    f.alpha_ = alpha;
    f.declared_m_ = 0;
    f.declared_alpha_ = alpha;
    return f;
  }

  static FunctionSpec polynomial(std::vector<double> coeffs, int dim = 1) {
    FunctionSpec f(FnKind::polynomial, dim, 0.0);
    if (coeffs.empty()) coeffs.push_back(0.0);
    f.coeffs_ = std::move(coeffs);
    f.declared_m_ = kSmoothAllOrders;
    f.declared_alpha_ = 1.0;
    return f;
  }

  static FunctionSpec bump(double center, double width, int dim = 1) {
    if (!(width > 0.0)) throw std::invalid_argument("bump: width must be > 0");
    FunctionSpec f(FnKind::bump, dim, 0.0);
    f.center_ = center;
    f.width_ = width;
    f.declared_m_ = kSmoothAllOrders;
    f.declared_alpha_ = 1.0;
    return f;
  }

  static FunctionSpec hat(double center, double width, int dim = 1) {
    if (!(width > 0.0)) throw std::invalid_argument("hat: width must be > 0");
    FunctionSpec f(FnKind::hat, dim, 0.0);
    f.center_ = center;
    f.width_ = width;
    f.declared_m_ = 0;
    f.declared_alpha_ = 1.0;
    return f;
  }

  static FunctionSpec sampled(std::vector<double> grid, std::vector<double> values,
                              int dim = 1) {
    if (grid.size() < 4 || grid.size() != values.size())
      throw std::invalid_argument("sampled: need >= 4 grid points");
    for (size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw std::invalid_argument("sampled: grid must be strictly increasing");
    FunctionSpec f(FnKind::sampled, dim, 0.0);
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    f.build_spline();
    f.declared_m_ = 0;
    f.declared_alpha_ = 1.0;
    return f;
  }

  FnKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double eval_tol() const { return eval_tol_; }
  int declared_m() const { return declared_m_; }
  double declared_alpha() const { return declared_alpha_; }
  double series_base() const { return b_; }

  bool has_cosine_series() const {
    return kind_ == FnKind::weierstrass || kind_ == FnKind::zygmund_weierstrass ||
           kind_ == FnKind::smoothed_weierstrass;
  }

  // Decay exponent γ of the series coefficients b^{-γk}.
  double series_decay() const {
    switch (kind_) {
      case FnKind::weierstrass: return alpha_;
      case FnKind::zygmund_weierstrass: return 1.0;
      case FnKind::smoothed_weierstrass: return m_ + alpha_;
      default: throw std::logic_error("series_decay: not a series kind");
    }
  }

  // idx-th cosine term (idx >= 0, unbounded: the mathematical series).
  TrigTerm cosine_term(int idx) const {
    const int k = (kind_ == FnKind::zygmund_weierstrass) ? idx + 1 : idx;
    return {std::pow(b_, -series_decay() * k), std::pow(b_, k), 0.0};
  }

  // Number of terms for pointwise evaluation: Σ_{k>K} |c_k| <= eval_tol.
  int eval_truncation_terms() const { return truncation_terms(series_decay()); }

  bool is_lipschitz() const {
    switch (kind_) {
      case FnKind::polynomial:
      case FnKind::bump:
      case FnKind::hat:
      case FnKind::sampled:
        return true;
      case FnKind::smoothed_weierstrass:
        return m_ >= 1;
      case FnKind::cusp:
        return alpha_ >= 1.0;
      default:
        return false;
    }
  }

  // [lo,hi] outside of which the function vanishes, when compactly supported.
  std::optional<std::pair<double, double>> support_interval() const {
    if (kind_ == FnKind::bump || kind_ == FnKind::hat)
      return std::make_pair(center_ - width_, center_ + width_);
    return std::nullopt;
  }

  // Points where the function (or its first derivative) has a kink;
  // quadratures split panels there.
  std::vector<double> kink_points() const {
    if (kind_ == FnKind::hat)
      return {center_ - width_, center_, center_ + width_};
    if (kind_ == FnKind::cusp) return {0.0};
    return {};
  }

  double eval1(double x) const {
    switch (kind_) {
      case FnKind::weierstrass:
      case FnKind::zygmund_weierstrass:
      case FnKind::smoothed_weierstrass: {
        const int K = eval_truncation_terms();
        double s = 0.0;
        for (int i = 0; i < K; ++i) {
          const TrigTerm t = cosine_term(i);
          s += t.coeff * std::cos(t.freq * x);
        }
        return s;
      }
      case FnKind::cusp:
        return std::pow(std::fabs(x), alpha_) * (x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0);
      case FnKind::polynomial: {
        double s = 0.0;
        for (size_t j = coeffs_.size(); j-- > 0;) s = s * x + coeffs_[j];
        return s;
      }
      case FnKind::bump:
        return bump_psi((x - center_) / width_);
      case FnKind::hat: {
        const double t = std::fabs(x - center_) / width_;
        return t < 1.0 ? 1.0 - t : 0.0;
      }
      case FnKind::sampled:
        return spline_eval(x, 0);
    }
    throw std::logic_error("eval1: unknown kind");
  }

  // d-dimensional evaluation: the bump is radial about (center, 0, ..., 0);
  // every other kind acts along the first coordinate.
  double eval_point(const double* x, int d) const {
    if (d != dim_) throw std::invalid_argument("eval_point: dimension mismatch");
    if (kind_ == FnKind::bump && d > 1) {
      double r2 = (x[0] - center_) * (x[0] - center_);
      for (int j = 1; j < d; ++j) r2 += x[j] * x[j];
      return bump_psi(std::sqrt(r2) / width_);
    }
    return eval1(x[0]);
  }

  double eval(const std::vector<double>& x) const {
    return eval_point(x.data(), static_cast<int>(x.size()));
  }

  double eval_derivative1(double x, int order) const {
    if (order < 0) throw std::invalid_argument("eval_derivative: order < 0");
    if (order == 0) return eval1(x);
    switch (kind_) {
      case FnKind::polynomial: {
        double s = 0.0;
        for (size_t j = coeffs_.size(); j-- > static_cast<size_t>(order);) {
          double fac = 1.0;
          for (int r = 0; r < order; ++r) fac *= double(j - r);
          s = s * x + fac * coeffs_[j];
        }
        return s;
      }
      case FnKind::bump: {
        if (order > 2)
          throw std::invalid_argument("bump: derivative order > 2 unsupported");
        const double t = (x - center_) / width_;
        return (order == 1 ? bump_psi_d1(t) / width_
                           : bump_psi_d2(t) / (width_ * width_));
      }
      case FnKind::hat: {
        if (order > 1)
          throw std::invalid_argument("hat: derivative order > 1 unsupported");
        const double t = (x - center_) / width_;
        if (std::fabs(t) >= 1.0 || t == 0.0) return 0.0;
        return (t > 0 ? -1.0 : 1.0) / width_;
      }
      case FnKind::smoothed_weierstrass: {
        if (order > m_)
          throw std::invalid_argument(
              "smoothed_weierstrass: derivative order exceeds declared smoothness");
        const int K = truncation_terms(m_ + alpha_ - order);
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
          const double w = std::pow(b_, k);
          s += std::pow(b_, -(m_ + alpha_ - order) * k) *
               std::cos(w * x + order * M_PI_2);
        }
        return s;
      }
      case FnKind::sampled:
        if (order > 1)
          throw std::invalid_argument("sampled: derivative order > 1 unreliable");
        return spline_eval(x, 1);
      default:
        throw std::invalid_argument(
            "eval_derivative: order exceeds declared smoothness for this kind");
    }
  }

 private:
  FunctionSpec(FnKind kind, int dim, double eval_tol)
      : kind_(kind), dim_(dim), eval_tol_(eval_tol > 0 ? eval_tol : 1e-10) {
    if (dim < 1) throw std::invalid_argument("FunctionSpec: dim must be >= 1");
  }

  int truncation_terms(double gamma) const {
    if (!(gamma > 0)) throw std::invalid_argument("truncation: decay must be > 0");
    // smallest K with b^{-γ(K+1)} / (1 - b^{-γ}) <= eval_tol (absolute index),
    // then converted to a term count
    const double q = std::pow(b_, -gamma);
    double K = std::ceil(std::log(1.0 / (eval_tol_ * (1.0 - q))) /
                         (gamma * std::log(b_))) - 1.0;
    int Ki = std::max(0, static_cast<int>(K));
    while (std::pow(b_, -gamma * (Ki + 1)) / (1.0 - q) > eval_tol_) ++Ki;
    const int first = (kind_ == FnKind::zygmund_weierstrass) ? 1 : 0;
    return std::max(1, Ki - first + 1);
  }

  static double bump_psi(double t) {
    const double u = 1.0 - t * t;
    return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
  }
  static double bump_psi_d1(double t) {
    const double u = 1.0 - t * t;
    if (u <= 0.0) return 0.0;
    return bump_psi(t) * (-2.0 * t / (u * u));
  }
  static double bump_psi_d2(double t) {
    const double u = 1.0 - t * t;
    if (u <= 0.0) return 0.0;
    const double g = -2.0 * t / (u * u);  // (log ψ)'
    const double gp = -2.0 / (u * u) - 8.0 * t * t / (u * u * u);
    return bump_psi(t) * (g * g + gp);
  }

  void build_spline() {
    // natural cubic spline second derivatives (Thomas algorithm)
    const size_t n = grid_.size();
    spline_m2_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), dvec(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      const double h0 = grid_[i] - grid_[i - 1], h1 = grid_[i + 1] - grid_[i];
      const double mu = h0 / (h0 + h1);
      const double rhs = 6.0 *
                         ((values_[i + 1] - values_[i]) / h1 -
                          (values_[i] - values_[i - 1]) / h0) /
                         (h0 + h1);
      const double p = mu * c[i - 1] + 2.0;
      c[i] = (mu - 1.0) / p;
      dvec[i] = (rhs - mu * dvec[i - 1]) / p;
    }
    for (size_t i = n - 2; i >= 1; --i) {
      spline_m2_[i] = c[i] * spline_m2_[i + 1] + dvec[i];
      if (i == 1) break;
    }
  }

  double spline_eval(double x, int deriv) const {
    if (x < grid_.front() || x > grid_.back())
      throw std::domain_error("sampled: evaluation outside the sample grid");
    size_t hi = std::upper_bound(grid_.begin(), grid_.end(), x) - grid_.begin();
    hi = std::clamp<size_t>(hi, 1, grid_.size() - 1);
    const size_t lo = hi - 1;
    const double h = grid_[hi] - grid_[lo];
    const double a = (grid_[hi] - x) / h, b = (x - grid_[lo]) / h;
    if (deriv == 0)
      return a * values_[lo] + b * values_[hi] +
             ((a * a * a - a) * spline_m2_[lo] + (b * b * b - b) * spline_m2_[hi]) *
                 h * h / 6.0;
    return (values_[hi] - values_[lo]) / h +
           h * ((3.0 * b * b - 1.0) * spline_m2_[hi] -
                (3.0 * a * a - 1.0) * spline_m2_[lo]) / 6.0;
  }

  FnKind kind_;
  int dim_ = 1;
  double eval_tol_ = 1e-10;
  double b_ = 2.0, alpha_ = 0.5;
  int m_ = 0;
  std::vector<double> coeffs_;
  double center_ = 0.0, width_ = 1.0;
  std::vector<double> grid_, values_, spline_m2_;
  int declared_m_ = 0;
  double declared_alpha_ = 1.0;
};

// ---------------------------------------------------------------------------
// Empirical smoothness diagnostics.

struct SamplePlan {
  std::vector<double> xs;
  std::vector<double> hs;
};

// 256 x-points uniform in [0,1], h in {2^-j : j = 2..16}.
inline SamplePlan standard_probe_plan() {
  SamplePlan p;
  for (int i = 0; i < 256; ++i) p.xs.push_back(i / 256.0);
  for (int j = 2; j <= 16; ++j) p.hs.push_back(std::ldexp(1.0, -j));
  return p;
}

// Direct seminorm estimate (m = 0): max difference quotient over the plan.
// alpha < 1 uses the first-order quotient, alpha = 1 the symmetric second
// order one (Zygmund); lipschitz_flag forces the first-order quotient at
// exponent 1.  Always a lower bound on the true seminorm.
inline double estimate_seminorm(const FunctionSpec& f, int m, double alpha,
                                const SamplePlan& plan, bool lipschitz_flag = false) {
  if (m != 0)
    throw std::invalid_argument("estimate_seminorm: direct seminorms need m = 0");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("estimate_seminorm: alpha in (0,1]");
  if (plan.xs.empty() || plan.hs.empty())
    throw std::invalid_argument("estimate_seminorm: empty plan");
  double best = 0.0;
  for (double x : plan.xs) {
    for (double h : plan.hs) {
      double q;
      if (lipschitz_flag)
        q = std::fabs(f.eval1(x + h) - f.eval1(x)) / h;
      else if (alpha < 1.0)
        q = std::fabs(f.eval1(x + h) - f.eval1(x)) / std::pow(h, alpha);
      else
        q = std::fabs(f.eval1(x + h) + f.eval1(x - h) - 2.0 * f.eval1(x)) / h;
      best = std::max(best, q);
    }
  }
  return best;
}

struct MembershipReport {
  double ratio_sup = 0.0;
  double exponent_fit = 0.0;
  bool pass = false;
  std::vector<std::pair<double, double>> per_h;  // (h, sup_x |Δ_ℓ f| / h^{m+α})
};

// [β] = floor(β); for alpha = 1 the relevant moment order is m+1.
inline int bracket(double beta) { return static_cast<int>(std::floor(beta)); }

// Tests |Δ_ℓ f(x,h)| <= C h^{m+α}: pass iff the fitted log-log slope of
// sup_x |Δ_ℓ f| vs h reaches m+α-0.1 and the ratio sequence does not diverge
// as h -> 0 (small-h ratios within 10x the median).
inline MembershipReport membership_check(const FunctionSpec& f, int m, double alpha,
                                         int ell, const SamplePlan& plan) {
  if (ell <= bracket(m + alpha))
    throw std::invalid_argument("membership_check: need ell > [m+alpha]");
  if (plan.xs.empty() || plan.hs.empty())
    throw std::invalid_argument("membership_check: empty plan");

  // binomial weights of the forward difference Δ_ℓ
  std::vector<double> w(ell + 1);
  double binom = 1.0;
  for (int j = 0; j <= ell; ++j) {
    w[j] = (((ell + j) % 2 == 0) ? 1.0 : -1.0) * binom;
    binom = binom * (ell - j) / (j + 1);
  }

  MembershipReport rep;
  double fscale = 0.0;
  std::vector<double> hs = plan.hs;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  for (double h : hs) {
    double sup = 0.0;
    for (double x : plan.xs) {
      double d = 0.0;
      for (int j = 0; j <= ell; ++j) d += w[j] * f.eval1(x + j * h);
      sup = std::max(sup, std::fabs(d));
      fscale = std::max(fscale, std::fabs(f.eval1(x)));
    }
    rep.per_h.emplace_back(h, sup / std::pow(h, m + alpha));
  }

  double sup_max = 0.0;
  for (auto& [h, r] : rep.per_h) sup_max = std::max(sup_max, r * std::pow(h, m + alpha));
  if (sup_max <= 1e-13 * std::max(1.0, fscale)) {
    rep.ratio_sup = 0.0;
    rep.exponent_fit = 99.0;  // differences vanish identically
    rep.pass = true;
    return rep;
  }

  // least-squares slope of ln(sup) vs ln(h)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (auto& [h, r] : rep.per_h) {
    const double sup = r * std::pow(h, m + alpha);
    if (sup <= 0.0) continue;
    const double lx = std::log(h), ly = std::log(sup);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  rep.exponent_fit =
      (cnt >= 2) ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;

  std::vector<double> ratios;
  for (auto& [h, r] : rep.per_h) ratios.push_back(r);
  rep.ratio_sup = *std::max_element(ratios.begin(), ratios.end());
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  // divergence check at the small-h end (hs sorted descending above)
  double small_h_max = 0.0;
  const size_t tail = std::min<size_t>(4, ratios.size());
  for (size_t i = ratios.size() - tail; i < ratios.size(); ++i)
    small_h_max = std::max(small_h_max, ratios[i]);
  const bool bounded = small_h_max <= 10.0 * median;
  rep.pass = (rep.exponent_fit >= m + alpha - 0.1) && bounded;
  return rep;
}

// max |f'| over [lo,hi] by dense sampling (kinks and all; 1e-3 resolution).
inline double sup_abs_derivative(const FunctionSpec& f, double lo, double hi,
                                 int n = 4096) {
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    best = std::max(best, std::fabs(f.eval_derivative1(x, 1)));
  }
  return best;
}

}  // namespace osclab
