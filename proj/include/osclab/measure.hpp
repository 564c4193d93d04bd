#pragma once

// Compactly supported signed Borel measures: finite atom lists plus an
// optional uniform-sphere component.  Moments of the canonical builder
// measures are computed in exact integer arithmetic so that vanishing can be
// asserted with zero tolerance.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace osclab {

using MultiIndex = std::vector<int>;

inline constexpr double kMomentTol = 1e-12;  // float-valued measures

struct SphereComponent {
  double radius = 1.0;
  double weight = 1.0;  // weight times *normalized* surface measure
};

struct Atom {
  std::vector<double> point;
  double weight = 0.0;
};

namespace detail {

// True if v * 2^s is integral with |v * 2^s| <= 2^40 for some s <= max_s.
inline bool dyadic_scale(double v, int max_s, int* s_out) {
  for (int s = 0; s <= max_s; ++s) {
    const double scaled = std::ldexp(v, s);
    if (std::fabs(scaled) > 1.099511627776e12) return false;  // 2^40
    if (scaled == std::nearbyint(scaled)) {
      *s_out = s;
      return true;
    }
  }
  return false;
}

inline double norm2(const std::vector<double>& p) {
  double s = 0;
  for (double c : p) s += c * c;
  return std::sqrt(s);
}

}  // namespace detail

class SignedMeasure {
 public:
  // Validates dimensions and, when declared_moment_order >= 0, that the
  // declared vanishing actually holds (checked, not assumed).
  SignedMeasure(int dim, std::vector<Atom> atoms,
                std::optional<SphereComponent> sphere, int declared_moment_order);

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<SphereComponent>& sphere() const { return sphere_; }
  double support_radius() const { return support_radius_; }
  int declared_moment_order() const { return declared_moment_order_; }

  double total_variation() const {
    double tv = sphere_ ? std::fabs(sphere_->weight) : 0.0;
    for (const auto& a : atoms_) tv += std::fabs(a.weight);
    return tv;
  }

  // All atom fields dyadic-rational: integer moments are computed exactly.
  bool atoms_exact() const { return exact_; }
  int coord_scale() const { return coord_scale_; }
  int weight_scale() const { return weight_scale_; }

 private:
  void compute_exactness() {
    exact_ = true;
    coord_scale_ = weight_scale_ = 0;
    for (const auto& a : atoms_) {
      int s;
      if (!detail::dyadic_scale(a.weight, 8, &s)) {
        exact_ = false;
        return;
      }
      weight_scale_ = std::max(weight_scale_, s);
      for (double c : a.point) {
        if (!detail::dyadic_scale(c, 8, &s)) {
          exact_ = false;
          return;
        }
        coord_scale_ = std::max(coord_scale_, s);
      }
    }
  }

  int dim_;
  std::vector<Atom> atoms_;
  std::optional<SphereComponent> sphere_;
  double support_radius_ = 0.0;
  int declared_moment_order_ = -1;
  bool exact_ = false;
  int coord_scale_ = 0, weight_scale_ = 0;
};

namespace detail {

// Moment of the normalized surface measure on the unit sphere S^{d-1}:
// ∫ x^k dω = Γ(d/2) Π_j Γ((k_j+1)/2) / (Γ((|k|+d)/2) π^{d/2}), even k.
inline double unit_sphere_moment(int dim, const MultiIndex& k) {
  int total = 0;
  for (int kj : k) {
    if (kj % 2 != 0) return 0.0;
    total += kj;
  }
  if (total == 0) return 1.0;
  double lg = std::lgamma(0.5 * dim) - std::lgamma(0.5 * (total + dim)) -
              0.5 * dim * std::log(M_PI);
  for (int kj : k) lg += std::lgamma(0.5 * (kj + 1));
  return std::exp(lg);
}

inline bool moment_exact_feasible(const SignedMeasure& s, int degree) {
  if (!s.atoms_exact()) return false;
  // crude bit budget: scaled coords <= 2^40, so the sum stays within
  // __int128 when 40*(degree+1) + log2(#atoms) is comfortably below 126
  return 40 * (degree + 1) + 10 < 126;
}

}  // namespace detail

// ∫ x^k dσ(x).  Exact in integer arithmetic whenever all atom coordinates
// and weights are dyadic rationals of modest size (all builder measures).
inline double moment(const SignedMeasure& sigma, const MultiIndex& k) {
  if (static_cast<int>(k.size()) != sigma.dim())
    throw std::invalid_argument("moment: multiindex dimension mismatch");
  int degree = 0;
  for (int kj : k) {
    if (kj < 0) throw std::invalid_argument("moment: negative multiindex entry");
    degree += kj;
  }

  double result = 0.0;
  if (detail::moment_exact_feasible(sigma, degree)) {
    __int128 acc = 0;
    const int sp = sigma.coord_scale(), sw = sigma.weight_scale();
    for (const auto& a : sigma.atoms()) {
      __int128 term = static_cast<long long>(std::nearbyint(std::ldexp(a.weight, sw)));
      for (int j = 0; j < sigma.dim(); ++j) {
        const long long c =
            static_cast<long long>(std::nearbyint(std::ldexp(a.point[j], sp)));
        for (int r = 0; r < k[j]; ++r) term *= c;
      }
      acc += term;
    }
    // divide by 2^(sw + sp*degree); exact when acc fits in a double
    const double num = static_cast<double>(acc);
    if (std::fabs(num) < 9.007199254740992e15)  // 2^53
      result = std::ldexp(num, -(sw + sp * degree));
    else {
      result = 0.0;
      for (const auto& a : sigma.atoms()) {
        double t = a.weight;
        for (int j = 0; j < sigma.dim(); ++j)
          for (int r = 0; r < k[j]; ++r) t *= a.point[j];
        result += t;
      }
    }
  } else {
    for (const auto& a : sigma.atoms()) {
      double t = a.weight;
      for (int j = 0; j < sigma.dim(); ++j)
        for (int r = 0; r < k[j]; ++r) t *= a.point[j];
      result += t;
    }
  }

  if (sigma.sphere()) {
    const auto& sc = *sigma.sphere();
    const double um = detail::unit_sphere_moment(sigma.dim(), k);
    if (um != 0.0)
      result += sc.weight * std::pow(sc.radius, degree) * um;
  }
  return result;
}

inline std::vector<MultiIndex> multiindices_up_to(int dim, int degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 0);
  // lexicographic enumeration of all k with |k| <= degree
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      for (int v = 0; v <= remaining; ++v) {
        cur[pos] = v;
        out.push_back(cur);
      }
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, degree);
  return out;
}

struct MomentReport {
  struct Entry {
    MultiIndex k;
    double value;
  };
  std::vector<Entry> entries;
  bool pass = false;
  double tol = 0.0;
  int order = 0;
};

// Checks that every moment of degree <= order vanishes.  Tolerance defaults
// to 0 for exactly representable measures and kMomentTol otherwise.
inline MomentReport check_vanishing(const SignedMeasure& sigma, int order,
                                    double tol = -1.0) {
  if (order < 0) throw std::invalid_argument("check_vanishing: order must be >= 0");
  MomentReport rep;
  rep.order = order;
  if (tol < 0.0) {
    const bool atoms_zero_tol = sigma.atoms_exact();
    const bool sphere_zero_tol = !sigma.sphere() || order <= 1;
    tol = (atoms_zero_tol && sphere_zero_tol) ? 0.0 : kMomentTol;
  }
  rep.tol = tol;
  rep.pass = true;
  for (const auto& k : multiindices_up_to(sigma.dim(), order)) {
    const double v = moment(sigma, k);
    rep.entries.push_back({k, v});
    if (std::fabs(v) > tol) rep.pass = false;
  }
  return rep;
}

// σ[s,∞) for a one-dimensional atomic measure; the atom at s is included.
inline double cumulative(const SignedMeasure& sigma, double s) {
  if (sigma.dim() != 1)
    throw std::invalid_argument("cumulative: requires dim = 1");
  if (sigma.sphere())
    throw std::invalid_argument("cumulative: sphere component not supported");
  double total = 0.0;
  for (const auto& a : sigma.atoms())
    if (a.point[0] >= s) total += a.weight;
  return total;
}

// σ(ℓ) = Σ_{j=0}^ℓ (-1)^{ℓ+j} C(ℓ,j) δ_j; realizes the classical forward
// difference Δ_ℓ.  Moments of degree <= ℓ-1 vanish.
inline SignedMeasure make_classical(int ell) {
  if (ell < 1) throw std::invalid_argument("make_classical: ell must be >= 1");
  std::vector<Atom> atoms;
  double binom = 1.0;
  for (int j = 0; j <= ell; ++j) {
    const double sign = ((ell + j) % 2 == 0) ? 1.0 : -1.0;
    atoms.push_back({{static_cast<double>(j)}, sign * binom});
    binom = binom * (ell - j) / (j + 1);
  }
  return SignedMeasure(1, std::move(atoms), std::nullopt, ell - 1);
}

enum class NamedMeasure { sym1, sym2, sphere_minus_delta };

inline SignedMeasure make_named(NamedMeasure name, int dim = 1) {
  auto e1 = [dim](double v) {
    std::vector<double> p(dim, 0.0);
    p[0] = v;
    return p;
  };
  switch (name) {
    case NamedMeasure::sym1:
      return SignedMeasure(dim, {{e1(1.0), 1.0}, {e1(-1.0), -1.0}}, std::nullopt, 0);
    case NamedMeasure::sym2:
      return SignedMeasure(
          dim, {{e1(1.0), 1.0}, {e1(-1.0), 1.0}, {e1(0.0), -2.0}}, std::nullopt, 1);
    case NamedMeasure::sphere_minus_delta:
      if (dim == 1)  // the 0-sphere is two points; keep it atomic
        return SignedMeasure(
            1, {{{1.0}, 0.5}, {{-1.0}, 0.5}, {{0.0}, -1.0}}, std::nullopt, 1);
      if (dim > 3)
        throw std::invalid_argument("make_named: sphere_minus_delta needs d <= 3");
      return SignedMeasure(dim, {{std::vector<double>(dim, 0.0), -1.0}},
                           SphereComponent{1.0, 1.0}, 1);
  }
  throw std::invalid_argument("make_named: unknown name");
}

// Σ μ_i δ_{a_i}; requires Σ μ_i = 0.  The vanishing order is inferred.
inline SignedMeasure make_general(const std::vector<std::vector<double>>& points,
                                  const std::vector<double>& weights) {
  if (points.empty() || points.size() != weights.size())
    throw std::invalid_argument("make_general: points/weights size mismatch");
  const int dim = static_cast<int>(points[0].size());
  double wsum = 0.0, wabs = 0.0;
  std::vector<Atom> atoms;
  for (size_t i = 0; i < points.size(); ++i) {
    atoms.push_back({points[i], weights[i]});
    wsum += weights[i];
    wabs += std::fabs(weights[i]);
  }
  if (std::fabs(wsum) > kMomentTol * std::max(1.0, wabs))
    throw std::invalid_argument("make_general: weights must sum to zero");
  SignedMeasure probe(dim, atoms, std::nullopt, -1);
  int declared = -1;
  for (int order = 0; order <= 8; ++order) {
    if (!check_vanishing(probe, order).pass) break;
    declared = order;
  }
  return SignedMeasure(dim, std::move(atoms), std::nullopt, declared);
}

inline SignedMeasure::SignedMeasure(int dim, std::vector<Atom> atoms,
                                    std::optional<SphereComponent> sphere,
                                    int declared_moment_order)
    : dim_(dim),
      atoms_(std::move(atoms)),
      sphere_(sphere),
      declared_moment_order_(declared_moment_order) {
  if (dim_ < 1) throw std::invalid_argument("SignedMeasure: dim must be >= 1");
  if (sphere_ && dim_ > 3)
    throw std::invalid_argument("SignedMeasure: sphere component needs d <= 3");
  if (sphere_ && !(sphere_->radius > 0))
    throw std::invalid_argument("SignedMeasure: sphere radius must be > 0");
  support_radius_ = sphere_ ? sphere_->radius : 0.0;
  for (const auto& a : atoms_) {
    if (static_cast<int>(a.point.size()) != dim_)
      throw std::invalid_argument("SignedMeasure: atom dimension mismatch");
    support_radius_ = std::max(support_radius_, detail::norm2(a.point));
  }
  compute_exactness();
  if (declared_moment_order_ >= 0 &&
      !check_vanishing(*this, declared_moment_order_).pass)
    throw std::invalid_argument(
        "SignedMeasure: declared moment order fails check_vanishing");
}

}  // namespace osclab
