#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "osclab/measure.hpp"
#include "osclab/random.hpp"

using namespace osclab;

TEST_CASE("moment basics") {
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  CHECK(moment(sym2, {0}) == 0.0);  // σ(R) = 0 by construction
  CHECK(moment(sym2, {1}) == 0.0);
  CHECK(moment(sym2, {2}) == 2.0);  // 1 + 1 - 0

  // σ(3) = Σ (-1)^{3+j} C(3,j) δ_j: second moment 0 + 3 - 12 + 9 = 0
  const SignedMeasure s3 = make_classical(3);
  CHECK(moment(s3, {2}) == 0.0);
  CHECK(check_vanishing(s3, 2).pass);
}

TEST_CASE("check_vanishing report") {
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  CHECK(check_vanishing(sym1, 0).pass);

  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  CHECK(check_vanishing(sym2, 1).pass);
  const MomentReport rep = check_vanishing(sym2, 2);
  CHECK_FALSE(rep.pass);
  bool found_offender = false;
  for (const auto& e : rep.entries)
    if (e.k == MultiIndex{2}) {
      CHECK(e.value == 2.0);
      found_offender = true;
    }
  CHECK(found_offender);
}

TEST_CASE("cumulative tail function") {
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  CHECK(cumulative(sym2, 0.5) == 1.0);    // only the atom at 1
  CHECK(cumulative(sym2, -0.5) == -1.0);  // atoms at 0 and 1
  CHECK(cumulative(sym2, 1.0) == 1.0);    // atom at s included
  CHECK(cumulative(sym2, 2.0) == 0.0);    // beyond the support
  CHECK(cumulative(sym2, -2.0) == 0.0);   // total mass
  const SignedMeasure s5 = make_classical(5);
  CHECK(cumulative(s5, s5.support_radius() + 0.1) == 0.0);
  CHECK(cumulative(s5, -s5.support_radius() - 0.1) == 0.0);
}

TEST_CASE("make_classical: exact vanishing and binomial identities") {
  for (int ell = 1; ell <= 8; ++ell) {
    const SignedMeasure s = make_classical(ell);
    CHECK(s.support_radius() == static_cast<double>(ell));
    CHECK(s.declared_moment_order() == ell - 1);
    CHECK(s.atoms_exact());
    if (ell >= 2) {
      const MomentReport rep = check_vanishing(s, ell - 1, 0.0);  // tolerance 0
      CHECK(rep.pass);
    }
    // Δ_ℓ applied to x^ℓ gives ℓ! h^ℓ, so the ℓ-th moment is ℓ!
    double fact = 1.0;
    for (int j = 2; j <= ell; ++j) fact *= j;
    CHECK(moment(s, {ell}) == fact);
    CHECK(s.total_variation() == std::ldexp(1.0, ell));  // Σ C(ℓ,j) = 2^ℓ
  }
  CHECK(make_classical(1).atoms().size() == 2);  // δ_1 - δ_0
  CHECK(moment(make_classical(1), {1}) == 1.0);
}

TEST_CASE("make_named shapes") {
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  REQUIRE(sym1.atoms().size() == 2);
  CHECK(sym1.atoms()[0].point[0] == 1.0);
  CHECK(sym1.atoms()[0].weight == 1.0);
  CHECK(sym1.atoms()[1].point[0] == -1.0);
  CHECK(sym1.atoms()[1].weight == -1.0);

  // the 0-sphere is two atoms
  const SignedMeasure smd1 = make_named(NamedMeasure::sphere_minus_delta, 1);
  CHECK(smd1.atoms().size() == 3);
  CHECK_FALSE(smd1.sphere().has_value());
  CHECK(check_vanishing(smd1, 1).pass);
  CHECK(smd1.total_variation() == 2.0);

  const SignedMeasure smd2 = make_named(NamedMeasure::sphere_minus_delta, 2);
  REQUIRE(smd2.sphere().has_value());
  CHECK(check_vanishing(smd2, 1).pass);
  // ∫ x1² dω = 1/2 on the circle; the δ_0 part contributes nothing
  CHECK(moment(smd2, {2, 0}) == Catch::Approx(0.5).epsilon(1e-12));
  const SignedMeasure smd3 = make_named(NamedMeasure::sphere_minus_delta, 3);
  CHECK(moment(smd3, {2, 0, 0}) == Catch::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(moment(smd3, {1, 1, 0}) == 0.0);
}

TEST_CASE("make_general") {
  const SignedMeasure g = make_general({{1.0}, {-1.0}, {0.0}}, {1.0, 1.0, -2.0});
  CHECK(g.declared_moment_order() == 1);  // same as sym2
  CHECK(moment(g, {2}) == 2.0);
  CHECK_THROWS_AS(make_general({{1.0}, {0.0}}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("declared order is checked, not assumed") {
  CHECK_THROWS_AS(SignedMeasure(1, {{{1.0}, 1.0}, {{-1.0}, -1.0}}, std::nullopt, 1),
                  std::invalid_argument);
}

TEST_CASE("moment is linear in the measure") {
  SplitMix64 rng(12345);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> pts1, pts2;
    std::vector<double> w1, w2;
    for (int i = 0; i < 3; ++i) {
      pts1.push_back({rng.uniform(-2, 2)});
      pts2.push_back({rng.uniform(-2, 2)});
      w1.push_back(rng.uniform(-1, 1));
      w2.push_back(rng.uniform(-1, 1));
    }
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    auto atoms_of = [](const std::vector<std::vector<double>>& p,
                       const std::vector<double>& w, double scale) {
      std::vector<Atom> atoms;
      for (size_t i = 0; i < p.size(); ++i) atoms.push_back({p[i], scale * w[i]});
      return atoms;
    };
    SignedMeasure s1(1, atoms_of(pts1, w1, 1.0), std::nullopt, -1);
    SignedMeasure s2(1, atoms_of(pts2, w2, 1.0), std::nullopt, -1);
    auto combined = atoms_of(pts1, w1, a);
    for (auto& at : atoms_of(pts2, w2, b)) combined.push_back(at);
    SignedMeasure sc(1, combined, std::nullopt, -1);
    for (int k = 0; k <= 3; ++k) {
      const double lhs = moment(sc, {k});
      const double rhs = a * moment(s1, {k}) + b * moment(s2, {k});
      CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }
  }
}

TEST_CASE("sphere restrictions") {
  CHECK_THROWS_AS(SignedMeasure(4, {}, SphereComponent{1.0, 1.0}, -1),
                  std::invalid_argument);
  const SignedMeasure smd2 = make_named(NamedMeasure::sphere_minus_delta, 2);
  CHECK_THROWS_AS(cumulative(smd2, 0.0), std::invalid_argument);
}
