#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "osclab/martingale.hpp"

using namespace osclab;

namespace {
const SignedMeasure& sym1() {
  static const SignedMeasure s = make_named(NamedMeasure::sym1);
  return s;
}
const SignedMeasure& sym2() {
  static const SignedMeasure s = make_named(NamedMeasure::sym2);
  return s;
}
}  // namespace

TEST_CASE("s_value closed forms") {
  const DyadicCube q0{0, {0}};
  const FunctionSpec lin = FunctionSpec::polynomial({1.0, 2.0});
  CHECK(s_value(lin, sym2(), q0, 0, 1.0).value == Catch::Approx(0.0).margin(1e-10));

  // f = x², σ = sym2: S_Q = ∫_0^1 2h²/h² dh = 2 for every cube
  const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  CHECK(s_value(sq, sym2(), q0, 0, 1.0).value == Catch::Approx(2.0).margin(1e-8));
  const DyadicCube deep{5, {17}};
  CHECK(s_value(sq, sym2(), deep, 0, 1.0).value == Catch::Approx(2.0).margin(1e-8));

  const FunctionSpec zero = FunctionSpec::polynomial({0.0});
  CHECK(s_value(zero, sym2(), q0, 0, 1.0).value == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("build: x² gives the constant-2 martingale") {
  const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  const DyadicMartingale M = DyadicMartingale::build(sq, sym2(), 5, 0, 1.0);
  CHECK(M.failed_cubes().empty());
  for (int n = 0; n <= 5; ++n)
    for (double v : M.level(n)) CHECK(v == Catch::Approx(2.0).margin(2e-8));
  for (int n = 1; n <= 5; ++n) {
    CHECK(M.martingale_defect(n) <= 4e-8);
    CHECK(M.increment_sup(n) <= 4e-8);
  }
  CHECK(M.adjacent_increment_sup(1) <= 4e-8);  // translation invariance of Δ x²
}

TEST_CASE("build: martingale property for lacunary corpus entries") {
  const FunctionSpec w = FunctionSpec::weierstrass(2.0, 0.5);
  const DyadicMartingale Mw = DyadicMartingale::build(w, sym1(), 8, 0, 0.5);
  for (int n = 1; n <= 8; ++n) CHECK(Mw.martingale_defect(n) <= 4e-8);
  CHECK(Mw.norm_B() > 0.0);
  CHECK(std::isfinite(Mw.norm_B()));

  const FunctionSpec zw = FunctionSpec::zygmund_weierstrass(2.0);
  const DyadicMartingale Mz = DyadicMartingale::build(zw, sym2(), 8, 0, 1.0);
  for (int n = 1; n <= 8; ++n) CHECK(Mz.martingale_defect(n) <= 4e-8);
}

TEST_CASE("generic-path martingale property (bump with sym2)") {
  const FunctionSpec b = FunctionSpec::bump(0.5, 0.4);
  const DyadicMartingale M = DyadicMartingale::build(b, sym2(), 3, 0, 1.0);
  CHECK(M.failed_cubes().empty());
  for (int n = 1; n <= 3; ++n) CHECK(M.martingale_defect(n) <= 4e-8);
}

TEST_CASE("increments and adjacent increments stabilize") {
  const FunctionSpec w = FunctionSpec::weierstrass(2.0, 0.5);
  const DyadicMartingale M = DyadicMartingale::build(w, sym1(), 13, 0, 0.5);
  // running max of ‖S_n - S_{n-1}‖_∞ grows < 10% over the last 4 generations
  std::vector<double> run_inc;
  double r = 0.0;
  for (int n = 1; n <= 13; ++n) {
    r = std::max(r, M.increment_sup(n));
    run_inc.push_back(r);
  }
  CHECK(run_inc.back() <= 1.10 * run_inc[run_inc.size() - 5]);
  // adjacent increments: no growth trend once enough pairs exist
  double ra = M.adjacent_increment_sup(1);
  for (int n = 2; n <= 13; ++n) {
    const double prev = ra;
    ra = std::max(ra, M.adjacent_increment_sup(n));
    if (n >= 5) CHECK(ra <= 2.0 * prev);
  }
}

TEST_CASE("comparison gap: closed form for x²") {
  // S_n ≡ 2 and Θ_ε = 2(1-ε), so the gap is exactly 2ε = 2^{-n-1}
  const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  const DyadicMartingale M = DyadicMartingale::build(sq, sym2(), 6, 0, 1.0);
  for (int n : {4, 5, 6}) {
    const auto xs = default_comparison_samples(3, 99);
    const double gap = comparison_gap(M, n, xs);
    CHECK(gap == Catch::Approx(std::ldexp(1.0, -n - 1)).margin(1e-8));
  }
}

TEST_CASE("comparison gap: lacunary entries bounded over generations") {
  const FunctionSpec w = FunctionSpec::weierstrass(2.0, 0.5);
  const DyadicMartingale M = DyadicMartingale::build(w, sym1(), 8, 0, 0.5);
  SplitMix64 rng(7);
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < 32; ++i) xs.push_back({rng.u01()});
  std::vector<double> gaps;
  for (int n = 4; n <= 8; ++n) gaps.push_back(comparison_gap(M, n, xs));
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  CHECK(*std::max_element(gaps.begin(), gaps.end()) <= 2.0 * median);
}

TEST_CASE("d=2 build: lifted x1² is constant per the same closed form") {
  const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0}, 2);
  const SignedMeasure s2d = make_named(NamedMeasure::sym2, 2);
  const DyadicMartingale M = DyadicMartingale::build(sq, s2d, 2, 0, 1.0);
  CHECK(M.failed_cubes().empty());
  for (int n = 0; n <= 2; ++n)
    for (double v : M.level(n)) CHECK(v == Catch::Approx(2.0).margin(1e-7));
  CHECK(M.martingale_defect(1) <= 4e-8);
  CHECK(M.martingale_defect(2) <= 4e-8);
}

TEST_CASE("scaling law of the cube integral") {
  // |∫_Q Δ_σ f dx| scales like h^{m+1} for α < 1 (with the extra log for
  // α = 1 the fitted slope exceeds m+2-0.2)
  const DyadicCube q0{0, {0}};
  auto fit_slope = [&](const FunctionSpec& f, const SignedMeasure& s) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int j = 2; j <= 12; ++j) {
      const double h = std::ldexp(1.0, -j);
      const double v = std::fabs(integral_delta_over_cube(f, s, q0, h));
      if (v <= 0.0) continue;
      const double lx = std::log(h), ly = std::log(v);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    REQUIRE(cnt >= 8);
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  };
  CHECK(fit_slope(FunctionSpec::weierstrass(2.0, 0.5), sym2()) >= 1.0 - 0.1);
  CHECK(fit_slope(FunctionSpec::zygmund_weierstrass(2.0), sym2()) >= 2.0 - 0.2);
  // x²: Δ = 2h² exactly, slope 2
  CHECK(fit_slope(FunctionSpec::polynomial({0.0, 0.0, 1.0}), sym2()) ==
        Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("integral_delta_over_cube: series vs quadrature consistency") {
  const FunctionSpec f = FunctionSpec::smoothed_weierstrass(4.0, 0.9, 1);
  const DyadicCube q{2, {1}};
  for (double h : {0.3, 0.01}) {
    const double series = integral_delta_over_cube(f, sym2(), q, h);
    // oracle: 16-point Gauss of delta_sigma over the cube (f is effectively
    // 9 cosines; GL16 resolves only the smooth part, so compare loosely via
    // Richardson: two half-cubes vs whole)
    const DyadicCube qa{3, {2}}, qb{3, {3}};
    const double split = integral_delta_over_cube(f, sym2(), qa, h) +
                         integral_delta_over_cube(f, sym2(), qb, h);
    CHECK(series == Catch::Approx(split).margin(1e-12));
  }
}

TEST_CASE("lil_ratio") {
  std::vector<int> ns;
  std::vector<double> walk;
  for (int n = 3; n <= 16; ++n) {
    ns.push_back(n);
    walk.push_back(n);  // deterministic S_n = n
  }
  const LilRatioTable t = lil_ratio(ns, {walk}, LilMode::martingale);
  // ratio at n = 16: 16 / sqrt(16 log log 16) ≈ 3.96
  CHECK(t.ratio[0].back() == Catch::Approx(3.961).margin(2e-3));
  // running max is monotone
  for (size_t i = 1; i < t.running_max[0].size(); ++i)
    CHECK(t.running_max[0][i] >= t.running_max[0][i - 1]);

  const LilRatioTable z = lil_ratio({4, 5}, {{0.0, 0.0}}, LilMode::theta);
  CHECK(z.ratio[0][0] == 0.0);
  CHECK(z.running_max[0][1] == 0.0);

  CHECK_THROWS_AS(lil_ratio({2}, {{1.0}}, LilMode::martingale), std::domain_error);
  CHECK_THROWS_AS(lil_ratio({3}, {{1.0}}, LilMode::theta), std::domain_error);
}

TEST_CASE("build depth guard") {
  const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  CHECK_THROWS_AS(DyadicMartingale::build(sq, sym2(), 15, 0, 1.0),
                  std::invalid_argument);
}
