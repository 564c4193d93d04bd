#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "osclab/oscillation.hpp"

using namespace osclab;

namespace {

OscillationRequest make_req(const FunctionSpec& f, const SignedMeasure& s,
                            double x, double eps, int m, double alpha,
                            double tol = 1e-8) {
  OscillationRequest r;
  r.f = &f;
  r.sigma = &s;
  r.x = {x};
  r.eps = eps;
  r.m = m;
  r.alpha = alpha;
  r.quad_tol = tol;
  return r;
}

}  // namespace

TEST_CASE("delta_sigma closed forms") {
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  for (double x : {-1.0, 0.0, 0.7})
    for (double h : {0.1, 0.5, 1.0})
      CHECK(delta_sigma(sq, sym2, {x}, h) ==
            Catch::Approx(2.0 * h * h).epsilon(1e-13));

  const FunctionSpec cube = FunctionSpec::polynomial({0.0, 0.0, 0.0, 1.0});
  CHECK(delta_sigma(cube, sym2, {1.0}, 0.5) == Catch::Approx(1.5).epsilon(1e-13));

  const FunctionSpec c = FunctionSpec::polynomial({42.0});
  CHECK(delta_sigma(c, sym2, {0.3}, 0.2) == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("delta_sigma with sphere components: second moment of the sphere") {
  // f(x) = x1²: the sphere average of (x1+hξ1)² - x1² is h²/d
  for (int d : {1, 2, 3}) {
    const SignedMeasure smd = make_named(NamedMeasure::sphere_minus_delta, d);
    const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0}, d);
    std::vector<double> x(d, 0.25);
    const double got = delta_sigma(sq, smd, x, 0.5);
    CHECK(got == Catch::Approx(0.25 / d).margin(1e-9));
  }
}

TEST_CASE("theta closed forms") {
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);

  // zero function
  const FunctionSpec z = FunctionSpec::polynomial({0.0});
  CHECK(theta(make_req(z, sym2, 0.3, 0.01, 0, 1.0)).value ==
        Catch::Approx(0.0).margin(1e-12));

  // cusp at the origin: the integrand is 2/h exactly, Θ = 2 log(1/ε)
  for (double alpha : {0.3, 0.5, 0.9}) {
    const FunctionSpec cu = FunctionSpec::cusp(alpha);
    for (int n : {4, 10, 20}) {
      const double eps = std::ldexp(1.0, -n);
      const OscillationResult r = theta(make_req(cu, sym1, 0.0, eps, 0, alpha));
      CHECK(r.converged);
      CHECK(r.value == Catch::Approx(2.0 * std::log(1.0 / eps)).margin(1e-6));
    }
  }

  // linear functions are annihilated by the second difference
  const FunctionSpec lin = FunctionSpec::polynomial({3.0, 2.0});
  CHECK(theta(make_req(lin, sym2, 0.4, 1e-3, 0, 1.0)).value ==
        Catch::Approx(0.0).margin(1e-10));

  // x² with sym2 at exponent 1: Θ_ε = ∫_ε^1 2 dh = 2(1-ε)
  const FunctionSpec sq = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  const double eps = 1.0 / 64;
  CHECK(theta(make_req(sq, sym2, 0.1, eps, 0, 1.0)).value ==
        Catch::Approx(2.0 * (1.0 - eps)).margin(1e-9));
}

TEST_CASE("theta series path agrees with the adaptive path where both converge") {
  // fast-decaying series: 9 terms at eval_tol, so the adaptive path can
  // still resolve the top frequency, and the contribution of the series
  // terms beyond the eval truncation is ~2e-8 at this ε
  const FunctionSpec f = FunctionSpec::smoothed_weierstrass(4.0, 0.9, 1);
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  for (double x : {0.0, 0.37, 0.81}) {
    OscillationRequest r = make_req(f, sym2, x, 0.25, 1, 0.9, 1e-9);
    r.budget = 6'000'000;
    r.method = ThetaMethod::series;
    const OscillationResult rs = theta(r);
    r.method = ThetaMethod::adaptive;
    const OscillationResult ra = theta(r);
    CAPTURE(x);
    CHECK(ra.converged);
    CHECK(rs.value == Catch::Approx(ra.value).margin(1e-6));
  }
}

TEST_CASE("series path at high exponent with a wide-support measure") {
  // m=2, alpha=0.9 against the 4th-order classical difference (atoms 0..4)
  const FunctionSpec f = FunctionSpec::smoothed_weierstrass(3.0, 0.9, 2);
  const SignedMeasure c4 = make_classical(4);
  for (double x : {0.2, 0.83}) {
    OscillationRequest r = make_req(f, c4, x, 0.25, 2, 0.9, 1e-8);
    r.budget = 8'000'000;
    r.method = ThetaMethod::series;
    const OscillationResult rs = theta(r);
    r.method = ThetaMethod::adaptive;
    const OscillationResult ra = theta(r);
    CAPTURE(x);
    CHECK(ra.converged);
    CHECK(rs.value == Catch::Approx(ra.value).margin(1e-5));
  }
}

TEST_CASE("theta is linear in the measure") {
  const FunctionSpec cu = FunctionSpec::cusp(0.5);
  const SignedMeasure s1 = make_general({{1.0}, {-1.0}}, {1.0, -1.0});
  const SignedMeasure s2 = make_general({{0.5}, {-0.25}, {0.0}}, {1.0, 2.0, -3.0});
  // 2*s1 - 0.5*s2 as one atom list
  const SignedMeasure mix = make_general(
      {{1.0}, {-1.0}, {0.5}, {-0.25}, {0.0}},
      {2.0, -2.0, -0.5, -1.0, 1.5});
  const double x = 0.31, eps = 1.0 / 128, tol = 1e-9;
  const double t1 = theta(make_req(cu, s1, x, eps, 0, 0.5, tol)).value;
  const double t2 = theta(make_req(cu, s2, x, eps, 0, 0.5, tol)).value;
  const double tm = theta(make_req(cu, mix, x, eps, 0, 0.5, tol)).value;
  CHECK(tm == Catch::Approx(2.0 * t1 - 0.5 * t2).margin(4.0 * tol));
}

TEST_CASE("theta_tilde basics") {
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  const FunctionSpec lin = FunctionSpec::polynomial({0.0, 1.0});
  CHECK(theta_tilde(lin, sym2, 0.2, 1e-3).value == Catch::Approx(0.0).margin(1e-10));

  // bump far from the evaluation point: every sample misses the support
  const FunctionSpec b = FunctionSpec::bump(0.0, 0.5);
  CHECK(theta_tilde(b, sym2, 3.0, 0.01).value == 0.0);

  // preconditions: sym1 lacks the k=1 moment; Zygmund series is not Lipschitz
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  CHECK_THROWS_AS(theta_tilde(b, sym1, 0.0, 0.01), std::invalid_argument);
  const FunctionSpec zw = FunctionSpec::zygmund_weierstrass(2.0);
  CHECK_THROWS_AS(theta_tilde(zw, sym2, 0.0, 0.01), std::invalid_argument);
}

TEST_CASE("corollary forms delegate to theta") {
  const FunctionSpec cu = FunctionSpec::cusp(0.5);
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);

  CorollaryParams gp;
  gp.points = {{1.0}, {-1.0}};
  gp.weights = {1.0, -1.0};
  gp.alpha = 0.5;
  const double g = corollary_form(CorollaryForm::gamma, cu, {0.1}, 0.01, gp).value;
  const double t = theta(make_req(cu, sym1, 0.1, 0.01, 0, 0.5)).value;
  CHECK(g == Catch::Approx(t).margin(1e-9));

  // Ω with the second-difference data equals Θ^{sym2} at exponent 1
  const FunctionSpec zw = FunctionSpec::zygmund_weierstrass(2.0);
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  CorollaryParams op;
  op.points = {{1.0}, {-1.0}, {0.0}};
  op.weights = {1.0, 1.0, -2.0};
  const double om = corollary_form(CorollaryForm::omega, zw, {0.3}, 0.01, op).value;
  const double t2 = theta(make_req(zw, sym2, 0.3, 0.01, 0, 1.0)).value;
  CHECK(om == Catch::Approx(t2).margin(1e-8));

  // omega requires Σ μ_i a_i = 0
  CorollaryParams bad;
  bad.points = {{1.0}, {0.0}};
  bad.weights = {1.0, -1.0};
  CHECK_THROWS_AS(corollary_form(CorollaryForm::omega, zw, {0.3}, 0.01, bad),
                  std::invalid_argument);

  // sphere form in d=1 on a function even about x equals ½ Θ^{sym2}
  const FunctionSpec beven = FunctionSpec::bump(0.5, 0.8);
  CorollaryParams sp;
  sp.alpha = 0.5;
  sp.dim = 1;
  const double ms =
      corollary_form(CorollaryForm::sphere, beven, {0.5}, 0.01, sp).value;
  const double th2 = theta(make_req(beven, sym2, 0.5, 0.01, 0, 0.5)).value;
  CHECK(ms == Catch::Approx(0.5 * th2).margin(1e-8));
}

TEST_CASE("sphere corollary in d=2,3 matches the radial closed form") {
  // for a radial bump about the origin, the sphere average of f(x+hξ) at
  // x = 0 is f evaluated at radius h, so M_ε reduces to a 1-D integral
  const FunctionSpec prof = FunctionSpec::bump(0.0, 1.0);
  const double eps = 1.0 / 64;
  QuadResult oracle = integrate_adaptive(
      [&](double h) {
        return (prof.eval1(h) - 1.0) * std::pow(h, -1.5);
      },
      eps, 1.0, {1e-10, 400000});
  for (int d : {2, 3}) {
    const FunctionSpec bd = FunctionSpec::bump(0.0, 1.0, d);
    CorollaryParams sp;
    sp.alpha = 0.5;
    sp.dim = d;
    const double got =
        corollary_form(CorollaryForm::sphere, bd, std::vector<double>(d, 0.0),
                       eps, sp, 1e-8)
            .value;
    CAPTURE(d);
    CHECK(got == Catch::Approx(oracle.value).margin(1e-6));
  }
}

TEST_CASE("linearity of theta in the function") {
  const SignedMeasure sym2 = make_named(NamedMeasure::sym2);
  const FunctionSpec f1 = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  const FunctionSpec f2 = FunctionSpec::polynomial({1.0, 0.0, 0.0, 0.5});
  const FunctionSpec sum = FunctionSpec::polynomial({1.0, 0.0, 1.0, 0.5});
  const FunctionSpec scaled = FunctionSpec::polynomial({0.0, 0.0, -2.5});
  const double tol = 1e-8;
  for (double x : {0.0, 0.6}) {
    const double ta = theta(make_req(f1, sym2, x, 0.01, 0, 1.0, tol)).value;
    const double tb = theta(make_req(f2, sym2, x, 0.01, 0, 1.0, tol)).value;
    const double ts = theta(make_req(sum, sym2, x, 0.01, 0, 1.0, tol)).value;
    const double tc = theta(make_req(scaled, sym2, x, 0.01, 0, 1.0, tol)).value;
    CHECK(ts == Catch::Approx(ta + tb).margin(2.0 * tol));
    CHECK(tc == Catch::Approx(-2.5 * ta).margin(2.0 * tol));
  }
}

TEST_CASE("interval additivity") {
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  const double tol = 1e-9;

  // adaptive path (cusp away from the origin)
  const FunctionSpec cu = FunctionSpec::cusp(0.5);
  OscillationRequest r = make_req(cu, sym1, 0.33, 1.0 / 256, 0, 0.5, tol);
  const double whole = theta(r).value;
  const double a = theta_interval(r, 1.0 / 256, 1.0 / 16).value;
  const double b = theta_interval(r, 1.0 / 16, 1.0).value;
  CHECK(whole == Catch::Approx(a + b).margin(2.0 * tol));

  // series path
  const FunctionSpec w = FunctionSpec::weierstrass(2.0, 0.5);
  OscillationRequest rw = make_req(w, sym1, 0.71, 1.0 / 1024, 0, 0.5, tol);
  const double w_whole = theta(rw).value;
  const double wa = theta_interval(rw, 1.0 / 1024, 1.0 / 32).value;
  const double wb = theta_interval(rw, 1.0 / 32, 1.0).value;
  CHECK(w_whole == Catch::Approx(wa + wb).margin(2.0 * tol));
}

TEST_CASE("global log bound on the corpus") {
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  const FunctionSpec w = FunctionSpec::weierstrass(2.0, 0.5);
  std::vector<double> ratio;
  for (int n = 4; n <= 14; ++n) {
    const double eps = std::ldexp(1.0, -n);
    const double v = theta(make_req(w, sym1, 0.37, eps, 0, 0.5)).value;
    ratio.push_back(std::fabs(v) / std::log(1.0 / eps));
  }
  std::vector<double> sorted = ratio;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (double r : ratio) CHECK(r <= std::max(4.0 * median, 1.0));
}

TEST_CASE("quadrature honesty: halving the tolerance") {
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  const FunctionSpec cu = FunctionSpec::cusp(0.5);
  OscillationRequest r = make_req(cu, sym1, 0.21, 1e-4, 0, 0.5, 1e-7);
  const OscillationResult coarse = theta(r);
  r.quad_tol = 5e-8;
  const OscillationResult fine = theta(r);
  CHECK(std::fabs(coarse.value - fine.value) <=
        std::max(coarse.quad_error_estimate, 1e-12));
}

TEST_CASE("budget exhaustion is reported, not silently truncated") {
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  const FunctionSpec w = FunctionSpec::weierstrass(2.0, 0.5);
  OscillationRequest r = make_req(w, sym1, 0.4, 1.0 / 4096, 0, 0.5, 1e-10);
  r.method = ThetaMethod::adaptive;  // forced onto the sampling path
  r.budget = 20000;
  const OscillationResult out = theta(r);
  CHECK_FALSE(out.converged);
}

TEST_CASE("theta preconditions") {
  const FunctionSpec w = FunctionSpec::weierstrass(2.0, 0.5);
  const SignedMeasure sym1 = make_named(NamedMeasure::sym1);
  // α = 1 needs vanishing moments to order 1; sym1 has moment(k=1) = 2
  CHECK_THROWS_AS(theta(make_req(w, sym1, 0.0, 0.01, 0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(theta(make_req(w, sym1, 0.0, 1.5, 0, 0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(theta(make_req(w, sym1, 0.0, 0.01, 0, 1.5)),
                  std::invalid_argument);
}
