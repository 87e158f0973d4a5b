// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include "doctest.h"

#include "graphforms/function_space.hpp"
#include "graphforms/metric_graph.hpp"
#include "oracles.hpp"

using namespace graphforms;
using testkit::urand;

namespace {

constexpr double kPi = 3.14159265358979323846;

// recursive Simpson with defect-driven refinement, an independent quadrature
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth > 28 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth + 1) +
         simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth + 1);
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-13) {
  double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(m), f(b), tol, 0);
}

PiecewiseFunction cos_pi_on_interval(const std::shared_ptr<MetricGraph>& g) {
  return PiecewiseFunction::exact(g, kPi * kPi, {{1.0, 0.0}});
}

}  // namespace

TEST_SUITE("function_space") {

TEST_CASE("closed-form integrals of an exact trigonometric function") {
  auto g = testkit::unit_interval();
  PiecewiseFunction u = cos_pi_on_interval(g);
  Region whole = Region::whole(*g);
  CHECK(integrate_sq(u, whole) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate_energy(u, whole) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-14));

  Region mid = Region::from_intervals(*g, {{{0.3, 0.7}}});
  CHECK(integrate_sq(u, mid) == doctest::Approx(0.048634654271868604).epsilon(1e-13));
  CHECK(integrate_energy(u, mid) == doctest::Approx(3.4678369625886497).epsilon(1e-13));
}

TEST_CASE("eval and deriv match closed forms across representations") {
  auto g = testkit::unit_interval();
  SUBCASE("trigonometric") {
    PiecewiseFunction u = PiecewiseFunction::exact(g, 4.0, {{0.3, 1.7}});
    for (double t : {0.0, 0.21, 0.5, 0.93, 1.0}) {
      double expect = 0.3 * std::cos(2.0 * t) + 1.7 * std::sin(2.0 * t) / 2.0;
      double dexpect = -0.6 * std::sin(2.0 * t) + 1.7 * std::cos(2.0 * t);
      CHECK(std::real(u.eval(0, t)) == doctest::Approx(expect).epsilon(1e-14));
      CHECK(std::real(u.deriv(0, t)) == doctest::Approx(dexpect).epsilon(1e-14));
    }
  }
  SUBCASE("linear") {
    PiecewiseFunction u = PiecewiseFunction::exact(g, 0.0, {{0.25, -2.0}});
    CHECK(std::real(u.eval(0, 0.6)) == doctest::Approx(0.25 - 1.2).epsilon(1e-14));
    CHECK(std::real(u.deriv(0, 0.6)) == doctest::Approx(-2.0).epsilon(1e-14));
  }
  SUBCASE("hyperbolic stores stable exponential components") {
    // u(0)=A, u'(0)=B in every representation
    PiecewiseFunction u = PiecewiseFunction::exact(g, -0.25, {{1.0, -0.5}});
    for (double t : {0.0, 0.4, 1.0}) {
      CHECK(std::real(u.eval(0, t)) == doctest::Approx(std::exp(-0.5 * t)).epsilon(1e-13));
      CHECK(std::real(u.deriv(0, t)) ==
            doctest::Approx(-0.5 * std::exp(-0.5 * t)).epsilon(1e-13));
    }
    auto [a, b] = u.ab(0);
    CHECK(std::real(a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::real(b) == doctest::Approx(-0.5).epsilon(1e-14));
  }
}

TEST_CASE("quadrature handles highly oscillatory integrands") {
  auto g = testkit::unit_interval();
  double lambda = 80.0 * 80.0;  // ~13 wavelengths per unit edge
  PiecewiseFunction u = PiecewiseFunction::exact(g, lambda, {{1.0, 0.0}});
  double expect = adaptive_integral([&](double t) { return std::pow(std::cos(80.0 * t), 2); },
                                    0.0, 1.0);
  CHECK(integrate_sq(u, Region::whole(*g)) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("cross and product terms match an independent quadrature") {
  auto g = testkit::unit_interval();
  PiecewiseFunction u = cos_pi_on_interval(g);
  PiecewiseFunction eta = PiecewiseFunction::exact(g, 0.0, {{0.0, 1.0}});  // eta(t) = t
  Region whole = Region::whole(*g);
  CHECK(std::real(cutoff_cross_term(u, eta, whole)) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(std::abs(std::imag(cutoff_cross_term(u, eta, whole))) < 1e-15);
  CHECK(product_energy(u, eta, whole) ==
        doctest::Approx(2.3949340668482264).epsilon(1e-13));
  CHECK(mixed_energy(u, u, whole).real() ==
        doctest::Approx(integrate_energy(u, whole)).epsilon(1e-13));
}

TEST_CASE("inner products: symmetry, Cauchy-Schwarz, additivity") {
  auto g = testkit::unit_interval();
  std::mt19937 rng(501);
  for (int trial = 0; trial < 10; ++trial) {
    Complex a(urand(rng, -1, 1), urand(rng, -1, 1)), b(urand(rng, -1, 1), urand(rng, -1, 1));
    Complex c(urand(rng, -1, 1), urand(rng, -1, 1)), d(urand(rng, -1, 1), urand(rng, -1, 1));
    PiecewiseFunction u = PiecewiseFunction::exact(g, 9.0, {{a, b}});
    PiecewiseFunction v = PiecewiseFunction::exact(g, 9.0, {{c, d}});
    Region whole = Region::whole(*g);
    Complex uv = inner_product(u, v, whole);
    Complex vu = inner_product(v, u, whole);
    CHECK(std::abs(uv - std::conj(vu)) < 1e-12);
    double nu = integrate_sq(u, whole), nv = integrate_sq(v, whole);
    CHECK(std::abs(uv) <= std::sqrt(nu * nv) * (1.0 + 1e-10));

    double split = urand(rng, 0.2, 0.8);
    Region leftr = Region::from_intervals(*g, {{{0.0, split}}});
    Region rightr = Region::from_intervals(*g, {{{split, 1.0}}});
    CHECK(integrate_sq(u, leftr) + integrate_sq(u, rightr) ==
          doctest::Approx(nu).epsilon(1e-12));
  }
}

TEST_CASE("scaling is quadratic in the integrals") {
  auto g = testkit::unit_interval();
  PiecewiseFunction u = cos_pi_on_interval(g);
  PiecewiseFunction w = u.scaled(Complex(2.0, -1.0));
  Region whole = Region::whole(*g);
  CHECK(integrate_sq(w, whole) == doctest::Approx(5.0 * integrate_sq(u, whole)).epsilon(1e-13));
  CHECK(integrate_energy(w, whole) ==
        doctest::Approx(5.0 * integrate_energy(u, whole)).epsilon(1e-13));
}

TEST_CASE("mesh layout and nodal reproduction") {
  auto g = testkit::unit_interval();
  auto mesh = std::make_shared<Mesh>(g, 0.3);
  CHECK(mesh->cells(0) == 4);  // ceil(1/0.3)
  CHECK(mesh->dof_count() == 2 + 3);
  CHECK(mesh->dof_of_node(0, 0) == 0);
  CHECK(mesh->dof_of_node(0, 4) == 1);

  // a nodal function reproduces piecewise-linear data exactly
  PiecewiseFunction lin = PiecewiseFunction::exact(g, 0.0, {{0.7, -0.4}});
  PiecewiseFunction nodal = interpolate(lin, mesh);
  std::mt19937 rng(502);
  for (int k = 0; k < 50; ++k) {
    double t = urand(rng);
    CHECK(std::abs(nodal.eval(0, t) - lin.eval(0, t)) < 1e-13);
  }
}

TEST_CASE("interpolation error decays at second order") {
  auto g = testkit::unit_interval();
  PiecewiseFunction u = cos_pi_on_interval(g);
  double prev = -1.0;
  for (double h : {0.1, 0.05, 0.025}) {
    auto mesh = std::make_shared<Mesh>(g, h);
    PiecewiseFunction iu = interpolate(u, mesh);
    // integrate cell by cell: the error vanishes at the nodes, and a global
    // adaptive pass would sample exactly there and see zero
    double err2 = 0.0;
    for (int k = 0; k < mesh->cells(0); ++k) {
      double a = mesh->node_offset(0, k), b = mesh->node_offset(0, k + 1);
      err2 += adaptive_integral(
          [&](double t) {
            double d = std::real(iu.eval(0, t)) - std::cos(kPi * t);
            return d * d;
          },
          a, b);
    }
    double err = std::sqrt(err2);
    if (prev > 0.0) {
      double order = std::log2(prev / err);
      CHECK(order >= 1.9);
      CHECK(order <= 2.1);
    }
    prev = err;
  }
}

TEST_CASE("weighted norm against adaptive Simpson") {
  auto g = testkit::unit_interval();
  PiecewiseFunction u = cos_pi_on_interval(g);
  double w = weighted_norm(*g, u, GraphPoint::at_vertex(0), 1.0);
  CHECK(w * w == doctest::Approx(0.23605339598497252).epsilon(1e-12));

  // exponential weight never increases the plain norm
  CHECK(w <= std::sqrt(integrate_sq(u, Region::whole(*g))) * (1.0 + 1e-12));

  // two-edge path: the distance bends around the middle vertex
  auto path = std::make_shared<MetricGraph>(
      std::vector<VertexSpec>{{"a", 0.0}, {"m", 0.0}, {"b", 0.0}},
      std::vector<EdgeSpec>{{"e1", "a", "m", 1.0}, {"e2", "m", "b", 1.0}});
  PiecewiseFunction v = PiecewiseFunction::exact(path, 0.0, {{1.0, 0.0}, {1.0, 0.0}});
  double alpha = 0.7;
  double expect = adaptive_integral([&](double rho) { return std::exp(-2.0 * alpha * rho); },
                                    0.0, 2.0);
  double got = weighted_norm(*path, v, GraphPoint::at_vertex(0), alpha);
  CHECK(got * got == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("growth function matches the closed form on the line") {
  auto line = testkit::line_graph(40.0);
  PiecewiseFunction u = PiecewiseFunction::exact(line, 1.0, {{1.0, 0.0}, {1.0, 0.0}});
  std::vector<double> radii = {1.0, 2.0, 2.5, 5.0, 10.0};
  GrowthProfile j = growth_function(*line, u, GraphPoint::at_vertex(0), radii);
  REQUIRE(j.values.size() == radii.size());
  for (size_t i = 0; i < radii.size(); ++i) {
    double r = radii[i];
    CHECK(j.values[i] == doctest::Approx(r + std::sin(2.0 * r) / 2.0).epsilon(1e-12));
    if (i > 0) CHECK(j.values[i] >= j.values[i - 1]);
  }
  CHECK_THROWS_AS((void)growth_function(*line, u, GraphPoint::at_vertex(0), {5.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)growth_function(*line, u, GraphPoint::at_vertex(0), {39.0, 41.0}),
                  std::invalid_argument);
}

TEST_CASE("incompatible meshes are rejected") {
  auto g = testkit::unit_interval();
  auto m1 = std::make_shared<Mesh>(g, 0.1);
  auto m2 = std::make_shared<Mesh>(g, 0.07);
  PiecewiseFunction a = interpolate(cos_pi_on_interval(g), m1);
  PiecewiseFunction b = interpolate(cos_pi_on_interval(g), m2);
  CHECK_THROWS_AS((void)inner_product(a, b, Region::whole(*g)), std::invalid_argument);
}

TEST_CASE("lambda accessor requires an exact function") {
  auto g = testkit::unit_interval();
  auto mesh = std::make_shared<Mesh>(g, 0.25);
  PiecewiseFunction n = interpolate(cos_pi_on_interval(g), mesh);
  CHECK_THROWS_AS((void)n.lambda(), std::invalid_argument);
  CHECK(cos_pi_on_interval(g).lambda() == doctest::Approx(kPi * kPi));
}

}  // TEST_SUITE
