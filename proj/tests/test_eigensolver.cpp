// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>

#include "doctest.h"

#include "graphforms/eigensolver.hpp"
#include "oracles.hpp"

using namespace graphforms;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

FormMatrices interval_forms(double h) {
  auto g = testkit::unit_interval();
  return assemble(std::make_shared<Mesh>(g, h));
}

}  // namespace

TEST_SUITE("eigensolver") {

TEST_CASE("interval spectrum carries the quadratic interpolation error") {
  double h = 0.02;
  SpectralResult sr = solve_spectrum(interval_forms(h), 5, -1.0);
  CHECK(std::abs(sr.eigenvalues[0]) < 1e-10);
  for (int k = 1; k <= 4; ++k) {
    double exact = k * k * kPi * kPi;
    double rel = (sr.eigenvalues[k] - exact) / exact;
    // consistent-mass linear elements overshoot by lambda h^2 / 12 + O(h^4)
    double predicted = exact * h * h / 12.0;
    CHECK(rel > 0.5 * predicted);
    CHECK(rel < 1.5 * predicted);
  }
  // M-orthonormal columns
  Eigen::MatrixXd gram =
      sr.eigenvectors.transpose() * Eigen::MatrixXd(interval_forms(h).M) * sr.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(sr.residuals.maxCoeff() < 1e-7);
}

TEST_CASE("loop eigenvalues come in pairs with full multiplicity") {
  auto g = testkit::loop_graph(2.0 * kPi);
  FormMatrices fm = assemble(std::make_shared<Mesh>(g, 0.01));
  SpectralResult sr = solve_spectrum(fm, 7, -1.0);
  double expect[7] = {0, 1, 1, 4, 4, 9, 9};
  for (int i = 0; i < 7; ++i)
    CHECK(sr.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(2e-4));
  // the doubles are numerically split only at the discretization scale
  CHECK(std::abs(sr.eigenvalues[2] - sr.eigenvalues[1]) < 1e-5);
  CHECK(std::abs(sr.eigenvalues[4] - sr.eigenvalues[3]) < 1e-4);
  // and separated from the next cluster by an honest gap
  CHECK(sr.eigenvalues[3] - sr.eigenvalues[2] > 1.0);
}

TEST_CASE("sparse path reproduces analytic values on a large mesh") {
  // 2501 dofs puts this over the dense cutoff, exercising shift-invert Lanczos
  double h = 4e-4;
  FormMatrices fm = interval_forms(h);
  REQUIRE(fm.dofs() >= 2000);
  SpectralResult sr = solve_spectrum(fm, 4, -1.0);
  CHECK(std::abs(sr.eigenvalues[0]) < 1e-8);
  for (int k = 1; k <= 3; ++k) {
    double exact = k * k * kPi * kPi;
    double predicted = exact * h * h / 12.0;
    double rel = (sr.eigenvalues[k] - exact) / exact;
    CHECK(rel > 0.25 * predicted);
    CHECK(rel < 2.0 * predicted);
  }
  CHECK(sr.residuals.maxCoeff() < 1e-7);
}

TEST_CASE("determinism: same seed, same bits") {
  FormMatrices fm = interval_forms(4e-4);
  SpectralResult a = solve_spectrum(fm, 3, -1.0, 99);
  SpectralResult b = solve_spectrum(fm, 3, -1.0, 99);
  CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shift steers which eigenvalues are returned") {
  SpectralResult sr = solve_spectrum(interval_forms(0.01), 2, 60.0);
  CHECK(sr.eigenvalues[0] == doctest::Approx(4 * kPi * kPi).epsilon(1e-3));
  CHECK(sr.eigenvalues[1] == doctest::Approx(9 * kPi * kPi).epsilon(1e-3));
}

TEST_CASE("request validation") {
  FormMatrices fm = interval_forms(0.25);  // 5 dofs
  CHECK_THROWS_AS((void)solve_spectrum(fm, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)solve_spectrum(fm, 6, 0.0), std::invalid_argument);
}

TEST_CASE("form residual: discrete eigenpairs score near zero") {
  FormMatrices fm = interval_forms(0.01);
  FormBound fb = estimate_form_bound(fm);
  SpectralResult sr = solve_spectrum(fm, 3, -1.0);
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd u = sr.eigenvectors.col(k).cast<std::complex<double>>();
    CHECK(weyl_residual(fm, u, sr.eigenvalues[k], fb) < 1e-9);
  }
  // scale invariance is exact thanks to internal normalization
  Eigen::VectorXcd u = sr.eigenvectors.col(1).cast<std::complex<double>>();
  double r1 = weyl_residual(fm, u, 2.0, fb);
  double r2 = weyl_residual(fm, std::complex<double>(2.0, -3.0) * u, 2.0, fb);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
  // and a wrong lambda is flagged by a residual of honest size
  CHECK(r1 > 1e-3);
}

TEST_CASE("form residual on a complex rotation of a degenerate pair") {
  auto g = testkit::loop_graph(2.0 * kPi);
  FormMatrices fm = assemble(std::make_shared<Mesh>(g, 0.05));
  FormBound fb = estimate_form_bound(fm);
  SpectralResult sr = solve_spectrum(fm, 3, 1.0);
  // columns 1 and 2 span the lambda = 1 plane; any complex mix stays inside
  Eigen::VectorXcd mix = sr.eigenvectors.col(1).cast<std::complex<double>>() +
                         std::complex<double>(0.0, 1.0) *
                             sr.eigenvectors.col(2).cast<std::complex<double>>();
  double lam = 0.5 * (sr.eigenvalues[1] + sr.eigenvalues[2]);
  CHECK(weyl_residual(fm, mix, lam, fb) < 1e-7);
}

TEST_CASE("form residual rejects bad input") {
  FormMatrices fm = interval_forms(0.25);
  FormBound fb;
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(fm.dofs());
  CHECK_THROWS_AS((void)weyl_residual(fm, zero, 1.0, fb), std::invalid_argument);
  Eigen::VectorXcd wrong = Eigen::VectorXcd::Ones(fm.dofs() + 2);
  CHECK_THROWS_AS((void)weyl_residual(fm, wrong, 1.0, fb), std::invalid_argument);
  // a fabricated bound that drives the dual norm indefinite is refused
  FormBound bogus;
  bogus.c_kappa = -50.0;
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(fm.dofs());
  CHECK_THROWS_AS((void)weyl_residual(fm, ones, 1.0, bogus), std::runtime_error);
}

}  // TEST_SUITE
