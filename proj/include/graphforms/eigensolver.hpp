// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Generalized symmetric eigensolves for the pencil (K + P, M) and the dual
// norm residual that realizes the form-level approximate-eigenvalue test:
// a small residual certifies an eigenvalue of the discrete pencil nearby.

#pragma once

#include <Eigen/Dense>

#include "graphforms/forms.hpp"

namespace graphforms {

struct SpectralResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, M-orthonormal
  Eigen::VectorXd residuals;     // sqrt(r' M^{-1} r), r = (K + P - lambda M) x
};

// `count` eigenpairs of (K + P) x = lambda M x nearest `shift`. Dense solve
// below 2000 dofs; otherwise shift-invert Lanczos with M-inner-product
// orthogonalization, full reorthogonalization, and deflated restarts (so
// multiple eigenvalues are recovered with their full multiplicity). The
// start vectors come from `seed`; identical inputs give identical output.
SpectralResult solve_spectrum(const FormMatrices& fm, int count, double shift,
                              unsigned seed = 12345);

// Form residual of (u, lambda): M-normalizes u, forms r = (K + P - lambda M) u
// and returns sqrt(r^* N^{-1} r) with N = K + P_plus + (1 + c_kappa) M. N is
// the positive matrix equivalent to the form norm when the negative part is
// admissible; a non-positive N is reported as a configuration error.
double weyl_residual(const FormMatrices& fm, const Eigen::VectorXcd& u, double lambda,
                     const FormBound& bound);

}  // namespace graphforms
