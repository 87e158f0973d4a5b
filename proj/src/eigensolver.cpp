// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "graphforms/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace graphforms {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

Eigen::VectorXd dual_residuals(const SpMat& a, const SpMat& m, const Eigen::VectorXd& vals,
                               const Eigen::MatrixXd& vecs) {
  Eigen::SimplicialLDLT<SpMat> mfac(m);
  Eigen::VectorXd out(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    Eigen::VectorXd r = a * vecs.col(i) - vals[i] * (m * vecs.col(i));
    out[i] = std::sqrt(std::max(0.0, r.dot(mfac.solve(r))));
  }
  return out;
}

SpectralResult select_nearest(const Eigen::VectorXd& vals, const Eigen::MatrixXd& vecs, int count,
                              double shift, const SpMat& a, const SpMat& m) {
  std::vector<int> idx(vals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    return std::abs(vals[i] - shift) < std::abs(vals[j] - shift);
  });
  idx.resize(count);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return vals[i] < vals[j]; });
  SpectralResult res;
  res.eigenvalues.resize(count);
  res.eigenvectors.resize(vecs.rows(), count);
  for (int i = 0; i < count; ++i) {
    res.eigenvalues[i] = vals[idx[i]];
    res.eigenvectors.col(i) = vecs.col(idx[i]);
  }
  res.residuals = dual_residuals(a, m, res.eigenvalues, res.eigenvectors);
  return res;
}

SpectralResult solve_dense(const FormMatrices& fm, int count, double shift) {
  SpMat a = fm.K + fm.P();
  Eigen::MatrixXd ad(a), md(fm.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, md);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense generalized eigensolve failed");
  return select_nearest(es.eigenvalues(), es.eigenvectors(), count, shift, a, fm.M);
}

// Shift-invert Lanczos with M-inner product. The operator (A - shift M)^{-1} M
// is self-adjoint in <x, y>_M; converged Ritz vectors are locked and deflated
// so repeated eigenvalues surface one copy per restart.
SpectralResult solve_sparse(const FormMatrices& fm, int count, double shift, unsigned seed) {
  int n = fm.dofs();
  SpMat a = fm.K + fm.P();
  SpMat ashift = a - shift * fm.M;
  ashift.makeCompressed();
  Eigen::SparseLU<SpMat> lu(ashift);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("factorization failed at shift " + std::to_string(shift) +
                             "; try perturbing the shift");

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Eigen::VectorXd> locked;      // M-orthonormal
  std::vector<double> locked_theta;         // shift-invert eigenvalues
  auto m_dot = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(fm.M * y);
  };

  for (int restart = 0; restart < 60 && static_cast<int>(locked.size()) < count; ++restart) {
    int want = count - static_cast<int>(locked.size());
    int m = std::min(n - static_cast<int>(locked.size()), std::max(2 * want + 20, 30));
    if (m < 1) break;

    std::vector<Eigen::VectorXd> basis;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);

    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = unif(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : locked) v -= m_dot(q, v) * q;
    double vn = std::sqrt(m_dot(v, v));
    if (!(vn > 0.0)) continue;
    basis.push_back(v / vn);

    int built = 0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w = lu.solve(fm.M * basis[j]);
      if (j > 0) w -= beta[j - 1] * basis[j - 1];
      alpha[j] = m_dot(basis[j], w);
      w -= alpha[j] * basis[j];
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) w -= m_dot(q, w) * q;
        for (const auto& q : locked) w -= m_dot(q, w) * q;
      }
      built = j + 1;
      double bn = std::sqrt(m_dot(w, w));
      if (j + 1 < m) {
        if (bn < 1e-13) break;  // invariant subspace: diagonalize what we have
        beta[j] = bn;
        basis.push_back(w / bn);
      } else {
        beta[j] = bn;
      }
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
      t(j, j) = alpha[j];
      if (j + 1 < built) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    double tail = built < m ? 0.0 : beta[built - 1];

    // harvest Ritz pairs, largest |theta| (nearest the shift) first
    std::vector<int> order(built);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
      return std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[j]);
    });
    for (int oi : order) {
      if (static_cast<int>(locked.size()) >= count) break;
      double theta = es.eigenvalues()[oi];
      if (std::abs(theta) < 1e-14) continue;
      double bound = std::abs(tail * es.eigenvectors()(built - 1, oi));
      if (bound > 1e-10 * std::abs(theta)) continue;
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < built; ++j) x += es.eigenvectors()(j, oi) * basis[j];
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : locked) x -= m_dot(q, x) * q;
      double xn = std::sqrt(m_dot(x, x));
      if (!(xn > 1e-8)) continue;  // already represented in the locked set
      locked.push_back(x / xn);
      locked_theta.push_back(theta);
    }
  }

  if (static_cast<int>(locked.size()) < count)
    throw std::runtime_error("eigensolver converged only " + std::to_string(locked.size()) +
                             " of " + std::to_string(count) + " requested pairs near shift " +
                             std::to_string(shift));

  Eigen::VectorXd vals(count);
  Eigen::MatrixXd vecs(n, count);
  for (int i = 0; i < count; ++i) {
    vals[i] = shift + 1.0 / locked_theta[i];
    vecs.col(i) = locked[i];
  }
  return select_nearest(vals, vecs, count, shift, a, fm.M);
}

}  // namespace

SpectralResult solve_spectrum(const FormMatrices& fm, int count, double shift, unsigned seed) {
  int n = fm.dofs();
  if (count < 1) throw std::invalid_argument("need count >= 1 eigenpairs");
  if (count > n)
    throw std::invalid_argument("requested " + std::to_string(count) + " pairs but only " +
                                std::to_string(n) + " dofs");
  if (n < 2000) return solve_dense(fm, count, shift);
  return solve_sparse(fm, count, shift, seed);
}

double weyl_residual(const FormMatrices& fm, const Eigen::VectorXcd& u, double lambda,
                     const FormBound& bound) {
  if (u.size() != fm.dofs()) throw std::invalid_argument("dof vector size mismatch");
  Eigen::VectorXd ur = u.real(), ui = u.imag();
  double nrm2 = ur.dot(fm.M * ur) + ui.dot(fm.M * ui);
  if (!(nrm2 > 0.0)) throw std::invalid_argument("cannot normalize the zero vector");
  double inv = 1.0 / std::sqrt(nrm2);
  ur *= inv;
  ui *= inv;

  SpMat op = fm.K + fm.P() - lambda * fm.M;
  SpMat n = fm.K + fm.P_plus + (1.0 + bound.c_kappa) * fm.M;
  Eigen::SimplicialLDLT<SpMat> nfac(n);
  if (nfac.info() != Eigen::Success || nfac.vectorD().minCoeff() <= 0.0)
    throw std::runtime_error(
        "dual norm matrix is not positive definite; the negative part exceeds its form bound");

  double acc = 0.0;
  for (const Eigen::VectorXd* part : {&ur, &ui}) {
    if (part->isZero(0.0)) continue;
    Eigen::VectorXd r = op * (*part);
    acc += r.dot(nfac.solve(r));
  }
  return std::sqrt(std::max(0.0, acc));
}

}  // namespace graphforms
