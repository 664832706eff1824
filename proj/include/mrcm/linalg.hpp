// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mrcm/fv.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <memory>
#include <optional>

namespace mrcm {

/// Reusable LDL^T factorization of a symmetric TPFA system with an
/// AMD fill-reducing ordering. A pure-Neumann (singular) system must be
/// pinned: row and column `pin` are replaced by the identity, fixing the
/// pressure constant; fluxes are pin-invariant.
class Factorization {
 public:
  Factorization(const Eigen::SparseMatrix<double>& matrix,
                std::optional<int> pin = std::nullopt,
                bool pressure_closure = true);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Column j of the result equals solve(rhs_block.col(j)) bitwise.
  Eigen::MatrixXd solveMulti(const Eigen::MatrixXd& rhs_block) const;

  int size() const { return n_; }
  std::optional<int> pin() const { return pin_; }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  std::optional<int> pin_;
  int n_ = 0;
};

Factorization factorize(const SparseSystem& system,
                        std::optional<int> pin = std::nullopt);

/// LU variant of the same machinery for nonsymmetric systems
/// (the interface coupling problem).
class LuFactorization {
 public:
  LuFactorization(const Eigen::SparseMatrix<double>& matrix,
                  std::optional<int> pin = std::nullopt);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int size() const { return n_; }

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::SparseMatrix<double> pinned_;
  std::optional<int> pin_;
  int n_ = 0;
};

enum class Preconditioner { None, Jacobi };

struct KrylovConfig {
  double tol = 1e-8;  // on ||b - A x|| / ||b||
  int max_it = 2000;
  Preconditioner precond = Preconditioner::Jacobi;
};

struct KrylovResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
  bool breakdown = false;
};

/// Preconditioned conjugate gradient for symmetric positive definite
/// systems; max_it = 0 returns the initial guess with its residual.
KrylovResult krylovSolve(const Eigen::SparseMatrix<double>& matrix,
                         const Eigen::VectorXd& rhs, const KrylovConfig& config);

/// Replaces row/column `pin` by the identity (in place on a copy).
Eigen::SparseMatrix<double> pinMatrix(const Eigen::SparseMatrix<double>& matrix,
                                      int pin);

}  // namespace mrcm
