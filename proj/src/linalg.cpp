// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcm/linalg.hpp"

#include <cmath>
#include <vector>

namespace mrcm {

namespace {

void checkFinite(const Eigen::SparseMatrix<double>& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      if (!std::isfinite(it.value()))
        throw std::invalid_argument("matrix has non-finite entries");
}

}  // namespace

Eigen::SparseMatrix<double> pinMatrix(const Eigen::SparseMatrix<double>& matrix,
                                      int pin) {
  if (pin < 0 || pin >= matrix.rows())
    throw std::invalid_argument("pin index out of range");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(matrix.nonZeros()) + 1);
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it)
      if (it.row() != pin && it.col() != pin)
        trips.emplace_back(it.row(), it.col(), it.value());
  trips.emplace_back(pin, pin, 1.0);
  Eigen::SparseMatrix<double> out(matrix.rows(), matrix.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Factorization::Factorization(const Eigen::SparseMatrix<double>& matrix,
                             std::optional<int> pin, bool pressure_closure)
    : pin_(pin), n_(static_cast<int>(matrix.rows())) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("factorize requires a square matrix");
  if (!pressure_closure && !pin)
    throw std::runtime_error(
        "singular system (pure Neumann): a pinned cell is required");
  checkFinite(matrix);
  if (pin) {
    ldlt_.compute(pinMatrix(matrix, *pin));
  } else {
    ldlt_.compute(matrix);
  }
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("LDL^T factorization failed (singular or indefinite)");
  const Eigen::VectorXd d = ldlt_.vectorD();
  if (!(d.minCoeff() > 0.0))
    throw std::runtime_error("LDL^T factorization hit a non-positive pivot "
                             "(singular system without pin?)");
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("rhs size mismatch");
  if (pin_) {
    Eigen::VectorXd b = rhs;
    b[*pin_] = 0.0;
    return ldlt_.solve(b);
  }
  return ldlt_.solve(rhs);
}

Eigen::MatrixXd Factorization::solveMulti(const Eigen::MatrixXd& rhs_block) const {
  if (rhs_block.rows() != n_) throw std::invalid_argument("rhs block shape mismatch");
  if (pin_) {
    Eigen::MatrixXd b = rhs_block;
    b.row(*pin_).setZero();
    return ldlt_.solve(b);
  }
  return ldlt_.solve(rhs_block);
}

Factorization factorize(const SparseSystem& system, std::optional<int> pin) {
  return Factorization(system.A, pin, system.pressure_closure);
}

LuFactorization::LuFactorization(const Eigen::SparseMatrix<double>& matrix,
                                 std::optional<int> pin)
    : pin_(pin), n_(static_cast<int>(matrix.rows())) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("factorize requires a square matrix");
  checkFinite(matrix);
  pinned_ = pin ? pinMatrix(matrix, *pin) : matrix;
  pinned_.makeCompressed();
  lu_.analyzePattern(pinned_);
  lu_.factorize(pinned_);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("LU factorization failed (singular interface system?)");
}

Eigen::VectorXd LuFactorization::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("rhs size mismatch");
  if (pin_) {
    Eigen::VectorXd b = rhs;
    b[*pin_] = 0.0;
    return lu_.solve(b);
  }
  return lu_.solve(rhs);
}

KrylovResult krylovSolve(const Eigen::SparseMatrix<double>& matrix,
                         const Eigen::VectorXd& rhs, const KrylovConfig& config) {
  if (!(config.tol > 0.0 && config.tol < 1.0))
    throw std::invalid_argument("Krylov tolerance must lie in (0,1)");
  if (config.max_it < 0)
    throw std::invalid_argument("Krylov iteration cap must be >= 0");
  const int n = static_cast<int>(matrix.rows());
  KrylovResult res;
  res.x = Eigen::VectorXd::Zero(n);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  Eigen::VectorXd inv_diag;
  if (config.precond == Preconditioner::Jacobi) {
    inv_diag = matrix.diagonal();
    for (int i = 0; i < n; ++i)
      inv_diag[i] = inv_diag[i] != 0.0 ? 1.0 / inv_diag[i] : 1.0;
  }
  auto apply_precond = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    if (config.precond == Preconditioner::Jacobi)
      return inv_diag.cwiseProduct(v);
    return v;
  };

  Eigen::VectorXd r = rhs;  // x0 = 0
  res.rel_residual = r.norm() / bnorm;
  if (config.max_it == 0 || res.rel_residual <= config.tol) {
    res.converged = res.rel_residual <= config.tol;
    return res;
  }
  Eigen::VectorXd z = apply_precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= config.max_it; ++it) {
    const Eigen::VectorXd ap = matrix * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0) || rz == 0.0) {
      res.breakdown = true;
      res.iterations = it - 1;
      res.rel_residual = r.norm() / bnorm;
      return res;
    }
    const double alpha = rz / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    res.iterations = it;
    res.rel_residual = r.norm() / bnorm;
    if (res.rel_residual <= config.tol) {
      res.converged = true;
      return res;
    }
    z = apply_precond(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

}  // namespace mrcm
