#include "xover/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace xover {

namespace {

void require_finite(const MatrixXd& m, const char* who) {
  if (!m.allFinite())
    throw ValidationError(std::string(who) + ": input contains NaN/Inf");
}

} // namespace

SymEigen sym_eigen(const MatrixXd& m, const Tolerances& tol) {
  tol.validate();
  require_finite(m, "sym_eigen");
  if (m.rows() != m.cols())
    throw ValidationError("sym_eigen: matrix is not square");
  if (!is_symmetric(m, tol.sym_tol))
    throw ValidationError("sym_eigen: matrix is not symmetric within sym_tol");
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw DegeneracyError("sym_eigen: eigensolver did not converge");
  return SymEigen{solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::Index positive_eigen_count(const VectorXd& eigenvalues, double eig_tol) {
  if (eigenvalues.size() == 0) return 0;
  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  const double cut = eig_tol * scale;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] > cut) ++count;
  return count;
}

MatrixXd pseudo_inverse(const MatrixXd& m, const Tolerances& tol,
                        double scale_floor) {
  const SymEigen eig = sym_eigen(m, tol);
  const double scale = std::max(
      eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0, scale_floor);
  const double cut = tol.eig_tol * scale;
  if (scale > 0.0 && eig.values.minCoeff() < -cut)
    throw ValidationError("pseudo_inverse: matrix is indefinite");
  VectorXd inv = VectorXd::Zero(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] > cut) inv[i] = 1.0 / eig.values[i];
  return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

MatrixXd centering_matrix(Eigen::Index m) {
  if (m < 1) throw ValidationError("centering_matrix: m must be >= 1");
  const double inv = 1.0 / static_cast<double>(m);
  return MatrixXd::Identity(m, m) - MatrixXd::Constant(m, m, inv);
}

MatrixXd direct_sum(const std::vector<MatrixXd>& blocks) {
  if (blocks.empty())
    throw ValidationError("direct_sum: empty block list");
  Eigen::Index dim = 0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols())
      throw ValidationError("direct_sum: blocks must be square");
    dim += b.rows();
  }
  MatrixXd out = MatrixXd::Zero(dim, dim);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.rows()) = b;
    at += b.rows();
  }
  return out;
}

MatrixXd residual_projector(const MatrixXd& m, const Tolerances& tol) {
  require_finite(m, "residual_projector");
  const MatrixXd gram = m.transpose() * m;
  return MatrixXd::Identity(m.rows(), m.rows()) -
         m * pseudo_inverse(gram, tol) * m.transpose();
}

MatrixXd cholesky_lower(const MatrixXd& m, const Tolerances& tol) {
  const SymEigen eig = sym_eigen(m, tol);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  if (!(eig.values.minCoeff() > tol.eig_tol * scale))
    throw ValidationError("cholesky_lower: matrix is not positive definite");
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw ValidationError("cholesky_lower: factorization failed");
  return llt.matrixL();
}

double det(const MatrixXd& m, const Tolerances& tol) {
  require_finite(m, "det");
  if (m.rows() != m.cols())
    throw ValidationError("det: matrix is not square");
  if (is_symmetric(m, tol.sym_tol))
    return sym_eigen(m, tol).values.prod();
  return Eigen::PartialPivLU<MatrixXd>(m).determinant();
}

} // namespace xover
