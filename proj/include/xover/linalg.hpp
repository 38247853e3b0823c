#ifndef XOVER_LINALG_HPP
#define XOVER_LINALG_HPP

// Dense matrix primitives shared by every other module: symmetric
// eigendecomposition, Moore-Penrose pseudoinverse, Kronecker product, direct
// sum, centering matrix H_m, residual projector, Cholesky and determinant.
// All sizes here are small (a few hundred at most); everything is plain
// O(n^3) dense arithmetic on double precision Eigen types.

#include <Eigen/Dense>
#include <vector>

#include "xover/types.hpp"

namespace xover {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Eigenvalues ascending, eigenvectors orthonormal in matching column order.
struct SymEigen {
  VectorXd values;
  MatrixXd vectors;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, double abs_tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= abs_tol;
}

// Eigendecomposition of a symmetric matrix. Throws ValidationError on
// non-square or asymmetric input (asymmetry judged against tol.sym_tol).
SymEigen sym_eigen(const MatrixXd& m, const Tolerances& tol = {});

// Moore-Penrose inverse of a symmetric n.n.d. matrix: eigenvalues above
// eig_tol * max|eigenvalue| are inverted, the rest zeroed. Indefinite input
// (an eigenvalue below -eig_tol * max|eigenvalue|) is rejected.
// scale_floor, when positive, widens the zero band to
// eig_tol * max(max|eigenvalue|, scale_floor): callers whose matrix can
// cancel to pure round-off pass the magnitude it had before cancellation so
// noise is treated as zero rather than as an indefinite matrix.
MatrixXd pseudo_inverse(const MatrixXd& m, const Tolerances& tol = {},
                        double scale_floor = 0.0);

// H_m = I_m - (1/m) J_m, the projector orthogonal to the all-ones vector.
MatrixXd centering_matrix(Eigen::Index m);

// Kronecker product, exact up to products of the inputs.
template <typename DerivedA, typename DerivedB>
MatrixXd kron(const Eigen::MatrixBase<DerivedA>& a,
              const Eigen::MatrixBase<DerivedB>& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Block-diagonal assembly of square blocks; off-block entries exactly zero.
MatrixXd direct_sum(const std::vector<MatrixXd>& blocks);

// I - M (M'M)^+ M', the orthogonal projector onto the complement of col(M).
MatrixXd residual_projector(const MatrixXd& m, const Tolerances& tol = {});

// Lower-triangular L with L L' = m. Requires symmetric positive definite
// input (smallest eigenvalue above eig_tol * max|eigenvalue|).
MatrixXd cholesky_lower(const MatrixXd& m, const Tolerances& tol = {});

// Determinant: eigenvalue product for symmetric input, LU otherwise.
double det(const MatrixXd& m, const Tolerances& tol = {});

// Count of eigenvalues above the relative zero threshold; rank surrogate for
// symmetric n.n.d. matrices.
Eigen::Index positive_eigen_count(const VectorXd& eigenvalues, double eig_tol);

} // namespace xover

#endif
