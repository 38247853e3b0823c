#include "xover/model.hpp"

#include "xover/linalg.hpp"

namespace xover {

Eigen::MatrixXd shift_matrix(int p) {
  if (p < 1) throw ValidationError("shift_matrix: need p >= 1");
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i + 1 < p; ++i) psi(i + 1, i) = 1.0;
  return psi;
}

Eigen::MatrixXd incidence_direct(const Design& d) {
  const int p = d.p(), n = d.n();
  Eigen::MatrixXd t_mat = Eigen::MatrixXd::Zero(n * p, d.t);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < p; ++i) t_mat(j * p + i, d.layout(i, j) - 1) = 1.0;
  return t_mat;
}

Eigen::MatrixXd incidence_carry(const Design& d) {
  const int p = d.p(), n = d.n();
  Eigen::MatrixXd f_mat = Eigen::MatrixXd::Zero(n * p, d.t);
  for (int j = 0; j < n; ++j)
    for (int i = 1; i < p; ++i) f_mat(j * p + i, d.layout(i - 1, j) - 1) = 1.0;
  return f_mat;
}

Eigen::MatrixXd nuisance_block(const Design& d) {
  const int p = d.p(), n = d.n();
  Eigen::MatrixXd x1 = Eigen::MatrixXd::Zero(n * p, p + n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < p; ++i) {
      x1(j * p + i, i) = 1.0;     // P = 1_n (x) I_p
      x1(j * p + i, p + j) = 1.0; // U = I_n (x) 1_p
    }
  return x1;
}

Eigen::MatrixXd full_design_matrix(const Design& d) {
  const int np = d.n() * d.p();
  Eigen::MatrixXd x(np, 1 + d.p() + d.n() + 2 * d.t);
  x.col(0).setOnes();
  x.middleCols(1, d.p() + d.n()) = nuisance_block(d);
  x.middleCols(1 + d.p() + d.n(), d.t) = incidence_direct(d);
  x.rightCols(d.t) = incidence_carry(d);
  return x;
}

Eigen::MatrixXd v_star(const Eigen::MatrixXd& v, const Tolerances& tol) {
  const SymEigen eig = sym_eigen(v, tol);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  if (!(eig.values.minCoeff() > tol.eig_tol * scale))
    throw ValidationError("v_star: V must be positive definite");
  const Eigen::MatrixXd v_inv =
      eig.vectors * eig.values.cwiseInverse().asDiagonal() *
      eig.vectors.transpose();
  const Eigen::VectorXd u = v_inv.rowwise().sum(); // V^-1 1_p
  const double delta = 1.0 / u.sum();              // (1' V^-1 1)^-1
  return v_inv - delta * (u * u.transpose());
}

Eigen::MatrixXd a_star(const Design& d, const Eigen::MatrixXd& v,
                       const Tolerances& tol) {
  if (v.rows() != d.p())
    throw ValidationError("a_star: V dimension does not match design p");
  return kron(centering_matrix(d.n()), v_star(v, tol));
}

} // namespace xover
