#ifndef XOVER_TESTS_SUPPORT_HPP
#define XOVER_TESTS_SUPPORT_HPP

// Shared fixtures and independent oracles for the test suites. Everything
// here stays deliberately separate from the library's computation paths:
// the eigenvalue oracle is a characteristic-polynomial bisection, the
// inverse oracle is the 3x3 adjugate, and the generalized-inverse builder
// produces a weighted reflexive g-inverse that differs from Moore-Penrose.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "xover/covariance.hpp"
#include "xover/design.hpp"
#include "xover/linalg.hpp"

namespace xover::testing {

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Roots of det(M - x I) for a symmetric 3x3 with distinct eigenvalues,
// found by sign-scan bracketing plus bisection. Independent of any library
// eigensolver.
inline std::array<double, 3> cubic_eigs_bisect(const Eigen::Matrix3d& m) {
  auto charpoly = [&](double x) {
    const double a = m(0, 0) - x, b = m(0, 1), c = m(0, 2);
    const double d = m(1, 1) - x, e = m(1, 2), f = m(2, 2) - x;
    return a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
  };
  double radius = 0.0;
  for (int i = 0; i < 3; ++i) {
    double row = 0.0;
    for (int j = 0; j < 3; ++j) row += std::abs(m(i, j));
    radius = std::max(radius, row);
  }
  const double lo = -radius - 1.0, hi = radius + 1.0;
  const int scan = 20000;
  std::array<double, 3> roots{};
  int found = 0;
  double prev_x = lo, prev_f = charpoly(lo);
  for (int s = 1; s <= scan && found < 3; ++s) {
    const double x = lo + (hi - lo) * s / scan;
    const double fx = charpoly(x);
    if ((prev_f < 0.0) != (fx < 0.0)) {
      double a = prev_x, b = x;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if ((charpoly(a) < 0.0) != (charpoly(mid) < 0.0))
          b = mid;
        else
          a = mid;
      }
      roots[found++] = 0.5 * (a + b);
    }
    prev_x = x;
    prev_f = fx;
  }
  return roots;
}

// 3x3 inverse by adjugate over determinant (Sarrus), no factorization.
inline Eigen::Matrix3d adjugate_inverse(const Eigen::Matrix3d& m) {
  const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  Eigen::Matrix3d adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = -(m(0, 1) * m(2, 2) - m(0, 2) * m(2, 1));
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = -(m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0));
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = -(m(0, 0) * m(1, 2) - m(0, 2) * m(1, 0));
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = -(m(0, 0) * m(2, 1) - m(0, 1) * m(2, 0));
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return adj / det;
}

// Weighted reflexive g-inverse of a symmetric n.n.d. matrix from its rank
// factorization C = F G with F = U sqrt(L), G = sqrt(L) U'. With a PD
// weight W != I this is a valid reflexive g-inverse distinct from the
// Moore-Penrose inverse.
inline Eigen::MatrixXd reflexive_ginverse(const Eigen::MatrixXd& c,
                                          const Tolerances& tol = {},
                                          double scale_floor = 0.0) {
  const SymEigen eig = sym_eigen(c, tol);
  const double scale =
      std::max(eig.values.cwiseAbs().maxCoeff(), scale_floor);
  const double cut = tol.eig_tol * scale;
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] > cut) keep.push_back(static_cast<int>(i));
  const Eigen::Index rank = static_cast<Eigen::Index>(keep.size());
  if (rank == 0) return Eigen::MatrixXd::Zero(c.rows(), c.cols());

  Eigen::MatrixXd f(c.rows(), rank);
  for (Eigen::Index j = 0; j < rank; ++j)
    f.col(j) = eig.vectors.col(keep[j]) * std::sqrt(eig.values[keep[j]]);
  const Eigen::MatrixXd g = f.transpose();

  Eigen::VectorXd w(c.rows());
  for (Eigen::Index i = 0; i < c.rows(); ++i) w[i] = 1.0 + static_cast<double>(i);
  const Eigen::MatrixXd wmat = w.asDiagonal();

  const Eigen::MatrixXd left = (f.transpose() * wmat * f).inverse() *
                               f.transpose() * wmat;       // left inverse of F
  const Eigen::MatrixXd right = wmat * g.transpose() *
                                (g * wmat * g.transpose()).inverse(); // right inverse of G
  return right * left;
}

inline Design random_binary_design(int t, int n, std::mt19937_64& rng) {
  const auto perms = permutation_sequences(t);
  std::vector<std::vector<int>> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = perms[rng() % perms.size()];
  return design_from_columns(t, cols);
}

inline CovarianceSpec random_cov_spec(int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (rng() % 3) {
    case 0:
      return CovarianceSpec::ar1(-0.7 + 1.6 * unit(rng));
    case 1: {
      const double lo = -1.0 / (p - 1) + 0.05;
      return CovarianceSpec::equicorr(lo + (0.9 - lo) * unit(rng));
    }
    default: {
      Eigen::MatrixXd b(p, p);
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) b(i, j) = 2.0 * unit(rng) - 1.0;
      Eigen::MatrixXd v = b.transpose() * b +
                          0.2 * Eigen::MatrixXd::Identity(p, p);
      return CovarianceSpec::custom_matrix(std::move(v));
    }
  }
}

// The illustration design: sequences ACB, BAC, CBA, six subjects each.
inline Design d0_design(int copies_per_sequence = 6) {
  std::vector<std::vector<int>> cols;
  for (int c = 0; c < copies_per_sequence; ++c) cols.push_back({1, 3, 2});
  for (int c = 0; c < copies_per_sequence; ++c) cols.push_back({2, 1, 3});
  for (int c = 0; c < copies_per_sequence; ++c) cols.push_back({3, 2, 1});
  return design_from_columns(3, cols);
}

// Bivariate setup: sigma^2 = (2, 1), V1 = AR1(r), V2 = EquiCorr(r).
inline StudyConfig section5_config(double r) {
  StudyConfig cfg;
  cfg.responses.push_back({2.0, CovarianceSpec::ar1(r)});
  cfg.responses.push_back({1.0, CovarianceSpec::equicorr(r)});
  return cfg;
}

// m-fold column replication of a design.
inline Design replicate_design(const Design& d, int m) {
  std::vector<std::vector<int>> cols;
  for (int rep = 0; rep < m; ++rep)
    for (int j = 0; j < d.n(); ++j) {
      std::vector<int> col(d.p());
      for (int i = 0; i < d.p(); ++i) col[i] = d.layout(i, j);
      cols.push_back(std::move(col));
    }
  return design_from_columns(d.t, cols);
}

} // namespace xover::testing

#endif
