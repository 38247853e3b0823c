#ifndef XOVER_INFORMATION_HPP
#define XOVER_INFORMATION_HPP

// Direct-effect information matrices: the per-response Schur-complement
// form C_{d(k)} = C11 - C12 C22^+ C21, the whitened-projection form used as
// an independent cross-check, the sigma-weighted direct-sum assembly, the
// closed form for orthogonal arrays, and the contrast dispersion G_d.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "xover/covariance.hpp"
#include "xover/design.hpp"
#include "xover/types.hpp"

namespace xover {

// Per-response t x t information block. estimable means exactly t-1
// positive eigenvalues, i.e. all within-response direct-effect contrasts
// are estimable.
struct InfoBlock {
  int k = 0; // response index, 0-based
  Eigen::MatrixXd C;
  Eigen::VectorXd positive_eigs; // ascending
  bool estimable = false;
};

struct InfoMatrix {
  std::vector<InfoBlock> blocks;
  std::vector<double> sigma2s;
  Eigen::MatrixXd full; // direct sum of sigma_k^-2 C_{d(k)}, gt x gt
  int t = 0;
};

// Orthonormal contrast rows per response: L_k 1_t = 0, L_k L_k' = I_{t-1}.
struct ContrastSet {
  std::vector<Eigen::MatrixXd> per_response; // (t-1) x t each
  Eigen::MatrixXd combined;                  // direct sum
};

// Trace summary behind the orthogonal-array closed form. q11/q12/q22 are the
// raw single-subject traces; Q carries the n/(t-1) prefactor as displayed.
struct QSummary {
  double q11 = 0.0;
  double q12 = 0.0;
  double q22 = 0.0;
  Eigen::Matrix2d Q;
  double detQ = 0.0;
};

struct InfoComponents {
  Eigen::MatrixXd C11, C12, C22;
  // trace(A*) = (n-1) trace(V*): the magnitude of the quadratic forms
  // before cancellation, used as the zero-band floor for eigenvalue gating
  // on designs whose C blocks cancel to round-off.
  double scale = 0.0;
};

// T' A* T, T' A* F, F' A* F with A* = H_n (x) V*. Exposed so tests can swap
// the generalized inverse of C22.
InfoComponents info_block_components(const Design& d, const Eigen::MatrixXd& v,
                                     const Tolerances& tol = {});

// Schur-complement route: C11 - C12 C22^+ C21.
InfoBlock info_block(const Design& d, const Eigen::MatrixXd& v,
                     const Tolerances& tol = {});

// Projection route: T' S pr_perp(S [X1 F]) S T with S = Sigma^{-1/2} built
// by eigendecomposition of I_n (x) V. O((np)^3); the independent oracle for
// info_block.
Eigen::MatrixXd info_block_projection(const Design& d, const Eigen::MatrixXd& v,
                                      const Tolerances& tol = {});

// Per-response blocks (computed once per distinct covariance spec) plus the
// sigma_k^-2-weighted direct sum.
InfoMatrix info_matrix(const Design& d, const StudyConfig& cfg,
                       const Tolerances& tol = {});

// Closed-form information matrix for an OA_I(n = lambda t(t-1), p=t, t, 2)
// design: (det(Q) / Q_22) H_t, with Q_22 the (2,2) entry of the scaled Q.
// Requires the design to pass is_oa_type1_strength2.
std::pair<Eigen::MatrixXd, QSummary> oa_closed_form(const Design& d,
                                                    const Eigen::MatrixXd& v,
                                                    const Tolerances& tol = {});

// Equal diagonal and equal off-diagonal entries within tol.
bool is_completely_symmetric(const Eigen::MatrixXd& m, double tol);

// Standard orthonormal Helmert rows, (t-1) x t.
Eigen::MatrixXd helmert_contrasts(int t);

ContrastSet helmert_contrast_set(int t, int g);

// G_d = direct sum of sigma_k^2 L_k C_{d(k)}^+ L_k'. Every block must be
// estimable (DegeneracyError naming the first offending k otherwise).
Eigen::MatrixXd contrast_dispersion(const InfoMatrix& info,
                                    const ContrastSet& contrasts,
                                    const Tolerances& tol = {});

} // namespace xover

#endif
