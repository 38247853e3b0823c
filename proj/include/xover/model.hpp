#ifndef XOVER_MODEL_HPP
#define XOVER_MODEL_HPP

// Matrix ingredients of the crossover model for a fixed design: treatment
// and carryover incidence matrices, the period/subject nuisance block, the
// full design matrix, and the V* / A* algebra used by the information
// matrix. Observation rows are ordered subject-major, period-minor
// throughout (subject 1 periods 1..p, then subject 2, ...).

#include <Eigen/Dense>

#include "xover/design.hpp"
#include "xover/types.hpp"

namespace xover {

// p x p shift: ones on the subdiagonal, so psi * e_i = e_{i+1}, psi * e_p = 0.
Eigen::MatrixXd shift_matrix(int p);

// T_d, np x t: row (j-1)p + i has a single 1 in column d(i, j).
Eigen::MatrixXd incidence_direct(const Design& d);

// F_d = (I_n (x) psi) T_d; first-period rows are zero (no carryover into
// period 1).
Eigen::MatrixXd incidence_carry(const Design& d);

// X1 = [P U] with P = 1_n (x) I_p and U = I_n (x) 1_p; np x (p + n).
Eigen::MatrixXd nuisance_block(const Design& d);

// X_dk = [1 P U T_d F_d], np x (1 + p + n + 2t). Used by the simulator.
Eigen::MatrixXd full_design_matrix(const Design& d);

// V* = V^-1 - delta V^-1 J V^-1 with delta = (1' V^-1 1)^-1. Annihilates
// the all-ones vector; symmetric n.n.d. Requires V symmetric PD.
Eigen::MatrixXd v_star(const Eigen::MatrixXd& v, const Tolerances& tol = {});

// A* = H_n (x) V*.
Eigen::MatrixXd a_star(const Design& d, const Eigen::MatrixXd& v,
                       const Tolerances& tol = {});

} // namespace xover

#endif
