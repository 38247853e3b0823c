#ifndef XOVER_COVARIANCE_HPP
#define XOVER_COVARIANCE_HPP

// Within-subject covariance families V_k and the per-response / study level
// configuration. A spec carries the family and its parameter; the realized
// p x p matrix is produced by build_cov once a design fixes p.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "xover/types.hpp"

namespace xover {

enum class CovKind { Ar1, EquiCorr, Identity, Custom };

struct CovarianceSpec {
  CovKind kind = CovKind::Identity;
  double r = 0.0;          // AR1 / EquiCorr parameter
  Eigen::MatrixXd custom;  // Custom only

  static CovarianceSpec ar1(double r) { return {CovKind::Ar1, r, {}}; }
  static CovarianceSpec equicorr(double r) { return {CovKind::EquiCorr, r, {}}; }
  static CovarianceSpec identity() { return {CovKind::Identity, 0.0, {}}; }
  static CovarianceSpec custom_matrix(Eigen::MatrixXd v) {
    return {CovKind::Custom, 0.0, std::move(v)};
  }

  bool operator==(const CovarianceSpec& other) const;
};

struct ResponseConfig {
  double sigma2 = 1.0;
  CovarianceSpec cov;
};

struct StudyConfig {
  std::vector<ResponseConfig> responses;

  int g() const { return static_cast<int>(responses.size()); }
  void validate() const;
};

// Realizes V_k for period count p. AR1 needs |r| < 1, EquiCorr needs
// -1/(p-1) < r < 1; parameters within 1e-6 of a boundary are rejected
// (V^-1 blows up there). Custom matrices are symmetrized by (V + V')/2
// after a sym_tol check and must be positive definite.
Eigen::MatrixXd build_cov(const CovarianceSpec& spec, int p,
                          const Tolerances& tol = {});

std::string cov_kind_name(CovKind kind);

} // namespace xover

#endif
