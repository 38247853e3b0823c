#include "xover/covariance.hpp"

#include <cmath>

#include "xover/linalg.hpp"

namespace xover {

namespace {

constexpr double kBoundaryMargin = 1e-6;

} // namespace

bool CovarianceSpec::operator==(const CovarianceSpec& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case CovKind::Ar1:
    case CovKind::EquiCorr:
      return r == other.r;
    case CovKind::Identity:
      return true;
    case CovKind::Custom:
      return custom.rows() == other.custom.rows() &&
             custom.cols() == other.custom.cols() && custom == other.custom;
  }
  return false;
}

void StudyConfig::validate() const {
  if (responses.empty())
    throw ValidationError("StudyConfig: need at least one response (g >= 1)");
  int custom_p = -1;
  for (std::size_t k = 0; k < responses.size(); ++k) {
    if (!(responses[k].sigma2 > 0.0))
      throw ValidationError("StudyConfig: sigma2 must be > 0 for response " +
                            std::to_string(k + 1));
    if (responses[k].cov.kind == CovKind::Custom) {
      const int p = static_cast<int>(responses[k].cov.custom.rows());
      if (custom_p >= 0 && p != custom_p)
        throw ValidationError("StudyConfig: custom covariances disagree on p");
      custom_p = p;
    }
  }
}

Eigen::MatrixXd build_cov(const CovarianceSpec& spec, int p,
                          const Tolerances& tol) {
  if (p < 1) throw ValidationError("build_cov: need p >= 1");
  Eigen::MatrixXd v;
  switch (spec.kind) {
    case CovKind::Identity:
      return Eigen::MatrixXd::Identity(p, p);
    case CovKind::Ar1: {
      if (!(std::abs(spec.r) < 1.0 - kBoundaryMargin))
        throw ValidationError("build_cov: AR1 needs |r| < 1, got r = " +
                              std::to_string(spec.r));
      v.resize(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) v(i, j) = std::pow(spec.r, std::abs(i - j));
      break;
    }
    case CovKind::EquiCorr: {
      const double lo = p > 1 ? -1.0 / (p - 1) : -1.0;
      if (!(spec.r > lo + kBoundaryMargin && spec.r < 1.0 - kBoundaryMargin))
        throw ValidationError(
            "build_cov: EquiCorr needs -1/(p-1) < r < 1, got r = " +
            std::to_string(spec.r) + " at p = " + std::to_string(p));
      v = Eigen::MatrixXd::Constant(p, p, spec.r);
      v.diagonal().setOnes();
      break;
    }
    case CovKind::Custom: {
      if (spec.custom.rows() != p || spec.custom.cols() != p)
        throw ValidationError("build_cov: custom matrix is not p x p");
      if (!spec.custom.allFinite())
        throw ValidationError("build_cov: custom matrix has NaN/Inf");
      if (!is_symmetric(spec.custom, tol.sym_tol))
        throw ValidationError("build_cov: custom matrix is not symmetric");
      v = 0.5 * (spec.custom + spec.custom.transpose());
      break;
    }
  }
  const SymEigen eig = sym_eigen(v, tol);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  if (!(eig.values.minCoeff() > tol.eig_tol * scale))
    throw ValidationError("build_cov: realized matrix is not positive definite");
  return v;
}

std::string cov_kind_name(CovKind kind) {
  switch (kind) {
    case CovKind::Ar1: return "ar1";
    case CovKind::EquiCorr: return "equicorr";
    case CovKind::Identity: return "identity";
    case CovKind::Custom: return "custom";
  }
  return "unknown";
}

} // namespace xover
