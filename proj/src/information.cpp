#include "xover/information.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xover/linalg.hpp"
#include "xover/model.hpp"

namespace xover {

InfoComponents info_block_components(const Design& d, const Eigen::MatrixXd& v,
                                     const Tolerances& tol) {
  if (v.rows() != d.p() || v.cols() != d.p())
    throw ValidationError("info_block: V dimension does not match design p");
  const Eigen::MatrixXd t_mat = incidence_direct(d);
  const Eigen::MatrixXd f_mat = incidence_carry(d);
  const Eigen::MatrixXd a = a_star(d, v, tol);
  InfoComponents out;
  out.C11 = t_mat.transpose() * a * t_mat;
  out.C12 = t_mat.transpose() * a * f_mat;
  out.C22 = f_mat.transpose() * a * f_mat;
  out.scale = a.trace();
  return out;
}

namespace {

InfoBlock block_from_c(Eigen::MatrixXd c, int k, const Tolerances& tol,
                       double scale_floor) {
  InfoBlock block;
  block.k = k;
  // The Schur complement is symmetric in exact arithmetic; round-trip fp
  // error is removed so downstream symmetry gates see an exact value.
  block.C = 0.5 * (c + c.transpose());
  const SymEigen eig = sym_eigen(block.C, tol);
  const double scale = std::max(
      eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0, scale_floor);
  const double cut = tol.eig_tol * scale;
  std::vector<double> pos;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] > cut) pos.push_back(eig.values[i]);
  block.positive_eigs =
      Eigen::Map<const Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size()));
  block.estimable =
      static_cast<int>(pos.size()) == static_cast<int>(block.C.rows()) - 1;
  return block;
}

} // namespace

InfoBlock info_block(const Design& d, const Eigen::MatrixXd& v,
                     const Tolerances& tol) {
  const InfoComponents parts = info_block_components(d, v, tol);
  const Eigen::MatrixXd c22_pinv = pseudo_inverse(parts.C22, tol, parts.scale);
  return block_from_c(parts.C11 - parts.C12 * c22_pinv * parts.C12.transpose(),
                      0, tol, parts.scale);
}

Eigen::MatrixXd info_block_projection(const Design& d, const Eigen::MatrixXd& v,
                                      const Tolerances& tol) {
  if (v.rows() != d.p() || v.cols() != d.p())
    throw ValidationError("info_block_projection: V dimension mismatch");
  const int np = d.n() * d.p();
  const Eigen::MatrixXd sigma = kron(Eigen::MatrixXd::Identity(d.n(), d.n()), v);
  const SymEigen eig = sym_eigen(sigma, tol);
  if (!(eig.values.minCoeff() > 0.0))
    throw ValidationError("info_block_projection: Sigma must be PD");
  const Eigen::MatrixXd sigma_mhalf =
      eig.vectors *
      eig.values.unaryExpr([](double x) { return 1.0 / std::sqrt(x); })
          .asDiagonal() *
      eig.vectors.transpose();

  Eigen::MatrixXd nuisance(np, d.p() + d.n() + d.t);
  nuisance.leftCols(d.p() + d.n()) = nuisance_block(d);
  nuisance.rightCols(d.t) = incidence_carry(d);

  const Eigen::MatrixXd proj = residual_projector(sigma_mhalf * nuisance, tol);
  const Eigen::MatrixXd t_mat = incidence_direct(d);
  Eigen::MatrixXd c =
      t_mat.transpose() * sigma_mhalf * proj * sigma_mhalf * t_mat;
  return 0.5 * (c + c.transpose());
}

InfoMatrix info_matrix(const Design& d, const StudyConfig& cfg,
                       const Tolerances& tol) {
  cfg.validate();
  InfoMatrix out;
  out.t = d.t;
  std::vector<Eigen::MatrixXd> weighted;
  // One info block per distinct covariance spec; responses sharing a V_k
  // share the block.
  std::vector<int> cache_of(cfg.responses.size(), -1);
  std::vector<InfoBlock> cache;
  std::vector<CovarianceSpec> cache_keys;
  for (std::size_t k = 0; k < cfg.responses.size(); ++k) {
    int hit = -1;
    for (std::size_t c = 0; c < cache_keys.size(); ++c)
      if (cache_keys[c] == cfg.responses[k].cov) {
        hit = static_cast<int>(c);
        break;
      }
    if (hit < 0) {
      const Eigen::MatrixXd v = build_cov(cfg.responses[k].cov, d.p(), tol);
      cache.push_back(info_block(d, v, tol));
      cache_keys.push_back(cfg.responses[k].cov);
      hit = static_cast<int>(cache.size()) - 1;
    }
    cache_of[k] = hit;
  }
  for (std::size_t k = 0; k < cfg.responses.size(); ++k) {
    InfoBlock block = cache[cache_of[k]];
    block.k = static_cast<int>(k);
    out.sigma2s.push_back(cfg.responses[k].sigma2);
    weighted.push_back(block.C / cfg.responses[k].sigma2);
    out.blocks.push_back(std::move(block));
  }
  out.full = direct_sum(weighted);
  return out;
}

std::pair<Eigen::MatrixXd, QSummary> oa_closed_form(const Design& d,
                                                    const Eigen::MatrixXd& v,
                                                    const Tolerances& tol) {
  const OaCheck check = is_oa_type1_strength2(d);
  if (!check.is_oa)
    throw ValidationError("oa_closed_form: design is not an OA of type I and "
                          "strength 2 with p = t");
  const int t = d.t;
  const Eigen::MatrixXd vs = v_star(v, tol);
  const Eigen::MatrixXd psi = shift_matrix(t);

  // Single-subject incidence of the first subject (p x t).
  Eigen::MatrixXd t1 = Eigen::MatrixXd::Zero(t, t);
  for (int i = 0; i < t; ++i) t1(i, d.layout(i, 0) - 1) = 1.0;

  QSummary q;
  q.q11 = (t1.transpose() * vs * t1).trace();
  q.q12 = (t1.transpose() * vs * psi * t1).trace();
  q.q22 = (t1.transpose() * psi.transpose() * vs * psi * t1).trace() -
          vs(0, 0) / t;
  const double prefactor = static_cast<double>(d.n()) / (t - 1);
  q.Q << prefactor * q.q11, prefactor * q.q12, prefactor * q.q12,
      prefactor * q.q22;
  q.detQ = q.Q.determinant();

  const double scale_ref =
      std::max({std::abs(q.Q(0, 0)), std::abs(q.Q(0, 1)), std::abs(q.Q(1, 1))});
  if (std::abs(q.Q(1, 1)) <= tol.eig_tol * scale_ref)
    throw DegeneracyError("oa_closed_form: q22 is numerically zero");
  if (std::abs(q.detQ) <= tol.eig_tol * scale_ref * scale_ref)
    throw DegeneracyError("oa_closed_form: det(Q) is numerically zero");

  return {(q.detQ / q.Q(1, 1)) * centering_matrix(t), q};
}

bool is_completely_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols())
    throw ValidationError("is_completely_symmetric: matrix is not square");
  const double diag = m(0, 0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (std::abs(m(i, i) - diag) > tol) return false;
  if (m.rows() < 2) return true;
  const double off = m(0, 1);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j) - off) > tol) return false;
  return true;
}

Eigen::MatrixXd helmert_contrasts(int t) {
  if (t < 2) throw ValidationError("helmert_contrasts: need t >= 2");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(t - 1, t);
  for (int m = 1; m < t; ++m) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(m) * (m + 1));
    for (int j = 0; j < m; ++j) l(m - 1, j) = norm;
    l(m - 1, m) = -static_cast<double>(m) * norm;
  }
  return l;
}

ContrastSet helmert_contrast_set(int t, int g) {
  if (g < 1) throw ValidationError("helmert_contrast_set: need g >= 1");
  ContrastSet set;
  const Eigen::MatrixXd l = helmert_contrasts(t);
  for (int k = 0; k < g; ++k) set.per_response.push_back(l);
  // Direct sum of the (t-1) x t rectangles.
  set.combined = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g) * (t - 1),
                                       static_cast<Eigen::Index>(g) * t);
  for (int k = 0; k < g; ++k)
    set.combined.block(static_cast<Eigen::Index>(k) * (t - 1),
                       static_cast<Eigen::Index>(k) * t, t - 1, t) = l;
  return set;
}

Eigen::MatrixXd contrast_dispersion(const InfoMatrix& info,
                                    const ContrastSet& contrasts,
                                    const Tolerances& tol) {
  if (contrasts.per_response.size() != info.blocks.size())
    throw ValidationError("contrast_dispersion: contrast/block count mismatch");
  std::vector<Eigen::MatrixXd> blocks;
  for (std::size_t k = 0; k < info.blocks.size(); ++k) {
    if (!info.blocks[k].estimable)
      throw DegeneracyError(
          "contrast_dispersion: response " + std::to_string(k + 1) +
          " is not estimable (fewer than t-1 positive eigenvalues)");
    const Eigen::MatrixXd& l = contrasts.per_response[k];
    Eigen::MatrixXd g = info.sigma2s[k] * l *
                        pseudo_inverse(info.blocks[k].C, tol) * l.transpose();
    blocks.push_back(0.5 * (g + g.transpose()));
  }
  return direct_sum(blocks);
}

} // namespace xover
