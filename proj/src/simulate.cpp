#include "xover/simulate.hpp"

#include <cmath>
#include <string>

#include "xover/linalg.hpp"
#include "xover/model.hpp"
#include "xover/parallel.hpp"

namespace xover {

void ParamSet::validate(const Design& d, int g) const {
  if (static_cast<int>(responses.size()) != g)
    throw ValidationError("ParamSet: response count does not match g");
  for (std::size_t k = 0; k < responses.size(); ++k) {
    const ResponseParams& r = responses[k];
    if (r.alpha.size() != d.p() || r.beta.size() != d.n() ||
        r.tau.size() != d.t || r.rho.size() != d.t)
      throw ValidationError("ParamSet: dimension mismatch for response " +
                            std::to_string(k + 1));
  }
}

ParamSet default_params(const Design& d, int g) {
  ParamSet theta;
  for (int k = 0; k < g; ++k) {
    ResponseParams r;
    r.alpha = Eigen::VectorXd::Zero(d.p());
    r.beta = Eigen::VectorXd::Zero(d.n());
    r.tau = Eigen::VectorXd::LinSpaced(d.t, 1.0, static_cast<double>(d.t)) /
            static_cast<double>(d.t);
    r.rho = Eigen::VectorXd::Zero(d.t);
    theta.responses.push_back(std::move(r));
  }
  return theta;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Polar Box-Muller; the 53-bit uniforms exclude exactly 0 via rejection.
  while (true) {
    const double u =
        2.0 * (static_cast<double>(engine_() >> 11) * 0x1.0p-53) - 1.0;
    const double v =
        2.0 * (static_cast<double>(engine_() >> 11) * 0x1.0p-53) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double m = std::sqrt(-2.0 * std::log(s) / s);
      spare_ = v * m;
      has_spare_ = true;
      return u * m;
    }
  }
}

ResponseSimulator::ResponseSimulator(const Design& d, const StudyConfig& cfg,
                                     const ParamSet& theta, std::uint64_t seed,
                                     const Tolerances& tol)
    : seed_(seed), n_(d.n()), p_(d.p()) {
  cfg.validate();
  theta.validate(d, cfg.g());
  const Eigen::MatrixXd x = full_design_matrix(d);
  for (int k = 0; k < cfg.g(); ++k) {
    const ResponseParams& r = theta.responses[k];
    Eigen::VectorXd coeffs(1 + d.p() + d.n() + 2 * d.t);
    coeffs[0] = r.mu;
    coeffs.segment(1, d.p()) = r.alpha;
    coeffs.segment(1 + d.p(), d.n()) = r.beta;
    coeffs.segment(1 + d.p() + d.n(), d.t) = r.tau;
    coeffs.tail(d.t) = r.rho;
    mean_.push_back(x * coeffs);

    const Eigen::MatrixXd v = build_cov(cfg.responses[k].cov, d.p(), tol);
    chol_.push_back(std::sqrt(cfg.responses[k].sigma2) *
                    cholesky_lower(v, tol));
  }
}

std::vector<Eigen::VectorXd> ResponseSimulator::replicate(
    std::uint64_t index) const {
  NormalStream normals(splitmix64(seed_ ^ splitmix64(index + 1)));
  std::vector<Eigen::VectorXd> out;
  out.reserve(mean_.size());
  Eigen::VectorXd z(p_);
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    Eigen::VectorXd y = mean_[k];
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < p_; ++i) z[i] = normals.next();
      y.segment(static_cast<Eigen::Index>(j) * p_, p_) += chol_[k] * z;
    }
    out.push_back(std::move(y));
  }
  return out;
}

GlsEstimator::GlsEstimator(const Design& d, const StudyConfig& cfg,
                           const ContrastSet& contrasts, const Tolerances& tol) {
  cfg.validate();
  if (static_cast<int>(contrasts.per_response.size()) != cfg.g())
    throw ValidationError("GlsEstimator: contrast/response count mismatch");

  // Estimability gate: every response must expose t-1 estimable contrasts;
  // anything less is rank deficiency beyond the model's intrinsic aliasing.
  const InfoMatrix info = info_matrix(d, cfg, tol);
  for (const InfoBlock& block : info.blocks)
    if (!block.estimable)
      throw DegeneracyError("GlsEstimator: design is not estimable for "
                            "response " + std::to_string(block.k + 1));

  const Eigen::MatrixXd x = full_design_matrix(d);
  const int np = d.n() * d.p();
  const int tau_offset = 1 + d.p() + d.n();
  for (int k = 0; k < cfg.g(); ++k) {
    const Eigen::MatrixXd v = build_cov(cfg.responses[k].cov, d.p(), tol);
    const Eigen::MatrixXd l_inv =
        cholesky_lower(v, tol)
            .triangularView<Eigen::Lower>()
            .solve(Eigen::MatrixXd::Identity(d.p(), d.p()));
    const Eigen::MatrixXd w =
        kron(Eigen::MatrixXd::Identity(d.n(), d.n()), l_inv);
    const Eigen::MatrixXd xw = w * x;
    // Minimum-norm normal-equation solve; estimable contrasts are invariant
    // to the choice of generalized inverse.
    const Eigen::MatrixXd solve_op =
        pseudo_inverse(xw.transpose() * xw, tol) * xw.transpose() * w;
    ops_.push_back(contrasts.per_response[k] *
                   solve_op.middleRows(tau_offset, d.t));
    if (ops_.back().cols() != np)
      throw ValidationError("GlsEstimator: operator dimension mismatch");
  }
}

Eigen::VectorXd GlsEstimator::estimate(
    const std::vector<Eigen::VectorXd>& y) const {
  if (y.size() != ops_.size())
    throw ValidationError("GlsEstimator: expected one Y vector per response");
  Eigen::Index total = 0;
  for (const auto& op : ops_) total += op.rows();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    if (y[k].size() != ops_[k].cols())
      throw ValidationError("GlsEstimator: Y dimension mismatch for response " +
                            std::to_string(k + 1));
    out.segment(at, ops_[k].rows()) = ops_[k] * y[k];
    at += ops_[k].rows();
  }
  return out;
}

Eigen::VectorXd gls_contrast_estimate(const Design& d, const StudyConfig& cfg,
                                      const std::vector<Eigen::VectorXd>& y,
                                      const ContrastSet& contrasts,
                                      const Tolerances& tol) {
  return GlsEstimator(d, cfg, contrasts, tol).estimate(y);
}

SimReport validate_dispersion(const Design& d, const StudyConfig& cfg,
                              const ParamSet& theta, const ContrastSet& contrasts,
                              const SimConfig& sim, const Tolerances& tol) {
  if (sim.reps < 2)
    throw ValidationError("validate_dispersion: need reps >= 2");

  const InfoMatrix info = info_matrix(d, cfg, tol);
  const Eigen::MatrixXd theoretical = contrast_dispersion(info, contrasts, tol);
  const GlsEstimator estimator(d, cfg, contrasts, tol);
  const ResponseSimulator simulator(d, cfg, theta, sim.seed, tol);

  const Eigen::Index dim = theoretical.rows();
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (sim.reps + kChunk - 1) / kChunk;

  std::vector<Eigen::VectorXd> sums(chunks, Eigen::VectorXd::Zero(dim));
  std::vector<Eigen::MatrixXd> outer_sums(chunks,
                                          Eigen::MatrixXd::Zero(dim, dim));

  parallel_indexed(chunks, worker_count(), [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(begin + kChunk, sim.reps);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(dim, dim);
    for (std::uint64_t i = begin; i < end; ++i) {
      const Eigen::VectorXd est = estimator.estimate(simulator.replicate(i));
      sum += est;
      outer.selfadjointView<Eigen::Lower>().rankUpdate(est);
    }
    sums[c] = sum;
    outer_sums[c] = outer;
  });

  // Merge partials in chunk order: the result is identical for any worker
  // count.
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    outer += outer_sums[c];
  }
  outer = Eigen::MatrixXd(outer.selfadjointView<Eigen::Lower>());

  const double reps = static_cast<double>(sim.reps);
  const Eigen::VectorXd mean = sum / reps;
  const Eigen::MatrixXd empirical =
      (outer - reps * mean * mean.transpose()) / (reps - 1.0);

  SimReport report;
  report.empirical_G = empirical;
  report.theoretical_G = theoretical;
  report.rel_frobenius_error =
      (empirical - theoretical).norm() / theoretical.norm();
  report.reps_used = sim.reps;
  report.seed = sim.seed;

  // Between-response cross blocks, relative to the matching theoretical
  // diagonal block norms.
  const int g = static_cast<int>(info.blocks.size());
  const int t1 = info.t - 1;
  double worst = 0.0;
  for (int k = 0; k < g; ++k)
    for (int l = 0; l < g; ++l) {
      if (k == l) continue;
      const double cross =
          empirical.block(k * t1, l * t1, t1, t1).norm();
      const double scale =
          std::sqrt(theoretical.block(k * t1, k * t1, t1, t1).norm() *
                    theoretical.block(l * t1, l * t1, t1, t1).norm());
      if (scale > 0.0) worst = std::max(worst, cross / scale);
    }
  report.cross_block_rel = worst;
  return report;
}

} // namespace xover
