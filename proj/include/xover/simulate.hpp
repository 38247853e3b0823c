#ifndef XOVER_SIMULATE_HPP
#define XOVER_SIMULATE_HPP

// Monte Carlo validation of the dispersion machinery: draw responses from
// the model, estimate direct-effect contrasts by generalized least squares
// on the whitened model, and compare the empirical dispersion of the
// estimates with the theoretical G_d.
//
// Reproducibility contract: replicate i uses an mt19937_64 engine seeded
// with splitmix64(seed ^ splitmix64(i + 1)); standard normals come from the
// polar Box-Muller transform. Streams are therefore independent of
// evaluation order and bit-identical across platforms with the same IEEE
// doubles.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "xover/design.hpp"
#include "xover/information.hpp"

namespace xover {

struct ResponseParams {
  double mu = 0.0;
  Eigen::VectorXd alpha; // length p
  Eigen::VectorXd beta;  // length n
  Eigen::VectorXd tau;   // length t
  Eigen::VectorXd rho;   // length t
};

struct ParamSet {
  std::vector<ResponseParams> responses;
  void validate(const Design& d, int g) const;
};

// mu = 0, alpha = beta = rho = 0, tau = (1, 2, ..., t) / t for every
// response. The dispersion of the contrast estimates is free of theta, so
// any value works; this one keeps the mean visibly nonzero.
ParamSet default_params(const Design& d, int g);

struct SimConfig {
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Standard normal stream: mt19937_64 + polar Box-Muller.
class NormalStream {
public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Draws Y_k = X theta_k + eps_k per replicate, eps_k zero-mean Gaussian
// with covariance sigma_k^2 (I_n (x) V_k), subjects independent, responses
// independent. replicate(i) depends only on (seed, i).
class ResponseSimulator {
public:
  ResponseSimulator(const Design& d, const StudyConfig& cfg,
                    const ParamSet& theta, std::uint64_t seed,
                    const Tolerances& tol = {});

  std::vector<Eigen::VectorXd> replicate(std::uint64_t index) const;

  int g() const { return static_cast<int>(chol_.size()); }

private:
  std::vector<Eigen::VectorXd> mean_; // X theta_k
  std::vector<Eigen::MatrixXd> chol_; // sigma_k * chol(V_k), p x p
  std::uint64_t seed_ = 0;
  int n_ = 0;
  int p_ = 0;
};

// Per-response operator mapping raw observations to the contrast estimate
// L_k tau-hat_k: whitening by V_k's inverse Cholesky per subject, then the
// minimum-norm least-squares solve of the full model. Built once, applied
// per replicate.
class GlsEstimator {
public:
  GlsEstimator(const Design& d, const StudyConfig& cfg,
               const ContrastSet& contrasts, const Tolerances& tol = {});

  // Stacked L tau-hat, dimension g(t-1).
  Eigen::VectorXd estimate(const std::vector<Eigen::VectorXd>& y) const;

  const std::vector<Eigen::MatrixXd>& operators() const { return ops_; }

private:
  std::vector<Eigen::MatrixXd> ops_; // (t-1) x np per response
};

// One-shot convenience wrapper around GlsEstimator.
Eigen::VectorXd gls_contrast_estimate(const Design& d, const StudyConfig& cfg,
                                      const std::vector<Eigen::VectorXd>& y,
                                      const ContrastSet& contrasts,
                                      const Tolerances& tol = {});

struct SimReport {
  Eigen::MatrixXd empirical_G;
  Eigen::MatrixXd theoretical_G;
  double rel_frobenius_error = 0.0;
  // Largest Frobenius norm of an off-diagonal (between-response) block of
  // empirical_G, relative to the geometric mean of the matching diagonal
  // block norms of theoretical_G.
  double cross_block_rel = 0.0;
  std::uint64_t reps_used = 0;
  std::uint64_t seed = 0;
};

// Empirical covariance of L tau-hat across replicates vs contrast_dispersion.
// Needs reps >= 2. Accumulation is chunked (fixed chunk size, partials
// merged in chunk order) so results do not depend on the worker count.
SimReport validate_dispersion(const Design& d, const StudyConfig& cfg,
                              const ParamSet& theta, const ContrastSet& contrasts,
                              const SimConfig& sim, const Tolerances& tol = {});

} // namespace xover

#endif
