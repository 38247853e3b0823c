#include "doctest.h"

#include <cmath>
#include <random>

#include "support.hpp"
#include "xover/linalg.hpp"
#include "xover/model.hpp"
#include "xover/simulate.hpp"

using namespace xover;
using xover::testing::max_abs_diff;
using xover::testing::section5_config;

TEST_CASE("near-zero noise reduces replicates to the model mean") {
  const Design oa = construct_oa(OaSpec{3, 1});
  StudyConfig cfg;
  cfg.responses.push_back({1e-30, CovarianceSpec::ar1(0.3)});
  ParamSet theta = default_params(oa, 1);
  theta.responses[0].mu = 0.7;
  theta.responses[0].alpha << 0.1, -0.2, 0.1;

  const ResponseSimulator sim(oa, cfg, theta, 99);
  const auto y = sim.replicate(0);

  Eigen::VectorXd coeffs(1 + 3 + 6 + 3 + 3);
  coeffs.setZero();
  coeffs[0] = theta.responses[0].mu;
  coeffs.segment(1, 3) = theta.responses[0].alpha;
  coeffs.segment(1 + 3 + 6, 3) = theta.responses[0].tau;
  const Eigen::VectorXd mean = full_design_matrix(oa) * coeffs;
  CHECK((y[0] - mean).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("replicate streams are seed-deterministic and order-independent") {
  const Design oa = construct_oa(OaSpec{3, 1});
  const StudyConfig cfg = section5_config(0.3);
  const ParamSet theta = default_params(oa, 2);

  const ResponseSimulator a(oa, cfg, theta, 1234);
  const ResponseSimulator b(oa, cfg, theta, 1234);
  const auto y5_first = a.replicate(5);
  const auto y0 = a.replicate(0);
  const auto y0_b = b.replicate(0);
  const auto y5_second = b.replicate(5);
  CHECK(max_abs_diff(y0[0], y0_b[0]) == 0.0);
  CHECK(max_abs_diff(y0[1], y0_b[1]) == 0.0);
  CHECK(max_abs_diff(y5_first[0], y5_second[0]) == 0.0);

  const ResponseSimulator c(oa, cfg, theta, 1235);
  CHECK(max_abs_diff(c.replicate(0)[0], y0[0]) > 0.0);
}

TEST_CASE("sampled error covariance approaches sigma^2 (I_n x V)") {
  const Design oa = construct_oa(OaSpec{3, 1});
  StudyConfig cfg;
  cfg.responses.push_back({1.5, CovarianceSpec::ar1(0.4)});
  ParamSet theta = default_params(oa, 1);
  theta.responses[0].tau.setZero(); // pure noise
  const ResponseSimulator sim(oa, cfg, theta, 2718);

  const int np = 18;
  const int reps = 100000;
  Eigen::MatrixXd sum_outer = Eigen::MatrixXd::Zero(np, np);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(np);
  for (int i = 0; i < reps; ++i) {
    const Eigen::VectorXd y = sim.replicate(i)[0];
    sum += y;
    sum_outer += y * y.transpose();
  }
  const Eigen::VectorXd mean = sum / reps;
  const Eigen::MatrixXd emp =
      (sum_outer - reps * mean * mean.transpose()) / (reps - 1.0);
  const Eigen::MatrixXd sigma =
      1.5 * kron(Eigen::MatrixXd::Identity(6, 6),
                 build_cov(CovarianceSpec::ar1(0.4), 3));
  CHECK((emp - sigma).norm() / sigma.norm() < 0.05);
}

TEST_CASE("noiseless GLS recovers the contrast exactly") {
  const Design oa = construct_oa(OaSpec{3, 1});
  StudyConfig cfg = section5_config(0.3);
  const ContrastSet contrasts = helmert_contrast_set(3, 2);
  ParamSet theta = default_params(oa, 2);
  theta.responses[0].tau << 0.5, -1.0, 2.0;
  theta.responses[1].tau << 1.0, 0.0, -0.25;
  theta.responses[0].rho << 0.3, -0.3, 0.1;
  theta.responses[0].beta.setLinSpaced(6, -0.5, 0.7);

  // Zero-noise responses built directly from the design matrix.
  const Eigen::MatrixXd x = full_design_matrix(oa);
  std::vector<Eigen::VectorXd> y;
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd coeffs(x.cols());
    coeffs[0] = theta.responses[k].mu;
    coeffs.segment(1, 3) = theta.responses[k].alpha;
    coeffs.segment(4, 6) = theta.responses[k].beta;
    coeffs.segment(10, 3) = theta.responses[k].tau;
    coeffs.tail(3) = theta.responses[k].rho;
    y.push_back(x * coeffs);
  }

  const Eigen::VectorXd est = gls_contrast_estimate(oa, cfg, y, contrasts);
  Eigen::VectorXd expect(4);
  expect.head(2) = contrasts.per_response[0] * theta.responses[0].tau;
  expect.tail(2) = contrasts.per_response[1] * theta.responses[1].tau;
  CHECK((est - expect).cwiseAbs().maxCoeff() <= 1e-8);

  // Adding a constant to every tau leaves the contrast estimate unchanged.
  for (int k = 0; k < 2; ++k)
    theta.responses[k].tau.array() += 5.0;
  std::vector<Eigen::VectorXd> y2;
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd coeffs(x.cols());
    coeffs[0] = theta.responses[k].mu;
    coeffs.segment(1, 3) = theta.responses[k].alpha;
    coeffs.segment(4, 6) = theta.responses[k].beta;
    coeffs.segment(10, 3) = theta.responses[k].tau;
    coeffs.tail(3) = theta.responses[k].rho;
    y2.push_back(x * coeffs);
  }
  const Eigen::VectorXd est2 = gls_contrast_estimate(oa, cfg, y2, contrasts);
  CHECK((est2 - est).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("GLS estimate is unbiased across replicates") {
  const Design oa = construct_oa(OaSpec{3, 1});
  const StudyConfig cfg = section5_config(0.3);
  const ContrastSet contrasts = helmert_contrast_set(3, 2);
  const ParamSet theta = default_params(oa, 2);

  const GlsEstimator estimator(oa, cfg, contrasts);
  const ResponseSimulator sim(oa, cfg, theta, 31337);
  const int reps = 10000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < reps; ++i) {
    const Eigen::VectorXd est = estimator.estimate(sim.replicate(i));
    sum += est;
    sumsq += est.cwiseProduct(est);
  }
  const Eigen::VectorXd mean = sum / reps;
  Eigen::VectorXd expect(4);
  expect.head(2) = contrasts.per_response[0] * theta.responses[0].tau;
  expect.tail(2) = contrasts.per_response[1] * theta.responses[1].tau;
  for (int i = 0; i < 4; ++i) {
    const double var = (sumsq[i] - reps * mean[i] * mean[i]) / (reps - 1.0);
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean[i] - expect[i]) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("estimation on a non-estimable design is rejected") {
  std::vector<std::vector<int>> cols(6, std::vector<int>{1, 2, 3});
  const Design flat = design_from_columns(3, cols);
  CHECK_THROWS_AS(GlsEstimator(flat, section5_config(0.3),
                               helmert_contrast_set(3, 2)),
                  DegeneracyError);
}

TEST_CASE("validate_dispersion matches the theoretical dispersion") {
  const Design oa = construct_oa(OaSpec{3, 1});
  const StudyConfig cfg = section5_config(0.3);
  const ContrastSet contrasts = helmert_contrast_set(3, 2);
  const ParamSet theta = default_params(oa, 2);

  const SimReport report =
      validate_dispersion(oa, cfg, theta, contrasts, SimConfig{20000, 7});
  CHECK(report.reps_used == 20000);
  CHECK(report.rel_frobenius_error < 0.05);
  CHECK(report.cross_block_rel < 0.05);

  // Theoretical blocks are (sigma_k^2 / c_k) I_2; frozen values at r=0.3.
  CHECK(report.theoretical_G(0, 0) == doctest::Approx(0.3355625).epsilon(1e-9));
  CHECK(report.theoretical_G(0, 1) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(report.theoretical_G(2, 2) ==
        doctest::Approx(7.0 / 48.0).epsilon(1e-9));

  // theta-independence of the empirical dispersion: a very different
  // parameter vector gives the same covariance up to Monte Carlo noise.
  ParamSet other = default_params(oa, 2);
  other.responses[0].mu = 3.0;
  other.responses[0].beta.setLinSpaced(6, -2.0, 2.0);
  other.responses[1].rho << 1.0, -2.0, 0.5;
  const SimReport report2 =
      validate_dispersion(oa, cfg, other, contrasts, SimConfig{20000, 7});
  CHECK(report2.rel_frobenius_error < 0.05);
  CHECK(max_abs_diff(report2.empirical_G, report.empirical_G) <=
        0.05 * report.theoretical_G.norm());
}

TEST_CASE("univariate identity-covariance dispersion equals the classical formula") {
  const Design oa = construct_oa(OaSpec{3, 1});
  StudyConfig cfg;
  cfg.responses.push_back({2.0, CovarianceSpec::identity()});
  const ContrastSet contrasts = helmert_contrast_set(3, 1);

  // Classical route: Var(L tau-hat) = sigma^2 Lpad (X'X)^+ Lpad' for the
  // estimable contrast rows.
  const Eigen::MatrixXd x = full_design_matrix(oa);
  Eigen::MatrixXd lpad = Eigen::MatrixXd::Zero(2, x.cols());
  lpad.middleCols(1 + 3 + 6, 3) = contrasts.per_response[0];
  const Eigen::MatrixXd classical =
      2.0 * lpad * pseudo_inverse(x.transpose() * x) * lpad.transpose();

  const Eigen::MatrixXd g =
      contrast_dispersion(info_matrix(oa, cfg), contrasts);
  CHECK(max_abs_diff(classical, g) <= 1e-8);
}

TEST_CASE("doubling a variance scale doubles the matching dispersion block") {
  const Design oa = construct_oa(OaSpec{3, 1});
  const ContrastSet contrasts = helmert_contrast_set(3, 2);
  StudyConfig cfg = section5_config(0.3);
  StudyConfig doubled = cfg;
  doubled.responses[0].sigma2 *= 2.0;

  const ParamSet theta = default_params(oa, 2);
  const SimReport a =
      validate_dispersion(oa, cfg, theta, contrasts, SimConfig{20000, 5});
  const SimReport b =
      validate_dispersion(oa, doubled, theta, contrasts, SimConfig{20000, 5});
  const double ratio = b.empirical_G.block(0, 0, 2, 2).trace() /
                       a.empirical_G.block(0, 0, 2, 2).trace();
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
  const double other = b.empirical_G.block(2, 2, 2, 2).trace() /
                       a.empirical_G.block(2, 2, 2, 2).trace();
  CHECK(other == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("Monte Carlo error shrinks at the expected rate") {
  const Design oa = construct_oa(OaSpec{3, 1});
  const StudyConfig cfg = section5_config(0.3);
  const ContrastSet contrasts = helmert_contrast_set(3, 2);
  const ParamSet theta = default_params(oa, 2);

  const SimReport small =
      validate_dispersion(oa, cfg, theta, contrasts, SimConfig{5000, 11});
  const SimReport large =
      validate_dispersion(oa, cfg, theta, contrasts, SimConfig{20000, 11});
  // Quadrupling the replicates should halve the error within slack 1.5.
  CHECK(large.rel_frobenius_error <= 1.5 * 0.5 * small.rel_frobenius_error);
}

TEST_CASE("validate_dispersion argument checks") {
  const Design oa = construct_oa(OaSpec{3, 1});
  CHECK_THROWS_AS(validate_dispersion(oa, section5_config(0.3),
                                      default_params(oa, 2),
                                      helmert_contrast_set(3, 2),
                                      SimConfig{1, 0}),
                  ValidationError);
  CHECK_THROWS_AS(default_params(oa, 1).validate(oa, 2), ValidationError);
}
