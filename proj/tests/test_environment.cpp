#include <doctest.h>

#include <cmath>

#include "tlb/environment.hpp"

using namespace tlb;

namespace {

EnvironmentSpec small_spec() {
  EnvironmentSpec spec;
  spec.d = 10;
  spec.K = 2;
  spec.s0 = 2;
  spec.x_max = 1.0;
  spec.b = 1.0;
  spec.sigma = 0.5;
  spec.h = 0.5;
  return spec;
}

TreatmentParams two_arm_1d() {
  TreatmentParams params;
  Eigen::VectorXd b1(1), b2(1);
  b1 << 1.0;
  b2 << -1.0;
  params.betas = {b1, b2};
  params.supports = {{0}, {0}};
  return params;
}

}  // namespace

TEST_CASE("generate_parameters invariants and determinism") {
  EnvironmentSpec spec = small_spec();
  const TreatmentParams a = generate_parameters(spec, 42);
  const TreatmentParams b = generate_parameters(spec, 42);
  REQUIRE(a.betas.size() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK((a.betas[k] - b.betas[k]).norm() == 0.0);
    CHECK(a.supports[k] == b.supports[k]);
    CHECK(a.betas[k].lpNorm<1>() <= spec.b + 1e-12);
    int nonzero = 0;
    for (int j = 0; j < spec.d; ++j)
      if (a.betas[k][j] != 0.0) ++nonzero;
    CHECK(nonzero == spec.s0);
    CHECK(static_cast<int>(a.supports[k].size()) == spec.s0);
    for (int j : a.supports[k]) CHECK(a.betas[k][j] != 0.0);
  }

  // dense boundary case
  EnvironmentSpec dense = spec;
  dense.s0 = dense.d;
  dense.b = 1e9;
  const TreatmentParams c = generate_parameters(dense, 7);
  for (int j = 0; j < dense.d; ++j) CHECK(c.betas[0][j] != 0.0);

  EnvironmentSpec bad = spec;
  bad.s0 = bad.d + 1;
  CHECK_THROWS(generate_parameters(bad, 1));
}

TEST_CASE("generated worlds respect box and support bounds over many seeds") {
  EnvironmentSpec spec = small_spec();
  for (int seed = 0; seed < 1000; ++seed) {
    const TreatmentParams params = generate_parameters(spec, seed);
    for (int k = 0; k < spec.K; ++k) {
      CHECK(params.betas[k].lpNorm<1>() <= spec.b + 1e-12);
      CHECK(static_cast<int>(params.supports[k].size()) <= spec.s0);
    }
    Rng rng = make_rng(seed, 99);
    const Batch batch = sample_batch(spec, 3, rng);
    for (const auto& x : batch.covariates)
      CHECK(x.lpNorm<Eigen::Infinity>() <= spec.x_max);
  }
}

TEST_CASE("sample_batch law and determinism") {
  EnvironmentSpec spec = small_spec();
  spec.d = 2;
  Rng rng = make_rng(5, 0);
  const Batch one = sample_batch(spec, 1, rng);
  CHECK(one.covariates.size() == 1);
  CHECK(one.covariates[0].lpNorm<Eigen::Infinity>() <= spec.x_max);

  Rng r1 = make_rng(5, 0), r2 = make_rng(5, 0);
  const Batch a = sample_batch(spec, 4, r1);
  const Batch b = sample_batch(spec, 4, r2);
  for (int i = 0; i < 4; ++i) CHECK((a.covariates[i] - b.covariates[i]).norm() == 0.0);

  // CLT bound on the per-coordinate mean of the uniform box law
  const int m = 100000;
  Rng r3 = make_rng(6, 0);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(spec.d);
  const Batch big = sample_batch(spec, m, r3);
  for (const auto& x : big.covariates) mean += x;
  mean /= m;
  const double bound = 3.0 * spec.x_max / std::sqrt(m * 3.0);
  for (int j = 0; j < spec.d; ++j) CHECK(std::abs(mean[j]) <= bound);

  // truncated gaussian stays in the box
  spec.covariate_law = CovariateLaw::truncated_gaussian;
  Rng r4 = make_rng(7, 0);
  for (const auto& x : sample_batch(spec, 1000, r4).covariates)
    CHECK(x.lpNorm<Eigen::Infinity>() <= spec.x_max);
}

TEST_CASE("realize_feedback") {
  EnvironmentSpec spec = small_spec();
  spec.d = 3;
  TreatmentParams params;
  Eigen::VectorXd beta(3);
  beta << 0.3, -0.2, 0.5;
  params.betas = {beta};
  params.supports = {{0, 1, 2}};

  Rng rng = make_rng(1, 0);
  Batch batch = sample_batch(spec, 5, rng);
  Rng noise = make_rng(2, 0);

  EnvironmentSpec noiseless = spec;
  noiseless.sigma = 0.0;
  const FeedbackBatch fb = realize_feedback(params, batch, {0, 0, 0, 0, 0}, noiseless, noise);
  for (int i = 0; i < 5; ++i)
    CHECK(fb.rewards[i] == doctest::Approx(beta.dot(batch.covariates[i])));

  // coordinate pick: x = e_1, noiseless
  Batch unit;
  unit.covariates.push_back(Eigen::VectorXd::Zero(3));
  unit.covariates[0][2] = 1.0;
  const FeedbackBatch pick = realize_feedback(params, unit, {0}, noiseless, noise);
  CHECK(pick.rewards[0] == doctest::Approx(0.5));

  CHECK_THROWS(realize_feedback(params, unit, {3}, spec, noise));

  // beta = 0: pure noise with sample variance near sigma^2
  TreatmentParams null_params;
  null_params.betas = {Eigen::VectorXd::Zero(3)};
  null_params.supports = {{}};
  const int m = 100000;
  Rng r5 = make_rng(3, 0);
  Batch big = sample_batch(spec, m, r5);
  std::vector<int> arms(m, 0);
  Rng r6 = make_rng(4, 0);
  const FeedbackBatch noise_fb = realize_feedback(null_params, big, arms, spec, r6);
  double var = 0.0;
  for (double y : noise_fb.rewards) var += y * y;
  var /= m;
  const double s2 = spec.sigma * spec.sigma;
  CHECK(std::abs(var - s2) <= 3.0 * s2 * std::sqrt(2.0 / m));
}

TEST_CASE("oracle arm and regret") {
  TreatmentParams params;
  Eigen::VectorXd b1(2), b2(2);
  b1 << 1.0, 0.0;
  b2 << 0.0, 1.0;
  params.betas = {b1, b2};
  params.supports = {{0}, {1}};

  Eigen::VectorXd x(2);
  x << 0.7, 0.2;
  CHECK(oracle_arm(params, x) == 0);
  CHECK(instantaneous_regret(params, x, 0) == doctest::Approx(0.0));
  CHECK(instantaneous_regret(params, x, 1) == doctest::Approx(0.5));

  // tie rule: identical arms pick the lowest index
  TreatmentParams ties;
  ties.betas = {b1, b1, b1};
  ties.supports = {{0}, {0}, {0}};
  CHECK(oracle_arm(ties, x) == 0);

  // brute force over K = 3 random instances
  EnvironmentSpec spec = small_spec();
  spec.K = 3;
  const TreatmentParams random_params = generate_parameters(spec, 9);
  Rng rng = make_rng(10, 0);
  for (const auto& cov : sample_batch(spec, 50, rng).covariates) {
    int best = 0;
    double best_val = random_params.betas[0].dot(cov);
    for (int k = 1; k < 3; ++k)
      if (random_params.betas[k].dot(cov) > best_val) {
        best_val = random_params.betas[k].dot(cov);
        best = k;
      }
    CHECK(oracle_arm(random_params, cov) == best);
    for (int k = 0; k < 3; ++k) CHECK(instantaneous_regret(random_params, cov, k) >= 0.0);
  }
}

TEST_CASE("dominance region membership") {
  TreatmentParams params;
  Eigen::VectorXd b1(2), b2(2);
  b1 << 1.0, 0.0;
  b2 << 0.0, 1.0;
  params.betas = {b1, b2};
  params.supports = {{0}, {1}};

  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  CHECK(membership_u_w(params, x, 0.5) == 0);

  Eigen::VectorXd boundary(2);
  boundary << 0.5, 0.5;
  CHECK_FALSE(membership_u_w(params, boundary, 0.5).has_value());

  // at most one arm fires for any x
  EnvironmentSpec spec = small_spec();
  spec.K = 3;
  const TreatmentParams random_params = generate_parameters(spec, 3);
  Rng rng = make_rng(4, 0);
  for (const auto& cov : sample_batch(spec, 200, rng).covariates) {
    const auto w = membership_u_w(random_params, cov, 0.2);
    if (w) {
      for (int k = 0; k < 3; ++k) {
        if (k == *w) continue;
        CHECK_FALSE(membership_u_w(random_params, cov, 0.2) == k);
      }
      CHECK(oracle_arm(random_params, cov) == *w);
    }
  }
}

TEST_CASE("assumption constant estimates") {
  EnvironmentSpec spec;
  spec.d = 1;
  spec.K = 2;
  spec.s0 = 1;
  spec.x_max = 1.0;
  spec.b = 1.0;
  spec.h = 0.5;

  // K = 1 is degenerate: the whole space is the dominance region
  TreatmentParams solo;
  solo.betas = {Eigen::VectorXd::Ones(1)};
  solo.supports = {{0}};
  EnvironmentSpec solo_spec = spec;
  solo_spec.K = 1;
  CHECK(estimate_assumption_constants(solo, solo_spec, 1000, 1).p_star_hat == 1.0);

  // identical arms never dominate strictly
  TreatmentParams twins;
  twins.betas = {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)};
  twins.supports = {{0}, {0}};
  CHECK(estimate_assumption_constants(twins, spec, 2000, 1).p_star_hat == 0.0);

  // analytic 1-d two-arm world: U_1 = {x > 0.25}, U_2 = {x < -0.25},
  // each of mass 3/8 under Uniform[-1, 1]
  const AssumptionEstimates est = estimate_assumption_constants(two_arm_1d(), spec, 100000, 5);
  CHECK(est.p_star_hat == doctest::Approx(0.375).epsilon(0.055));
  CHECK(std::abs(est.p_star_hat - 0.375) <= 0.02);
  CHECK(est.sub_opt_arms.empty());
  // gap = |2x| on Uniform[-1,1]: P(0 < |gap| <= kappa) / kappa = 1/2 for kappa <= 2
  CHECK(est.margin_c0_hat == doctest::Approx(0.5).epsilon(0.05));

  CHECK_THROWS(estimate_assumption_constants(two_arm_1d(), spec, 10, 1));
}

TEST_CASE("compatibility probe") {
  Rng rng = make_rng(8, 0);

  // identity gram with a singleton support: every cone ratio is >= 1
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(4, 4);
  const double phi = compatibility_probe_gram(identity, {0}, 200, rng);
  CHECK(phi >= 1.0 - 1e-12);

  // zero gram: the quadratic form vanishes everywhere in the cone
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  CHECK(compatibility_probe_gram(zero, {0}, 10, rng) == doctest::Approx(0.0));

  // more cone samples never increase the probe (same draw sequence prefix)
  Rng r1 = make_rng(9, 0), r2 = make_rng(9, 0);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(5, 5) * 0.7;
  const double few = compatibility_probe_gram(gram, {1, 3}, 20, r1);
  const double many = compatibility_probe_gram(gram, {1, 3}, 200, r2);
  CHECK(many <= few + 1e-12);

  // end-to-end probe on a generated world
  EnvironmentSpec spec;
  spec.d = 5;
  spec.K = 2;
  spec.s0 = 2;
  spec.b = 2.0;
  spec.h = 0.2;
  const TreatmentParams params = generate_parameters(spec, 11);
  const double probe = compatibility_probe(params, spec, 4000, 50, 12);
  CHECK(probe > 0.0);
  CHECK(std::isfinite(probe));

  // identical arms leave every dominance region empty
  TreatmentParams twins;
  twins.betas = {Eigen::VectorXd::Ones(5), Eigen::VectorXd::Ones(5)};
  twins.supports = {{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}};
  CHECK_THROWS(compatibility_probe(twins, spec, 2000, 10, 1));
}
