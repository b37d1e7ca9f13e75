#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace tlb {

enum class CovariateLaw { uniform_box, truncated_gaussian };

// World description: K sparse linear arms over a bounded covariate box.
struct EnvironmentSpec {
  int d = 100;              // covariate dimension
  int K = 3;                // number of arms
  int s0 = 5;               // sparsity bound per arm
  double x_max = 1.0;       // sup-norm bound on covariates
  double b = 10.0;          // L1 bound on arm parameters
  double sigma = 0.5;       // Gaussian noise scale
  double h = 0.5;           // dominance margin
  CovariateLaw covariate_law = CovariateLaw::uniform_box;
};

struct TreatmentParams {
  std::vector<Eigen::VectorXd> betas;            // K vectors of dimension d
  std::vector<std::vector<int>> supports;        // nonzero indices per arm
};

struct Batch {
  std::vector<Eigen::VectorXd> covariates;
  int epoch = 0;
};

struct FeedbackBatch {
  std::vector<double> rewards;
  std::vector<int> arms;
};

struct AssumptionEstimates {
  double p_star_hat = 0.0;     // min dominance-region mass over non-suboptimal arms
  double margin_c0_hat = 0.0;  // max empirical P(0 < |gap| <= kappa) / kappa
  std::vector<int> sub_opt_arms;
};

using Rng = std::mt19937_64;

// Deterministic stream seeding: one generator per (seed, stream tag) pair.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Order-sensitive seed combination for nested stream hierarchies.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

TreatmentParams generate_parameters(const EnvironmentSpec& spec, std::uint64_t seed);

Batch sample_batch(const EnvironmentSpec& spec, int n, Rng& rng);

FeedbackBatch realize_feedback(const TreatmentParams& params, const Batch& batch,
                               const std::vector<int>& arms, const EnvironmentSpec& spec,
                               Rng& noise);

// Best arm for x under the true parameters; ties to the lowest index.
int oracle_arm(const TreatmentParams& params, const Eigen::VectorXd& x);

double instantaneous_regret(const TreatmentParams& params, const Eigen::VectorXd& x, int arm);

// The unique arm beating every other arm by more than h at x, if any.
// With a single arm the whole space counts as its dominance region.
std::optional<int> membership_u_w(const TreatmentParams& params, const Eigen::VectorXd& x,
                                  double h);

AssumptionEstimates estimate_assumption_constants(const TreatmentParams& params,
                                                  const EnvironmentSpec& spec, int m,
                                                  std::uint64_t seed);

// Sampled upper bound on the compatibility constant of a gram matrix over the
// cone ||v_Sc||_1 <= 3 ||v_S||_1.
double compatibility_probe_gram(const Eigen::MatrixXd& sigma, const std::vector<int>& support,
                                int samples_in_cone, Rng& rng);

// Min over arms of the probe applied to the empirical gram of covariates
// conditioned on the arm's dominance region.
double compatibility_probe(const TreatmentParams& params, const EnvironmentSpec& spec, int m,
                           int samples_in_cone, std::uint64_t seed);

}  // namespace tlb
