#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tlb {

// One covariate/efficacy observation.
struct RegressionSample {
  Eigen::VectorXd x;
  double y = 0.0;
};

// Penalized least squares instance: (1/n) * ||y - X beta||^2 + lambda * ||beta||_1.
struct LassoProblem {
  std::vector<RegressionSample> samples;
  double lambda = 0.0;

  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().x.size()); }
  int n() const { return static_cast<int>(samples.size()); }
};

struct SolverConfig {
  double tol = 1e-8;        // max absolute coordinate change per sweep
  int max_sweeps = 10000;
  double kkt_tol = 1e-6;
};

struct LassoEstimate {
  Eigen::VectorXd beta;
  int iterations = 0;       // sweeps performed
  double kkt_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
};

double soft_threshold(double z, double gamma);

double lasso_objective(const LassoProblem& problem, const Eigen::VectorXd& beta);

// Stationarity certificate: max over coordinates of the violation of the
// subgradient conditions of the (1/n) loss + lambda L1 objective.
double kkt_residual(const LassoProblem& problem, const Eigen::VectorXd& beta);

LassoEstimate solve_lasso(const LassoProblem& problem, const SolverConfig& config);

// Same solver, warm-started from beta0.
LassoEstimate solve_lasso(const LassoProblem& problem, const SolverConfig& config,
                          const Eigen::VectorXd& beta0);

// Sufficient statistics for the same objective: gram = X^T X, xty = X^T y,
// yty = y^T y, accumulated sample by sample. Lets repeated refits on a growing
// sample set run in O(d^2) per sweep instead of O(n d).
class GramAccumulator {
 public:
  explicit GramAccumulator(int dim)
      : gram_(Eigen::MatrixXd::Zero(dim, dim)), xty_(Eigen::VectorXd::Zero(dim)) {}

  void add(const Eigen::VectorXd& x, double y);
  void merge(const GramAccumulator& other);

  int dim() const { return static_cast<int>(xty_.size()); }
  long count() const { return count_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& xty() const { return xty_; }
  double yty() const { return yty_; }

 private:
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xty_;
  double yty_ = 0.0;
  long count_ = 0;
};

// Coordinate descent on the sufficient statistics; fixed point identical to
// solve_lasso on the underlying samples.
LassoEstimate solve_lasso_gram(const GramAccumulator& acc, double lambda,
                               const SolverConfig& config, const Eigen::VectorXd& beta0);

}  // namespace tlb
