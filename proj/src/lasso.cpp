#include "tlb/lasso.hpp"

#include <cmath>
#include <stdexcept>

namespace tlb {

double soft_threshold(double z, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("soft_threshold: gamma must be nonnegative");
  const double mag = std::abs(z) - gamma;
  if (mag <= 0.0) return 0.0;
  return z > 0.0 ? mag : -mag;
}

namespace {

void validate_problem(const LassoProblem& problem) {
  if (problem.n() < 1) throw std::invalid_argument("lasso: empty sample set");
  if (problem.lambda < 0.0 || !std::isfinite(problem.lambda))
    throw std::invalid_argument("lasso: lambda must be finite and nonnegative");
  const int d = problem.dim();
  for (const auto& s : problem.samples) {
    if (s.x.size() != d) throw std::invalid_argument("lasso: inconsistent sample dimension");
    if (!s.x.allFinite() || !std::isfinite(s.y))
      throw std::invalid_argument("lasso: non-finite sample");
  }
}

GramAccumulator accumulate(const LassoProblem& problem) {
  GramAccumulator acc(problem.dim());
  for (const auto& s : problem.samples) acc.add(s.x, s.y);
  return acc;
}

}  // namespace

double lasso_objective(const LassoProblem& problem, const Eigen::VectorXd& beta) {
  validate_problem(problem);
  if (beta.size() != problem.dim())
    throw std::invalid_argument("lasso_objective: beta dimension mismatch");
  double rss = 0.0;
  for (const auto& s : problem.samples) {
    const double r = s.y - s.x.dot(beta);
    rss += r * r;
  }
  return rss / problem.n() + problem.lambda * beta.lpNorm<1>();
}

double kkt_residual(const LassoProblem& problem, const Eigen::VectorXd& beta) {
  validate_problem(problem);
  const int d = problem.dim();
  if (beta.size() != d) throw std::invalid_argument("kkt_residual: beta dimension mismatch");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
  for (const auto& s : problem.samples) {
    const double r = s.y - s.x.dot(beta);
    grad += (2.0 / problem.n()) * r * s.x;
  }
  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    double v;
    if (beta[j] == 0.0) {
      v = std::max(0.0, std::abs(grad[j]) - problem.lambda);
    } else {
      v = std::abs(grad[j] - problem.lambda * (beta[j] > 0.0 ? 1.0 : -1.0));
    }
    worst = std::max(worst, v);
  }
  return worst;
}

void GramAccumulator::add(const Eigen::VectorXd& x, double y) {
  if (x.size() != dim()) throw std::invalid_argument("GramAccumulator: dimension mismatch");
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  xty_ += y * x;
  yty_ += y * y;
  ++count_;
}

void GramAccumulator::merge(const GramAccumulator& other) {
  if (other.dim() != dim()) throw std::invalid_argument("GramAccumulator: dimension mismatch");
  gram_ += other.gram_;
  xty_ += other.xty_;
  yty_ += other.yty_;
  count_ += other.count_;
}

LassoEstimate solve_lasso_gram(const GramAccumulator& acc, double lambda,
                               const SolverConfig& config, const Eigen::VectorXd& beta0) {
  const int d = acc.dim();
  const double n = static_cast<double>(acc.count());
  if (acc.count() < 1) throw std::invalid_argument("lasso: empty sample set");
  if (config.tol <= 0.0 || config.max_sweeps < 1)
    throw std::invalid_argument("lasso: invalid solver config");

  // Only the lower triangle of the gram matrix is filled; symmetrize a local
  // copy once so sweeps can read full columns.
  Eigen::MatrixXd G = acc.gram().selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd& xty = acc.xty();

  LassoEstimate out;
  out.beta = beta0.size() == d ? beta0 : Eigen::VectorXd::Zero(d);
  Eigen::VectorXd gbeta = G * out.beta;

  int sweep = 0;
  for (; sweep < config.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < d; ++j) {
      const double energy = (2.0 / n) * G(j, j);
      const double old = out.beta[j];
      double next = 0.0;
      if (energy > 0.0) {
        const double rho = (2.0 / n) * (xty[j] - gbeta[j] + G(j, j) * old);
        next = soft_threshold(rho, lambda) / energy;
      }
      if (next != old) {
        gbeta += (next - old) * G.col(j);
        out.beta[j] = next;
        max_change = std::max(max_change, std::abs(next - old));
      }
    }
    if (max_change < config.tol) {
      ++sweep;
      break;
    }
  }
  out.iterations = sweep;

  // Optimality certificate from the same statistics.
  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    const double g = (2.0 / n) * (xty[j] - gbeta[j]);
    const double v = out.beta[j] == 0.0
                         ? std::max(0.0, std::abs(g) - lambda)
                         : std::abs(g - lambda * (out.beta[j] > 0.0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  out.kkt_residual = worst;
  out.converged = worst <= config.kkt_tol && sweep < config.max_sweeps;
  if (!out.converged && sweep >= config.max_sweeps) out.iterations = config.max_sweeps;
  out.objective = (acc.yty() - 2.0 * out.beta.dot(xty) + out.beta.dot(gbeta)) / n +
                  lambda * out.beta.lpNorm<1>();
  if (out.objective < 0.0 && out.objective > -1e-12) out.objective = 0.0;
  return out;
}

LassoEstimate solve_lasso(const LassoProblem& problem, const SolverConfig& config,
                          const Eigen::VectorXd& beta0) {
  validate_problem(problem);
  LassoEstimate out = solve_lasso_gram(accumulate(problem), problem.lambda, config, beta0);
  // The gram-form objective loses precision when y^T y is large; recompute.
  out.objective = lasso_objective(problem, out.beta);
  out.kkt_residual = kkt_residual(problem, out.beta);
  out.converged = out.kkt_residual <= config.kkt_tol && out.iterations < config.max_sweeps;
  return out;
}

LassoEstimate solve_lasso(const LassoProblem& problem, const SolverConfig& config) {
  return solve_lasso(problem, config, Eigen::VectorXd());
}

}  // namespace tlb
