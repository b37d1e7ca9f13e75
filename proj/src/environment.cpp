#include "tlb/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tlb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void validate_spec(const EnvironmentSpec& spec) {
  if (spec.d < 1 || spec.K < 1) throw std::invalid_argument("environment: d and K must be >= 1");
  if (spec.s0 < 1 || spec.s0 > spec.d)
    throw std::invalid_argument("environment: need 1 <= s0 <= d");
  if (spec.x_max <= 0.0 || spec.b <= 0.0 || spec.h <= 0.0 || spec.sigma < 0.0)
    throw std::invalid_argument("environment: bounds must be positive");
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (splitmix64(b) + 0x165667b19e3779f9ULL));
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x2545f4914f6cdd1dULL + 1)));
}

TreatmentParams generate_parameters(const EnvironmentSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  Rng rng = make_rng(seed, 0xbe7a);
  TreatmentParams out;
  std::uniform_real_distribution<double> mag(0.5, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<int> idx(spec.d);
  for (int k = 0; k < spec.K; ++k) {
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates: first s0 entries become the support
    for (int i = 0; i < spec.s0; ++i) {
      std::uniform_int_distribution<int> pick(i, spec.d - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<int> support(idx.begin(), idx.begin() + spec.s0);
    std::sort(support.begin(), support.end());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(spec.d);
    for (int j : support) beta[j] = (coin(rng) ? 1.0 : -1.0) * mag(rng);
    const double l1 = beta.lpNorm<1>();
    if (l1 > spec.b) beta *= spec.b / l1;
    out.betas.push_back(std::move(beta));
    out.supports.push_back(std::move(support));
  }
  return out;
}

Batch sample_batch(const EnvironmentSpec& spec, int n, Rng& rng) {
  validate_spec(spec);
  if (n < 1) throw std::invalid_argument("sample_batch: n must be >= 1");
  Batch batch;
  batch.covariates.reserve(n);
  if (spec.covariate_law == CovariateLaw::uniform_box) {
    std::uniform_real_distribution<double> u(-spec.x_max, spec.x_max);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x(spec.d);
      for (int j = 0; j < spec.d; ++j) x[j] = u(rng);
      batch.covariates.push_back(std::move(x));
    }
  } else {
    // N(0, (x_max/2)^2) truncated to the box by per-coordinate resampling
    std::normal_distribution<double> g(0.0, spec.x_max / 2.0);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x(spec.d);
      for (int j = 0; j < spec.d; ++j) {
        double v = g(rng);
        while (std::abs(v) > spec.x_max) v = g(rng);
        x[j] = v;
      }
      batch.covariates.push_back(std::move(x));
    }
  }
  return batch;
}

FeedbackBatch realize_feedback(const TreatmentParams& params, const Batch& batch,
                               const std::vector<int>& arms, const EnvironmentSpec& spec,
                               Rng& noise) {
  if (arms.size() != batch.covariates.size())
    throw std::invalid_argument("realize_feedback: arms/batch size mismatch");
  const int K = static_cast<int>(params.betas.size());
  FeedbackBatch fb;
  fb.arms = arms;
  fb.rewards.reserve(arms.size());
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i] < 0 || arms[i] >= K)
      throw std::invalid_argument("realize_feedback: invalid arm index");
    const double mean = params.betas[arms[i]].dot(batch.covariates[i]);
    fb.rewards.push_back(mean + (spec.sigma > 0.0 ? spec.sigma * g(noise) : 0.0));
  }
  return fb;
}

int oracle_arm(const TreatmentParams& params, const Eigen::VectorXd& x) {
  int best = 0;
  double best_val = params.betas[0].dot(x);
  for (int k = 1; k < static_cast<int>(params.betas.size()); ++k) {
    const double v = params.betas[k].dot(x);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return best;
}

double instantaneous_regret(const TreatmentParams& params, const Eigen::VectorXd& x, int arm) {
  if (arm < 0 || arm >= static_cast<int>(params.betas.size()))
    throw std::invalid_argument("instantaneous_regret: invalid arm");
  const double best = params.betas[oracle_arm(params, x)].dot(x);
  return best - params.betas[arm].dot(x);
}

std::optional<int> membership_u_w(const TreatmentParams& params, const Eigen::VectorXd& x,
                                  double h) {
  if (h <= 0.0) throw std::invalid_argument("membership_u_w: h must be positive");
  const int K = static_cast<int>(params.betas.size());
  if (K == 1) return 0;
  Eigen::VectorXd vals(K);
  for (int k = 0; k < K; ++k) vals[k] = params.betas[k].dot(x);
  for (int k = 0; k < K; ++k) {
    double others = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < K; ++j)
      if (j != k) others = std::max(others, vals[j]);
    if (vals[k] > others + h) return k;
  }
  return std::nullopt;
}

AssumptionEstimates estimate_assumption_constants(const TreatmentParams& params,
                                                  const EnvironmentSpec& spec, int m,
                                                  std::uint64_t seed) {
  if (m < 1000) throw std::invalid_argument("estimate_assumption_constants: need m >= 1000");
  const int K = static_cast<int>(params.betas.size());
  AssumptionEstimates out;
  if (K == 1) {
    out.p_star_hat = 1.0;
    return out;
  }

  Rng rng = make_rng(seed, 0xa55e);
  std::vector<long> u_hits(K, 0);
  std::vector<bool> dominated(K, true);  // strictly below the best of the others on every draw

  const int kappa_grid = 20;
  const double kappa_max = 2.0 * spec.b * spec.x_max;
  std::vector<std::vector<long>> gap_hits(K * K, std::vector<long>(kappa_grid, 0));

  Eigen::VectorXd vals(K);
  for (int draw = 0; draw < m; ++draw) {
    const Batch one = sample_batch(spec, 1, rng);
    const Eigen::VectorXd& x = one.covariates.front();
    for (int k = 0; k < K; ++k) vals[k] = params.betas[k].dot(x);
    if (auto w = membership_u_w(params, x, spec.h)) ++u_hits[*w];
    for (int k = 0; k < K; ++k) {
      double others = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < K; ++j)
        if (j != k) others = std::max(others, vals[j]);
      if (vals[k] >= others) dominated[k] = false;
    }
    for (int a = 0; a < K; ++a)
      for (int bidx = a + 1; bidx < K; ++bidx) {
        const double gap = std::abs(vals[a] - vals[bidx]);
        if (gap <= 0.0) continue;
        for (int g = 0; g < kappa_grid; ++g) {
          const double kappa = kappa_max * (g + 1) / kappa_grid;
          if (gap <= kappa) ++gap_hits[a * K + bidx][g];
        }
      }
  }

  for (int k = 0; k < K; ++k)
    if (u_hits[k] == 0 && dominated[k]) out.sub_opt_arms.push_back(k);

  double p_star = 1.0;
  bool any = false;
  for (int k = 0; k < K; ++k) {
    if (std::find(out.sub_opt_arms.begin(), out.sub_opt_arms.end(), k) != out.sub_opt_arms.end())
      continue;
    p_star = std::min(p_star, static_cast<double>(u_hits[k]) / m);
    any = true;
  }
  out.p_star_hat = any ? p_star : 0.0;

  double c0 = 0.0;
  for (int a = 0; a < K; ++a)
    for (int bidx = a + 1; bidx < K; ++bidx)
      for (int g = 0; g < kappa_grid; ++g) {
        const double kappa = kappa_max * (g + 1) / kappa_grid;
        c0 = std::max(c0, static_cast<double>(gap_hits[a * K + bidx][g]) / m / kappa);
      }
  out.margin_c0_hat = c0;
  return out;
}

double compatibility_probe_gram(const Eigen::MatrixXd& sigma, const std::vector<int>& support,
                                int samples_in_cone, Rng& rng) {
  if (samples_in_cone < 1) throw std::invalid_argument("compatibility_probe: need samples >= 1");
  const int d = static_cast<int>(sigma.rows());
  const int s = static_cast<int>(support.size());
  if (s < 1 || s > d) throw std::invalid_argument("compatibility_probe: bad support");
  std::vector<bool> in_support(d, false);
  for (int j : support) in_support[j] = true;

  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd v(d);
  for (int trial = 0; trial < samples_in_cone; ++trial) {
    v.setZero();
    double l1_s = 0.0;
    for (int j : support) {
      v[j] = g(rng);
      l1_s += std::abs(v[j]);
    }
    if (l1_s == 0.0) continue;
    // off-support mass scaled into the cone: ||v_Sc||_1 = u * 3 ||v_S||_1
    Eigen::VectorXd off = Eigen::VectorXd::Zero(d);
    double l1_off = 0.0;
    for (int j = 0; j < d; ++j) {
      if (in_support[j]) continue;
      off[j] = g(rng);
      l1_off += std::abs(off[j]);
    }
    if (l1_off > 0.0) v += off * (u(rng) * 3.0 * l1_s / l1_off);
    const double quad = v.dot(sigma.selfadjointView<Eigen::Lower>() * v);
    const double ratio = std::sqrt(std::max(0.0, s * quad)) / l1_s;
    best = std::min(best, ratio);
  }
  return best;
}

double compatibility_probe(const TreatmentParams& params, const EnvironmentSpec& spec, int m,
                           int samples_in_cone, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("compatibility_probe: need m >= 1");
  const int K = static_cast<int>(params.betas.size());
  Rng rng = make_rng(seed, 0xc0e);
  double result = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int k = 0; k < K; ++k) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(spec.d, spec.d);
    long hits = 0;
    for (int draw = 0; draw < m; ++draw) {
      const Batch one = sample_batch(spec, 1, rng);
      const Eigen::VectorXd& x = one.covariates.front();
      if (membership_u_w(params, x, spec.h) == k) {
        gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
        ++hits;
      }
    }
    if (hits == 0) continue;
    gram /= static_cast<double>(hits);
    result = std::min(result,
                      compatibility_probe_gram(gram, params.supports[k], samples_in_cone, rng));
    any = true;
  }
  if (!any) throw std::runtime_error("compatibility_probe: empty dominance region");
  return result;
}

}  // namespace tlb
