#include "tlb/agent.hpp"

#include <limits>
#include <stdexcept>

namespace tlb {

namespace {

void validate_config(const AgentConfig& config) {
  if (config.K < 1 || config.N < 1 || config.d < 1 || config.q < 1)
    throw std::invalid_argument("agent: K, N, d, q must be >= 1");
  if (config.h <= 0.0 || config.lambda1 <= 0.0)
    throw std::invalid_argument("agent: h and lambda1 must be positive");
}

LassoEstimate fit(const GramAccumulator& acc, double lambda, const SolverConfig& solver,
                  const std::optional<LassoEstimate>& warm) {
  return solve_lasso_gram(acc, lambda, solver,
                          warm ? warm->beta : Eigen::VectorXd());
}

}  // namespace

AgentState init_agent(const AgentConfig& config) {
  validate_config(config);
  AgentState state;
  for (int k = 0; k < config.K; ++k) {
    state.teamwork_sets.push_back({{}, k});
    state.selfish_sets.push_back({{}, k});
    state.teamwork_gram.emplace_back(config.d);
    state.selfish_gram.emplace_back(config.d);
  }
  state.teamwork_estimates.resize(config.K);
  state.all_estimates.resize(config.K);
  return state;
}

std::vector<int> candidate_set(const Eigen::VectorXd& x,
                               const std::vector<Eigen::VectorXd>& teamwork_betas, double h) {
  if (h <= 0.0) throw std::invalid_argument("candidate_set: h must be positive");
  if (teamwork_betas.empty()) throw std::invalid_argument("candidate_set: no arms");
  const int K = static_cast<int>(teamwork_betas.size());
  std::vector<double> vals(K);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    vals[k] = teamwork_betas[k].dot(x);
    best = std::max(best, vals[k]);
  }
  std::vector<int> out;
  for (int k = 0; k < K; ++k)
    if (vals[k] >= best - h / 2.0) out.push_back(k);
  return out;
}

std::vector<Eigen::VectorXd> teamwork_betas(const AgentState& state, int d) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& est : state.teamwork_estimates)
    out.push_back(est ? est->beta : Eigen::VectorXd::Zero(d));
  return out;
}

void refresh_teamwork_estimates(AgentState& state, const AgentConfig& config) {
  for (int k = 0; k < config.K; ++k) {
    if (state.teamwork_gram[k].count() == 0) continue;
    state.teamwork_estimates[k] =
        fit(state.teamwork_gram[k], config.lambda1, config.solver, state.teamwork_estimates[k]);
  }
}

std::vector<int> allocate_batch(AgentState& state, const AgentConfig& config,
                                const TeamworkSchedule& schedule, long t, const Batch& batch) {
  validate_config(config);
  if (t != state.current_epoch + 1) throw std::invalid_argument("allocate_batch: epoch out of order");
  if (static_cast<int>(batch.covariates.size()) != config.N)
    throw std::invalid_argument("allocate_batch: batch size mismatch");

  const EpochMode mode = classify_epoch(schedule, t);
  if (mode.teamwork) return std::vector<int>(config.N, mode.arm);

  // Selfish epoch: refit both estimators on data through epoch t-1.
  const double lambda2 = config.lambda2_schedule ? config.lambda2_schedule(t - 1) : config.lambda1;
  if (lambda2 <= 0.0) throw std::invalid_argument("allocate_batch: lambda2 must be positive");
  std::vector<bool> has_data(config.K, false);
  for (int k = 0; k < config.K; ++k) {
    const long total = state.teamwork_gram[k].count() + state.selfish_gram[k].count();
    if (total == 0) continue;
    has_data[k] = true;
    if (state.teamwork_gram[k].count() > 0) {
      state.teamwork_estimates[k] =
          fit(state.teamwork_gram[k], config.lambda1, config.solver, state.teamwork_estimates[k]);
      ++state.refit_count_teamwork;
    }
    GramAccumulator merged = state.teamwork_gram[k];
    merged.merge(state.selfish_gram[k]);
    state.all_estimates[k] = fit(merged, lambda2, config.solver, state.all_estimates[k]);
    ++state.refit_count_all;
  }

  std::vector<int> live;
  std::vector<Eigen::VectorXd> live_tw;
  for (int k = 0; k < config.K; ++k) {
    if (!has_data[k]) continue;
    live.push_back(k);
    live_tw.push_back(state.teamwork_estimates[k] ? state.teamwork_estimates[k]->beta
                                                  : Eigen::VectorXd::Zero(config.d));
  }

  std::vector<int> arms(config.N, 0);
  if (live.empty()) return arms;

  for (int i = 0; i < config.N; ++i) {
    const Eigen::VectorXd& x = batch.covariates[i];
    const std::vector<int> cand = candidate_set(x, live_tw, config.h);
    int best = live[cand.front()];
    double best_val = -std::numeric_limits<double>::infinity();
    for (int c : cand) {
      const int k = live[c];
      const double v = state.all_estimates[k] ? state.all_estimates[k]->beta.dot(x) : 0.0;
      if (v > best_val) {
        best_val = v;
        best = k;
      }
    }
    arms[i] = best;
  }
  return arms;
}

void update(AgentState& state, const AgentConfig& config, const TeamworkSchedule& schedule,
            long t, const Batch& batch, const std::vector<int>& arms,
            const FeedbackBatch& feedback) {
  if (t != state.current_epoch + 1) throw std::invalid_argument("update: epoch out of order");
  if (arms.size() != batch.covariates.size() || feedback.rewards.size() != arms.size())
    throw std::invalid_argument("update: inconsistent batch/arms/feedback");

  const EpochMode mode = classify_epoch(schedule, t);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const int k = arms[i];
    if (k < 0 || k >= config.K) throw std::invalid_argument("update: invalid arm");
    if (mode.teamwork && k != mode.arm)
      throw std::invalid_argument("update: arm disagrees with teamwork schedule");
    SampleEntry entry{batch.covariates[i], feedback.rewards[i], t, static_cast<int>(i),
                      mode.teamwork ? Provenance::teamwork : Provenance::selfish};
    if (mode.teamwork) {
      state.teamwork_gram[k].add(entry.x, entry.y);
      state.teamwork_sets[k].entries.push_back(std::move(entry));
    } else {
      state.selfish_gram[k].add(entry.x, entry.y);
      state.selfish_sets[k].entries.push_back(std::move(entry));
    }
  }
  state.current_epoch = t;
}

std::pair<long, long> refit_counts(const AgentState& state) {
  return {state.refit_count_teamwork, state.refit_count_all};
}

}  // namespace tlb
