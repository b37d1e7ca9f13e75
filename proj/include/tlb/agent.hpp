#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tlb/environment.hpp"
#include "tlb/lasso.hpp"
#include "tlb/scheduler.hpp"

namespace tlb {

enum class Provenance { teamwork, selfish };

struct SampleEntry {
  Eigen::VectorXd x;
  double y = 0.0;
  long epoch = 0;
  int user = 0;
  Provenance provenance = Provenance::teamwork;
};

struct SampleSet {
  std::vector<SampleEntry> entries;
  int arm = 0;
};

struct AgentConfig {
  int K = 1;
  int N = 1;
  int d = 1;
  int q = 1;
  double h = 0.5;
  double lambda1 = 0.01;
  std::function<double(long)> lambda2_schedule;  // epoch -> penalty
  SolverConfig solver;
};

struct AgentState {
  std::vector<SampleSet> teamwork_sets;
  std::vector<SampleSet> selfish_sets;
  std::vector<GramAccumulator> teamwork_gram;
  std::vector<GramAccumulator> selfish_gram;
  std::vector<std::optional<LassoEstimate>> teamwork_estimates;
  std::vector<std::optional<LassoEstimate>> all_estimates;
  long refit_count_teamwork = 0;
  long refit_count_all = 0;
  long current_epoch = 0;
};

AgentState init_agent(const AgentConfig& config);

// Arms within h/2 of the best teamwork-estimated efficacy; always contains
// the argmax. Indices refer into teamwork_betas.
std::vector<int> candidate_set(const Eigen::VectorXd& x,
                               const std::vector<Eigen::VectorXd>& teamwork_betas, double h);

// One epoch of Algorithm-style allocation. Teamwork epochs assign the whole
// batch to the scheduled arm; selfish epochs refit both estimators per arm
// with data and run the screen-then-commit rule per user.
std::vector<int> allocate_batch(AgentState& state, const AgentConfig& config,
                                const TeamworkSchedule& schedule, long t, const Batch& batch);

void update(AgentState& state, const AgentConfig& config, const TeamworkSchedule& schedule,
            long t, const Batch& batch, const std::vector<int>& arms,
            const FeedbackBatch& feedback);

std::pair<long, long> refit_counts(const AgentState& state);

// Refit teamwork estimates on the current sample sets without touching the
// refit counters; used by diagnostics that track the good event per epoch.
void refresh_teamwork_estimates(AgentState& state, const AgentConfig& config);

// Teamwork estimates as plain vectors (zero vector for arms without data).
std::vector<Eigen::VectorXd> teamwork_betas(const AgentState& state, int d);

}  // namespace tlb
