#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlb/agent.hpp"
#include "tlb/diagnostics.hpp"
#include "tlb/environment.hpp"
#include "tlb/scheduler.hpp"

namespace tlb {

// How the episode runner picks the agent's penalties when no override is
// given. The formula constants from the analysis are available but are far
// too conservative at small sample sizes, so the plug-in schedule is the
// default.
enum class LambdaMode { plugin, paper };

struct RunConfig {
  EnvironmentSpec spec;
  int N = 4;
  int q = 1;
  long total_decisions = 5000;  // user-level decisions; epochs = total_decisions / N
  int replications = 1;
  std::uint64_t seed = 1;
  bool oracle_policy = false;  // play w*(x) with known parameters (regret baseline)

  std::optional<double> lambda1_override;
  double lambda2_scale = 1.0;
  std::optional<double> h_override;
  LambdaMode lambda_mode = LambdaMode::plugin;
  int probe_m = 4000;        // draws for assumption/compatibility probes (paper mode)
  int cone_samples = 100;

  long epochs() const { return total_decisions / N; }
};

struct EpochRecord {
  long epoch = 0;
  bool teamwork = false;
  int teamwork_arm = -1;
  std::vector<double> user_regrets;
  double cum_regret = 0.0;
  bool good_event = false;
  long teamwork_refits = 0;  // cumulative
  long all_refits = 0;       // cumulative
};

struct RegretLog {
  std::vector<EpochRecord> records;
  double final_regret = 0.0;
  long total_refits = 0;
  double p_star_hat = 0.0;   // probe estimates recorded alongside results
  double phi0_hat = 0.0;
};

struct CellSummary {
  std::string cell;
  int d = 0, q = 0, N = 0;
  double mean_regret = 0.0;
  double min_regret = 0.0;
  double max_regret = 0.0;
  double mean_updates = 0.0;
  std::vector<RegretLog> logs;
};

// Final agent state and the true parameters of the episode, for post-run
// audits of the teamwork sample sets.
struct EpisodeArtifacts {
  AgentState agent;
  TreatmentParams params;
};

RegretLog run_episode(const RunConfig& config, int replication,
                      EpisodeArtifacts* artifacts = nullptr);

struct GridSpec {
  std::vector<int> d_values;
  std::vector<int> q_values;
  std::vector<int> n_values;
};

std::vector<CellSummary> run_grid(const RunConfig& base, const GridSpec& grid);

// K [D/(KN) - log2(D/(KN))]: the experiment appendix's update-count formula.
double paper_update_count(long total_decisions, int n_batch, int K);

void write_csv(const std::vector<CellSummary>& cells, const std::string& path);

// Good-event flags per replication, for the Monte-Carlo deviation tables.
std::vector<std::vector<bool>> good_event_matrix(const std::vector<RegretLog>& logs);

}  // namespace tlb
