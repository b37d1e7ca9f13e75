#pragma once

#include <string>
#include <vector>

#include "tlb/agent.hpp"
#include "tlb/environment.hpp"

namespace tlb {

struct AllocationAudit {
  long total = 0;    // |A_w|
  long optimal = 0;  // entries whose covariate lies in U_w
  double rate = 0.0;
};

struct RateCheck {
  bool ok = false;
  std::vector<std::string> reasons;
};

struct DeviationRow {
  long epoch = 0;
  double violation_frequency = 0.0;
  double bound = 0.0;  // min(1, 5K/t^4)
};

AllocationAudit audit_sample_set(const SampleSet& set, const TreatmentParams& params, double h);

// Definition-style check: size clause total >= 6 log d / (r c2^2) and rate
// clause optimal/total >= r/2, both non-strict.
RateCheck check_rate_condition(const AllocationAudit& audit, double r, int d, double c2);

// Right-hand side of the batch-adapted LASSO deviation inequality,
// 2 exp[-(r^2/16) c1 |A| chi^2 + log d] + exp[-|A#| c2^2], unclipped.
double theorem1_bound_raw(long total, long optimal, double chi, int d, double r, double c1,
                          double c2);

// Same value clipped to [0, 3].
double theorem1_bound(long total, long optimal, double chi, int d, double r, double c1,
                      double c2);

// True iff every arm's teamwork estimate is within h/(4 x_max) of the truth
// in L1 (non-strict).
bool good_event_indicator(const std::vector<Eigen::VectorXd>& teamwork_betas,
                          const TreatmentParams& params, double h, double x_max);

// Per-checkpoint empirical violation frequency of the good event across
// replications against min(1, 5K/t^4). good_event_flags[r][t-1] is the flag
// at epoch t in replication r.
std::vector<DeviationRow> montecarlo_deviation_check(
    const std::vector<std::vector<bool>>& good_event_flags, const std::vector<long>& checkpoints,
    int K);

}  // namespace tlb
