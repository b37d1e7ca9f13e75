#include "tlb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tlb {

AllocationAudit audit_sample_set(const SampleSet& set, const TreatmentParams& params, double h) {
  if (set.entries.empty()) throw std::invalid_argument("audit_sample_set: empty sample set");
  AllocationAudit audit;
  audit.total = static_cast<long>(set.entries.size());
  for (const auto& entry : set.entries)
    if (membership_u_w(params, entry.x, h) == set.arm) ++audit.optimal;
  audit.rate = static_cast<double>(audit.optimal) / audit.total;
  return audit;
}

RateCheck check_rate_condition(const AllocationAudit& audit, double r, int d, double c2) {
  if (r <= 0.0 || r > 1.0) throw std::invalid_argument("check_rate_condition: r must be in (0,1]");
  if (d < 1 || c2 <= 0.0) throw std::invalid_argument("check_rate_condition: bad d or c2");
  RateCheck check;
  const double needed = 6.0 * std::log(static_cast<double>(d)) / (r * c2 * c2);
  if (static_cast<double>(audit.total) < needed)
    check.reasons.push_back("size clause: |A| < 6 log d / (r c2^2)");
  if (audit.rate < r / 2.0)
    check.reasons.push_back("rate clause: |A#|/|A| < r/2");
  check.ok = check.reasons.empty();
  return check;
}

double theorem1_bound_raw(long total, long optimal, double chi, int d, double r, double c1,
                          double c2) {
  if (total < 1 || optimal < 0 || chi <= 0.0 || d < 1 || r <= 0.0 || c1 <= 0.0 || c2 <= 0.0)
    throw std::invalid_argument("theorem1_bound: inputs must be positive");
  const double term1 =
      2.0 * std::exp(-(r * r / 16.0) * c1 * total * chi * chi + std::log(static_cast<double>(d)));
  const double term2 = std::exp(-static_cast<double>(optimal) * c2 * c2);
  return term1 + term2;
}

double theorem1_bound(long total, long optimal, double chi, int d, double r, double c1,
                      double c2) {
  return std::clamp(theorem1_bound_raw(total, optimal, chi, d, r, c1, c2), 0.0, 3.0);
}

bool good_event_indicator(const std::vector<Eigen::VectorXd>& teamwork_betas,
                          const TreatmentParams& params, double h, double x_max) {
  if (teamwork_betas.size() != params.betas.size())
    throw std::invalid_argument("good_event_indicator: arm count mismatch");
  const double threshold = h / (4.0 * x_max);
  for (std::size_t k = 0; k < params.betas.size(); ++k)
    if ((teamwork_betas[k] - params.betas[k]).lpNorm<1>() > threshold) return false;
  return true;
}

std::vector<DeviationRow> montecarlo_deviation_check(
    const std::vector<std::vector<bool>>& good_event_flags, const std::vector<long>& checkpoints,
    int K) {
  if (good_event_flags.size() < 2)
    throw std::invalid_argument("montecarlo_deviation_check: need >= 2 replications");
  std::vector<DeviationRow> rows;
  for (long t : checkpoints) {
    if (t < 1) throw std::invalid_argument("montecarlo_deviation_check: bad checkpoint");
    long violations = 0;
    for (const auto& flags : good_event_flags) {
      if (t > static_cast<long>(flags.size()))
        throw std::invalid_argument("montecarlo_deviation_check: checkpoint beyond horizon");
      if (!flags[t - 1]) ++violations;
    }
    DeviationRow row;
    row.epoch = t;
    row.violation_frequency = static_cast<double>(violations) / good_event_flags.size();
    row.bound = std::min(1.0, 5.0 * K / std::pow(static_cast<double>(t), 4));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tlb
