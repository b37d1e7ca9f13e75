#include "tlb/scheduler.hpp"

#include <cmath>
#include <stdexcept>

namespace tlb {

namespace {

bool is_power_of_two(long b) { return b > 0 && (b & (b - 1)) == 0; }

void validate(const TeamworkSchedule& s) {
  if (s.K < 1 || s.q < 1) throw std::invalid_argument("schedule: K and q must be >= 1");
}

}  // namespace

EpochInterval teamwork_round(const TeamworkSchedule& schedule, int n, int k) {
  validate(schedule);
  if (n < 0 || k < 0 || k >= schedule.K)
    throw std::invalid_argument("teamwork_round: bad round or arm");
  const long base = ((1L << n) - 1) * static_cast<long>(schedule.K) * schedule.q;
  return {base + static_cast<long>(schedule.q) * k + 1,
          base + static_cast<long>(schedule.q) * (k + 1)};
}

EpochMode classify_epoch(const TeamworkSchedule& schedule, long t) {
  validate(schedule);
  if (t < 1) throw std::invalid_argument("classify_epoch: t must be >= 1");
  const long block_len = static_cast<long>(schedule.K) * schedule.q;
  const long block = (t + block_len - 1) / block_len;  // 1-indexed
  if (!is_power_of_two(block)) return {};
  EpochMode mode;
  mode.teamwork = true;
  mode.round = 0;
  for (long b = block; b > 1; b >>= 1) ++mode.round;
  const long offset = t - (block - 1) * block_len;  // in [1, K*q]
  mode.arm = static_cast<int>((offset - 1) / schedule.q);
  return mode;
}

long teamwork_sample_count(const TeamworkSchedule& schedule, long t, int k, int n_batch) {
  validate(schedule);
  if (t < 0 || n_batch < 1) throw std::invalid_argument("teamwork_sample_count: bad arguments");
  long epochs = 0;
  for (int n = 0;; ++n) {
    const EpochInterval round = teamwork_round(schedule, n, k);
    if (round.first > t) break;
    epochs += std::min(round.last, t) - round.first + 1;
    if (round.last >= t) break;
  }
  return epochs * n_batch;
}

long q_zero(const EnvironmentSpec& spec, int n_batch, double p_star, double c1, double c2) {
  if (p_star <= 0.0) throw std::invalid_argument("q_zero: no dominance mass");
  if (n_batch < 1 || c1 <= 0.0 || c2 <= 0.0) throw std::invalid_argument("q_zero: bad arguments");
  const double logd = std::log(static_cast<double>(spec.d));
  const double n = static_cast<double>(n_batch);
  const double t1 = 20.0 / (n * p_star);
  const double t2 = 4.0 / (n * p_star * c2 * c2);
  const double t3 = 3.0 * logd / (n * p_star * c2 * c2);
  const double t4 = 1024.0 * spec.x_max * spec.x_max * logd /
                    (n * spec.h * spec.h * p_star * p_star * c1);
  return static_cast<long>(std::ceil(std::max({t1, t2, t3, t4})));
}

Constants derive_constants(const EnvironmentSpec& spec, int q, int n_batch, double p_star,
                           double phi0, double c0) {
  if (q < 1 || n_batch < 1 || p_star <= 0.0 || phi0 <= 0.0 || c0 <= 0.0)
    throw std::invalid_argument("derive_constants: inputs must be positive");
  Constants c;
  c.phi0 = phi0;
  c.p_star = p_star;
  const double s0 = static_cast<double>(spec.s0);
  const double xm2 = spec.x_max * spec.x_max;
  c.c1 = std::pow(phi0, 4) / (512.0 * s0 * s0 * spec.sigma * spec.sigma * xm2);
  c.c2 = std::min(0.5, phi0 * phi0 / (256.0 * s0 * xm2));
  c.c3 = 1024.0 * spec.K * c0 * xm2 / (std::pow(p_star, 3) * c.c1);
  c.c4 = 8.0 * spec.K * spec.b * spec.x_max / (1.0 - std::exp(-p_star * p_star / 32.0));
  const double kq = static_cast<double>(spec.K) * q;
  long t = 1;
  while (t < 24.0 * kq * std::log(static_cast<double>(t)) + 4.0 * kq * kq) ++t;
  c.c5 = t;
  c.q0 = q_zero(spec, n_batch, p_star, c.c1, c.c2);
  c.lambda1 = phi0 * phi0 * p_star * spec.h / (64.0 * s0 * spec.x_max);
  return c;
}

double lambda2_at(long t, const EnvironmentSpec& spec, double p_star, double phi0, double c1) {
  if (t < 1 || p_star <= 0.0 || phi0 <= 0.0 || c1 <= 0.0)
    throw std::invalid_argument("lambda2_at: bad arguments");
  const double td = static_cast<double>(t);
  const double logs = std::log(td) + std::log(static_cast<double>(spec.d));
  return phi0 * phi0 / (2.0 * spec.s0) * std::sqrt(logs / (p_star * c1) / td);
}

}  // namespace tlb
