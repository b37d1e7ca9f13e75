#pragma once

#include "tlb/environment.hpp"

namespace tlb {

// Teamwork/selfish epoch structure: the b-th block of K*q epochs is a
// teamwork block iff b is a power of 2; inside a teamwork block each arm
// owns q consecutive epochs.
struct TeamworkSchedule {
  int K = 1;
  int q = 1;
};

struct EpochInterval {
  long first = 0;
  long last = 0;  // inclusive
  long length() const { return last - first + 1; }
  bool contains(long t) const { return t >= first && t <= last; }
};

struct EpochMode {
  bool teamwork = false;
  int arm = -1;    // 0-based, valid when teamwork
  int round = -1;  // n >= 0, valid when teamwork
};

// Paper-derived constants bundle for a given world.
struct Constants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  long c5 = 0;
  long q0 = 0;
  double lambda1 = 0.0;
  double phi0 = 0.0;
  double p_star = 0.0;
};

// Epoch interval of the n-th teamwork round for arm k (0-based, n >= 0).
EpochInterval teamwork_round(const TeamworkSchedule& schedule, int n, int k);

EpochMode classify_epoch(const TeamworkSchedule& schedule, long t);

// Samples collected for arm k through epoch t at batch size N.
long teamwork_sample_count(const TeamworkSchedule& schedule, long t, int k, int n_batch);

// Minimum exploration length: ceil of the max of the four appendix terms.
long q_zero(const EnvironmentSpec& spec, int n_batch, double p_star, double c1, double c2);

// All constants; c0 is the margin-condition constant (defaults to 1 when the
// environment has not been probed for it).
Constants derive_constants(const EnvironmentSpec& spec, int q, int n_batch, double p_star,
                           double phi0, double c0 = 1.0);

double lambda2_at(long t, const EnvironmentSpec& spec, double p_star, double phi0, double c1);

}  // namespace tlb
