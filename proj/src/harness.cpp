#include "tlb/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace tlb {

namespace {

std::uint64_t cell_seed(const RunConfig& config, int d, int q, int n) {
  std::uint64_t s = mix_seed(config.seed, static_cast<std::uint64_t>(d));
  s = mix_seed(s, static_cast<std::uint64_t>(q));
  return mix_seed(s, static_cast<std::uint64_t>(n));
}

// Plug-in penalty scale sigma * x_max * sqrt(log terms / n); the analysis
// constants blow these up by several orders of magnitude at desk-scale n.
double plugin_lambda1(const EnvironmentSpec& spec, int n_batch, int q, long epochs) {
  const double kq = static_cast<double>(spec.K) * q;
  const double rounds = std::max(1.0, std::floor(std::log2(std::max(2.0, epochs / kq))) + 1.0);
  const double n_ref = std::max(8.0, n_batch * q * rounds);
  const double lam =
      2.0 * spec.sigma * spec.x_max * std::sqrt(2.0 * std::log(static_cast<double>(spec.d)) / n_ref);
  return std::max(lam, 1e-6);
}

double plugin_lambda2(const EnvironmentSpec& spec, int n_batch, long t) {
  const double n_est = std::max(1.0, static_cast<double>(n_batch) * t / spec.K);
  const double lam = 2.0 * spec.sigma * spec.x_max *
                     std::sqrt((std::log(static_cast<double>(t) + 1.0) +
                                2.0 * std::log(static_cast<double>(spec.d))) /
                               n_est);
  return std::max(lam, 1e-6);
}

}  // namespace

double paper_update_count(long total_decisions, int n_batch, int K) {
  const double x = static_cast<double>(total_decisions) / (static_cast<double>(K) * n_batch);
  if (x < 1.0) throw std::invalid_argument("paper_update_count: need D/(K N) >= 1");
  return K * (x - std::log2(x));
}

RegretLog run_episode(const RunConfig& config, int replication, EpisodeArtifacts* artifacts) {
  EnvironmentSpec spec = config.spec;
  if (config.h_override) spec.h = *config.h_override;
  if (config.total_decisions % config.N != 0)
    throw std::invalid_argument("run_episode: total_decisions must be divisible by N");
  const long horizon = config.epochs();

  const std::uint64_t base = cell_seed(config, spec.d, config.q, config.N);
  const std::uint64_t rep_seed = mix_seed(base, static_cast<std::uint64_t>(replication));
  const TreatmentParams params = generate_parameters(spec, mix_seed(rep_seed, 1));
  Rng covariate_rng = make_rng(mix_seed(rep_seed, 2), 0);
  Rng noise_rng = make_rng(mix_seed(rep_seed, 3), 0);

  RegretLog log;
  const TeamworkSchedule schedule{spec.K, config.q};

  AgentConfig agent_config;
  agent_config.K = spec.K;
  agent_config.N = config.N;
  agent_config.d = spec.d;
  agent_config.q = config.q;
  agent_config.h = spec.h;

  if (config.lambda_mode == LambdaMode::paper) {
    const AssumptionEstimates est =
        estimate_assumption_constants(params, spec, config.probe_m, mix_seed(rep_seed, 4));
    double p_star = std::max(est.p_star_hat, 0.05);
    double phi0 = 0.5;
    try {
      phi0 = compatibility_probe(params, spec, config.probe_m, config.cone_samples,
                                 mix_seed(rep_seed, 5));
    } catch (const std::runtime_error&) {
    }
    phi0 = std::max(phi0, 0.05);
    log.p_star_hat = est.p_star_hat;
    log.phi0_hat = phi0;
    const Constants constants = derive_constants(spec, config.q, config.N, p_star, phi0);
    agent_config.lambda1 = constants.lambda1;
    const double scale = config.lambda2_scale;
    agent_config.lambda2_schedule = [spec, p_star, phi0, c1 = constants.c1, scale](long t) {
      return scale * lambda2_at(std::max(t, 1L), spec, p_star, phi0, c1);
    };
  } else {
    agent_config.lambda1 = plugin_lambda1(spec, config.N, config.q, horizon);
    const double scale = config.lambda2_scale;
    const int n_batch = config.N;
    agent_config.lambda2_schedule = [spec, n_batch, scale](long t) {
      return scale * plugin_lambda2(spec, n_batch, std::max(t, 1L));
    };
  }
  if (config.lambda1_override) agent_config.lambda1 = *config.lambda1_override;

  AgentState state = init_agent(agent_config);

  double cum_regret = 0.0;
  for (long t = 1; t <= horizon; ++t) {
    Batch batch = sample_batch(spec, config.N, covariate_rng);
    batch.epoch = static_cast<int>(t);

    std::vector<int> arms;
    const EpochMode mode = classify_epoch(schedule, t);
    if (config.oracle_policy) {
      arms.reserve(config.N);
      for (const auto& x : batch.covariates) arms.push_back(oracle_arm(params, x));
    } else {
      arms = allocate_batch(state, agent_config, schedule, t, batch);
    }
    const FeedbackBatch feedback = realize_feedback(params, batch, arms, spec, noise_rng);
    if (!config.oracle_policy) {
      update(state, agent_config, schedule, t, batch, arms, feedback);
      if (mode.teamwork) refresh_teamwork_estimates(state, agent_config);
    }

    EpochRecord record;
    record.epoch = t;
    record.teamwork = mode.teamwork;
    record.teamwork_arm = mode.arm;
    for (int i = 0; i < config.N; ++i) {
      const double r = instantaneous_regret(params, batch.covariates[i], arms[i]);
      record.user_regrets.push_back(r);
      cum_regret += r;
    }
    record.cum_regret = cum_regret;
    record.good_event =
        !config.oracle_policy &&
        good_event_indicator(teamwork_betas(state, spec.d), params, spec.h, spec.x_max);
    const auto [tw, all] = refit_counts(state);
    record.teamwork_refits = tw;
    record.all_refits = all;
    log.records.push_back(std::move(record));
  }
  log.final_regret = cum_regret;
  const auto [tw, all] = refit_counts(state);
  log.total_refits = tw + all;
  if (artifacts) {
    artifacts->agent = std::move(state);
    artifacts->params = params;
  }
  return log;
}

std::vector<CellSummary> run_grid(const RunConfig& base, const GridSpec& grid) {
  if (grid.d_values.empty() || grid.q_values.empty() || grid.n_values.empty())
    throw std::invalid_argument("run_grid: empty grid");
  std::vector<CellSummary> cells;
  for (int d : grid.d_values)
    for (int q : grid.q_values)
      for (int n : grid.n_values) {
        RunConfig config = base;
        config.spec.d = d;
        config.q = q;
        config.N = n;
        CellSummary cell;
        cell.d = d;
        cell.q = q;
        cell.N = n;
        std::ostringstream name;
        name << "d" << d << "_q" << q << "_N" << n;
        cell.cell = name.str();
        double sum = 0.0, lo = 0.0, hi = 0.0, updates = 0.0;
        for (int rep = 0; rep < config.replications; ++rep) {
          RegretLog log = run_episode(config, rep);
          const double r = log.final_regret;
          if (rep == 0) {
            lo = hi = r;
          } else {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
          }
          sum += r;
          updates += static_cast<double>(log.total_refits);
          cell.logs.push_back(std::move(log));
        }
        cell.mean_regret = sum / config.replications;
        cell.min_regret = lo;
        cell.max_regret = hi;
        cell.mean_updates = updates / config.replications;
        cells.push_back(std::move(cell));
      }
  return cells;
}

std::vector<std::vector<bool>> good_event_matrix(const std::vector<RegretLog>& logs) {
  std::vector<std::vector<bool>> flags;
  for (const auto& log : logs) {
    std::vector<bool> row;
    row.reserve(log.records.size());
    for (const auto& rec : log.records) row.push_back(rec.good_event);
    flags.push_back(std::move(row));
  }
  return flags;
}

void write_csv(const std::vector<CellSummary>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "cell,replication,epoch,mode,cum_regret,good_event,teamwork_refits,all_refits\n";
  out.precision(10);
  for (const auto& cell : cells)
    for (std::size_t rep = 0; rep < cell.logs.size(); ++rep)
      for (const auto& rec : cell.logs[rep].records)
        out << cell.cell << ',' << rep << ',' << rec.epoch << ','
            << (rec.teamwork ? "teamwork" : "selfish") << ',' << rec.cum_regret << ','
            << (rec.good_event ? 1 : 0) << ',' << rec.teamwork_refits << ',' << rec.all_refits
            << '\n';
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);

  std::string summary_path = path;
  const std::size_t dot = summary_path.rfind('.');
  if (dot == std::string::npos)
    summary_path += "_summary.csv";
  else
    summary_path.insert(dot, "_summary");
  std::ofstream sum(summary_path);
  if (!sum) throw std::runtime_error("write_csv: cannot open " + summary_path);
  sum << "cell,mean_regret,min_regret,max_regret,mean_updates\n";
  sum.precision(10);
  for (const auto& cell : cells)
    sum << cell.cell << ',' << cell.mean_regret << ',' << cell.min_regret << ','
        << cell.max_regret << ',' << cell.mean_updates << '\n';
  if (!sum) throw std::runtime_error("write_csv: write failed for " + summary_path);
}

}  // namespace tlb
