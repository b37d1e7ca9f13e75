#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tlb/diagnostics.hpp"
#include "tlb/harness.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split(s, ',')) out.push_back(std::stoi(tok));
  return out;
}

tlb::GridSpec read_grid_file(const std::string& path, const tlb::RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--grid", "cannot open " + path);
  tlb::GridSpec grid{{base.spec.d}, {base.q}, {base.N}};
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    const std::string value = line.substr(eq + 1);
    if (key == "d") grid.d_values = parse_int_list(value);
    else if (key == "q") grid.q_values = parse_int_list(value);
    else if (key == "n" || key == "N") grid.n_values = parse_int_list(value);
    else throw CLI::ValidationError("--grid", "unknown grid key: " + key);
  }
  return grid;
}

int run_simulate(const tlb::RunConfig& config, const std::string& grid_file,
                 const std::string& out_path) {
  tlb::GridSpec grid{{config.spec.d}, {config.q}, {config.N}};
  if (!grid_file.empty()) grid = read_grid_file(grid_file, config);
  const auto cells = tlb::run_grid(config, grid);
  tlb::write_csv(cells, out_path);
  for (const auto& cell : cells)
    std::cout << cell.cell << ": mean regret " << cell.mean_regret << " [" << cell.min_regret
              << ", " << cell.max_regret << "], mean updates " << cell.mean_updates << "\n";
  return 0;
}

struct EpochRow {
  long epoch;
  bool good_event;
};

int run_verify(const std::string& in_path, const std::string& out_path, int K, int q,
               const std::string& checkpoints_arg) {
  std::ifstream in(in_path);
  if (!in) {
    std::cerr << "verify: cannot open " << in_path << "\n";
    return 1;
  }
  // cell -> replication -> per-epoch good-event flags
  std::map<std::string, std::map<int, std::vector<EpochRow>>> data;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    if (f.size() < 8) continue;
    data[f[0]][std::stoi(f[1])].push_back({std::stol(f[2]), f[5] == "1"});
  }
  if (data.empty()) {
    std::cerr << "verify: no rows in " << in_path << "\n";
    return 1;
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "verify: cannot open " << out_path << "\n";
    return 1;
  }
  out << "cell,epoch,violation_frequency,bound\n";
  out.precision(10);
  for (const auto& [cell, reps] : data) {
    std::vector<std::vector<bool>> flags;
    long horizon = 0;
    for (const auto& [rep, rows] : reps) {
      std::vector<bool> row(rows.size());
      for (const auto& r : rows) {
        if (r.epoch >= 1 && r.epoch <= static_cast<long>(rows.size()))
          row[r.epoch - 1] = r.good_event;
      }
      horizon = std::max(horizon, static_cast<long>(rows.size()));
      flags.push_back(std::move(row));
    }
    std::vector<long> checkpoints;
    if (!checkpoints_arg.empty()) {
      for (const auto& tok : split(checkpoints_arg, ',')) checkpoints.push_back(std::stol(tok));
    } else {
      // geometric checkpoints from (Kq)^2 to the horizon
      for (long t = static_cast<long>(K) * q * K * q; t <= horizon; t *= 2)
        checkpoints.push_back(t);
      if (checkpoints.empty() || checkpoints.back() != horizon) checkpoints.push_back(horizon);
    }
    checkpoints.erase(
        std::remove_if(checkpoints.begin(), checkpoints.end(),
                       [horizon](long t) { return t < 1 || t > horizon; }),
        checkpoints.end());
    if (flags.size() < 2) {
      std::cerr << "verify: cell " << cell << " has fewer than 2 replications, skipped\n";
      continue;
    }
    for (const auto& row : tlb::montecarlo_deviation_check(flags, checkpoints, K))
      out << cell << ',' << row.epoch << ',' << row.violation_frequency << ',' << row.bound
          << '\n';
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teamwork LASSO bandit simulator"};
  app.require_subcommand(1);
  // --h is a model parameter, so help is long-form only
  app.set_help_flag("--help", "Print help");

  tlb::RunConfig config;
  std::string out_path = "results.csv";
  std::string grid_file;
  std::string law = "uniform";
  std::string lambda_mode = "plugin";
  double lambda1 = 0.0;

  auto* sim = app.add_subcommand("simulate", "Run replicated episodes and write CSV logs");
  sim->set_help_flag("--help", "Print help");
  sim->add_option("--d", config.spec.d, "Covariate dimension");
  sim->add_option("--k", config.spec.K, "Number of arms");
  sim->add_option("--n", config.N, "Batch size");
  sim->add_option("--q", config.q, "Teamwork repetitions per arm per round");
  sim->add_option("--decisions", config.total_decisions, "Total user-level decisions");
  sim->add_option("--reps", config.replications, "Replications per cell");
  sim->add_option("--seed", config.seed, "Master seed");
  sim->add_option("--sigma", config.spec.sigma, "Noise scale");
  sim->add_option("--s0", config.spec.s0, "Sparsity per arm");
  sim->add_option("--h", config.spec.h, "Dominance margin");
  sim->add_option("--xmax", config.spec.x_max, "Covariate sup-norm bound");
  sim->add_option("--b", config.spec.b, "L1 bound on arm parameters");
  sim->add_option("--law", law, "Covariate law: uniform | gaussian");
  sim->add_option("--lambda-mode", lambda_mode, "Penalty choice: plugin | paper");
  sim->add_option("--lambda1", lambda1, "Override teamwork-LASSO penalty");
  sim->add_option("--lambda2-scale", config.lambda2_scale, "Scale on the all-LASSO schedule");
  sim->add_flag("--oracle", config.oracle_policy, "Play the oracle policy instead of the agent");
  sim->add_option("--out", out_path, "Output CSV path");
  sim->add_option("--grid", grid_file, "Grid file: key = value lines, comma lists for d/q/n");

  std::string verify_in, verify_out = "deviation.csv", checkpoints;
  int verify_k = 3, verify_q = 1;
  auto* ver = app.add_subcommand("verify", "Monte-Carlo good-event tables from episode CSV");
  ver->set_help_flag("--help", "Print help");
  ver->add_option("--in", verify_in, "Episode CSV from simulate")->required();
  ver->add_option("--out", verify_out, "Output CSV path");
  ver->add_option("--k", verify_k, "Number of arms used in the run");
  ver->add_option("--q", verify_q, "q used in the run");
  ver->add_option("--checkpoints", checkpoints, "Comma list of checkpoint epochs");

  double p_star = 0.3, phi0 = 0.5, c0 = 1.0;
  auto* con = app.add_subcommand("constants", "Print the derived constants for a world");
  con->set_help_flag("--help", "Print help");
  con->add_option("--d", config.spec.d, "Covariate dimension");
  con->add_option("--k", config.spec.K, "Number of arms");
  con->add_option("--s0", config.spec.s0, "Sparsity per arm");
  con->add_option("--sigma", config.spec.sigma, "Noise scale");
  con->add_option("--xmax", config.spec.x_max, "Covariate sup-norm bound");
  con->add_option("--b", config.spec.b, "L1 bound on arm parameters");
  con->add_option("--h", config.spec.h, "Dominance margin");
  con->add_option("--q", config.q, "Teamwork repetitions");
  con->add_option("--n", config.N, "Batch size");
  con->add_option("--p-star", p_star, "Dominance-region mass");
  con->add_option("--phi0", phi0, "Compatibility constant");
  con->add_option("--c0", c0, "Margin-condition constant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      config.spec.covariate_law =
          law == "gaussian" ? tlb::CovariateLaw::truncated_gaussian : tlb::CovariateLaw::uniform_box;
      config.lambda_mode =
          lambda_mode == "paper" ? tlb::LambdaMode::paper : tlb::LambdaMode::plugin;
      if (lambda1 > 0.0) config.lambda1_override = lambda1;
      return run_simulate(config, grid_file, out_path);
    }
    if (ver->parsed()) return run_verify(verify_in, verify_out, verify_k, verify_q, checkpoints);
    if (con->parsed()) {
      const tlb::Constants c =
          tlb::derive_constants(config.spec, config.q, config.N, p_star, phi0, c0);
      std::cout.precision(12);
      std::cout << "c1 = " << c.c1 << "\n"
                << "c2 = " << c.c2 << "\n"
                << "c3 = " << c.c3 << "\n"
                << "c4 = " << c.c4 << "\n"
                << "c5 = " << c.c5 << "\n"
                << "q0 = " << c.q0 << "\n"
                << "lambda1 = " << c.lambda1 << "\n"
                << "phi0 = " << c.phi0 << "\n"
                << "p_star = " << c.p_star << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
