#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tlb/harness.hpp"

using namespace tlb;

namespace {

RunConfig small_config() {
  RunConfig config;
  config.spec.d = 20;
  config.spec.K = 2;
  config.spec.s0 = 3;
  config.spec.sigma = 0.3;
  config.N = 2;
  config.q = 1;
  config.total_decisions = 40;
  config.replications = 2;
  config.seed = 77;
  return config;
}

}  // namespace

TEST_CASE("closed-form update counts") {
  // K (D/(KN) - log2(D/(KN))) evaluated by hand for D = 5000, K = 3
  CHECK(paper_update_count(5000, 1, 3) ==
        doctest::Approx(5000.0 - 3.0 * std::log2(5000.0 / 3.0)).epsilon(1e-12));
  CHECK(paper_update_count(5000, 1, 3) == doctest::Approx(4968.0).epsilon(0.005));
  CHECK(paper_update_count(5000, 4, 3) == doctest::Approx(1224.0).epsilon(0.005));
  CHECK(paper_update_count(5000, 12, 3) == doctest::Approx(396.0).epsilon(0.005));
  CHECK_THROWS(paper_update_count(5, 4, 3));  // D/(KN) < 1
}

TEST_CASE("episodes are deterministic in the seed chain") {
  const RunConfig config = small_config();
  const RegretLog a = run_episode(config, 0);
  const RegretLog b = run_episode(config, 0);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.final_regret == b.final_regret);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].cum_regret == b.records[i].cum_regret);
    CHECK(a.records[i].good_event == b.records[i].good_event);
  }

  const RegretLog c = run_episode(config, 1);
  CHECK(c.final_regret != a.final_regret);
}

TEST_CASE("episode record invariants") {
  const RunConfig config = small_config();
  const RegretLog log = run_episode(config, 0);
  REQUIRE(static_cast<long>(log.records.size()) == config.epochs());
  double prev = 0.0;
  long prev_tw = 0, prev_all = 0;
  for (const auto& rec : log.records) {
    CHECK(static_cast<int>(rec.user_regrets.size()) == config.N);
    for (double r : rec.user_regrets) CHECK(r >= 0.0);
    CHECK(rec.cum_regret >= prev);
    prev = rec.cum_regret;
    CHECK(rec.teamwork_refits >= prev_tw);
    CHECK(rec.all_refits >= prev_all);
    prev_tw = rec.teamwork_refits;
    prev_all = rec.all_refits;
    const EpochMode mode = classify_epoch(TeamworkSchedule{config.spec.K, config.q}, rec.epoch);
    CHECK(rec.teamwork == mode.teamwork);
  }
  CHECK(log.final_regret == doctest::Approx(log.records.back().cum_regret));
  CHECK(log.total_refits == prev_tw + prev_all);
  CHECK(log.total_refits > 0);
}

TEST_CASE("oracle policy has zero regret and never refits") {
  RunConfig config = small_config();
  config.oracle_policy = true;
  const RegretLog log = run_episode(config, 0);
  CHECK(log.final_regret == 0.0);
  CHECK(log.total_refits == 0);
  for (const auto& rec : log.records) CHECK(rec.cum_regret == 0.0);
}

TEST_CASE("invalid configurations throw") {
  RunConfig config = small_config();
  config.total_decisions = 41;  // not divisible by N = 2
  CHECK_THROWS(run_episode(config, 0));
}

TEST_CASE("episode artifacts expose the final state") {
  const RunConfig config = small_config();
  EpisodeArtifacts artifacts;
  run_episode(config, 0, &artifacts);
  REQUIRE(static_cast<int>(artifacts.params.betas.size()) == config.spec.K);
  long total = 0;
  for (int k = 0; k < config.spec.K; ++k)
    total += static_cast<long>(artifacts.agent.teamwork_sets[k].entries.size() +
                               artifacts.agent.selfish_sets[k].entries.size());
  CHECK(total == config.total_decisions);
  CHECK(artifacts.agent.current_epoch == config.epochs());
}

TEST_CASE("paper lambda mode records probe estimates") {
  RunConfig config = small_config();
  config.lambda_mode = LambdaMode::paper;
  config.probe_m = 1500;
  config.cone_samples = 30;
  const RegretLog log = run_episode(config, 0);
  CHECK(log.p_star_hat >= 0.0);
  CHECK(log.p_star_hat <= 1.0);
  CHECK(log.phi0_hat > 0.0);
}

TEST_CASE("grid runs aggregate per cell") {
  const RunConfig base = small_config();
  GridSpec grid;
  grid.d_values = {20};
  grid.q_values = {1};
  grid.n_values = {2, 4};
  const auto cells = run_grid(base, grid);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].cell == "d20_q1_N2");
  CHECK(cells[1].cell == "d20_q1_N4");
  for (const auto& cell : cells) {
    REQUIRE(static_cast<int>(cell.logs.size()) == base.replications);
    double sum = 0.0, lo = cell.logs[0].final_regret, hi = lo;
    for (const auto& log : cell.logs) {
      sum += log.final_regret;
      lo = std::min(lo, log.final_regret);
      hi = std::max(hi, log.final_regret);
    }
    CHECK(cell.mean_regret == doctest::Approx(sum / base.replications));
    CHECK(cell.min_regret == doctest::Approx(lo));
    CHECK(cell.max_regret == doctest::Approx(hi));
    CHECK(cell.min_regret <= cell.mean_regret);
    CHECK(cell.mean_regret <= cell.max_regret);
  }
  GridSpec empty;
  CHECK_THROWS(run_grid(base, empty));
}

TEST_CASE("csv output schema") {
  RunConfig base = small_config();
  base.replications = 2;
  GridSpec grid;
  grid.d_values = {20};
  grid.q_values = {1};
  grid.n_values = {2};
  const auto cells = run_grid(base, grid);

  const std::string path = "harness_test_out.csv";
  write_csv(cells, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "cell,replication,epoch,mode,cum_regret,good_event,teamwork_refits,all_refits");
  long rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == base.replications * base.epochs());

  std::ifstream sum("harness_test_out_summary.csv");
  REQUIRE(sum.good());
  std::getline(sum, header);
  CHECK(header == "cell,mean_regret,min_regret,max_regret,mean_updates");
  rows = 0;
  while (std::getline(sum, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 1);

  std::remove(path.c_str());
  std::remove("harness_test_out_summary.csv");
}

TEST_CASE("good event matrix shape") {
  const RunConfig config = small_config();
  std::vector<RegretLog> logs = {run_episode(config, 0), run_episode(config, 1)};
  const auto flags = good_event_matrix(logs);
  REQUIRE(flags.size() == 2);
  for (const auto& row : flags) CHECK(static_cast<long>(row.size()) == config.epochs());
}
