#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcs/pipeline.hpp"

namespace {

mcs::ScoreWeights parse_weights(const std::string& csv) {
  std::vector<double> values;
  std::string tok;
  std::istringstream in(csv);
  while (std::getline(in, tok, ',')) values.push_back(std::stod(tok));
  if (values.size() != 3) {
    throw CLI::ValidationError("--weights", "expected three comma-separated values, e.g. 1,1,1");
  }
  return {values[0], values[1], values[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowdsourced-sensor trajectory clustering for transit vehicle tracking"};
  app.require_subcommand(1);

  // generate
  mcs::GenerateOptions gen;
  auto* generate = app.add_subcommand(
      "generate", "Simulate crowdsourced sensor pings from a transit schedule");
  generate->add_option("schedule", gen.schedule_path, "Schedule file")->required();
  generate->add_option("-o,--out", gen.pings_out, "Ping table output path")->required();
  generate->add_option("--truth-out", gen.truth_out, "Ground-truth vehicle states output path");
  generate->add_option("--sensors-per-segment", gen.sim.sensors_per_segment,
                       "Simulated sensors per route segment");
  generate->add_option("--jitter", gen.sim.position_jitter,
                       "Positional jitter std-dev, coordinate units");
  generate->add_option("--ping-interval", gen.sim.ping_interval_s, "Ping interval, seconds");
  generate->add_option("--noise-fraction", gen.sim.off_route_fraction,
                       "Off-route wanderers as a fraction of the on-route sensor count");
  generate->add_option("--seed", gen.sim.rng_seed, "RNG seed");

  // cluster
  mcs::ClusterOptions clu;
  std::string weights_csv;
  std::string prefilter_mode = "all";
  auto* cluster =
      app.add_subcommand("cluster", "Cluster a ping table into per-slot vehicle candidates");
  cluster->add_option("pings", clu.pings_path, "Ping table input")->required();
  cluster->add_option("-o,--out", clu.clusters_out, "Clusters output path")->required();
  cluster->add_option("--epsilon", clu.params.epsilon, "Neighborhood distance threshold");
  cluster->add_option("--min-s", clu.params.min_segments, "Minimum neighborhood cardinality");
  cluster->add_option("--weights", weights_csv, "Score weights w1,w2,w3");
  cluster->add_option("--delta-t", clu.params.delta_t,
                      "Slot width in seconds (0 derives the ping interval from the data)");
  cluster->add_option("--t0", clu.t0, "Slot grid origin, seconds");
  cluster->add_option("--schedule", clu.schedule_path,
                      "Schedule file; enables the route-buffer prefilter");
  cluster->add_option("--radius-m", clu.radius_m, "Prefilter buffer radius, meters");
  cluster->add_option("--prefilter-mode", prefilter_mode, "Prefilter mode: all | per-ping")
      ->check(CLI::IsMember({"all", "per-ping"}));
  cluster->add_option("--format", clu.format, "Clusters output format: text | json")
      ->check(CLI::IsMember({"text", "json"}));

  // evaluate
  mcs::EvaluateOptions eval;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score a clusters file against ground truth and emit a report");
  evaluate->add_option("--clusters", eval.clusters_path, "Clusters file")->required();
  evaluate->add_option("--pings", eval.pings_path, "Ping table the clusters were built from")
      ->required();
  evaluate->add_option("--truth", eval.truth_path, "Ground-truth vehicle states")->required();
  evaluate->add_option("--schedule", eval.schedule_path,
                       "Schedule file; enables vehicle tracking output");
  evaluate->add_option("--report", eval.report_out, "Machine-readable JSON report output path");
  evaluate->add_option("--series", eval.series_out, "Per-slot CSV series output path");
  evaluate->add_option("--assign-gate", eval.tracking.assignment_gate,
                       "Service assignment distance gate, coordinate units");
  evaluate->add_option("--assoc-gate", eval.tracking.association_gate,
                       "Cross-slot association distance gate, coordinate units");
  evaluate->add_option("--max-missed", eval.tracking.max_missed_slots,
                       "Slots a track may miss before it expires");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    return mcs::cmd_generate(gen, std::cout, std::cerr);
  }
  if (cluster->parsed()) {
    if (!weights_csv.empty()) {
      try {
        clu.params.weights = parse_weights(weights_csv);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
      }
    }
    clu.prefilter_mode = prefilter_mode == "per-ping" ? mcs::PrefilterMode::kPerPing
                                                      : mcs::PrefilterMode::kWholeTrajectories;
    return mcs::cmd_cluster(clu, std::cout, std::cerr);
  }
  return mcs::cmd_evaluate(eval, std::cout, std::cerr);
}
