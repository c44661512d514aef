// tsnac: generate scenarios, replay them through the admission engine and
// compare strategies.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tsnac/tsnac.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& strategy, const std::string& out_dir,
            double threshold, std::size_t group_size, bool verify, bool trace) {
  auto kind = tsnac::parse_strategy(strategy);
  if (!kind) throw std::invalid_argument("unknown strategy " + strategy);
  const auto sc = tsnac::scenario_from_json(tsnac::read_json_file(scenario_path));
  tsnac::RunOptions opts;
  opts.strategy = *kind;
  opts.bottleneck_threshold = threshold;
  opts.group_size = group_size;
  opts.verify_each_event = verify;
  opts.gamma_trace = trace;
  const auto m = tsnac::run(sc, opts);
  tsnac::write_run_outputs(out_dir, m, sc, opts);
  std::cout << sc.name << " " << strategy << ": admitted " << m.admitted_total << "/" << m.requests
            << ", first rejection " << (m.first_rejection_index ? std::to_string(*m.first_rejection_index) : "none")
            << ", mean admission " << m.admission_time.mean_s * 1e6 << " us\n";
  return m.invariant_violations == 0 ? 0 : 3;
}

void write_scenario(const tsnac::Scenario& sc, const std::string& out) {
  const auto j = tsnac::to_json(sc);
  if (out.empty() || out == "-") {
    std::cout << j.dump(1) << '\n';
  } else {
    tsnac::write_json_file(out, j);
  }
}

int cmd_compare(const std::string& matrix_path, const std::string& out_dir) {
  const std::filesystem::path mp(matrix_path);
  const auto matrix = tsnac::matrix_from_json(tsnac::read_json_file(matrix_path), mp.parent_path());
  const auto rows = tsnac::compare(matrix);
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "compare.csv";
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  tsnac::write_compare_csv(os, rows);
  std::size_t violations = 0;
  for (const auto& r : rows) violations += r.metrics.invariant_violations;
  std::cout << rows.size() << " rows written to " << path.string() << '\n';
  return violations == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TSN online admission control"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Replay a scenario with one strategy");
  std::string scenario;
  std::string strategy = "adaptive";
  std::string out_dir;
  double threshold = 0.10;
  std::size_t group_size = 50;
  bool verify = false;
  bool trace = false;
  run->add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--strategy", strategy, "adaptive | ep | lp | abp")
      ->check(CLI::IsMember({"adaptive", "ep", "lp", "abp"}));
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--bottleneck-threshold", threshold, "Residual fraction of idSl_max marking a bottleneck port")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--group-size", group_size, "Requests per group")->check(CLI::PositiveNumber);
  run->add_flag("--verify", verify, "Check configuration invariants after every event");
  run->add_flag("--gamma-trace", trace, "Write the per-iteration ratio search trace");

  auto* gen = app.add_subcommand("gen", "Generate a scenario file");
  std::string er;
  std::string realistic;
  std::size_t flows = 1000;
  std::uint64_t seed = 1;
  std::string gen_out;
  auto* er_opt = gen->add_option("--er", er, "sw=..,es=..,p=..,flows=..,seed=..[,classes=..][,k=..]");
  auto* re_opt = gen->add_option("--realistic", realistic, "automotive | space | orion")
                     ->check(CLI::IsMember({"automotive", "space", "orion"}));
  er_opt->excludes(re_opt);
  gen->add_option("--flows", flows, "Number of requests (realistic)");
  gen->add_option("--seed", seed, "Seed (realistic)");
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");

  auto* cmp = app.add_subcommand("compare", "Run a matrix of scenarios and strategies");
  std::string matrix;
  std::string cmp_out;
  cmp->add_option("--matrix", matrix, "Matrix JSON file")->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", cmp_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, strategy, out_dir, threshold, group_size, verify, trace);
    if (*gen) {
      if (!er.empty()) {
        write_scenario(tsnac::make_synthetic_scenario(tsnac::parse_er_spec(er)), gen_out);
      } else if (!realistic.empty()) {
        write_scenario(tsnac::make_realistic_scenario(*tsnac::parse_realistic(realistic), flows, seed), gen_out);
      } else {
        std::cerr << "gen: one of --er or --realistic is required\n";
        return 2;
      }
      return 0;
    }
    if (*cmp) return cmd_compare(matrix, cmp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
