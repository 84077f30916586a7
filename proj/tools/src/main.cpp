#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "rebalance/bnb.hpp"
#include "rebalance/generator.hpp"
#include "rebalance/graph.hpp"
#include "rebalance/heuristics.hpp"
#include "rebalance/instance.hpp"
#include "rebalance/model.hpp"
#include "rebalance/mps.hpp"
#include "rebalance/render.hpp"
#include "rebalance/solution_io.hpp"
#include "rebalance/sweep.hpp"

namespace {

using namespace rebalance;

Mode parse_mode(const std::string& mode) {
  return mode == "non-myopic" ? Mode::NonMyopic : Mode::Myopic;
}

uint64_t seed_or_env(const std::optional<uint64_t>& seed) {
  if (seed) return *seed;
  if (const char* env = std::getenv("REBALANCE_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

void write_text_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

// Per-family / per-kind summary of an assembled model.
void print_model_summary(const MilpModel& model) {
  static const char* kKinds[] = {"assignment", "server-slot", "arc-flow", "ladder-path"};
  long long by_kind[4] = {};
  for (const Column& c : model.cols()) ++by_kind[static_cast<int>(c.kind)];
  std::cout << "variables " << model.num_cols() << "\n";
  for (int k = 0; k < 4; ++k)
    if (by_kind[k] > 0) std::cout << "  " << kKinds[k] << " " << by_kind[k] << "\n";

  std::unordered_map<int, long long> by_family;
  for (const Row& r : model.rows()) ++by_family[static_cast<int>(r.family)];
  std::cout << "constraints " << model.num_rows() << "\n";
  for (int f = 0; f < 12; ++f)
    if (by_family.count(f))
      std::cout << "  " << row_family_name(static_cast<RowFamily>(f)) << " " << by_family[f]
                << "\n";
  std::cout << "nonzeros " << model.num_nonzeros() << "\n";
}

SolutionRecord record_from_search(const MilpModel& model, const PlacementSearchResult& search,
                                  Mode mode, const std::string& method, bool exhaustive) {
  MilpResult res;
  if (search.feasible) {
    res.status = SolveStatus::Optimal;  // placeholder; status string set below
    res.objective = search.objective;
    res.bound = exhaustive ? search.objective : 0.0;
    res.x = search.x;
  }
  SolutionRecord rec = make_record(model, res, mode, method);
  if (exhaustive)
    rec.status = search.feasible ? "optimal" : "infeasible";
  else
    rec.status = search.feasible ? "feasible" : "unknown";
  if (!search.feasible) {
    rec.objective = 0.0;
    rec.bound = 0.0;
  }
  return rec;
}

int cmd_generate(const GeneratorConfig& config, const std::string& output) {
  const Instance inst = generate_instance(config);
  save_instance_file(inst, output);
  std::cout << "wrote " << output << " (nodes=" << inst.node_count << " levels=" << inst.levels
            << " stations=" << inst.stations.size() << " fleet=" << inst.total_vehicles()
            << " seed=" << config.seed << ")\n";
  return 0;
}

int cmd_counts(std::vector<long long> sizes, const std::string& instance_path, Mode mode) {
  if (!instance_path.empty()) {
    const Instance inst = load_instance_file(instance_path);
    print_model_summary(assemble_model(inst, mode));
    return 0;
  }
  if (sizes.empty()) sizes = {10, 50, 100, 200, 400, 800, 1000};
  const GeneratorConfig defaults;
  const int h = defaults.levels, j = defaults.stations, c = defaults.max_servers;
  for (long long n : sizes) {
    const long long arcs = 2 * (n - 1) * h + static_cast<long long>(j) * (h - 1);
    std::cout << "N=" << n << " variables="
              << count_variables(static_cast<int>(n), h, arcs, j, c) << " constraints="
              << count_constraints(static_cast<int>(n), h, j, c, defaults.fleet, mode) << "\n";
  }
  return 0;
}

int cmd_build(const std::string& instance_path, const std::string& output, Mode mode) {
  const Instance inst = load_instance_file(instance_path);
  const MilpModel model = assemble_model(inst, mode);
  std::ostringstream mps;
  write_mps(mps, model);
  write_text_file(output, mps.str());
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& method, Mode mode,
              const std::string& output, const BnbOptions& base_options, bool verbose) {
  const Instance inst = load_instance_file(instance_path);
  const MilpModel model = assemble_model(inst, mode);

  SolutionRecord rec;
  if (method == "exact") {
    BnbOptions options = base_options;
    if (verbose) options.log = [](const std::string& msg) { std::cerr << msg << "\n"; };
    const PlacementSearchResult warm = greedy_place(inst, model, mode);
    if (warm.feasible) options.incumbent = warm.x;
    rec = make_record(model, solve_milp(model, options), mode, method);
  } else if (method == "greedy") {
    rec = record_from_search(model, greedy_place(inst, model, mode), mode, method, false);
  } else {  // brute
    rec = record_from_search(model, brute_force(inst, model, mode), mode, method, true);
  }

  std::cout << "status=" << rec.status << " objective=" << rec.objective
            << " bound=" << rec.bound << " wall_seconds=" << rec.wall_seconds
            << " nodes=" << rec.nodes_explored << "\n";
  if (!output.empty()) save_solution_file(output, rec);
  return rec.status == "infeasible" || rec.status == "unknown" ? 1 : 0;
}

int cmd_sweep(const std::string& instance_path, const std::string& kind,
              const std::vector<double>& values, Mode mode, int threads,
              const std::string& output, const BnbOptions& bnb) {
  for (size_t k = 1; k < values.size(); ++k) {
    const bool up = values[1] > values[0];
    if ((up && values[k] <= values[k - 1]) || (!up && values[k] >= values[k - 1]))
      throw CLI::ValidationError("--values", "value list must be strictly monotone");
  }
  const Instance inst = load_instance_file(instance_path);
  SweepOptions options;
  options.kind = kind == "capacity" ? SweepKind::StationCapacity : SweepKind::ServiceRate;
  options.values = values;
  options.mode = mode;
  options.threads = threads;
  options.bnb = bnb;
  write_text_file(output, sweep_csv(run_sweep(inst, options)));
  return 0;
}

int cmd_render(const std::string& instance_path, const std::string& solution_path,
               const std::string& output) {
  const Instance inst = load_instance_file(instance_path);
  const NodeChargeGraph graph = build_graph(inst);
  if (solution_path.empty()) {
    write_text_file(output, render_dot(inst, graph));
    return 0;
  }
  const SolutionRecord rec = load_solution_file(solution_path);
  const MilpModel model = assemble_model(inst, parse_mode(rec.mode));
  std::unordered_map<std::string, int> col_of;
  for (int c = 0; c < model.num_cols(); ++c) col_of[model.col_name(c)] = c;
  std::vector<double> x(static_cast<size_t>(model.num_cols()), 0.0);
  for (const auto& [name, value] : rec.nonzeros) {
    const auto it = col_of.find(name);
    if (it == col_of.end()) throw std::runtime_error("solution names unknown column: " + name);
    x[static_cast<size_t>(it->second)] = value;
  }
  write_text_file(output, render_dot(inst, graph, &model, &x));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Idle electric-vehicle rebalancing: generator, model builder, exact and "
               "heuristic solvers, experiment sweeps"};
  app.require_subcommand(1);
  int rc = 0;

  // generate
  auto* generate = app.add_subcommand("generate", "Write a synthetic line-city instance");
  GeneratorConfig config;
  std::optional<uint64_t> seed;
  std::string gen_output;
  generate->add_option("-o,--output", gen_output, "Instance JSON path")->required();
  generate->add_option("-N,--nodes", config.nodes, "Zone count");
  generate->add_option("--levels", config.levels, "Charge levels");
  generate->add_option("--stations", config.stations, "Charging station count");
  generate->add_option("--station-capacity", config.station_capacity, "Chargers per station");
  generate->add_option("--fleet", config.fleet, "Idle vehicles to scatter");
  generate->add_option("--max-servers", config.max_servers, "Server slots per node-charge");
  generate->add_option("--theta", config.theta, "Repositioning cost weight");
  generate->add_option("--big-m", config.big_m, "Imbalance link constant");
  generate->add_option("--charge-per-level", config.charge_per_level, "Battery fraction per level");
  generate->add_option("--mu-multiplier", config.mu_multiplier, "Service rate = multiplier * nodes");
  generate->add_option("--charging-cost", config.charging_arc_cost, "Cost of one charging step");
  generate->add_option("--rho", config.rho, "Explicit intensity table");
  generate->add_option("--seed", seed, "RNG seed (default: $REBALANCE_SEED, then 0)");
  generate->callback([&] {
    config.seed = seed_or_env(seed);
    rc = cmd_generate(config, gen_output);
  });

  // counts
  auto* counts = app.add_subcommand("counts", "Model size table / per-family summary");
  std::vector<long long> sizes;
  std::string counts_instance, counts_mode = "myopic";
  counts->add_option("-N,--nodes", sizes, "Zone counts for the closed-form table");
  counts->add_option("--instance", counts_instance, "Assemble this instance and summarize");
  counts->add_option("--mode", counts_mode, "myopic|non-myopic")
      ->check(CLI::IsMember({"myopic", "non-myopic"}));
  counts->callback([&] { rc = cmd_counts(sizes, counts_instance, parse_mode(counts_mode)); });

  // build
  auto* build = app.add_subcommand("build", "Assemble the model and export it");
  std::string build_instance, build_output = "-", build_format = "mps", build_mode = "myopic";
  build->add_option("--instance", build_instance, "Instance JSON path")->required();
  build->add_option("-o,--output", build_output, "Output path ('-' for stdout)");
  build->add_option("--format", build_format, "Export format")->check(CLI::IsMember({"mps"}));
  build->add_option("--mode", build_mode, "myopic|non-myopic")
      ->check(CLI::IsMember({"myopic", "non-myopic"}));
  build->callback([&] { rc = cmd_build(build_instance, build_output, parse_mode(build_mode)); });

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  std::string solve_instance, solve_output, solve_mode = "myopic", solve_method = "exact";
  BnbOptions bnb;
  bool verbose = false;
  solve->add_option("--instance", solve_instance, "Instance JSON path")->required();
  solve->add_option("--mode", solve_mode, "myopic|non-myopic")
      ->check(CLI::IsMember({"myopic", "non-myopic"}));
  solve->add_option("--method", solve_method, "exact|greedy|brute")
      ->check(CLI::IsMember({"exact", "greedy", "brute"}));
  solve->add_option("-o,--output", solve_output, "Solution JSON path");
  solve->add_option("--time-limit", bnb.time_limit_seconds, "Seconds, 0 = none");
  solve->add_option("--node-limit", bnb.node_limit, "Branch-and-bound node limit");
  solve->add_flag("--no-relax-slots", [&bnb](size_t) { bnb.relax_server_slots = false; },
                  "Always branch on server-slot variables");
  solve->add_flag("-v,--verbose", verbose, "Log solver progress to stderr");
  solve->callback([&] {
    rc = cmd_solve(solve_instance, solve_method, parse_mode(solve_mode), solve_output, bnb,
                   verbose);
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Re-solve across a parameter range, emit CSV");
  std::string sweep_instance, sweep_output = "-", sweep_kind = "capacity",
              sweep_mode = "myopic";
  std::vector<double> sweep_values;
  int threads = 1;
  sweep->add_option("--instance", sweep_instance, "Instance JSON path")->required();
  sweep->add_option("--kind", sweep_kind, "capacity (station slots) | mu (service rate)")
      ->check(CLI::IsMember({"capacity", "mu"}));
  sweep->add_option("--values", sweep_values, "Comma-separated parameter values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--mode", sweep_mode, "myopic|non-myopic")
      ->check(CLI::IsMember({"myopic", "non-myopic"}));
  sweep->add_option("--threads", threads, "Concurrent solves");
  sweep->add_option("-o,--output", sweep_output, "CSV path ('-' for stdout)");
  sweep->add_option("--time-limit", bnb.time_limit_seconds, "Per-point seconds, 0 = none");
  sweep->callback([&] {
    rc = cmd_sweep(sweep_instance, sweep_kind, sweep_values, parse_mode(sweep_mode), threads,
                   sweep_output, bnb);
  });

  // render
  auto* render = app.add_subcommand("render", "Graphviz view of an instance or solution");
  std::string render_instance, render_solution, render_output = "-";
  render->add_option("--instance", render_instance, "Instance JSON path")->required();
  render->add_option("--solution", render_solution, "Solution JSON path");
  render->add_option("-o,--output", render_output, "DOT path ('-' for stdout)");
  render->callback([&] { rc = cmd_render(render_instance, render_solution, render_output); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
