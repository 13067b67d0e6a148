// Command-line front end: instance generation, static and dynamic solves,
// the exact oracle, LP export and result tables.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dtopsc/alns.hpp"
#include "dtopsc/generator.hpp"
#include "dtopsc/harness.hpp"
#include "dtopsc/io.hpp"
#include "dtopsc/oracle.hpp"
#include "dtopsc/simulator.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dtopsc;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string family_slug(const std::string& family) {
  std::string s;
  for (const char c : family) {
    if (std::isalnum(static_cast<unsigned char>(c))) s += c;
    else if (c == ',') s += 'x';
  }
  return s;
}

void print_plan(const Instance& inst, const Plan& plan) {
  for (const auto& r : plan.routes) {
    std::printf("worker %d:", inst.workers[r.worker].id);
    for (std::size_t k = 1; k + 1 < r.nodes.size(); ++k) {
      std::printf(" %d@%.3f", inst.tasks[r.nodes[k]].id, r.start_times[k]);
    }
    std::printf("  (arrive %.3f)\n", r.arrival());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic team orienteering with scenario-sampling lookahead"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate instances of a family");
  std::string family = "base", out_dir = ".", coords_file;
  int count = 1;
  std::uint64_t gen_seed = 1;
  gen->add_option("--family", family, "base|short|long|tight|loose|narrow|wide|scale(M,N)");
  gen->add_option("--count", count)->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", out_dir);
  gen->add_option("--coords", coords_file, "x y coordinate file (default: bundled sample)");

  // solve-static
  auto* solve = app.add_subcommand("solve-static", "Solve the instance as a static problem with ALNS");
  std::string instance_file, config_file;
  int iters = 1000;
  std::uint64_t solve_seed = 1;
  solve->add_option("--instance", instance_file)->required();
  solve->add_option("--iters", iters)->check(CLI::PositiveNumber);
  solve->add_option("--seed", solve_seed);
  solve->add_option("--config", config_file, "key = value ALNS parameter file");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the rolling-horizon policy");
  std::string policy_name = "scenario", sim_out, diag_file;
  PolicyConfig policy;
  sim->add_option("--instance", instance_file)->required();
  sim->add_option("--policy", policy_name)->check(CLI::IsMember({"myopic", "scenario"}));
  sim->add_option("--scenarios", policy.scenarios)->check(CLI::PositiveNumber);
  sim->add_option("--virtuals", policy.virtuals)->check(CLI::NonNegativeNumber);
  sim->add_option("--alpha", policy.alpha);
  sim->add_option("--seed", policy.seed);
  sim->add_option("--parallel", policy.parallelism, "concurrent scenario solves (0 = hardware)");
  sim->add_option("--config", config_file, "key = value ALNS parameter file for epoch solves");
  sim->add_option("--out", sim_out, "run record JSON (default stdout)");
  sim->add_option("--diagnostics", diag_file, "per-epoch frequency maps as JSON lines");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exact optimum of a small static instance");
  OracleLimits limits;
  orc->add_option("--instance", instance_file)->required();
  orc->add_option("--max-tasks", limits.max_tasks);
  orc->add_option("--max-workers", limits.max_workers);
  orc->add_option("--time-budget", limits.time_budget_s, "seconds");

  // export-mip
  auto* mip = app.add_subcommand("export-mip", "Write the static model in LP format");
  std::string lp_out;
  mip->add_option("--instance", instance_file)->required();
  mip->add_option("--out", lp_out);

  // report
  auto* rep = app.add_subcommand("report", "Tabulate serialized runs against reference values");
  std::string runs_dir, refs_file, table_out;
  rep->add_option("--runs", runs_dir)->required()->check(CLI::ExistingDirectory);
  rep->add_option("--refs", refs_file)->check(CLI::ExistingFile);
  rep->add_option("--out", table_out);

  // batch
  auto* bat = app.add_subcommand("batch", "Generate, simulate and tabulate in one pass");
  std::vector<std::string> families{"base"};
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> policies{"myopic", "scenario"};
  BatchSpec spec;
  bool no_timings = false;
  bat->add_option("--families", families);
  bat->add_option("--count", spec.instances_per_family)->check(CLI::PositiveNumber);
  bat->add_option("--instance-seed", spec.instance_seed);
  bat->add_option("--seeds", seeds);
  bat->add_option("--policies", policies)->check(CLI::IsMember({"myopic", "scenario"}));
  bat->add_option("--parallel", spec.parallelism);
  bat->add_option("--refs", refs_file)->check(CLI::ExistingFile);
  bat->add_option("--out", table_out);
  bat->add_flag("--no-timings", no_timings, "leave wall-clock columns empty");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto cfg = family_config(family);
      const auto coords = coords_file.empty() ? default_coordinates() : load_coordinates(coords_file);
      fs::create_directories(out_dir);
      for (int k = 0; k < count; ++k) {
        cfg.seed = gen_seed + static_cast<std::uint64_t>(k);
        const Instance inst = generate_instance(cfg, coords);
        const auto path = fs::path(out_dir) / (family_slug(family) + "." + std::to_string(k) + ".json");
        save_instance(inst, path);
        std::cout << path.string() << "\n";
      }
    } else if (*solve) {
      const Instance inst = load_instance(instance_file);
      AlnsConfig cfg = config_file.empty() ? AlnsConfig{} : load_alns_config(config_file);
      if (!solve->get_option("--iters")->empty() || config_file.empty()) cfg.iterations = iters;
      cfg.seed = solve_seed;
      const auto t0 = std::chrono::steady_clock::now();
      const Plan plan = alns_solve(inst, cfg);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      std::printf("profit %.6f  served %zu/%d  travel %.3f  time %.3fs\n", plan.profit, plan.routed_count(),
                  inst.num_tasks(), plan_travel(plan), dt.count());
      print_plan(inst, plan);
    } else if (*sim) {
      const Instance inst = load_instance(instance_file);
      const auto seed = policy.seed;
      if (policy_name == "myopic") {
        const int par = policy.parallelism;
        policy = PolicyConfig::myopic();
        policy.seed = seed;
        policy.parallelism = par;
      }
      if (!config_file.empty()) {
        const int epoch_iters = policy.alns.iterations;
        policy.alns = load_alns_config(config_file, policy.alns);
        if (policy.alns.iterations <= 0) policy.alns.iterations = epoch_iters;
      }
      std::ofstream diag;
      EpochObserver observer;
      if (!diag_file.empty()) {
        diag.open(diag_file);
        observer = [&](const EpochDiagnostics& d) {
          nlohmann::json j;
          j["epoch"] = d.epoch;
          j["time"] = d.time;
          j["initial"] = d.initial;
          j["threshold"] = d.threshold;
          j["frequencies"] = nlohmann::json::array();
          for (const auto& [a, c] : d.frequencies) {
            j["frequencies"].push_back({{"worker", inst.workers[a.first].id}, {"task", inst.tasks[a.second].id}, {"count", c}});
          }
          j["dispatch"] = nlohmann::json::array();
          for (const auto& a : d.decision) {
            j["dispatch"].push_back({{"worker", inst.workers[a.first].id}, {"task", inst.tasks[a.second].id}});
          }
          diag << j.dump() << "\n";
        };
      }
      const auto t0 = std::chrono::steady_clock::now();
      const RunRecord run = simulate(inst, policy, observer);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      auto doc = nlohmann::json::parse(serialize_run(run, fs::path(instance_file).stem().string(), policy_name, seed));
      doc["wall_s"] = dt.count();
      write_text(sim_out, doc.dump(2) + "\n");
      std::fprintf(stderr, "profit %.6f  served %zu/%d  epochs %d  wall %.2fs\n", run.total_profit, run.served.size(),
                   run.total_tasks, run.epochs, dt.count());
    } else if (*orc) {
      const Instance inst = load_instance(instance_file);
      const auto res = exact_solve(inst, limits);
      std::printf("optimal profit %.6f  (%llu search nodes)\n", res.optimal_profit,
                  static_cast<unsigned long long>(res.nodes));
      print_plan(inst, res.optimal_plan);
    } else if (*mip) {
      write_text(lp_out, export_mip(load_instance(instance_file)));
    } else if (*rep) {
      const auto refs = refs_file.empty() ? ReferenceTable{} : load_references(refs_file);
      write_text(table_out, write_csv(collect_runs(runs_dir, refs)));
    } else if (*bat) {
      spec.families = families;
      spec.seeds = seeds;
      for (const auto& p : policies) spec.policies.emplace_back(p, p == "myopic" ? PolicyConfig::myopic() : PolicyConfig{});
      const auto refs = refs_file.empty() ? ReferenceTable{} : load_references(refs_file);
      write_text(table_out, write_csv(run_batch(spec, refs), {.timings = !no_timings}));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
