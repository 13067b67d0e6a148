#include "dtopsc/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "dtopsc/parallel.hpp"
#include "json.hpp"

namespace dtopsc {

PolicyConfig PolicyConfig::myopic() {
  PolicyConfig p;
  p.mode = PolicyMode::Myopic;
  p.scenarios = 1;
  p.virtuals = 0;
  return p;
}

void PolicyConfig::validate() const {
  if (scenarios < 1) throw std::invalid_argument("scenarios must be >= 1");
  if (virtuals < 0) throw std::invalid_argument("virtuals must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
  if (mode == PolicyMode::Myopic && (scenarios != 1 || virtuals != 0)) {
    throw std::invalid_argument("myopic policy uses one scenario and no virtual tasks");
  }
  alns.validate();
  alns_init.validate();
}

std::uint64_t scenario_seed(std::uint64_t run_seed, std::uint64_t epoch, std::uint64_t scenario) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(run_seed) ^ epoch) ^ scenario);
}

int pool_size(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("DTOPSC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

namespace {

std::vector<Assignment> to_full(const Snapshot& snap, std::span<const WorkerTask> pairs) {
  std::vector<Assignment> out;
  out.reserve(pairs.size());
  for (const auto& [w, i] : pairs) out.emplace_back(snap.worker_source[w], snap.task_source[i]);
  return out;
}

}  // namespace

std::vector<Assignment> epoch_decision(const DynamicState& state, const Instance& inst, const PolicyConfig& policy,
                                       std::span<const int> idle, std::span<const int> kept, int epoch, bool initial,
                                       EpochDiagnostics* diag) {
  const Snapshot snap = build_snapshot(state, inst, idle, kept);
  const auto epoch_key = static_cast<std::uint64_t>(epoch);

  if (initial || policy.mode == PolicyMode::Myopic) {
    AlnsConfig cfg = initial ? policy.alns_init : policy.alns;
    cfg.seed = scenario_seed(policy.seed, epoch_key, 0);
    const Plan plan = alns_solve(snap.instance, cfg);
    std::vector<WorkerTask> first;
    for (const auto& r : plan.routes) {
      if (r.num_tasks() > 0) first.emplace_back(r.worker, r.nodes[1]);
    }
    auto decision = to_full(snap, first);
    if (diag) {
      diag->initial = initial;
      diag->threshold = 1;
      for (const auto& a : decision) diag->frequencies.push_back({a, 1});
      diag->decision = decision;
    }
    return decision;
  }

  const int S = policy.scenarios;
  std::vector<ScenarioCandidates> candidates(S);
  parallel_for(S, pool_size(policy.parallelism), [&](int s) {
    const auto seed = scenario_seed(policy.seed, epoch_key, static_cast<std::uint64_t>(s));
    // Virtual sampling draws from its own stream so N_vir does not perturb the solver seed.
    Rng sampler(seed ^ 0x5bd1e9955bd1e995ULL);
    const auto virtuals = sample_virtual_tasks(state, inst, policy.virtuals, sampler);
    const Snapshot aug = build_augmented_instance(snap, virtuals);
    AlnsConfig cfg = policy.alns;
    cfg.seed = seed;
    const Plan plan = alns_solve(aug.instance, cfg);
    candidates[s] = extract_candidates(plan, aug, s);
  });

  const auto freq = compute_frequencies(candidates);
  const int threshold = theta_min(policy.alpha, S);
  const auto decision = select_dispatch(freq, threshold, snap.instance);
  auto out = to_full(snap, decision.pairs);
  if (diag) {
    diag->threshold = threshold;
    for (const auto& [pair, count] : freq) {
      diag->frequencies.push_back({{snap.worker_source[pair.first], snap.task_source[pair.second]}, count});
    }
    diag->decision = out;
  }
  return out;
}

RunRecord simulate(const Instance& inst, const PolicyConfig& policy, const EpochObserver& observer) {
  policy.validate();
  if (const auto report = validate_instance(inst); report.has_fatal()) {
    std::string msg = "invalid instance:";
    for (const auto& v : report.violations) {
      if (v.severity == Severity::Fatal) msg += " [" + v.subject + ": " + v.message + "]";
    }
    throw std::invalid_argument(msg);
  }

  DynamicState state = initial_state(inst);
  EventQueue queue = initial_events(inst);
  RunRecord run;
  run.total_tasks = inst.num_tasks();
  int epoch = 0;

  while (!queue.empty()) {
    advance_to_next_event(state, queue, inst);
    while (!queue.empty() && queue.top().time == state.now) advance_to_next_event(state, queue, inst);

    if (state.now < inst.horizon) {
      const auto idle = idle_workers(state, inst);
      if (!idle.empty() && !state.available.empty()) {
        const auto screened = prescreen(state, inst, idle);
        if (!screened.kept.empty()) {
          const bool initial = epoch == 0 && state.now == 0.0;
          EpochDiagnostics diag;
          diag.epoch = epoch;
          diag.time = state.now;
          const auto t0 = std::chrono::steady_clock::now();
          const auto decision = epoch_decision(state, inst, policy, idle, screened.kept, epoch, initial,
                                               observer ? &diag : nullptr);
          const auto t1 = std::chrono::steady_clock::now();
          run.epoch_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
          commit_dispatch(state, queue, inst, decision);
          if (observer) observer(diag);
          ++epoch;
        }
      }
      apply_forced_returns(state, queue, inst);
    } else {
      finish_horizon(state, inst);
      break;
    }
  }
  run.epochs = epoch;
  run.log = state.log;

  run.final_arrival.assign(inst.workers.size(), -1.0);
  run.trajectories.resize(inst.workers.size());
  for (int w = 0; w < inst.num_workers(); ++w) {
    const auto& ws = state.workers[w];
    run.trajectories[w] = ws.executed;
    if (ws.phase == Phase::Finished) run.final_arrival[w] = ws.executed.back().time;
    for (const auto& v : ws.executed) {
      if (v.node < inst.num_tasks()) {
        const auto& t = inst.tasks[v.node];
        run.served.push_back({t.id, inst.workers[w].id, v.time, t.profit});
      }
    }
  }
  std::sort(run.served.begin(), run.served.end(), [](const ServiceRecord& a, const ServiceRecord& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.worker_id < b.worker_id;
  });
  for (const auto& s : run.served) run.total_profit += s.profit;
  return run;
}

bool same_outcome(const RunRecord& a, const RunRecord& b) {
  if (a.total_profit != b.total_profit || a.served != b.served || a.log != b.log) return false;
  if (a.final_arrival != b.final_arrival || a.epochs != b.epochs || a.total_tasks != b.total_tasks) return false;
  if (a.trajectories.size() != b.trajectories.size()) return false;
  for (std::size_t w = 0; w < a.trajectories.size(); ++w) {
    const auto& x = a.trajectories[w];
    const auto& y = b.trajectories[w];
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k].node != y[k].node || x[k].time != y[k].time) return false;
    }
  }
  return true;
}

std::string serialize_run(const RunRecord& run, const std::string& instance_name, const std::string& policy,
                          std::uint64_t seed) {
  using nlohmann::json;
  json doc;
  doc["instance"] = instance_name;
  doc["policy"] = policy;
  doc["seed"] = seed;
  doc["total_profit"] = run.total_profit;
  doc["total_tasks"] = run.total_tasks;
  doc["epochs"] = run.epochs;
  doc["served"] = json::array();
  for (const auto& s : run.served) {
    doc["served"].push_back({{"task", s.task_id}, {"worker", s.worker_id}, {"start", s.start}, {"profit", s.profit}});
  }
  doc["epoch_ms"] = run.epoch_ms;
  doc["final_arrival"] = run.final_arrival;
  doc["event_log"] = format_log(run.log);
  return doc.dump(2);
}

}  // namespace dtopsc
