#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dtopsc/alns.hpp"
#include "dtopsc/dynamics.hpp"
#include "dtopsc/lookahead.hpp"
#include "dtopsc/model.hpp"

namespace dtopsc {

enum class PolicyMode { Myopic, Scenario };

struct PolicyConfig {
  PolicyMode mode = PolicyMode::Scenario;
  int scenarios = 15;
  int virtuals = 5;
  double alpha = 0.2;
  AlnsConfig alns = epoch_alns();
  AlnsConfig alns_init = {};
  /// Upper bound on concurrent scenario solves; 0 means the default pool size.
  int parallelism = 0;
  std::uint64_t seed = 1;

  static AlnsConfig epoch_alns() {
    AlnsConfig c;
    c.iterations = 100;
    return c;
  }
  /// Single scenario, no virtual tasks.
  static PolicyConfig myopic();

  void validate() const;
};

struct ServiceRecord {
  int task_id = 0;
  int worker_id = 0;
  double start = 0.0;
  double profit = 0.0;

  friend bool operator==(const ServiceRecord&, const ServiceRecord&) = default;
};

struct RunRecord {
  double total_profit = 0.0;
  std::vector<ServiceRecord> served;  // ordered by service start, then worker id
  std::vector<double> epoch_ms;
  std::vector<LogEntry> log;
  std::vector<double> final_arrival;          // per worker (instance order)
  std::vector<std::vector<Visit>> trajectories;  // executed visits per worker
  int epochs = 0;
  int total_tasks = 0;
};

/// Equality of everything except wall-clock timings.
bool same_outcome(const RunRecord& a, const RunRecord& b);

std::string serialize_run(const RunRecord& run, const std::string& instance_name, const std::string& policy,
                          std::uint64_t seed);

struct EpochDiagnostics {
  int epoch = 0;
  double time = 0.0;
  bool initial = false;
  int threshold = 0;
  std::vector<std::pair<Assignment, int>> frequencies;  // full-instance indices
  std::vector<Assignment> decision;
};

using EpochObserver = std::function<void(const EpochDiagnostics&)>;

/// Seed of scenario `scenario` at epoch `epoch` (SplitMix64 mixing).
std::uint64_t scenario_seed(std::uint64_t run_seed, std::uint64_t epoch, std::uint64_t scenario);

/// Worker threads for scenario solves: `requested` (or hardware concurrency when
/// 0), capped by the DTOPSC_THREADS environment variable.
int pool_size(int requested);

/// One epoch's dispatch decision in full-instance indices. `kept` are the
/// prescreened tasks. `initial` selects the initial-plan budget and the
/// first-task rule regardless of mode.
std::vector<Assignment> epoch_decision(const DynamicState& state, const Instance& instance, const PolicyConfig& policy,
                                       std::span<const int> idle, std::span<const int> kept, int epoch, bool initial,
                                       EpochDiagnostics* diagnostics = nullptr);

RunRecord simulate(const Instance& instance, const PolicyConfig& policy, const EpochObserver& observer = {});

}  // namespace dtopsc
