#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dtopsc/alns.hpp"
#include "dtopsc/dynamics.hpp"
#include "dtopsc/model.hpp"
#include "dtopsc/routing.hpp"

namespace dtopsc {

/// Virtual tasks carry negative ids: -(j + 1) for the j-th sample.
inline bool is_virtual_id(int id) { return id < 0; }

/// Samples `n_vir` virtual tasks from the empirical ranges of the available
/// tasks; locations are uniform in the bounding box of available tasks and all
/// worker origins/destinations. Returns empty when A(t) is empty.
std::vector<Task> sample_virtual_tasks(const DynamicState& state, const Instance& instance, int n_vir, Rng& rng);

/// Appends virtual tasks after the snapshot's real tasks. Real rows of the
/// travel matrix are copied; any row touching a virtual node is Euclidean.
Snapshot build_augmented_instance(const Snapshot& snapshot, std::span<const Task> virtuals);

/// (snapshot worker index, snapshot task index); real tasks keep their snapshot
/// index in the augmented instance.
using WorkerTask = std::pair<int, int>;

struct ScenarioCandidates {
  int scenario = 0;
  std::vector<WorkerTask> pairs;  // at most one per worker
};

/// Per route: drop virtual nodes and, from the worker's position at the
/// snapshot start, emit the first real task that can be served next within its
/// window while still reaching the destination by the deadline.
ScenarioCandidates extract_candidates(const Plan& scenario_plan, const Snapshot& augmented, int scenario = 0);

using FrequencyMap = std::map<WorkerTask, int>;

FrequencyMap compute_frequencies(std::span<const ScenarioCandidates> candidate_sets);

/// max(1, floor(alpha * scenarios)).
int theta_min(double alpha, int scenarios);

struct DispatchDecision {
  std::vector<WorkerTask> pairs;
};

/// Keeps pairs with count >= threshold, orders them by (count desc, profit desc,
/// travel from worker asc, worker id, task id) and greedily takes each pair
/// whose worker and task are both still free. Indices refer to `snapshot`.
DispatchDecision select_dispatch(const FrequencyMap& frequencies, int threshold, const Instance& snapshot);

}  // namespace dtopsc
