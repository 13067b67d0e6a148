#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dtopsc/model.hpp"

namespace dtopsc {

enum class ConstraintKind { WindowClose, Deadline };

struct Infeasibility {
  std::size_t position = 0;  // index into Route::nodes
  int node = -1;
  ConstraintKind kind = ConstraintKind::WindowClose;
};

/// One worker's path with its earliest-start schedule.
///
/// nodes[0] is the worker's current position (no service there), nodes.back()
/// is its destination; every interior node is a task node. start_times[g] is
/// a_g (arrival for the destination), waits[g] is the idle time before a_g and
/// latest_starts[g] is the latest a_g that keeps the remaining suffix feasible.
struct Route {
  int worker = 0;
  double start_time = 0.0;
  std::vector<int> nodes;
  std::vector<double> start_times;
  std::vector<double> waits;
  std::vector<double> latest_starts;
  double travel = 0.0;
  std::optional<Infeasibility> failure;

  bool feasible() const { return !failure.has_value(); }
  std::size_t num_tasks() const { return nodes.size() < 2 ? 0 : nodes.size() - 2; }
  std::span<const int> tasks() const { return std::span<const int>(nodes).subspan(1, num_tasks()); }
  double arrival() const { return start_times.back(); }
};

/// Earliest-start timing recursion along `nodes`, departing nodes[0] at
/// `start_time`. The returned route carries `failure` at the first violated
/// window close or destination deadline.
Route retime_route(const Instance& instance, int worker, std::vector<int> nodes, double start_time);

struct InsertionEval {
  bool feasible = false;
  double profit_delta = 0.0;
  double detour_cost = 0.0;
};

/// Inserting `task` before route.nodes[position], 1 <= position <= nodes.size()-1.
/// Constant time; agrees with retiming the augmented sequence.
InsertionEval evaluate_insertion(const Instance& instance, const Route& route, int task, std::size_t position);

/// Travel-time change from deleting the task at `position`.
double removal_saving(const Instance& instance, const Route& route, std::size_t position);

/// A set of routes, one per worker of the instance (routes[w].worker == w).
struct Plan {
  std::vector<Route> routes;
  std::vector<int> owner;  // task -> route index, -1 when unrouted
  double profit = 0.0;

  std::vector<int> unrouted() const;
  std::size_t routed_count() const;
};

/// Direct origin-to-destination routes starting at each shift start.
Plan empty_plan(const Instance& instance);

/// Insertion at a known-feasible slot; retimes the affected route.
void insert_task(Plan& plan, const Instance& instance, int task, int route, std::size_t position);
void remove_task(Plan& plan, const Instance& instance, int task);
/// Replaces a route's task sequence; returns false (plan untouched) when infeasible.
bool replace_route(Plan& plan, const Instance& instance, int route, std::vector<int> nodes);

/// Sum of p_i over routed tasks, recomputed from the routes.
double plan_profit(const Instance& instance, const Plan& plan);
double plan_travel(const Plan& plan);

}  // namespace dtopsc
