#include "dtopsc/routing.hpp"

#include <limits>
#include <stdexcept>

namespace dtopsc {

namespace {

// Service time at position g; the start position carries no service.
double service_at(const Instance& inst, const std::vector<int>& nodes, std::size_t g) {
  if (g == 0 || g + 1 == nodes.size()) return 0.0;
  return inst.tasks[nodes[g]].duration;
}

}  // namespace

Route retime_route(const Instance& inst, int worker, std::vector<int> nodes, double start_time) {
  if (nodes.size() < 2) throw std::invalid_argument("route needs a start and a destination");
  const auto& wk = inst.workers[worker];
  const std::size_t G = nodes.size();

  Route r;
  r.worker = worker;
  r.start_time = start_time;
  r.nodes = std::move(nodes);
  r.start_times.assign(G, 0.0);
  r.waits.assign(G, 0.0);
  r.latest_starts.assign(G, 0.0);
  r.start_times[0] = start_time;

  for (std::size_t g = 1; g < G; ++g) {
    const int prev = r.nodes[g - 1];
    const int node = r.nodes[g];
    const double leg = inst.travel(worker, prev, node);
    r.travel += leg;
    const double arrival = r.start_times[g - 1] + service_at(inst, r.nodes, g - 1) + leg;
    if (g + 1 < G) {
      const auto& task = inst.tasks[node];
      const double a = std::max(arrival, task.earliest_start());
      r.start_times[g] = a;
      r.waits[g] = a - arrival;
      if (!r.failure && a > task.window_close + kTimeEps) {
        r.failure = Infeasibility{g, node, ConstraintKind::WindowClose};
      }
    } else {
      r.start_times[g] = arrival;
      if (!r.failure && arrival > wk.shift_end + kTimeEps) {
        r.failure = Infeasibility{g, node, ConstraintKind::Deadline};
      }
    }
  }

  r.latest_starts[G - 1] = wk.shift_end;
  for (std::size_t g = G - 1; g-- > 0;) {
    const double next = r.latest_starts[g + 1] - inst.travel(worker, r.nodes[g], r.nodes[g + 1]) -
                        service_at(inst, r.nodes, g);
    r.latest_starts[g] = (g == 0) ? next : std::min(inst.tasks[r.nodes[g]].window_close, next);
  }
  return r;
}

InsertionEval evaluate_insertion(const Instance& inst, const Route& route, int task, std::size_t position) {
  InsertionEval ev;
  const auto& t = inst.tasks[task];
  ev.profit_delta = t.profit;
  const int w = route.worker;
  const int prev = route.nodes[position - 1];
  const int next = route.nodes[position];
  const double to_task = inst.travel(w, prev, task);
  const double from_task = inst.travel(w, task, next);
  ev.detour_cost = to_task + from_task - inst.travel(w, prev, next);
  if (!route.feasible()) return ev;

  const double depart = route.start_times[position - 1] + service_at(inst, route.nodes, position - 1);
  const double start = std::max(depart + to_task, t.earliest_start());
  if (start > t.window_close + kTimeEps) return ev;
  ev.feasible = start + t.duration + from_task <= route.latest_starts[position] + kTimeEps;
  return ev;
}

double removal_saving(const Instance& inst, const Route& route, std::size_t position) {
  const int w = route.worker;
  const int prev = route.nodes[position - 1];
  const int node = route.nodes[position];
  const int next = route.nodes[position + 1];
  return inst.travel(w, prev, node) + inst.travel(w, node, next) - inst.travel(w, prev, next);
}

std::vector<int> Plan::unrouted() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] < 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::size_t Plan::routed_count() const {
  std::size_t n = 0;
  for (const int o : owner) n += o >= 0;
  return n;
}

Plan empty_plan(const Instance& inst) {
  Plan plan;
  plan.owner.assign(inst.tasks.size(), -1);
  plan.routes.reserve(inst.workers.size());
  for (int w = 0; w < inst.num_workers(); ++w) {
    plan.routes.push_back(retime_route(inst, w, {inst.origin_node(w), inst.destination_node(w)},
                                       inst.workers[w].shift_start));
  }
  return plan;
}

void insert_task(Plan& plan, const Instance& inst, int task, int route, std::size_t position) {
  auto& r = plan.routes[route];
  auto nodes = r.nodes;
  nodes.insert(nodes.begin() + static_cast<std::ptrdiff_t>(position), task);
  r = retime_route(inst, r.worker, std::move(nodes), r.start_time);
  plan.owner[task] = route;
  plan.profit += inst.tasks[task].profit;
}

void remove_task(Plan& plan, const Instance& inst, int task) {
  const int route = plan.owner[task];
  if (route < 0) return;
  auto& r = plan.routes[route];
  auto nodes = r.nodes;
  std::erase(nodes, task);
  r = retime_route(inst, r.worker, std::move(nodes), r.start_time);
  plan.owner[task] = -1;
  plan.profit -= inst.tasks[task].profit;
}

bool replace_route(Plan& plan, const Instance& inst, int route, std::vector<int> nodes) {
  auto candidate = retime_route(inst, plan.routes[route].worker, std::move(nodes), plan.routes[route].start_time);
  if (!candidate.feasible()) return false;
  // A task may already be claimed by the other side of a two-route move;
  // profit is counted once per task regardless of the update order.
  for (const int t : plan.routes[route].tasks()) {
    if (plan.owner[t] != route) continue;
    plan.owner[t] = -1;
    plan.profit -= inst.tasks[t].profit;
  }
  for (const int t : candidate.tasks()) {
    if (plan.owner[t] < 0) plan.profit += inst.tasks[t].profit;
    plan.owner[t] = route;
  }
  plan.routes[route] = std::move(candidate);
  return true;
}

double plan_profit(const Instance& inst, const Plan& plan) {
  double total = 0.0;
  for (const auto& r : plan.routes) {
    for (const int t : r.tasks()) total += inst.tasks[t].profit;
  }
  return total;
}

double plan_travel(const Plan& plan) {
  double total = 0.0;
  for (const auto& r : plan.routes) total += r.travel;
  return total;
}

}  // namespace dtopsc
