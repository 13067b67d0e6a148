#include "dtopsc/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace dtopsc {

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const Instance& inst, const OracleLimits& limits)
      : inst_(inst), limits_(limits), n_(inst.num_tasks()), m_(inst.num_workers()),
        started_(std::chrono::steady_clock::now()) {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return inst.tasks[a].profit > inst.tasks[b].profit; });
    memo_.assign(static_cast<std::size_t>(m_) << n_, std::vector<double>());
    sequence_.resize(m_);
  }

  ExactResult run() {
    for (const auto& t : inst_.tasks) remaining_ += t.profit;
    dfs(0, inst_.origin_node(0), inst_.workers[0].shift_start, 0u, 0.0, remaining_);
    if (!found_) throw std::invalid_argument("no feasible plan: some worker cannot reach its destination");
    ExactResult out;
    out.optimal_plan = empty_plan(inst_);
    for (int w = 0; w < m_; ++w) {
      std::vector<int> nodes{inst_.origin_node(w)};
      nodes.insert(nodes.end(), best_[w].begin(), best_[w].end());
      nodes.push_back(inst_.destination_node(w));
      if (!replace_route(out.optimal_plan, inst_, w, std::move(nodes))) {
        throw std::logic_error("exact plan rejected by retiming");
      }
    }
    out.optimal_profit = best_profit_;
    out.nodes = nodes_;
    return out;
  }

 private:
  void tick() {
    ++nodes_;
    if (nodes_ > limits_.node_budget) throw OracleLimitExceeded("node budget exhausted");
    if ((nodes_ & 0xfff) == 0) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started_;
      if (spent.count() > limits_.time_budget_s) throw OracleLimitExceeded("time budget exhausted");
    }
  }

  // Same worker, same served set, same last node: an earlier ready time dominates.
  bool dominated(int w, unsigned mask, int last, double ready) {
    auto& slot = memo_[(static_cast<std::size_t>(w) << n_) | mask];
    if (slot.empty()) slot.assign(n_ + 1, std::numeric_limits<double>::infinity());
    const int k = last < n_ ? last : n_;
    if (ready >= slot[k]) return true;
    slot[k] = ready;
    return false;
  }

  void dfs(int w, int last, double ready, unsigned mask, double profit, double unassigned) {
    tick();
    if (found_ && profit + unassigned <= best_profit_ + 1e-12) return;
    if (dominated(w, mask, last, ready)) return;
    const auto& wk = inst_.workers[w];

    for (const int i : order_) {
      if (mask & (1u << i)) continue;
      const auto& t = inst_.tasks[i];
      const double start = std::max(ready + inst_.travel(w, last, i), t.earliest_start());
      if (start > t.window_close + kTimeEps || start + t.duration > wk.shift_end + kTimeEps) continue;
      sequence_[w].push_back(i);
      dfs(w, i, start + t.duration, mask | (1u << i), profit + t.profit, unassigned - t.profit);
      sequence_[w].pop_back();
    }

    if (ready + inst_.travel(w, last, inst_.destination_node(w)) > wk.shift_end + kTimeEps) return;
    if (w + 1 < m_) {
      dfs(w + 1, inst_.origin_node(w + 1), inst_.workers[w + 1].shift_start, mask, profit, unassigned);
    } else if (!found_ || profit > best_profit_ + 1e-12) {
      found_ = true;
      best_profit_ = profit;
      best_ = sequence_;
    }
  }

  const Instance& inst_;
  OracleLimits limits_;
  int n_;
  int m_;
  std::chrono::steady_clock::time_point started_;
  std::vector<int> order_;
  std::vector<std::vector<double>> memo_;
  std::vector<std::vector<int>> sequence_;
  std::vector<std::vector<int>> best_;
  double remaining_ = 0.0;
  double best_profit_ = 0.0;
  bool found_ = false;
  std::uint64_t nodes_ = 0;
};

}  // namespace

ExactResult exact_solve(const Instance& inst, const OracleLimits& limits) {
  if (inst.num_tasks() > limits.max_tasks) {
    throw OracleLimitExceeded("instance has " + std::to_string(inst.num_tasks()) + " tasks, limit is " +
                              std::to_string(limits.max_tasks));
  }
  if (inst.num_workers() > limits.max_workers) {
    throw OracleLimitExceeded("instance has " + std::to_string(inst.num_workers()) + " workers, limit is " +
                              std::to_string(limits.max_workers));
  }
  if (inst.num_tasks() > 20) throw OracleLimitExceeded("the exact search supports at most 20 tasks");
  if (inst.num_workers() == 0) return {0.0, empty_plan(inst), 0};
  return BranchAndBound(inst, limits).run();
}

const char* violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Structure: return "structure";
    case ViolationKind::Coupling: return "coupling";
    case ViolationKind::WindowOpen: return "window-open";
    case ViolationKind::Release: return "release";
    case ViolationKind::WindowClose: return "window-close";
    case ViolationKind::Start: return "start";
    case ViolationKind::Deadline: return "deadline";
    case ViolationKind::Order: return "order";
  }
  return "?";
}

namespace {

struct Checker {
  const Instance& inst;
  VerifyReport report;
  std::vector<int> seen;

  explicit Checker(const Instance& i) : inst(i), seen(i.tasks.size(), -1) {}

  void flag(ViolationKind kind, int w, int task, std::string msg) {
    report.violations.push_back({kind, w, task, std::move(msg)});
  }

  // Visits are (node, time) with time = service start, or arrival at the destination.
  void check(int w, std::span<const Visit> visits) {
    const int n = inst.num_tasks();
    if (w < 0 || w >= inst.num_workers()) {
      flag(ViolationKind::Structure, w, -1, "unknown worker");
      return;
    }
    const auto& wk = inst.workers[w];
    const int s = inst.origin_node(w);
    const int d = inst.destination_node(w);
    if (visits.size() < 2 || visits.front().node != s || visits.back().node != d) {
      flag(ViolationKind::Structure, w, -1, "route must run from the worker's origin to its destination");
      return;
    }
    if (std::abs(visits.front().time - wk.shift_start) > kTimeEps) {
      flag(ViolationKind::Start, w, -1, "departure differs from shift start");
    }
    for (std::size_t k = 1; k < visits.size(); ++k) {
      const auto& prev = visits[k - 1];
      const auto& cur = visits[k];
      const bool last = k + 1 == visits.size();
      if (!last && (cur.node < 0 || cur.node >= n)) {
        flag(ViolationKind::Structure, w, -1, "interior node " + std::to_string(cur.node) + " is not a task");
        return;
      }
      const double service = prev.node < n ? inst.tasks[prev.node].duration : 0.0;
      const double earliest = prev.time + service + inst.travel(w, prev.node, cur.node);
      if (cur.time < earliest - 1e-7) {
        flag(ViolationKind::Order, w, last ? -1 : cur.node, "visit starts before the previous one allows");
      }
      if (last) {
        if (cur.time > wk.shift_end + kTimeEps) flag(ViolationKind::Deadline, w, -1, "destination reached after shift end");
        continue;
      }
      const auto& t = inst.tasks[cur.node];
      if (seen[cur.node] >= 0) {
        flag(ViolationKind::Coupling, w, cur.node, "task served more than once");
      }
      seen[cur.node] = w;
      if (cur.time < t.window_open - kTimeEps) flag(ViolationKind::WindowOpen, w, cur.node, "service before window opens");
      if (cur.time < t.release - kTimeEps) flag(ViolationKind::Release, w, cur.node, "service before release");
      if (cur.time > t.window_close + kTimeEps) flag(ViolationKind::WindowClose, w, cur.node, "service after window closes");
    }
  }
};

}  // namespace

VerifyReport verify_plan(const Instance& inst, const Plan& plan) {
  Checker c(inst);
  const int n = inst.num_tasks();
  std::set<int> workers;
  for (const auto& route : plan.routes) {
    if (!workers.insert(route.worker).second) {
      c.flag(ViolationKind::Structure, route.worker, -1, "worker has more than one route");
      continue;
    }
    if (route.worker < 0 || route.worker >= inst.num_workers() || route.nodes.empty()) {
      c.flag(ViolationKind::Structure, route.worker, -1, "malformed route");
      continue;
    }
    // Earliest-start schedule recomputed from the node sequence.
    std::vector<Visit> visits;
    visits.reserve(route.nodes.size());
    double time = route.start_time;
    visits.push_back({route.nodes[0], time});
    for (std::size_t k = 1; k < route.nodes.size(); ++k) {
      const int from = route.nodes[k - 1];
      const int to = route.nodes[k];
      const bool valid_to = to >= 0 && to < inst.num_nodes();
      if (!valid_to) break;
      double ready = time + (from < n ? inst.tasks[from].duration : 0.0) + inst.travel(route.worker, from, to);
      if (to < n) ready = std::max({ready, inst.tasks[to].window_open, inst.tasks[to].release});
      time = ready;
      visits.push_back({to, time});
    }
    if (visits.size() != route.nodes.size()) {
      c.flag(ViolationKind::Structure, route.worker, -1, "node index out of range");
      continue;
    }
    c.check(route.worker, visits);
  }
  return c.report;
}

VerifyReport verify_schedule(const Instance& inst, std::span<const std::vector<Visit>> trajectories) {
  Checker c(inst);
  if (static_cast<int>(trajectories.size()) != inst.num_workers()) {
    c.flag(ViolationKind::Structure, -1, -1, "one trajectory per worker expected");
    return c.report;
  }
  for (int w = 0; w < inst.num_workers(); ++w) c.check(w, trajectories[w]);
  return c.report;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v == 0.0 ? 0.0 : v);
  return buf;
}

}  // namespace

std::string export_mip(const Instance& inst) {
  const int n = inst.num_tasks();
  const int m = inst.num_workers();
  const double M = big_m(inst);

  auto label = [&](int w, int node) -> std::string {
    if (node == inst.origin_node(w)) return "s";
    if (node == inst.destination_node(w)) return "d";
    return std::to_string(node);
  };
  auto x = [&](int w, int i, int j) { return "x_" + std::to_string(w) + "_" + label(w, i) + "_" + label(w, j); };
  auto y = [&](int w, int i) { return "y_" + std::to_string(w) + "_" + std::to_string(i); };
  auto a = [&](int w, int i) { return "a_" + std::to_string(w) + "_" + label(w, i); };
  auto vw = [&](int w) {
    std::vector<int> nodes{inst.origin_node(w)};
    for (int i = 0; i < n; ++i) nodes.push_back(i);
    nodes.push_back(inst.destination_node(w));
    return nodes;
  };
  auto tau = [&](int node) { return node < n ? inst.tasks[node].duration : 0.0; };

  std::ostringstream out;
  out << "\\ static HT-TOPTW: " << m << " workers, " << n << " tasks, M = " << num(M) << "\n";
  out << "Maximize\n obj:";
  bool any = false;
  for (int i = 0; i < n; ++i) {
    for (int w = 0; w < m; ++w) {
      out << (any ? " + " : " ") << num(inst.tasks[i].profit) << " " << y(w, i);
      any = true;
    }
  }
  if (!any) out << " 0 " << (m > 0 ? x(0, inst.origin_node(0), inst.destination_node(0)) : std::string("dummy"));
  out << "\nSubject To\n";

  auto sum = [](const std::vector<std::string>& terms) {
    std::string s;
    for (std::size_t k = 0; k < terms.size(); ++k) s += (k ? " + " : "") + terms[k];
    return s;
  };

  for (int w = 0; w < m; ++w) {
    const auto nodes = vw(w);
    const int s = inst.origin_node(w);
    const int d = inst.destination_node(w);
    const std::string W = std::to_string(w);
    std::vector<std::string> terms;

    for (const int j : nodes) if (j != s) terms.push_back(x(w, s, j));
    out << " start_flow_" << W << ": " << sum(terms) << " = 1\n";
    terms.clear();
    for (const int i : nodes) if (i != d) terms.push_back(x(w, i, d));
    out << " end_flow_" << W << ": " << sum(terms) << " = 1\n";
    terms.clear();
    for (const int i : nodes) if (i != s) terms.push_back(x(w, i, s));
    out << " no_into_start_" << W << ": " << sum(terms) << " = 0\n";
    terms.clear();
    for (const int j : nodes) if (j != d) terms.push_back(x(w, d, j));
    out << " no_out_of_dest_" << W << ": " << sum(terms) << " = 0\n";

    for (int k = 0; k < n; ++k) {
      terms.clear();
      for (const int i : nodes) if (i != k) terms.push_back(x(w, i, k));
      out << " flow_in_" << W << "_" << k << ": " << sum(terms) << " - " << y(w, k) << " = 0\n";
      terms.clear();
      for (const int j : nodes) if (j != k) terms.push_back(x(w, k, j));
      out << " flow_out_" << W << "_" << k << ": " << sum(terms) << " - " << y(w, k) << " = 0\n";
    }
  }

  for (int i = 0; i < n; ++i) {
    std::vector<std::string> terms;
    for (int w = 0; w < m; ++w) terms.push_back(y(w, i));
    out << " task_once_" << i << ": " << sum(terms) << " <= 1\n";
  }

  for (int w = 0; w < m; ++w) {
    const auto nodes = vw(w);
    const int s = inst.origin_node(w);
    const int d = inst.destination_node(w);
    const std::string W = std::to_string(w);
    for (const int i : nodes) {
      if (i == d) continue;
      for (const int j : nodes) {
        if (j == s || j == i) continue;
        out << " time_" << W << "_" << label(w, i) << "_" << label(w, j) << ": " << a(w, i) << " - " << a(w, j)
            << " + " << num(M) << " " << x(w, i, j) << " <= " << num(M - tau(i) - inst.travel(w, i, j)) << "\n";
      }
    }
    for (int i = 0; i < n; ++i) {
      const auto& t = inst.tasks[i];
      out << " open_" << W << "_" << i << ": " << a(w, i) << " - " << num(M) << " " << y(w, i)
          << " >= " << num(t.window_open - M) << "\n";
      out << " release_" << W << "_" << i << ": " << a(w, i) << " - " << num(M) << " " << y(w, i)
          << " >= " << num(t.release - M) << "\n";
      out << " close_" << W << "_" << i << ": " << a(w, i) << " + " << num(M) << " " << y(w, i)
          << " <= " << num(t.window_close + M) << "\n";
    }
    out << " start_time_" << W << ": " << a(w, s) << " = " << num(inst.workers[w].shift_start) << "\n";
    out << " deadline_" << W << ": " << a(w, d) << " <= " << num(inst.workers[w].shift_end) << "\n";
  }

  out << "Bounds\n";
  for (int w = 0; w < m; ++w) {
    for (const int i : vw(w)) out << " " << a(w, i) << " >= 0\n";
  }
  out << "Binaries\n";
  for (int w = 0; w < m; ++w) {
    const auto nodes = vw(w);
    for (const int i : nodes) {
      for (const int j : nodes) {
        if (i != j) out << " " << x(w, i, j) << "\n";
      }
    }
    for (int i = 0; i < n; ++i) out << " " << y(w, i) << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace dtopsc
