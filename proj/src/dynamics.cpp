#include "dtopsc/dynamics.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dtopsc {

bool event_before(const Event& a, const Event& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  return a.id < b.id;
}

DynamicState initial_state(const Instance& inst) {
  DynamicState s;
  s.released.assign(inst.tasks.size(), 0);
  s.workers.resize(inst.workers.size());
  for (int w = 0; w < inst.num_workers(); ++w) s.workers[w].location = inst.origin_node(w);
  return s;
}

EventQueue initial_events(const Instance& inst) {
  EventQueue q;
  for (int i = 0; i < inst.num_tasks(); ++i) q.push({inst.tasks[i].release, EventKind::TaskArrival, i});
  for (int w = 0; w < inst.num_workers(); ++w) {
    if (inst.workers[w].shift_start <= inst.horizon) q.push({inst.workers[w].shift_start, EventKind::WorkerIdle, w});
  }
  q.push({inst.horizon, EventKind::HorizonEnd, -1});
  return q;
}

namespace {

int task_id(const Instance& inst, int task) { return task < 0 ? -1 : inst.tasks[task].id; }

void sort_batch(std::vector<LogEntry>& batch) {
  std::stable_sort(batch.begin(), batch.end(), [](const LogEntry& a, const LogEntry& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.worker < b.worker;
  });
}

void collect_transitions(DynamicState& s, const Instance& inst, std::vector<LogEntry>& batch) {
  for (int w = 0; w < inst.num_workers(); ++w) {
    auto& ws = s.workers[w];
    const int wid = inst.workers[w].id;
    if (ws.phase == Phase::Traveling && ws.target < inst.num_tasks() && ws.service_start <= s.now + kTimeEps) {
      s.served[ws.target] = ws.service_start;
      s.assigned.erase(ws.target);
      ws.executed.push_back({ws.target, ws.service_start});
      ws.phase = Phase::Serving;
      batch.push_back({ws.service_start, LogKind::Serve, wid, task_id(inst, ws.target), ws.service_start});
    }
    if (ws.phase == Phase::Serving && ws.service_end <= s.now + kTimeEps) {
      ws.phase = Phase::Idle;
      ws.location = ws.target;
      ws.target = -1;
    }
    if (ws.phase == Phase::Traveling && ws.target >= inst.num_tasks() && ws.eta <= s.now + kTimeEps) {
      ws.phase = Phase::Finished;
      ws.location = ws.target;
      ws.target = -1;
      ws.executed.push_back({ws.location, ws.eta});
      batch.push_back({ws.eta, LogKind::Finish, wid, -1, ws.eta});
    }
  }
}

void sweep_expired(DynamicState& s, const Instance& inst, double bound, std::vector<LogEntry>& batch) {
  for (auto it = s.available.begin(); it != s.available.end();) {
    const auto& t = inst.tasks[*it];
    if (t.window_close < bound - kTimeEps) {
      s.expired.insert(*it);
      batch.push_back({t.window_close, LogKind::Expire, -1, t.id, t.window_close});
      it = s.available.erase(it);
    } else {
      ++it;
    }
  }
}

void depart_home(DynamicState& s, const Instance& inst, int w) {
  auto& ws = s.workers[w];
  const int dest = inst.destination_node(w);
  ws.phase = Phase::Traveling;
  ws.target = dest;
  ws.eta = s.now + inst.travel(w, ws.location, dest);
  s.log.push_back({s.now, LogKind::Return, inst.workers[w].id, -1, ws.eta});
}

}  // namespace

void apply_transitions(DynamicState& state, const Instance& inst) {
  std::vector<LogEntry> batch;
  collect_transitions(state, inst, batch);
  sort_batch(batch);
  state.log.insert(state.log.end(), batch.begin(), batch.end());
}

Event advance_to_next_event(DynamicState& s, EventQueue& queue, const Instance& inst) {
  const Event e = queue.pop();
  s.now = e.time;
  std::vector<LogEntry> batch;
  collect_transitions(s, inst, batch);
  sweep_expired(s, inst, s.now, batch);
  sort_batch(batch);
  s.log.insert(s.log.end(), batch.begin(), batch.end());

  switch (e.kind) {
    case EventKind::TaskArrival: {
      s.released[e.id] = 1;
      const bool taken = s.served.contains(e.id) || s.assigned.contains(e.id);
      if (!taken && inst.tasks[e.id].window_close >= s.now - kTimeEps) s.available.insert(e.id);
      s.log.push_back({s.now, LogKind::Arrival, -1, inst.tasks[e.id].id, 0.0});
      break;
    }
    case EventKind::WorkerIdle: {
      auto& ws = s.workers[e.id];
      if (ws.phase == Phase::NotStarted) {
        ws.phase = Phase::Idle;
        ws.location = inst.origin_node(e.id);
        ws.executed.push_back({ws.location, s.now});
      }
      if (ws.phase == Phase::Idle) s.log.push_back({s.now, LogKind::Idle, inst.workers[e.id].id, -1, 0.0});
      break;
    }
    case EventKind::HorizonEnd:
      s.log.push_back({s.now, LogKind::Horizon, -1, -1, 0.0});
      break;
  }
  return e;
}

std::vector<int> idle_workers(const DynamicState& s, const Instance& inst) {
  std::vector<int> out;
  for (int w = 0; w < inst.num_workers(); ++w) {
    if (s.workers[w].phase == Phase::Idle && inst.workers[w].shift_start <= s.now + kTimeEps) out.push_back(w);
  }
  return out;
}

double service_start_bound(const DynamicState& s, const Instance& inst, int w, int task) {
  const auto& t = inst.tasks[task];
  return std::max({s.now + inst.travel(w, s.workers[w].location, task), t.release, t.window_open});
}

bool next_visit_feasible(const DynamicState& s, const Instance& inst, int w, int task) {
  const auto& t = inst.tasks[task];
  const double a = service_start_bound(s, inst, w, task);
  if (a > t.window_close + kTimeEps) return false;
  return a + t.duration + inst.travel(w, task, inst.destination_node(w)) <= inst.workers[w].shift_end + kTimeEps;
}

PrescreenResult prescreen(const DynamicState& s, const Instance& inst, std::span<const int> idle) {
  PrescreenResult out;
  for (const int i : s.available) {
    std::vector<int> fi;
    for (const int w : idle) {
      if (next_visit_feasible(s, inst, w, i)) fi.push_back(w);
    }
    if (fi.empty()) {
      out.filtered.push_back(i);
    } else {
      out.kept.push_back(i);
      out.feasible_workers.emplace(i, std::move(fi));
    }
  }
  return out;
}

Point node_point(const Instance& inst, int node) {
  const int n = inst.num_tasks();
  const int m = inst.num_workers();
  if (node < n) return inst.tasks[node].location;
  if (node < n + m) return inst.workers[node - n].origin;
  return inst.workers[node - n - m].destination;
}

Snapshot build_snapshot(const DynamicState& s, const Instance& inst, std::span<const int> idle,
                        std::span<const int> tasks) {
  if (idle.empty()) throw std::invalid_argument("snapshot requires at least one idle worker");
  Snapshot snap;
  auto& out = snap.instance;
  out.horizon = inst.horizon;
  out.profit_scale = inst.profit_scale;
  for (const int i : tasks) {
    out.tasks.push_back(inst.tasks[i]);
    snap.task_source.push_back(i);
    snap.node_source.push_back(i);
  }
  for (const int w : idle) {
    Worker wk = inst.workers[w];
    wk.origin = node_point(inst, s.workers[w].location);
    wk.shift_start = s.now;
    out.workers.push_back(wk);
    snap.worker_source.push_back(w);
  }
  for (const int w : idle) snap.node_source.push_back(s.workers[w].location);
  for (const int w : idle) snap.node_source.push_back(inst.destination_node(w));

  const auto n = static_cast<Eigen::Index>(snap.node_source.size());
  const auto& src = snap.node_source;
  auto sub = [&](const Eigen::MatrixXd& full) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) m(a, b) = full(src[a], src[b]);
    }
    return m;
  };
  out.travel = TravelMatrix(sub(inst.travel.shared()));
  for (std::size_t k = 0; k < idle.size(); ++k) {
    if (inst.travel.has_worker_override(idle[k])) {
      out.travel.set_worker_override(static_cast<int>(k), idle.size(), sub(*inst.travel.worker_override(idle[k])));
    }
  }
  return snap;
}

void commit_dispatch(DynamicState& s, EventQueue& queue, const Instance& inst,
                     std::span<const Assignment> assignments) {
  std::set<int> seen_workers, seen_tasks;
  for (const auto& [w, i] : assignments) {
    if (w < 0 || w >= inst.num_workers() || i < 0 || i >= inst.num_tasks()) {
      throw std::invalid_argument("assignment index out of range");
    }
    if (!seen_workers.insert(w).second || !seen_tasks.insert(i).second) {
      throw std::invalid_argument("conflicting assignments");
    }
    if (s.workers[w].phase != Phase::Idle) throw std::invalid_argument("assigned worker is not idle");
    if (!s.available.contains(i)) throw std::invalid_argument("assigned task is not available");
    if (!next_visit_feasible(s, inst, w, i)) throw std::invalid_argument("assignment violates window or deadline");
  }
  std::vector<Assignment> ordered(assignments.begin(), assignments.end());
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [w, i] : ordered) {
    auto& ws = s.workers[w];
    const auto& t = inst.tasks[i];
    ws.phase = Phase::Traveling;
    ws.target = i;
    ws.eta = s.now + inst.travel(w, ws.location, i);
    ws.service_start = std::max({ws.eta, t.window_open, t.release});
    ws.service_end = ws.service_start + t.duration;
    s.available.erase(i);
    s.assigned.insert(i);
    queue.push({ws.service_end, EventKind::WorkerIdle, w});
    s.log.push_back({s.now, LogKind::Dispatch, inst.workers[w].id, t.id, ws.service_start});
  }
}

std::vector<int> apply_forced_returns(DynamicState& s, const EventQueue& queue, const Instance& inst) {
  const double next = queue.empty() ? inst.horizon : queue.top().time;
  std::vector<int> sent;
  for (const int w : idle_workers(s, inst)) {
    const auto& ws = s.workers[w];
    const double home = inst.travel(w, ws.location, inst.destination_node(w));
    if (next + home > inst.workers[w].shift_end + kTimeEps) {
      depart_home(s, inst, w);
      sent.push_back(w);
    }
  }
  return sent;
}

void finish_horizon(DynamicState& s, const Instance& inst) {
  const double now = s.now;
  for (int w = 0; w < inst.num_workers(); ++w) {
    if (s.workers[w].phase == Phase::Idle) depart_home(s, inst, w);
  }
  // Play out every commitment; workers freed after the horizon head home at once.
  while (true) {
    double next = std::numeric_limits<double>::infinity();
    for (const auto& ws : s.workers) {
      if (ws.phase == Phase::Traveling) next = std::min(next, ws.target < inst.num_tasks() ? ws.service_start : ws.eta);
      if (ws.phase == Phase::Serving) next = std::min(next, ws.service_end);
    }
    if (next == std::numeric_limits<double>::infinity()) break;
    s.now = std::max(s.now, next);
    std::vector<LogEntry> batch;
    collect_transitions(s, inst, batch);
    sort_batch(batch);
    s.log.insert(s.log.end(), batch.begin(), batch.end());
    for (int w = 0; w < inst.num_workers(); ++w) {
      if (s.workers[w].phase == Phase::Idle) depart_home(s, inst, w);
    }
  }
  std::vector<LogEntry> batch;
  sweep_expired(s, inst, std::numeric_limits<double>::infinity(), batch);
  sort_batch(batch);
  s.log.insert(s.log.end(), batch.begin(), batch.end());
  s.now = std::max(now, inst.horizon);
}

const char* log_kind_name(LogKind kind) {
  switch (kind) {
    case LogKind::Arrival: return "ARRIVE";
    case LogKind::Idle: return "IDLE";
    case LogKind::Horizon: return "HORIZON";
    case LogKind::Dispatch: return "DISPATCH";
    case LogKind::Serve: return "SERVE";
    case LogKind::Return: return "RETURN";
    case LogKind::Finish: return "FINISH";
    case LogKind::Expire: return "EXPIRE";
  }
  return "?";
}

std::string format_log(std::span<const LogEntry> log) {
  std::string out;
  char line[128];
  for (const auto& e : log) {
    std::snprintf(line, sizeof line, "%14.6f %-8s %6d %6d %14.6f\n", e.time, log_kind_name(e.kind), e.worker, e.task,
                  e.value);
    out += line;
  }
  return out;
}

std::vector<LogEntry> parse_log(std::istream& in) {
  std::vector<LogEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    LogEntry e;
    std::string kind;
    if (!(ls >> e.time >> kind >> e.worker >> e.task >> e.value)) throw std::runtime_error("malformed log line: " + line);
    bool known = false;
    for (int k = 0; k <= static_cast<int>(LogKind::Expire); ++k) {
      if (kind == log_kind_name(static_cast<LogKind>(k))) {
        e.kind = static_cast<LogKind>(k);
        known = true;
      }
    }
    if (!known) throw std::runtime_error("unknown log kind: " + kind);
    out.push_back(e);
  }
  return out;
}

}  // namespace dtopsc
