#pragma once

#include <iosfwd>
#include <map>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtopsc/model.hpp"

namespace dtopsc {

// Declaration order is the tie-break priority at equal timestamps.
enum class EventKind { TaskArrival = 0, WorkerIdle = 1, HorizonEnd = 2 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::HorizonEnd;
  int id = -1;  // task index, worker index, or -1

  friend bool operator==(const Event&, const Event&) = default;
};

/// Strict (time, kind, id) ordering.
bool event_before(const Event& a, const Event& b);

class EventQueue {
 public:
  void push(Event e) { heap_.push(e); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const { return event_before(b, a); }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

enum class Phase { NotStarted, Idle, Traveling, Serving, Finished };

/// A completed visit: service start for tasks, arrival for the destination.
struct Visit {
  int node = -1;
  double time = 0.0;
};

struct WorkerState {
  Phase phase = Phase::NotStarted;
  int location = -1;  // node of the last completed visit (or origin)
  int target = -1;    // task index or destination node while Traveling/Serving
  double eta = 0.0;
  double service_start = 0.0;
  double service_end = 0.0;
  std::vector<Visit> executed;  // R_w^t, beginning with the origin departure
};

enum class LogKind { Arrival, Idle, Horizon, Dispatch, Serve, Return, Finish, Expire };

/// One line of the event log. Ids are the external task/worker ids.
struct LogEntry {
  double time = 0.0;
  LogKind kind = LogKind::Horizon;
  int worker = -1;
  int task = -1;
  double value = 0.0;  // service start (Dispatch/Serve), arrival (Return/Finish)

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct DynamicState {
  double now = 0.0;
  std::set<int> available;  // A(t)
  std::set<int> assigned;   // committed, service not yet started
  std::map<int, double> served;
  std::set<int> expired;
  std::vector<char> released;
  std::vector<WorkerState> workers;
  std::vector<LogEntry> log;
};

DynamicState initial_state(const Instance& instance);

/// Task arrivals at r_i, shift starts at T_start^w, HorizonEnd at H.
EventQueue initial_events(const Instance& instance);

/// Pops the next event, moves the clock, applies every status transition that
/// completes by then and the event itself. Tasks whose window closed strictly
/// before the new time are expired.
Event advance_to_next_event(DynamicState& state, EventQueue& queue, const Instance& instance);

/// Brings worker statuses up to `state.now` (arrivals, service starts/ends).
void apply_transitions(DynamicState& state, const Instance& instance);

std::vector<int> idle_workers(const DynamicState& state, const Instance& instance);

/// Lower bound on the service start of `task` if worker `w` leaves now.
double service_start_bound(const DynamicState& state, const Instance& instance, int w, int task);

/// Can `task` be served as worker w's immediate next visit (window and deadline)?
bool next_visit_feasible(const DynamicState& state, const Instance& instance, int w, int task);

struct PrescreenResult {
  std::vector<int> kept;
  std::vector<int> filtered;
  std::map<int, std::vector<int>> feasible_workers;  // F_i(t) for kept tasks
};

PrescreenResult prescreen(const DynamicState& state, const Instance& instance, std::span<const int> idle);

/// Static instance frozen at an epoch plus the maps back to the full instance.
struct Snapshot {
  Instance instance;
  std::vector<int> task_source;    // snapshot task -> original task, -1 for virtual
  std::vector<int> worker_source;  // snapshot worker -> original worker
  std::vector<int> node_source;    // snapshot node -> original node, -1 for virtual
};

Point node_point(const Instance& instance, int node);

/// Snapshot over `tasks` and the `idle` workers: origins at current locations,
/// shift start = now, shift end unchanged. Throws when `idle` is empty.
Snapshot build_snapshot(const DynamicState& state, const Instance& instance, std::span<const int> idle,
                        std::span<const int> tasks);

/// (worker index, task index) in the full instance.
using Assignment = std::pair<int, int>;

/// Sends each worker to its task; throws std::invalid_argument on conflicts,
/// non-idle workers, unavailable tasks, or assignments that would miss the
/// window or the worker's deadline. Queues WorkerIdle at service completion.
void commit_dispatch(DynamicState& state, EventQueue& queue, const Instance& instance,
                     std::span<const Assignment> assignments);

/// Idle workers that cannot wait for the next pending event without breaking
/// their deadline head to their destination now. Returns the workers sent.
std::vector<int> apply_forced_returns(DynamicState& state, const EventQueue& queue, const Instance& instance);

/// At the horizon: idle workers return, all transitions complete.
void finish_horizon(DynamicState& state, const Instance& instance);

/// Fixed-column text, one line per entry.
std::string format_log(std::span<const LogEntry> log);
std::vector<LogEntry> parse_log(std::istream& in);
const char* log_kind_name(LogKind kind);

}  // namespace dtopsc
