#include <gtest/gtest.h>

#include <sstream>

#include "dtopsc/dynamics.hpp"
#include "dtopsc/routing.hpp"
#include "support.hpp"

using namespace dtopsc;

namespace {

// Worker 0 from (0,0) to (10,0) over [0,40]; worker 1 starts at 20.
Instance two_workers() {
  Instance inst;
  inst.horizon = 50;
  inst.workers.push_back({0, Point(0, 0), Point(10, 0), 0, 40});
  inst.workers.push_back({1, Point(0, 5), Point(0, 0), 20, 45});
  auto task = [&](Point p, double open, double close, double release) {
    Task t;
    t.id = inst.num_tasks();
    t.location = p;
    t.profit = 1;
    t.duration = 2;
    t.window_open = open;
    t.window_close = close;
    t.release = release;
    inst.tasks.push_back(t);
  };
  task(Point(3, 0), 8, 20, 0);
  task(Point(6, 0), 0, 30, 5);
  task(Point(30, 30), 0, 50, 0);
  derive_euclidean_travel(inst);
  return inst;
}

// Drains events until the clock reaches `t` or the queue empties.
void run_until(DynamicState& s, EventQueue& q, const Instance& inst, double t) {
  while (!q.empty() && q.top().time <= t) advance_to_next_event(s, q, inst);
}

}  // namespace

TEST(Events, OrderingAtEqualTimes) {
  EventQueue q;
  q.push({5, EventKind::HorizonEnd, -1});
  q.push({5, EventKind::WorkerIdle, 2});
  q.push({5, EventKind::TaskArrival, 7});
  q.push({5, EventKind::WorkerIdle, 1});
  q.push({4, EventKind::HorizonEnd, -1});
  std::vector<Event> out;
  while (!q.empty()) out.push_back(q.pop());
  EXPECT_EQ(out[0].time, 4);
  EXPECT_EQ(out[1].kind, EventKind::TaskArrival);
  EXPECT_EQ(out[2], (Event{5, EventKind::WorkerIdle, 1}));
  EXPECT_EQ(out[3], (Event{5, EventKind::WorkerIdle, 2}));
  EXPECT_EQ(out[4].kind, EventKind::HorizonEnd);
}

TEST(Events, HorizonOnly) {
  Instance inst;
  inst.horizon = 10;
  derive_euclidean_travel(inst);
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  ASSERT_EQ(q.size(), 1u);
  const auto e = advance_to_next_event(s, q, inst);
  EXPECT_EQ(e.kind, EventKind::HorizonEnd);
  EXPECT_EQ(s.now, 10);
}

TEST(Idle, NotStartedWorkersAreNotIdle) {
  const auto inst = two_workers();
  auto s = initial_state(inst);
  EXPECT_TRUE(idle_workers(s, inst).empty());
  auto q = initial_events(inst);
  run_until(s, q, inst, 0);
  EXPECT_EQ(idle_workers(s, inst), std::vector<int>{0});
  run_until(s, q, inst, 20);
  EXPECT_EQ(idle_workers(s, inst), (std::vector<int>{0, 1}));
}

TEST(Dispatch, WaitsForWindowAndBecomesIdleAtTask) {
  const auto inst = two_workers();
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  run_until(s, q, inst, 0);
  EXPECT_EQ(s.available, (std::set<int>{0, 2}));
  const std::vector<Assignment> d{{0, 0}};
  commit_dispatch(s, q, inst, d);
  EXPECT_EQ(s.workers[0].phase, Phase::Traveling);
  EXPECT_DOUBLE_EQ(s.workers[0].eta, 3);
  EXPECT_DOUBLE_EQ(s.workers[0].service_start, 8);  // arrives at 3, waits for b = 8
  EXPECT_FALSE(s.available.contains(0));
  EXPECT_TRUE(idle_workers(s, inst).empty());

  run_until(s, q, inst, 10);
  EXPECT_EQ(s.workers[0].phase, Phase::Idle);
  EXPECT_EQ(s.workers[0].location, 0);
  EXPECT_DOUBLE_EQ(s.served.at(0), 8);
  EXPECT_EQ(idle_workers(s, inst), std::vector<int>{0});
  EXPECT_EQ(s.available, (std::set<int>{1, 2}));
}

TEST(Dispatch, RejectsConflictsAndStaleAssignments) {
  const auto inst = two_workers();
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  run_until(s, q, inst, 0);
  const std::vector<Assignment> twice{{0, 0}, {0, 2}};
  EXPECT_THROW(commit_dispatch(s, q, inst, twice), std::invalid_argument);
  const std::vector<Assignment> not_idle{{1, 0}};
  EXPECT_THROW(commit_dispatch(s, q, inst, not_idle), std::invalid_argument);
  const std::vector<Assignment> unreleased{{0, 1}};
  EXPECT_THROW(commit_dispatch(s, q, inst, unreleased), std::invalid_argument);
  const std::vector<Assignment> too_far{{0, 2}};
  EXPECT_THROW(commit_dispatch(s, q, inst, too_far), std::invalid_argument);
  EXPECT_EQ(s.available.size(), 2u);
  EXPECT_EQ(s.workers[0].phase, Phase::Idle);
  const std::vector<Assignment> none;
  commit_dispatch(s, q, inst, none);
  EXPECT_EQ(s.available.size(), 2u);
}

TEST(Prescreen, WindowAndDeadlineBounds) {
  Instance inst;
  inst.horizon = 30;
  inst.workers.push_back({0, Point(0, 0), Point(13, 0), 0, 13});
  Task a;
  a.location = Point(10, 0);
  a.window_close = 5;  // reached at 10
  Task b = a;
  b.id = 1;
  b.location = Point(10, 0);
  b.window_close = 30;
  b.duration = 1;  // 10 + 1 + 3 = 14 > 13
  Task c = b;
  c.id = 2;
  c.duration = 0;  // 13 <= 13
  inst.tasks = {a, b, c};
  derive_euclidean_travel(inst);
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  run_until(s, q, inst, 0);
  const auto idle = idle_workers(s, inst);
  const auto r = prescreen(s, inst, idle);
  EXPECT_EQ(r.filtered, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.kept, std::vector<int>{2});
  EXPECT_EQ(r.feasible_workers.at(2), std::vector<int>{0});
}

TEST(Prescreen, SoundOnRandomStates) {
  std::mt19937_64 rng(31);
  int filtered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = testing_support::random_instance(rng, {.workers = 1 + rep % 5, .tasks = 5 + rep % 16, .releases = true});
    auto s = initial_state(inst);
    s.now = testing_support::uniform(rng, 0, inst.horizon * 0.7);
    for (int w = 0; w < inst.num_workers(); ++w) {
      if (inst.workers[w].shift_start > s.now) continue;
      s.workers[w].phase = Phase::Idle;
      s.workers[w].location = rng() % 2 ? inst.origin_node(w) : static_cast<int>(rng() % inst.tasks.size());
    }
    for (int i = 0; i < inst.num_tasks(); ++i) {
      if (inst.tasks[i].release <= s.now && inst.tasks[i].window_close >= s.now) s.available.insert(i);
    }
    const auto idle = idle_workers(s, inst);
    const auto r = prescreen(s, inst, idle);
    for (const int i : r.filtered) {
      ++filtered;
      for (const int w : idle) {
        // Independent check: a one-task route from the worker's position now.
        Instance probe = inst;
        probe.workers[w].shift_start = s.now;
        const double go = (node_point(inst, s.workers[w].location) - inst.tasks[i].location).norm();
        const double start = std::max({s.now + go, inst.tasks[i].window_open, inst.tasks[i].release});
        const double home = (inst.tasks[i].location - inst.workers[w].destination).norm();
        const bool ok = start <= inst.tasks[i].window_close + 1e-9 &&
                        start + inst.tasks[i].duration + home <= inst.workers[w].shift_end + 1e-9;
        EXPECT_FALSE(ok) << "task " << i << " wrongly filtered for worker " << w;
      }
    }
    EXPECT_EQ(r.kept.size() + r.filtered.size(), s.available.size());
  }
  EXPECT_GT(filtered, 0);
}

TEST(Snapshot, IdleWorkerAtTaskLocation) {
  const auto inst = two_workers();
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  run_until(s, q, inst, 0);
  const std::vector<Assignment> d{{0, 0}};
  commit_dispatch(s, q, inst, d);
  run_until(s, q, inst, 10);
  const auto idle = idle_workers(s, inst);
  const std::vector<int> tasks(s.available.begin(), s.available.end());
  const auto snap = build_snapshot(s, inst, idle, tasks);
  ASSERT_EQ(snap.instance.num_workers(), 1);
  EXPECT_EQ(snap.instance.workers[0].origin, inst.tasks[0].location);
  EXPECT_EQ(snap.instance.workers[0].shift_start, 10);
  EXPECT_EQ(snap.instance.workers[0].shift_end, 40);
  EXPECT_EQ(snap.task_source, tasks);
  for (int a = 0; a < snap.instance.num_nodes(); ++a) {
    for (int b = 0; b < snap.instance.num_nodes(); ++b) {
      EXPECT_EQ(snap.instance.travel(a, b), inst.travel(snap.node_source[a], snap.node_source[b]));
    }
  }
  EXPECT_THROW(build_snapshot(s, inst, std::vector<int>{}, tasks), std::invalid_argument);
}

TEST(Snapshot, InitialEpochIsTheStaticInstance) {
  const auto inst = two_workers();
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  run_until(s, q, inst, 0);
  const std::vector<int> idle{0};
  const std::vector<int> tasks(s.available.begin(), s.available.end());
  const auto snap = build_snapshot(s, inst, idle, tasks);
  EXPECT_EQ(snap.instance.workers[0].origin, inst.workers[0].origin);
  EXPECT_EQ(snap.instance.workers[0].shift_start, inst.workers[0].shift_start);
  for (std::size_t k = 0; k < tasks.size(); ++k) EXPECT_EQ(snap.instance.tasks[k].window_close, inst.tasks[tasks[k]].window_close);
}

TEST(Snapshot, SingleTaskRoutesAreRealizable) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const auto inst = testing_support::random_instance(rng, {.workers = 3, .tasks = 10});
    auto s = initial_state(inst);
    s.now = testing_support::uniform(rng, 0, 30);
    for (int w = 0; w < 3; ++w) {
      if (inst.workers[w].shift_start > s.now) continue;
      s.workers[w].phase = Phase::Idle;
      s.workers[w].location = static_cast<int>(rng() % inst.tasks.size());
    }
    const auto idle = idle_workers(s, inst);
    if (idle.empty()) continue;
    std::vector<int> tasks;
    for (int i = 0; i < 10; ++i) {
      if (inst.tasks[i].window_close >= s.now) tasks.push_back(i);
    }
    const auto snap = build_snapshot(s, inst, idle, tasks);
    for (int w = 0; w < snap.instance.num_workers(); ++w) {
      for (int i = 0; i < snap.instance.num_tasks(); ++i) {
        const auto r = retime_route(snap.instance, w, {snap.instance.origin_node(w), i, snap.instance.destination_node(w)}, s.now);
        EXPECT_EQ(r.feasible(), next_visit_feasible(s, inst, snap.worker_source[w], snap.task_source[i]));
      }
    }
  }
}

TEST(ForcedReturn, DepartsWhenWaitingWouldMissDeadline) {
  Instance inst;
  inst.horizon = 100;
  inst.workers.push_back({0, Point(0, 0), Point(10, 0), 0, 40});
  Task t;
  t.location = Point(50, 50);
  t.window_open = 60;
  t.window_close = 90;
  t.release = 25;
  inst.tasks.push_back(t);
  derive_euclidean_travel(inst);
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  advance_to_next_event(s, q, inst);  // shift start
  // Next event at 25; 25 + 10 <= 40 so the worker may wait.
  EXPECT_TRUE(apply_forced_returns(s, q, inst).empty());
  advance_to_next_event(s, q, inst);  // release at 25
  const auto sent = apply_forced_returns(s, q, inst);  // next event is H = 100
  EXPECT_EQ(sent, std::vector<int>{0});
  EXPECT_EQ(s.workers[0].phase, Phase::Traveling);
  EXPECT_DOUBLE_EQ(s.workers[0].eta, 35);
  finish_horizon(s, inst);
  EXPECT_EQ(s.workers[0].phase, Phase::Finished);
  EXPECT_EQ(s.workers[0].executed.back().node, inst.destination_node(0));
}

TEST(Horizon, ServiceRunningPastHorizonStillEndsAtDestination) {
  Instance inst;
  inst.horizon = 20;
  inst.workers.push_back({0, Point(0, 0), Point(0, 0), 0, 40});
  Task t;
  t.location = Point(5, 0);
  t.duration = 10;
  t.window_open = 18;
  t.window_close = 20;
  inst.tasks.push_back(t);
  derive_euclidean_travel(inst);
  auto s = initial_state(inst);
  auto q = initial_events(inst);
  advance_to_next_event(s, q, inst);
  advance_to_next_event(s, q, inst);
  const std::vector<Assignment> d{{0, 0}};
  commit_dispatch(s, q, inst, d);
  while (q.top().kind != EventKind::HorizonEnd) advance_to_next_event(s, q, inst);
  advance_to_next_event(s, q, inst);
  finish_horizon(s, inst);
  EXPECT_EQ(s.workers[0].phase, Phase::Finished);
  ASSERT_EQ(s.workers[0].executed.size(), 3u);
  EXPECT_DOUBLE_EQ(s.workers[0].executed[1].time, 18);
  EXPECT_DOUBLE_EQ(s.workers[0].executed[2].time, 33);
  EXPECT_TRUE(s.served.contains(0));
}

TEST(Log, FormatParseRoundTrip) {
  const std::vector<LogEntry> log{{0.5, LogKind::Arrival, -1, 3, 0.0}, {1.25, LogKind::Dispatch, 2, 3, 4.5},
                                  {4.5, LogKind::Serve, 2, 3, 4.5}, {9.0, LogKind::Finish, 2, -1, 9.0}};
  const auto text = format_log(log);
  std::istringstream in(text);
  EXPECT_EQ(parse_log(in), log);
  std::istringstream bad("1.0 NOPE 1 1 0\n");
  EXPECT_THROW(parse_log(bad), std::runtime_error);
}
