#pragma once

// Test-side builders and reference computations. Nothing here calls into the
// routing code, so the library can be checked against it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dtopsc/model.hpp"

namespace testing_support {

using dtopsc::Instance;
using dtopsc::Point;
using dtopsc::Task;
using dtopsc::Worker;

struct RandomSpec {
  int workers = 2;
  int tasks = 6;
  double side = 20.0;
  double horizon = 100.0;
  double min_width = 5.0;
  double max_width = 30.0;
  double max_duration = 3.0;
  bool releases = false;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Small instance with Euclidean travel; every worker can at least go home.
inline Instance random_instance(std::mt19937_64& rng, const RandomSpec& spec) {
  Instance inst;
  inst.horizon = spec.horizon;
  for (int w = 0; w < spec.workers; ++w) {
    Worker wk;
    wk.id = w;
    wk.origin = Point(uniform(rng, 0, spec.side), uniform(rng, 0, spec.side));
    wk.destination = Point(uniform(rng, 0, spec.side), uniform(rng, 0, spec.side));
    wk.shift_start = uniform(rng, 0, spec.horizon * 0.3);
    const double direct = (wk.origin - wk.destination).norm();
    wk.shift_end = std::min(spec.horizon, wk.shift_start + direct + uniform(rng, spec.horizon * 0.2, spec.horizon * 0.7));
    inst.workers.push_back(wk);
  }
  for (int i = 0; i < spec.tasks; ++i) {
    Task t;
    t.id = i;
    t.location = Point(uniform(rng, 0, spec.side), uniform(rng, 0, spec.side));
    t.profit = std::round(uniform(rng, 1, 10));
    t.duration = uniform(rng, 0.5, spec.max_duration);
    t.window_open = uniform(rng, 0, spec.horizon * 0.8);
    t.window_close = std::min(spec.horizon, t.window_open + uniform(rng, spec.min_width, spec.max_width));
    t.release = spec.releases ? uniform(rng, 0, t.window_open) : 0.0;
    inst.tasks.push_back(t);
  }
  dtopsc::derive_euclidean_travel(inst);
  return inst;
}

/// Service starts along origin -> seq -> destination, departing at `depart`;
/// empty when a window or the deadline is missed.
inline std::vector<double> schedule(const Instance& inst, int w, const std::vector<int>& seq, double depart) {
  std::vector<double> out;
  const int n = inst.num_tasks();
  int at = n + w;
  double ready = depart;
  for (const int i : seq) {
    const Task& t = inst.tasks[i];
    double a = ready + inst.travel(w, at, i);
    a = std::max({a, t.window_open, t.release});
    if (a > t.window_close + 1e-9) return {};
    out.push_back(a);
    ready = a + t.duration;
    at = i;
  }
  const double arrive = ready + inst.travel(w, at, n + inst.num_workers() + w);
  if (arrive > inst.workers[w].shift_end + 1e-9) return {};
  out.push_back(arrive);
  return out;
}

/// Optimum by enumerating every pair of disjoint ordered sequences, no pruning.
inline double enumerate_optimum(const Instance& inst) {
  const int n = inst.num_tasks();
  const int m = inst.num_workers();
  std::vector<std::vector<int>> seq(m);
  std::vector<char> used(n, 0);
  double best = 0.0;
  std::function<void(int)> rec = [&](int w) {
    if (w == m) {
      double profit = 0.0;
      for (int v = 0; v < m; ++v) {
        if (schedule(inst, v, seq[v], inst.workers[v].shift_start).empty()) return;
        for (const int i : seq[v]) profit += inst.tasks[i].profit;
      }
      best = std::max(best, profit);
      return;
    }
    rec(w + 1);
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      seq[w].push_back(i);
      // Extensions are enumerated for this worker before moving on.
      std::function<void()> extend = [&] {
        rec(w + 1);
        for (int j = 0; j < n; ++j) {
          if (used[j]) continue;
          used[j] = 1;
          seq[w].push_back(j);
          extend();
          seq[w].pop_back();
          used[j] = 0;
        }
      };
      extend();
      seq[w].pop_back();
      used[i] = 0;
    }
  };
  rec(0);
  return best;
}

}  // namespace testing_support
