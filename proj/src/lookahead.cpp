#include "dtopsc/lookahead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

namespace dtopsc {

namespace {

// uniform_real_distribution requires a < b; a degenerate range collapses to a point.
double uniform(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::vector<Task> sample_virtual_tasks(const DynamicState& state, const Instance& inst, int n_vir, Rng& rng) {
  std::vector<Task> out;
  if (n_vir <= 0 || state.available.empty()) return out;

  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::Vector2d lo(inf, inf), hi(-inf, -inf);
  auto grow = [&](const Point& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  double pmin = inf, pmax = -inf, dmin = inf, dmax = -inf, wmin = inf, wmax = -inf;
  for (const int i : state.available) {
    const auto& t = inst.tasks[i];
    grow(t.location);
    pmin = std::min(pmin, t.profit);
    pmax = std::max(pmax, t.profit);
    dmin = std::min(dmin, t.duration);
    dmax = std::max(dmax, t.duration);
    wmin = std::min(wmin, t.window_close - t.window_open);
    wmax = std::max(wmax, t.window_close - t.window_open);
  }
  for (const auto& w : inst.workers) {
    grow(w.origin);
    grow(w.destination);
  }

  const double t = state.now;
  const double H = inst.horizon;
  out.reserve(n_vir);
  for (int j = 0; j < n_vir; ++j) {
    Task v;
    v.id = -(j + 1);
    v.location = Point(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()));
    v.profit = uniform(rng, pmin, pmax);
    v.duration = uniform(rng, dmin, dmax);
    v.window_open = uniform(rng, t, H);
    const double width = uniform(rng, wmin, wmax);
    v.window_close = std::min(v.window_open + width, H);
    v.release = t;
    out.push_back(v);
  }
  return out;
}

Snapshot build_augmented_instance(const Snapshot& snap, std::span<const Task> virtuals) {
  if (virtuals.empty()) return snap;
  const auto& base = snap.instance;
  const int n_real = base.num_tasks();
  const int m = base.num_workers();
  const int n_vir = static_cast<int>(virtuals.size());

  Snapshot aug;
  auto& out = aug.instance;
  out.horizon = base.horizon;
  out.profit_scale = base.profit_scale;
  out.tasks = base.tasks;
  out.tasks.insert(out.tasks.end(), virtuals.begin(), virtuals.end());
  out.workers = base.workers;
  aug.worker_source = snap.worker_source;
  aug.task_source = snap.task_source;
  aug.task_source.insert(aug.task_source.end(), n_vir, -1);

  // base_node[k]: node of augmented node k in the snapshot, -1 for virtuals.
  std::vector<int> base_node;
  for (int i = 0; i < n_real; ++i) base_node.push_back(i);
  base_node.insert(base_node.end(), n_vir, -1);
  for (int k = 0; k < 2 * m; ++k) base_node.push_back(n_real + k);
  for (const int b : base_node) aug.node_source.push_back(b < 0 ? -1 : snap.node_source[b]);

  const auto pts = out.node_coordinates();
  const auto n = static_cast<Eigen::Index>(base_node.size());
  auto fill = [&](const Eigen::MatrixXd& from) {
    Eigen::MatrixXd t(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        t(a, b) = (base_node[a] >= 0 && base_node[b] >= 0) ? from(base_node[a], base_node[b])
                                                           : (pts[a] - pts[b]).norm();
      }
    }
    return t;
  };
  out.travel = TravelMatrix(fill(base.travel.shared()));
  for (int w = 0; w < m; ++w) {
    if (base.travel.has_worker_override(w)) {
      out.travel.set_worker_override(w, static_cast<std::size_t>(m), fill(*base.travel.worker_override(w)));
    }
  }
  return aug;
}

ScenarioCandidates extract_candidates(const Plan& plan, const Snapshot& aug, int scenario) {
  ScenarioCandidates out;
  out.scenario = scenario;
  const auto& inst = aug.instance;
  for (const auto& route : plan.routes) {
    const int w = route.worker;
    const auto& wk = inst.workers[w];
    const int here = inst.origin_node(w);
    const int dest = inst.destination_node(w);
    for (const int node : route.tasks()) {
      if (aug.task_source[node] < 0) continue;
      const auto& t = inst.tasks[node];
      const double start = std::max(route.start_time + inst.travel(w, here, node), t.earliest_start());
      if (start > t.window_close + kTimeEps) continue;
      if (start + t.duration + inst.travel(w, node, dest) > wk.shift_end + kTimeEps) continue;
      out.pairs.emplace_back(w, node);
      break;
    }
  }
  return out;
}

FrequencyMap compute_frequencies(std::span<const ScenarioCandidates> sets) {
  FrequencyMap f;
  for (const auto& s : sets) {
    for (const auto& p : s.pairs) ++f[p];
  }
  return f;
}

int theta_min(double alpha, int scenarios) {
  return std::max(1, static_cast<int>(std::floor(alpha * scenarios)));
}

DispatchDecision select_dispatch(const FrequencyMap& freq, int threshold, const Instance& snap) {
  struct Ranked {
    int count;
    double profit;
    double travel;
    int worker_id;
    int task_id;
    WorkerTask pair;
  };
  std::vector<Ranked> kept;
  for (const auto& [pair, count] : freq) {
    if (count < threshold) continue;
    const auto [w, i] = pair;
    kept.push_back({count, snap.tasks[i].profit, snap.travel(w, snap.origin_node(w), i), snap.workers[w].id,
                    snap.tasks[i].id, pair});
  }
  std::sort(kept.begin(), kept.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(b.count, b.profit, a.travel, a.worker_id, a.task_id) <
           std::tie(a.count, a.profit, b.travel, b.worker_id, b.task_id);
  });
  DispatchDecision d;
  std::set<int> workers, tasks;
  for (const auto& r : kept) {
    if (workers.contains(r.pair.first) || tasks.contains(r.pair.second)) continue;
    workers.insert(r.pair.first);
    tasks.insert(r.pair.second);
    d.pairs.push_back(r.pair);
  }
  return d;
}

}  // namespace dtopsc
