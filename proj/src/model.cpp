#include "dtopsc/model.hpp"

#include <cmath>
#include <sstream>

namespace dtopsc {

TravelMatrix build_travel_matrix(std::span<const Point> coordinates) {
  const auto n = static_cast<Eigen::Index>(coordinates.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (coordinates[i] - coordinates[j]).norm();
      t(i, j) = d;
      t(j, i) = d;
    }
  }
  return TravelMatrix(std::move(t));
}

std::vector<Point> Instance::node_coordinates() const {
  std::vector<Point> pts;
  pts.reserve(num_nodes());
  for (const auto& task : tasks) pts.push_back(task.location);
  for (const auto& w : workers) pts.push_back(w.origin);
  for (const auto& w : workers) pts.push_back(w.destination);
  return pts;
}

void derive_euclidean_travel(Instance& instance) {
  const auto pts = instance.node_coordinates();
  instance.travel = build_travel_matrix(pts);
}

std::size_t ValidationReport::fatal_count() const {
  std::size_t n = 0;
  for (const auto& v : violations) n += v.severity == Severity::Fatal;
  return n;
}

bool isolated_feasible(const Instance& instance, int w, int task) {
  const auto& worker = instance.workers[w];
  const auto& t = instance.tasks[task];
  const int o = instance.origin_node(w);
  const int d = instance.destination_node(w);
  const double start = std::max(worker.shift_start + instance.travel(w, o, task), t.earliest_start());
  if (start > t.window_close + kTimeEps) return false;
  return start + t.duration + instance.travel(w, task, d) <= worker.shift_end + kTimeEps;
}

namespace {

std::string label(const char* kind, int id) {
  std::ostringstream os;
  os << kind << ' ' << id;
  return os.str();
}

}  // namespace

ValidationReport validate_instance(const Instance& instance) {
  ValidationReport report;
  auto add = [&](Severity s, std::string subject, std::string msg) {
    report.violations.push_back({s, std::move(subject), std::move(msg)});
  };
  const double H = instance.horizon;

  if (!(H > 0.0)) add(Severity::Fatal, "instance", "horizon must be positive");
  if (!(instance.profit_scale > 0.0)) add(Severity::Fatal, "instance", "profit_scale must be positive");

  const auto n = static_cast<std::size_t>(instance.num_nodes());
  const bool matrix_ok = instance.travel.size() == n;
  if (!matrix_ok) {
    std::ostringstream os;
    os << "travel matrix has " << instance.travel.size() << " nodes, expected " << n;
    add(Severity::Fatal, "instance", os.str());
  } else {
    const auto& m = instance.travel.shared();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(m(i, i)) > kTimeEps) {
        add(Severity::Fatal, "instance", "travel matrix diagonal must be zero");
        break;
      }
    }
    if ((m.array() < 0.0).any()) add(Severity::Fatal, "instance", "travel matrix has negative entries");
    if (!m.allFinite()) add(Severity::Fatal, "instance", "travel matrix has non-finite entries");
    for (int w = 0; w < instance.num_workers(); ++w) {
      if (instance.travel.has_worker_override(w) &&
          static_cast<std::size_t>(instance.travel.worker_override(w)->rows()) != n) {
        add(Severity::Fatal, label("worker", instance.workers[w].id), "worker travel override has wrong size");
      }
    }
  }

  for (const auto& t : instance.tasks) {
    const auto who = label("task", t.id);
    if (t.id < 0) add(Severity::Fatal, who, "task ids must be nonnegative");
    if (t.release > t.window_open + kTimeEps) add(Severity::Fatal, who, "release exceeds window_open");
    if (t.window_open > t.window_close + kTimeEps) add(Severity::Fatal, who, "window_open exceeds window_close");
    if (t.window_close > H + kTimeEps) add(Severity::Fatal, who, "window_close exceeds horizon");
    if (t.release < -kTimeEps || t.window_open < -kTimeEps) add(Severity::Fatal, who, "negative time");
    if (t.profit < 0.0) add(Severity::Fatal, who, "negative profit");
    if (t.duration < 0.0) add(Severity::Fatal, who, "negative service duration");
  }

  for (int w = 0; w < instance.num_workers(); ++w) {
    const auto& wk = instance.workers[w];
    const auto who = label("worker", wk.id);
    if (wk.shift_start > wk.shift_end + kTimeEps) add(Severity::Fatal, who, "shift_start exceeds shift_end");
    if (wk.shift_start < -kTimeEps || wk.shift_end > H + kTimeEps) add(Severity::Fatal, who, "shift outside [0, H]");
    if (matrix_ok) {
      const double direct = instance.travel(w, instance.origin_node(w), instance.destination_node(w));
      if (direct > wk.shift_end - wk.shift_start + kTimeEps) {
        add(Severity::Warning, who, "origin-destination travel exceeds shift length");
      }
    }
  }

  if (matrix_ok) {
    for (int i = 0; i < instance.num_tasks(); ++i) {
      bool any = false;
      for (int w = 0; w < instance.num_workers() && !any; ++w) any = isolated_feasible(instance, w, i);
      if (!any) add(Severity::Info, label("task", instance.tasks[i].id), "infeasible for every worker in isolation");
    }
  }
  return report;
}

double big_m(const Instance& instance) {
  double span = 0.0;
  for (const auto& w : instance.workers) span = std::max(span, w.shift_end - w.shift_start);
  double tau = 0.0;
  for (const auto& t : instance.tasks) tau = std::max(tau, t.duration);
  double tmax = instance.travel.max_time();
  for (int w = 0; w < instance.num_workers(); ++w) {
    if (instance.travel.has_worker_override(w)) tmax = std::max(tmax, instance.travel.worker_override(w)->maxCoeff());
  }
  return span + tau + tmax;
}

}  // namespace dtopsc
