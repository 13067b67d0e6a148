#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dtopsc {

using Point = Eigen::Vector2d;

/// Absolute tolerance for every time comparison in the library.
inline constexpr double kTimeEps = 1e-9;

struct Task {
  int id = 0;
  Point location = Point::Zero();
  double profit = 0.0;
  double duration = 0.0;
  double window_open = 0.0;
  double window_close = 0.0;
  double release = 0.0;

  /// Earliest admissible service start: max(b_i, r_i).
  double earliest_start() const { return std::max(window_open, release); }
};

struct Worker {
  int id = 0;
  Point origin = Point::Zero();
  Point destination = Point::Zero();
  double shift_start = 0.0;
  double shift_end = 0.0;
};

/// Dense travel-time matrix over the node set of an instance.
///
/// Node layout for an instance with N tasks and M workers:
///   [0, N)        task nodes (node index == task index)
///   [N, N+M)      worker origins
///   [N+M, N+2M)   worker destinations
///
/// An optional per-worker matrix replaces the shared one for that worker.
class TravelMatrix {
 public:
  TravelMatrix() = default;
  explicit TravelMatrix(Eigen::MatrixXd shared) : shared_(std::move(shared)) {}

  std::size_t size() const { return static_cast<std::size_t>(shared_.rows()); }

  double operator()(int i, int j) const { return shared_(i, j); }

  /// Travel time as seen by worker `w` (index into the instance's workers).
  double operator()(int w, int i, int j) const {
    if (!per_worker_.empty() && per_worker_[w]) return (*per_worker_[w])(i, j);
    return shared_(i, j);
  }

  const Eigen::MatrixXd& shared() const { return shared_; }
  double max_time() const { return shared_.size() == 0 ? 0.0 : shared_.maxCoeff(); }

  bool has_worker_override(int w) const {
    return !per_worker_.empty() && per_worker_[w].has_value();
  }
  const std::optional<Eigen::MatrixXd>& worker_override(int w) const { return per_worker_[w]; }

  /// Installs a worker-specific matrix; `workers` sizes the override table.
  void set_worker_override(int w, std::size_t workers, Eigen::MatrixXd m) {
    if (per_worker_.size() < workers) per_worker_.resize(workers);
    per_worker_[w] = std::move(m);
  }
  std::size_t override_slots() const { return per_worker_.size(); }

 private:
  Eigen::MatrixXd shared_;
  std::vector<std::optional<Eigen::MatrixXd>> per_worker_;
};

/// Euclidean distance matrix; t_ij = ||p_i - p_j||.
TravelMatrix build_travel_matrix(std::span<const Point> coordinates);

struct Instance {
  std::vector<Task> tasks;
  std::vector<Worker> workers;
  TravelMatrix travel;
  double horizon = 0.0;
  double profit_scale = 1.0;

  int num_tasks() const { return static_cast<int>(tasks.size()); }
  int num_workers() const { return static_cast<int>(workers.size()); }
  int origin_node(int w) const { return num_tasks() + w; }
  int destination_node(int w) const { return num_tasks() + num_workers() + w; }
  int num_nodes() const { return num_tasks() + 2 * num_workers(); }

  /// Coordinates in node order (tasks, origins, destinations).
  std::vector<Point> node_coordinates() const;
};

/// Rebuilds `instance.travel` as the Euclidean matrix over its coordinates.
void derive_euclidean_travel(Instance& instance);

enum class Severity { Fatal, Warning, Info };

struct Violation {
  Severity severity = Severity::Fatal;
  std::string subject;  // e.g. "task 4", "worker 1", "instance"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  std::size_t fatal_count() const;
  bool has_fatal() const { return fatal_count() > 0; }
};

/// Checks every data invariant; tasks infeasible for all workers in isolation are
/// reported with Severity::Info.
ValidationReport validate_instance(const Instance& instance);

/// True when worker `w` can leave its origin at its shift start, serve `task`
/// alone and still reach its destination by its shift end.
bool isolated_feasible(const Instance& instance, int w, int task);

/// Big-M constant dominating any feasible time difference on an unused arc.
double big_m(const Instance& instance);

}  // namespace dtopsc
