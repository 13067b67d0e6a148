#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtopsc/dynamics.hpp"
#include "dtopsc/model.hpp"
#include "dtopsc/routing.hpp"

namespace dtopsc {

struct OracleLimits {
  int max_tasks = 10;
  int max_workers = 3;
  std::uint64_t node_budget = 50'000'000;
  double time_budget_s = 120.0;
};

class OracleLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactResult {
  double optimal_profit = 0.0;
  Plan optimal_plan;
  std::uint64_t nodes = 0;
};

/// Depth-first branch and bound over ordered task sequences, one worker after
/// another. Throws OracleLimitExceeded instead of returning an unproven answer.
ExactResult exact_solve(const Instance& instance, const OracleLimits& limits = {});

enum class ViolationKind { Structure, Coupling, WindowOpen, Release, WindowClose, Start, Deadline, Order };

struct PlanViolation {
  ViolationKind kind = ViolationKind::Structure;
  int worker = -1;  // instance index
  int task = -1;    // instance index
  std::string message;
};

struct VerifyReport {
  std::vector<PlanViolation> violations;
  bool feasible() const { return violations.empty(); }
};

const char* violation_kind_name(ViolationKind kind);

/// Recomputes each route's schedule from its node sequence and departure time
/// and checks every routing, coupling and timing constraint.
VerifyReport verify_plan(const Instance& instance, const Plan& plan);

/// Checks recorded visits (origin, served tasks, destination) against the
/// same constraints; waiting between visits is allowed.
VerifyReport verify_schedule(const Instance& instance, std::span<const std::vector<Visit>> trajectories);

/// The static model in LP text format. Node labels are `s`, `d` and task
/// indices; worker labels are instance indices.
std::string export_mip(const Instance& instance);

}  // namespace dtopsc
