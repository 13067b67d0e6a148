#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "dtopsc/model.hpp"
#include "dtopsc/routing.hpp"

namespace dtopsc {

using Rng = std::mt19937_64;

struct AlnsConfig {
  int iterations = 1000;
  double destroy_fraction_lo = 0.10;
  double destroy_fraction_hi = 0.30;
  int segment_length = 20;
  double reaction_factor = 0.5;
  double score_best = 33.0;
  double score_improve = 9.0;
  double score_accept = 1.0;
  /// Probability of accepting a candidate worse by `sa_reference_fraction` of the
  /// constructed profit at the initial temperature.
  double sa_initial_acceptance = 0.5;
  double sa_reference_fraction = 0.05;
  double sa_cooling = 0.9975;
  int local_search_cadence = 10;
  /// Time units charged per profit unit in insertion costs.
  double profit_weight = 1.0;
  /// Insertion costs get uniform noise of up to this fraction of the longest
  /// travel time, on a random half of the repair calls.
  double insertion_noise = 0.25;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Reads `key = value` lines over `base`; `#` starts a comment.
AlnsConfig parse_alns_config(std::istream& in, AlnsConfig base = {});
AlnsConfig load_alns_config(const std::filesystem::path& path, AlnsConfig base = {});

enum class DestroyOp { Shaw = 0, Random = 1, Worst = 2 };
enum class RepairOp { Regret3 = 0, Regret2 = 1, Greedy = 2 };

struct OperatorStats {
  double weight = 1.0;
  double score = 0.0;
  int uses = 0;
};

using OperatorFamily = std::array<OperatorStats, 3>;

struct OperatorBank {
  OperatorFamily destroy;
  OperatorFamily repair;
};

/// Roulette-wheel draw proportional to the current weights.
int select_operator(const OperatorFamily& family, Rng& rng);

/// Segment-end update: w <- (1-r) w + r score/uses for used operators; resets stats.
void update_weights(OperatorFamily& family, double reaction_factor);

/// Insertion cost parameters shared by the constructive and repair heuristics.
struct InsertionCosting {
  double profit_weight = 1.0;
  double missing_penalty = 0.0;  // regret padding for absent alternatives
  double noise = 0.0;            // amplitude in time units
};

InsertionCosting make_costing(const Instance& instance, const AlnsConfig& config);

/// Repeatedly inserts the task with the lowest detour per unit profit.
Plan greedy_construct(const Instance& instance);

/// Removes `count` routed tasks; throws std::invalid_argument when count exceeds them.
Plan destroy(Plan plan, const Instance& instance, DestroyOp op, std::size_t count, Rng& rng);

/// Without `rng` (or with zero noise) the insertion costs are exact.
Plan repair(Plan plan, const Instance& instance, RepairOp op, const InsertionCosting& costing, Rng* rng = nullptr);

/// Worst-removal score of the task at `position`: detour saved minus profit.
double worst_removal_score(const Instance& instance, const Route& route, std::size_t position);

/// Shaw relatedness (lower is more related).
double shaw_relatedness(const Instance& instance, int a, double start_a, int b, double start_b, double max_travel);

struct RelocateMove {
  int task = -1;
  int to_route = -1;
  std::size_t position = 0;
  double gain = 0.0;
};

struct SwapMove {
  int task_a = -1;
  int task_b = -1;
  double gain = 0.0;
};

/// First-improvement 2-opt on one route until no improving reversal remains.
bool two_opt(Plan& plan, const Instance& instance, int route);
/// Best travel-reducing feasible inter-route relocation, if any.
std::optional<RelocateMove> best_relocate(const Plan& plan, const Instance& instance);
std::optional<SwapMove> best_swap(const Plan& plan, const Instance& instance);
void apply_relocate(Plan& plan, const Instance& instance, const RelocateMove& move);
void apply_swap(Plan& plan, const Instance& instance, const SwapMove& move);

/// 2-opt on every route; relocate and swap when `iteration` hits the cadence.
Plan local_search(Plan plan, const Instance& instance, int iteration, const AlnsConfig& config);

/// Simulated-annealing acceptance on profit (maximization).
bool accept(double candidate_profit, double current_profit, double temperature, Rng& rng);

struct AlnsTrace {
  std::vector<double> best_profit;  // after each iteration
  OperatorBank final_bank;
};

Plan alns_solve(const Instance& instance, const AlnsConfig& config, AlnsTrace* trace = nullptr);

/// True when `a` is a strictly better plan: more profit, or equal profit and less travel.
bool better_plan(const Plan& a, const Plan& b);

}  // namespace dtopsc
