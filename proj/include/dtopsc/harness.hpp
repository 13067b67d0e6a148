#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtopsc/generator.hpp"
#include "dtopsc/model.hpp"
#include "dtopsc/oracle.hpp"
#include "dtopsc/simulator.hpp"

namespace dtopsc {

/// Round half away from zero to 2 decimals.
double round2(double value);

/// 100 (z_cp - z) / z_cp; throws on z_cp <= 0.
double gap_cp(double z_cp, double z);
/// 100 (z_mip - z) / z_mip; absent when z_mip == 0.
std::optional<double> gap_mip(double z_mip, double z);
/// 100 (sum_mip - sum_policy) / sum_mip; throws on sum_mip <= 0.
double agg_gap(double sum_mip, double sum_policy);

/// Mean and sample standard deviation (n - 1); SD is 0 for fewer than two values.
std::pair<double, double> mean_sd(std::span<const double> values);

struct Reference {
  std::optional<double> z_mip;
  std::optional<double> z_cp;
};
using ReferenceTable = std::map<std::string, Reference>;

/// CSV with header `instance,z_mip,z_cp`; empty cells are absent values.
ReferenceTable parse_references(std::istream& in);
ReferenceTable load_references(const std::filesystem::path& path);

struct MetricsRow {
  std::string instance;
  std::string policy;
  std::uint64_t seed = 0;
  double profit = 0.0;
  std::optional<double> z_mip;
  std::optional<double> z_cp;
  std::optional<double> gap_mip;
  std::optional<double> gap_cp;
  double mean_epoch_ms = 0.0;
  double wall_s = 0.0;
  int epochs = 0;
  int served = 0;
  int total_tasks = 0;
  std::string error;  // non-empty when the run failed
};

/// Fills profit, timings and counts from a run and the gaps from `refs`.
MetricsRow make_row(const std::string& instance, const std::string& policy, std::uint64_t seed, const RunRecord& run,
                    double wall_s, const ReferenceTable& refs);

/// Attaches references and recomputes the gaps (only for positive references).
void apply_reference(MetricsRow& row, const Reference& ref);

struct CsvOptions {
  /// Wall-clock columns are left empty when false so the output is reproducible.
  bool timings = true;
};

/// Data rows in canonical order (instance, policy, seed), then one summary row
/// per policy: mean profit and gaps, sample SD of profit, mean wall time.
std::string write_csv(std::vector<MetricsRow> rows, const CsvOptions& options = {});

struct BatchSpec {
  std::vector<std::string> families{"base"};
  int instances_per_family = 10;
  std::uint64_t instance_seed = 1;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::pair<std::string, PolicyConfig>> policies;
  /// Concurrent runs; 0 uses pool_size(0).
  int parallelism = 1;
  /// Solve Z_MIP exactly for instances within these limits when no reference is given.
  std::optional<OracleLimits> oracle_refs;
  std::vector<Point> coordinates;  // empty uses the bundled cloud
};

/// Instance names are `<family>.<k>`; instance k of a family uses generator seed
/// instance_seed + k. Failures are recorded per row and the batch continues.
/// Rows are returned in canonical order.
std::vector<MetricsRow> run_batch(const BatchSpec& spec, const ReferenceTable& refs = {});

/// Rows from serialized runs (`*.json` in `runs_dir`) joined with `refs`.
std::vector<MetricsRow> collect_runs(const std::filesystem::path& runs_dir, const ReferenceTable& refs);

/// Homogeneous single-depot DTOP instance as distributed by benchmark suites.
struct DtopCustomer {
  int id = 0;
  Point location = Point::Zero();
  double profit = 0.0;
  double duration = 0.0;
  double window_open = 0.0;
  double window_close = 0.0;
  bool dynamic = false;
};

struct DtopInstance {
  Point depot = Point::Zero();
  int vehicles = 1;
  double shift_start = 0.0;
  double shift_end = 0.0;
  std::vector<DtopCustomer> customers;
};

/// Every worker starts and ends at the depot with the shared window; static
/// customers are released at 0 and dynamic ones at their window start.
Instance specialize_single_depot(const DtopInstance& dtop);

}  // namespace dtopsc
