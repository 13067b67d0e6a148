#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtopsc/alns.hpp"
#include "dtopsc/model.hpp"

namespace dtopsc {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

struct GeneratorConfig {
  int workers = 10;
  int tasks = 100;
  double horizon = 180.0;
  double od_min_separation_fraction = 0.40;
  Range buffer_range{1.3, 2.5};
  Range duration_range{1.0, 3.0};
  Range window_width_range{10.0, 20.0};
  Range profit_range{10.0, 50.0};
  /// Divisor applied to raw profits; unset means profit_range.hi.
  std::optional<double> profit_scale;
  /// Fixed value replaces the per-worker default (origin-to-task travel).
  std::optional<double> rdy_travel_buffer;
  /// Fixed value replaces the per-worker default (max duration + task-to-destination travel).
  std::optional<double> deadline_slack;
  int max_attempts_per_task = 200;
  std::uint64_t seed = 1;

  double effective_profit_scale() const { return profit_scale.value_or(profit_range.hi); }
  void validate() const;
};

/// base, short, long, tight, loose, narrow, wide, or scale(M,N).
GeneratorConfig family_config(std::string_view name);

/// The seven named families followed by the six scale pairs.
std::vector<std::string> family_names();

/// Largest pairwise distance in the cloud.
double cloud_diameter(std::span<const Point> coordinates);

/// Throws std::runtime_error when a task or an OD pair exhausts its attempts.
Instance generate_instance(const GeneratorConfig& config, std::span<const Point> coordinates, Rng& rng);

/// Seeds the generator from config.seed.
Instance generate_instance(const GeneratorConfig& config, std::span<const Point> coordinates);

/// The bundled sample cloud.
std::vector<Point> default_coordinates();

}  // namespace dtopsc
