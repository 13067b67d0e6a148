#include "dtopsc/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <stdexcept>

#include "dtopsc/io.hpp"

namespace dtopsc {

namespace {

double draw(Rng& rng, const Range& r) {
  if (!(r.hi > r.lo)) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

int pick(Rng& rng, std::size_t n) {
  return static_cast<int>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
}

void check_range(const Range& r, const char* name) {
  if (!(r.lo >= 0.0) || !(r.hi >= r.lo)) throw std::invalid_argument(std::string(name) + " must be a nonnegative range");
}

// Single visit from the origin at shift start.
bool feasible_from_origin(const Worker& w, const Task& t) {
  const double start = std::max(w.shift_start + (w.origin - t.location).norm(), t.earliest_start());
  if (start > t.window_close + kTimeEps) return false;
  return start + t.duration + (t.location - w.destination).norm() <= w.shift_end + kTimeEps;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (tasks < 0) throw std::invalid_argument("tasks must be >= 0");
  if (!(horizon > 1.0)) throw std::invalid_argument("horizon must exceed 1");
  if (!(od_min_separation_fraction >= 0.0 && od_min_separation_fraction <= 1.0)) {
    throw std::invalid_argument("od_min_separation_fraction must be in [0,1]");
  }
  check_range(buffer_range, "buffer_range");
  if (buffer_range.lo < 1.0) throw std::invalid_argument("buffer_range must be >= 1");
  check_range(duration_range, "duration_range");
  check_range(window_width_range, "window_width_range");
  check_range(profit_range, "profit_range");
  if (!(effective_profit_scale() > 0.0)) throw std::invalid_argument("profit_scale must be positive");
  if (rdy_travel_buffer && *rdy_travel_buffer < 0.0) throw std::invalid_argument("rdy_travel_buffer must be >= 0");
  if (deadline_slack && *deadline_slack < 0.0) throw std::invalid_argument("deadline_slack must be >= 0");
  if (max_attempts_per_task < 1) throw std::invalid_argument("max_attempts_per_task must be >= 1");
}

GeneratorConfig family_config(std::string_view name) {
  GeneratorConfig c;
  if (name == "base") return c;
  if (name == "short") {
    c.duration_range = {0.0, 2.0};
  } else if (name == "long") {
    c.duration_range = {2.0, 6.0};
  } else if (name == "tight") {
    c.window_width_range = {5.0, 15.0};
  } else if (name == "loose") {
    c.window_width_range = {15.0, 30.0};
  } else if (name == "narrow") {
    c.profit_range = {10.0, 20.0};
  } else if (name == "wide") {
    c.profit_range = {10.0, 100.0};
  } else {
    static const std::regex scale(R"(scale\((\d+),\s*(\d+)\))");
    std::cmatch m;
    const std::string s(name);
    if (!std::regex_match(s.c_str(), m, scale)) throw std::invalid_argument("unknown family: " + s);
    c.workers = std::stoi(m[1].str());
    c.tasks = std::stoi(m[2].str());
    if (c.workers < 1) throw std::invalid_argument("scale family needs at least one worker");
  }
  return c;
}

std::vector<std::string> family_names() {
  std::vector<std::string> out{"base", "short", "long", "tight", "loose", "narrow", "wide"};
  for (const auto& [m, n] : {std::pair{5, 50}, {7, 70}, {9, 90}, {11, 110}, {13, 130}, {15, 150}}) {
    out.push_back("scale(" + std::to_string(m) + "," + std::to_string(n) + ")");
  }
  return out;
}

double cloud_diameter(std::span<const Point> pts) {
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, (pts[a] - pts[b]).norm());
  }
  return d;
}

Instance generate_instance(const GeneratorConfig& cfg, std::span<const Point> coords, Rng& rng) {
  cfg.validate();
  if (coords.size() < 2) throw std::invalid_argument("need at least two coordinates");
  const double H = cfg.horizon;
  const double min_sep = cfg.od_min_separation_fraction * cloud_diameter(coords);

  Instance inst;
  inst.horizon = H;
  inst.profit_scale = cfg.effective_profit_scale();

  for (int w = 0; w < cfg.workers; ++w) {
    Worker wk;
    wk.id = w;
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_attempts_per_task && !placed; ++attempt) {
      const auto& o = coords[pick(rng, coords.size())];
      const auto& d = coords[pick(rng, coords.size())];
      if ((o - d).norm() + kTimeEps < min_sep || (o - d).norm() == 0.0) continue;
      wk.origin = o;
      wk.destination = d;
      placed = true;
    }
    if (!placed) throw std::runtime_error("could not place an OD pair for worker " + std::to_string(w));
    const double budget = std::min((wk.origin - wk.destination).norm() * draw(rng, cfg.buffer_range), H);
    wk.shift_start = draw(rng, {0.0, std::max(0.0, H - budget)});
    wk.shift_end = std::min(H, wk.shift_start + budget);
    inst.workers.push_back(wk);
  }

  for (int k = 0; k < cfg.tasks; ++k) {
    bool accepted = false;
    for (int attempt = 0; attempt < cfg.max_attempts_per_task && !accepted; ++attempt) {
      Task t;
      t.location = coords[pick(rng, coords.size())];
      t.profit = draw(rng, cfg.profit_range);
      t.duration = draw(rng, cfg.duration_range);
      const auto& wk = inst.workers[pick(rng, inst.workers.size())];
      const double slack = cfg.deadline_slack.value_or(cfg.duration_range.hi + (t.location - wk.destination).norm());
      const double latest_apr = wk.shift_end - slack;
      if (latest_apr < wk.shift_start) continue;
      const double apr = draw(rng, {wk.shift_start, latest_apr});
      const double lo = apr + cfg.rdy_travel_buffer.value_or((wk.origin - t.location).norm());
      const double hi = std::min(apr + 0.25 * (H - apr), H - 1.0);
      if (lo > hi) continue;
      t.release = apr;
      t.window_open = draw(rng, {lo, hi});
      t.window_close = std::min(t.window_open + draw(rng, cfg.window_width_range), H);
      accepted = std::any_of(inst.workers.begin(), inst.workers.end(),
                             [&](const Worker& w) { return feasible_from_origin(w, t); });
      if (accepted) inst.tasks.push_back(t);
    }
    if (!accepted) throw std::runtime_error("task " + std::to_string(k) + " rejected " +
                                            std::to_string(cfg.max_attempts_per_task) + " times");
  }

  std::shuffle(inst.tasks.begin(), inst.tasks.end(), rng);
  for (int i = 0; i < inst.num_tasks(); ++i) {
    inst.tasks[i].id = i;
    inst.tasks[i].profit /= inst.profit_scale;
  }
  derive_euclidean_travel(inst);
  return inst;
}

Instance generate_instance(const GeneratorConfig& config, std::span<const Point> coordinates) {
  Rng rng(config.seed);
  return generate_instance(config, coordinates, rng);
}

std::vector<Point> default_coordinates() {
  return load_coordinates(std::filesystem::path(DTOPSC_DATA_DIR) / "urban_coords.txt");
}

}  // namespace dtopsc
