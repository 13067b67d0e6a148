#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "dtopsc/generator.hpp"
#include "support.hpp"

using namespace dtopsc;

namespace {

const std::vector<Point>& cloud() {
  static const auto pts = default_coordinates();
  return pts;
}

Instance make(const std::string& family, std::uint64_t seed, int workers = 0, int tasks = 0) {
  auto cfg = family_config(family);
  if (workers) cfg.workers = workers;
  if (tasks) cfg.tasks = tasks;
  cfg.seed = seed;
  return generate_instance(cfg, cloud());
}

// Some worker leaves its origin at shift start, serves the task alone and gets home in time.
bool alone_feasible(const Instance& inst, int task) {
  for (int w = 0; w < inst.num_workers(); ++w) {
    if (!testing_support::schedule(inst, w, {task}, inst.workers[w].shift_start).empty()) return true;
  }
  return false;
}

}  // namespace

TEST(Families, Ranges) {
  const auto base = family_config("base");
  EXPECT_EQ(base.workers, 10);
  EXPECT_EQ(base.tasks, 100);
  EXPECT_EQ(base.horizon, 180);
  EXPECT_EQ(base.duration_range, (Range{1, 3}));
  EXPECT_EQ(base.window_width_range, (Range{10, 20}));
  EXPECT_EQ(base.profit_range, (Range{10, 50}));
  EXPECT_EQ(base.buffer_range, (Range{1.3, 2.5}));
  EXPECT_DOUBLE_EQ(base.od_min_separation_fraction, 0.4);
  EXPECT_DOUBLE_EQ(base.effective_profit_scale(), 50);

  EXPECT_EQ(family_config("short").duration_range, (Range{0, 2}));
  EXPECT_EQ(family_config("long").duration_range, (Range{2, 6}));
  EXPECT_EQ(family_config("tight").window_width_range, (Range{5, 15}));
  EXPECT_EQ(family_config("loose").window_width_range, (Range{15, 30}));
  EXPECT_EQ(family_config("narrow").profit_range, (Range{10, 20}));
  EXPECT_EQ(family_config("wide").profit_range, (Range{10, 100}));

  // One factor changes; the rest stays at the base values.
  const auto lng = family_config("long");
  EXPECT_EQ(lng.window_width_range, base.window_width_range);
  EXPECT_EQ(lng.profit_range, base.profit_range);
  EXPECT_EQ(lng.workers, base.workers);
}

TEST(Families, Scale) {
  const auto c = family_config("scale(15,150)");
  EXPECT_EQ(c.workers, 15);
  EXPECT_EQ(c.tasks, 150);
  EXPECT_EQ(c.duration_range, family_config("base").duration_range);
  const auto names = family_names();
  EXPECT_EQ(names.size(), 13u);
  for (const auto& n : {"scale(5,50)", "scale(7,70)", "scale(9,90)", "scale(11,110)", "scale(13,130)", "scale(15,150)"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
  for (const auto& n : names) EXPECT_NO_THROW(family_config(n));
}

TEST(Families, UnknownRejected) {
  for (const auto* n : {"", "Base", "medium", "scale(0,10)", "scale(5)", "scale(a,b)"}) {
    EXPECT_THROW(family_config(n), std::invalid_argument) << n;
  }
}

TEST(Config, ValidateRejectsBadRanges) {
  auto c = family_config("base");
  c.duration_range = {3, 1};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = family_config("base");
  c.profit_range = {-1, 5};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = family_config("base");
  c.horizon = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Coordinates, BundledCloud) {
  ASSERT_GE(cloud().size(), 200u);
  const double d = cloud_diameter(cloud());
  double brute = 0.0;
  for (const auto& a : cloud()) {
    for (const auto& b : cloud()) brute = std::max(brute, (a - b).norm());
  }
  EXPECT_DOUBLE_EQ(d, brute);
  const std::vector<Point> two{Point(0, 0), Point(3, 4)};
  EXPECT_DOUBLE_EQ(cloud_diameter(two), 5);
}

TEST(Generate, InvariantsAcrossFamilies) {
  const double diameter = cloud_diameter(cloud());
  std::uint64_t seed = 1;
  for (const auto& family : family_names()) {
    const bool big = family.starts_with("scale");
    const auto inst = make(family, seed++, big ? 0 : 6, big ? 0 : 40);
    const auto cfg = family_config(family);
    if (big) {
      EXPECT_EQ(inst.num_workers(), cfg.workers);
      EXPECT_EQ(inst.num_tasks(), cfg.tasks);
    }
    EXPECT_FALSE(validate_instance(inst).has_fatal()) << family;
    EXPECT_EQ(inst.horizon, cfg.horizon);

    for (const auto& w : inst.workers) {
      const double od = (w.origin - w.destination).norm();
      EXPECT_GE(od + 1e-9, cfg.od_min_separation_fraction * diameter);
      const double budget = w.shift_end - w.shift_start;
      EXPECT_GE(w.shift_start, 0.0);
      EXPECT_LE(w.shift_end, cfg.horizon + 1e-9);
      // The budget is buffer * OD unless the horizon caps it.
      EXPECT_GE(budget + 1e-9, std::min(cfg.buffer_range.lo * od, cfg.horizon));
      EXPECT_LE(budget, cfg.buffer_range.hi * od + 1e-9);
    }
    const double scale = cfg.effective_profit_scale();
    std::set<int> ids;
    for (int i = 0; i < inst.num_tasks(); ++i) {
      const auto& t = inst.tasks[i];
      EXPECT_TRUE(ids.insert(t.id).second);
      EXPECT_LE(t.release, t.window_open);
      EXPECT_LE(t.window_open, t.window_close);
      EXPECT_LE(t.window_close, inst.horizon);
      EXPECT_GE(t.release, 0.0);
      EXPECT_GE(t.profit, cfg.profit_range.lo / scale - 1e-12);
      EXPECT_LE(t.profit, cfg.profit_range.hi / scale + 1e-12);
      EXPECT_GE(t.duration, cfg.duration_range.lo);
      EXPECT_LE(t.duration, cfg.duration_range.hi);
      EXPECT_LE(t.window_close - t.window_open, cfg.window_width_range.hi + 1e-9);
      EXPECT_TRUE(alone_feasible(inst, i)) << family << " task " << i;
      EXPECT_TRUE(std::find(cloud().begin(), cloud().end(), t.location) != cloud().end());
    }
  }
}

TEST(Generate, BaseProfitsScaled) {
  const auto inst = make("base", 3);
  EXPECT_EQ(inst.num_tasks(), 100);
  for (const auto& t : inst.tasks) {
    EXPECT_GE(t.profit, 0.2);
    EXPECT_LE(t.profit, 1.0);
  }
  EXPECT_DOUBLE_EQ(inst.profit_scale, 50);
}

TEST(Generate, ReproducibleFromSeed) {
  const auto a = make("tight", 11, 4, 20);
  const auto b = make("tight", 11, 4, 20);
  const auto c = make("tight", 12, 4, 20);
  ASSERT_EQ(a.num_tasks(), b.num_tasks());
  for (int i = 0; i < a.num_tasks(); ++i) {
    EXPECT_EQ(a.tasks[i].location, b.tasks[i].location);
    EXPECT_EQ(a.tasks[i].window_open, b.tasks[i].window_open);
  }
  bool differs = false;
  for (int i = 0; i < a.num_tasks(); ++i) differs |= a.tasks[i].window_open != c.tasks[i].window_open;
  EXPECT_TRUE(differs);
}

TEST(Generate, ImpossibleConfigFails) {
  auto cfg = family_config("base");
  cfg.workers = 2;
  cfg.tasks = 5;
  cfg.window_width_range = {0, 0};
  cfg.duration_range = {170, 175};
  EXPECT_THROW(generate_instance(cfg, cloud()), std::runtime_error);
  const std::vector<Point> one{Point(0, 0)};
  EXPECT_THROW(generate_instance(family_config("base"), one), std::exception);
}
