#include <gtest/gtest.h>

#include <sstream>

#include "dtopsc/io.hpp"
#include "dtopsc/model.hpp"
#include "dtopsc/routing.hpp"
#include "support.hpp"

using namespace dtopsc;

namespace {

Instance one_worker(double start, double end) {
  Instance inst;
  inst.horizon = 100;
  inst.workers.push_back({0, Point(0, 0), Point(3, 4), start, end});
  derive_euclidean_travel(inst);
  return inst;
}

}  // namespace

TEST(TravelMatrix, SinglePointIsZero) {
  const std::vector<Point> pts{Point(0, 0)};
  const auto t = build_travel_matrix(pts);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t(0, 0), 0.0);
}

TEST(TravelMatrix, ThreeFourFive) {
  const std::vector<Point> pts{Point(0, 0), Point(3, 4)};
  const auto t = build_travel_matrix(pts);
  EXPECT_DOUBLE_EQ(t(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(t(1, 0), 5.0);
  EXPECT_EQ(t(0, 0), 0.0);
  EXPECT_EQ(t(1, 1), 0.0);
}

TEST(TravelMatrix, MatchesPairwiseDistancesAndTriangleInequality) {
  std::mt19937_64 rng(3);
  std::vector<Point> pts;
  for (int k = 0; k < 10; ++k) pts.emplace_back(testing_support::uniform(rng, -5, 5), testing_support::uniform(rng, -5, 5));
  const auto t = build_travel_matrix(pts);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double dx = pts[i].x() - pts[j].x(), dy = pts[i].y() - pts[j].y();
      EXPECT_NEAR(t(i, j), std::sqrt(dx * dx + dy * dy), 1e-12);
      for (int k = 0; k < 10; ++k) EXPECT_LE(t(i, j), t(i, k) + t(k, j) + 1e-12);
    }
  }
}

TEST(TravelMatrix, WorkerOverrideReplacesShared) {
  auto inst = one_worker(0, 50);
  Eigen::MatrixXd m = inst.travel.shared() * 2.0;
  inst.travel.set_worker_override(0, 1, m);
  EXPECT_DOUBLE_EQ(inst.travel(0, 0, 1), 10.0);
  EXPECT_DOUBLE_EQ(inst.travel(0, 1), 5.0);
}

TEST(Validate, InvertedReleaseNamesTheTask) {
  auto inst = one_worker(0, 50);
  Task t;
  t.id = 7;
  t.window_open = 5;
  t.window_close = 10;
  t.release = 6;
  inst.tasks.push_back(t);
  derive_euclidean_travel(inst);
  const auto report = validate_instance(inst);
  ASSERT_EQ(report.fatal_count(), 1u);
  const auto it = std::find_if(report.violations.begin(), report.violations.end(),
                               [](const Violation& v) { return v.severity == Severity::Fatal; });
  EXPECT_EQ(it->subject, "task 7");
}

TEST(Validate, EmptyTaskListOneWorkerIsClean) {
  EXPECT_TRUE(validate_instance(one_worker(0, 50)).empty());
}

TEST(Validate, ReportsEachBrokenInvariant) {
  auto inst = one_worker(0, 3);  // shift shorter than OD travel
  EXPECT_EQ(validate_instance(inst).fatal_count(), 0u);
  EXPECT_EQ(validate_instance(inst).violations.size(), 1u);

  inst = one_worker(20, 10);
  EXPECT_TRUE(validate_instance(inst).has_fatal());

  inst = one_worker(0, 50);
  inst.horizon = 0;
  EXPECT_TRUE(validate_instance(inst).has_fatal());

  inst = one_worker(0, 50);
  Task t;
  t.window_open = 1;
  t.window_close = 200;  // beyond H
  inst.tasks.push_back(t);
  EXPECT_TRUE(validate_instance(inst).has_fatal());  // also the stale matrix
  derive_euclidean_travel(inst);
  EXPECT_EQ(validate_instance(inst).fatal_count(), 1u);

  inst.tasks[0].window_close = 20;
  inst.tasks[0].profit = -1;
  EXPECT_EQ(validate_instance(inst).fatal_count(), 1u);
}

TEST(Validate, TaskUnreachableByEveryoneIsInformational) {
  auto inst = one_worker(0, 10);
  Task t;
  t.location = Point(100, 100);
  t.window_open = 0;
  t.window_close = 50;
  inst.tasks.push_back(t);
  derive_euclidean_travel(inst);
  const auto report = validate_instance(inst);
  EXPECT_FALSE(report.has_fatal());
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].severity, Severity::Info);
  EXPECT_FALSE(isolated_feasible(inst, 0, 0));
}

TEST(Validate, IsIdempotent) {
  std::mt19937_64 rng(5);
  auto inst = testing_support::random_instance(rng, {});
  inst.tasks[0].release = inst.tasks[0].window_open + 1;
  const auto a = validate_instance(inst);
  const auto b = validate_instance(inst);
  ASSERT_EQ(a.violations.size(), b.violations.size());
  for (std::size_t k = 0; k < a.violations.size(); ++k) EXPECT_EQ(a.violations[k].message, b.violations[k].message);
}

TEST(BigM, DirectSum) {
  Instance inst;
  inst.horizon = 10;
  inst.workers.push_back({0, Point(0, 0), Point(0, 5), 0, 10});
  Task t;
  t.location = Point(0, 1);
  t.duration = 2;
  t.window_close = 10;
  inst.tasks.push_back(t);
  derive_euclidean_travel(inst);
  EXPECT_DOUBLE_EQ(big_m(inst), 10 + 2 + 5);
}

TEST(BigM, NoTasks) {
  EXPECT_DOUBLE_EQ(big_m(one_worker(5, 45)), 40 + 0 + 5);
}

TEST(BigM, DominatesRealizedTimeDifferences) {
  std::mt19937_64 rng(11);
  testing_support::RandomSpec spec;
  spec.workers = 1;
  spec.tasks = 4;
  const auto inst = testing_support::random_instance(rng, spec);
  const double M = big_m(inst);
  std::vector<int> seq{0, 1, 2, 3};
  std::sort(seq.begin(), seq.end());
  do {
    for (std::size_t len = 0; len <= seq.size(); ++len) {
      const std::vector<int> part(seq.begin(), seq.begin() + len);
      const auto a = testing_support::schedule(inst, 0, part, inst.workers[0].shift_start);
      if (a.empty()) continue;
      std::vector<double> all{inst.workers[0].shift_start};
      all.insert(all.end(), a.begin(), a.end());
      for (const double x : all) {
        for (const double y : all) EXPECT_LE(std::abs(x - y), M);
      }
    }
  } while (std::next_permutation(seq.begin(), seq.end()));
}

TEST(Io, RoundTripPreservesEverything) {
  std::mt19937_64 rng(9);
  auto inst = testing_support::random_instance(rng, {.releases = true});
  inst.profit_scale = 50;
  const auto back = parse_instance(dump_instance(inst));
  ASSERT_EQ(back.num_tasks(), inst.num_tasks());
  ASSERT_EQ(back.num_workers(), inst.num_workers());
  EXPECT_EQ(back.horizon, inst.horizon);
  EXPECT_EQ(back.profit_scale, 50);
  for (int i = 0; i < inst.num_tasks(); ++i) {
    EXPECT_EQ(back.tasks[i].id, inst.tasks[i].id);
    EXPECT_EQ(back.tasks[i].location, inst.tasks[i].location);
    EXPECT_EQ(back.tasks[i].release, inst.tasks[i].release);
    EXPECT_EQ(back.tasks[i].window_close, inst.tasks[i].window_close);
  }
  EXPECT_TRUE(back.travel.shared().isApprox(inst.travel.shared()));
}

TEST(Io, ExplicitTravelIsKept) {
  auto inst = one_worker(0, 50);
  Eigen::MatrixXd m(2, 2);
  m << 0, 7, 9, 0;
  inst.travel = TravelMatrix(m);
  const auto back = parse_instance(dump_instance(inst));
  EXPECT_EQ(back.travel(0, 1), 7);
  EXPECT_EQ(back.travel(1, 0), 9);
}

TEST(Io, FieldNames) {
  const auto inst = parse_instance(R"({"horizon": 50, "profit_scale": 2,
    "tasks": [{"id": 4, "x": 1, "y": 2, "profit": 3, "duration": 1, "open": 5, "close": 9, "release": 0}],
    "workers": [{"id": 1, "sx": 0, "sy": 0, "dx": 3, "dy": 4, "start": 0, "end": 40}]})");
  EXPECT_EQ(inst.tasks[0].id, 4);
  EXPECT_EQ(inst.tasks[0].location, Point(1, 2));
  EXPECT_EQ(inst.workers[0].destination, Point(3, 4));
  EXPECT_DOUBLE_EQ(inst.travel(1, 2), 5.0);  // origin to destination
}

TEST(Io, Coordinates) {
  std::istringstream in("# header\n1 2\n\n3.5 -4\n");
  const auto pts = parse_coordinates(in);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1], Point(3.5, -4));
}
