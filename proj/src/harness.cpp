#include "dtopsc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "dtopsc/io.hpp"
#include "dtopsc/parallel.hpp"
#include "json.hpp"

namespace dtopsc {

double round2(double v) {
  // Nudge by a few ulps so decimal halves stored just below .5 still round away.
  const double scaled = v * 100.0;
  const double nudged = scaled + std::copysign(std::abs(scaled) * 4 * std::numeric_limits<double>::epsilon(), scaled);
  return std::round(nudged) / 100.0;
}

double gap_cp(double z_cp, double z) {
  if (!(z_cp > 0.0)) throw std::invalid_argument("gap_cp needs a positive reference");
  return 100.0 * (z_cp - z) / z_cp;
}

std::optional<double> gap_mip(double z_mip, double z) {
  if (z_mip == 0.0) return std::nullopt;
  return 100.0 * (z_mip - z) / z_mip;
}

double agg_gap(double sum_mip, double sum_policy) {
  if (!(sum_mip > 0.0)) throw std::invalid_argument("agg_gap needs a positive reference sum");
  return 100.0 * (sum_mip - sum_policy) / sum_mip;
}

std::pair<double, double> mean_sd(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::optional<double> optional_number(const std::string& cell) {
  const auto t = trim(cell);
  if (t.empty() || t == "-") return std::nullopt;
  std::size_t used = 0;
  const double v = std::stod(t, &used);
  if (used != t.size()) throw std::invalid_argument("bad number: " + t);
  return v;
}

}  // namespace

ReferenceTable parse_references(std::istream& in) {
  ReferenceTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  const auto header = split_csv(line);
  int col_inst = -1, col_mip = -1, col_cp = -1;
  for (int k = 0; k < static_cast<int>(header.size()); ++k) {
    const auto h = trim(header[k]);
    if (h == "instance") col_inst = k;
    if (h == "z_mip") col_mip = k;
    if (h == "z_cp") col_cp = k;
  }
  if (col_inst < 0) throw std::invalid_argument("reference table needs an `instance` column");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    auto cell = [&](int k) { return k >= 0 && k < static_cast<int>(cells.size()) ? cells[k] : std::string(); };
    Reference ref;
    ref.z_mip = optional_number(cell(col_mip));
    ref.z_cp = optional_number(cell(col_cp));
    table[trim(cell(col_inst))] = ref;
  }
  return table;
}

ReferenceTable load_references(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_references(in);
}

void apply_reference(MetricsRow& row, const Reference& ref) {
  row.z_mip = ref.z_mip;
  row.z_cp = ref.z_cp;
  row.gap_mip = std::nullopt;
  row.gap_cp = std::nullopt;
  if (ref.z_mip && *ref.z_mip > 0.0) row.gap_mip = gap_mip(*ref.z_mip, row.profit);
  if (ref.z_cp && *ref.z_cp > 0.0) row.gap_cp = gap_cp(*ref.z_cp, row.profit);
}

MetricsRow make_row(const std::string& instance, const std::string& policy, std::uint64_t seed, const RunRecord& run,
                    double wall_s, const ReferenceTable& refs) {
  MetricsRow row;
  row.instance = instance;
  row.policy = policy;
  row.seed = seed;
  row.profit = run.total_profit;
  row.mean_epoch_ms = mean_sd(run.epoch_ms).first;
  row.wall_s = wall_s;
  row.epochs = run.epochs;
  row.served = static_cast<int>(run.served.size());
  row.total_tasks = run.total_tasks;
  if (const auto it = refs.find(instance); it != refs.end()) apply_reference(row, it->second);
  return row;
}

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round2(v) == 0.0 ? 0.0 : round2(v));
  return buf;
}

std::string fmt2(const std::optional<double>& v) { return v ? fmt2(*v) : std::string(); }

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

bool row_before(const MetricsRow& a, const MetricsRow& b) {
  return std::tie(a.instance, a.policy, a.seed) < std::tie(b.instance, b.policy, b.seed);
}

}  // namespace

std::string write_csv(std::vector<MetricsRow> rows, const CsvOptions& opt) {
  std::sort(rows.begin(), rows.end(), row_before);
  std::ostringstream out;
  out << "instance,policy,seed,profit,z_mip,z_cp,gap_mip,gap_cp,mean_epoch_ms,epochs,served,total_tasks,"
         "profit_sd,mean_time_s,error\n";
  for (const auto& r : rows) {
    out << csv_cell(r.instance) << ',' << csv_cell(r.policy) << ',' << r.seed << ',';
    if (!r.error.empty()) {
      out << ",,,,,,,,,,," << csv_cell(r.error) << '\n';
      continue;
    }
    out << fmt2(r.profit) << ',' << fmt2(r.z_mip) << ',' << fmt2(r.z_cp) << ',' << fmt2(r.gap_mip) << ','
        << fmt2(r.gap_cp) << ',' << (opt.timings ? fmt3(r.mean_epoch_ms) : "") << ',' << r.epochs << ','
        << r.served << ',' << r.total_tasks << ",," << (opt.timings ? fmt3(r.wall_s) : "") << ",\n";
  }

  std::vector<std::string> policies;
  for (const auto& r : rows) {
    if (std::find(policies.begin(), policies.end(), r.policy) == policies.end()) policies.push_back(r.policy);
  }
  std::sort(policies.begin(), policies.end());
  for (const auto& p : policies) {
    std::vector<double> profit, gm, gc, epoch_ms, wall, epochs, served, total;
    std::vector<double> z_mip, z_cp;
    for (const auto& r : rows) {
      if (r.policy != p || !r.error.empty()) continue;
      profit.push_back(r.profit);
      if (r.z_mip) z_mip.push_back(*r.z_mip);
      if (r.z_cp) z_cp.push_back(*r.z_cp);
      if (r.gap_mip) gm.push_back(*r.gap_mip);
      if (r.gap_cp) gc.push_back(*r.gap_cp);
      epoch_ms.push_back(r.mean_epoch_ms);
      wall.push_back(r.wall_s);
      epochs.push_back(r.epochs);
      served.push_back(r.served);
      total.push_back(r.total_tasks);
    }
    auto mean = [](const std::vector<double>& v) { return mean_sd(v).first; };
    auto opt_mean = [&](const std::vector<double>& v) { return v.empty() ? std::string() : fmt2(mean(v)); };
    const auto [pm, psd] = mean_sd(profit);
    out << "summary," << csv_cell(p) << ",," << fmt2(pm) << ',' << opt_mean(z_mip) << ',' << opt_mean(z_cp) << ','
        << opt_mean(gm) << ',' << opt_mean(gc) << ',' << (opt.timings ? fmt3(mean(epoch_ms)) : "") << ','
        << fmt2(mean(epochs)) << ',' << fmt2(mean(served)) << ',' << fmt2(mean(total)) << ',' << fmt2(psd) << ','
        << (opt.timings ? fmt3(mean(wall)) : "") << ",\n";
  }
  return out.str();
}

std::vector<MetricsRow> run_batch(const BatchSpec& spec, const ReferenceTable& refs) {
  const std::vector<Point> coords = spec.coordinates.empty() ? default_coordinates() : spec.coordinates;

  struct Job {
    std::string family;
    int index;
    std::string name;
    std::size_t policy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& family : spec.families) {
    for (int k = 0; k < spec.instances_per_family; ++k) {
      for (std::size_t p = 0; p < spec.policies.size(); ++p) {
        for (const auto seed : spec.seeds) jobs.push_back({family, k, family + "." + std::to_string(k), p, seed});
      }
    }
  }

  std::vector<MetricsRow> rows(jobs.size());
  const int threads = spec.parallelism > 0 ? spec.parallelism : pool_size(0);
  parallel_for(static_cast<int>(jobs.size()), threads, [&](int j) {
    const auto& job = jobs[j];
    const auto& [policy_name, policy_base] = spec.policies[job.policy];
    MetricsRow& row = rows[j];
    row.instance = job.name;
    row.policy = policy_name;
    row.seed = job.seed;
    try {
      auto cfg = family_config(job.family);
      cfg.seed = spec.instance_seed + static_cast<std::uint64_t>(job.index);
      const Instance inst = generate_instance(cfg, coords);
      PolicyConfig policy = policy_base;
      policy.seed = job.seed;
      // Runs already execute concurrently; scenario solves stay sequential inside each run.
      if (threads > 1) policy.parallelism = 1;
      const auto t0 = std::chrono::steady_clock::now();
      const RunRecord run = simulate(inst, policy);
      const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;
      ReferenceTable local;
      if (const auto it = refs.find(job.name); it != refs.end()) {
        local[job.name] = it->second;
      } else if (spec.oracle_refs && inst.num_tasks() <= spec.oracle_refs->max_tasks &&
                 inst.num_workers() <= spec.oracle_refs->max_workers) {
        local[job.name].z_mip = exact_solve(inst, *spec.oracle_refs).optimal_profit;
      }
      row = make_row(job.name, policy_name, job.seed, run, wall.count(), local);
    } catch (const std::exception& e) {
      row.error = e.what();
      if (row.error.empty()) row.error = "failed";
    }
  });
  std::sort(rows.begin(), rows.end(), row_before);
  return rows;
}

std::vector<MetricsRow> collect_runs(const std::filesystem::path& dir, const ReferenceTable& refs) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<MetricsRow> rows;
  for (const auto& f : files) {
    std::ifstream in(f);
    MetricsRow row;
    try {
      const auto doc = nlohmann::json::parse(in);
      row.instance = doc.at("instance").get<std::string>();
      row.policy = doc.at("policy").get<std::string>();
      row.seed = doc.at("seed").get<std::uint64_t>();
      row.profit = doc.at("total_profit").get<double>();
      row.total_tasks = doc.at("total_tasks").get<int>();
      row.epochs = doc.at("epochs").get<int>();
      row.served = static_cast<int>(doc.at("served").size());
      const auto ms = doc.at("epoch_ms").get<std::vector<double>>();
      row.mean_epoch_ms = mean_sd(ms).first;
      row.wall_s = doc.value("wall_s", 0.0);
      if (const auto it = refs.find(row.instance); it != refs.end()) apply_reference(row, it->second);
    } catch (const std::exception& e) {
      row.instance = f.stem().string();
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), row_before);
  return rows;
}

Instance specialize_single_depot(const DtopInstance& dtop) {
  if (dtop.vehicles < 1) throw std::invalid_argument("at least one vehicle required");
  Instance inst;
  inst.horizon = dtop.shift_end;
  inst.profit_scale = 1.0;
  for (int w = 0; w < dtop.vehicles; ++w) {
    inst.workers.push_back({w, dtop.depot, dtop.depot, dtop.shift_start, dtop.shift_end});
  }
  for (const auto& c : dtop.customers) {
    Task t;
    t.id = c.id;
    t.location = c.location;
    t.profit = c.profit;
    t.duration = c.duration;
    t.window_open = c.window_open;
    t.window_close = c.window_close;
    t.release = c.dynamic ? c.window_open : 0.0;
    inst.tasks.push_back(t);
  }
  derive_euclidean_travel(inst);
  return inst;
}

}  // namespace dtopsc
