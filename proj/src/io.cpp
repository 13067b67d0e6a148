#include "dtopsc/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dtopsc {

using nlohmann::json;

namespace {

bool is_euclidean(const Instance& inst) {
  if (inst.travel.override_slots() > 0) return false;
  const auto derived = build_travel_matrix(inst.node_coordinates());
  if (derived.size() != inst.travel.size()) return false;
  return (derived.shared() - inst.travel.shared()).cwiseAbs().maxCoeff() <= 1e-12;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

Instance parse_instance(const std::string& text) {
  const json doc = json::parse(text);
  Instance inst;
  inst.horizon = doc.at("horizon").get<double>();
  inst.profit_scale = doc.value("profit_scale", 1.0);
  for (const auto& t : doc.at("tasks")) {
    Task task;
    task.id = t.at("id").get<int>();
    task.location = Point(t.at("x").get<double>(), t.at("y").get<double>());
    task.profit = t.at("profit").get<double>();
    task.duration = t.at("duration").get<double>();
    task.window_open = t.at("open").get<double>();
    task.window_close = t.at("close").get<double>();
    task.release = t.at("release").get<double>();
    inst.tasks.push_back(task);
  }
  for (const auto& w : doc.at("workers")) {
    Worker worker;
    worker.id = w.at("id").get<int>();
    worker.origin = Point(w.at("sx").get<double>(), w.at("sy").get<double>());
    worker.destination = Point(w.at("dx").get<double>(), w.at("dy").get<double>());
    worker.shift_start = w.at("start").get<double>();
    worker.shift_end = w.at("end").get<double>();
    inst.workers.push_back(worker);
  }
  if (doc.contains("travel")) {
    const auto& rows = doc.at("travel");
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n != inst.num_nodes()) throw std::runtime_error("travel matrix size does not match node count");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n) throw std::runtime_error("travel matrix is not square");
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
    }
    inst.travel = TravelMatrix(std::move(m));
  } else {
    derive_euclidean_travel(inst);
  }
  return inst;
}

Instance load_instance(const std::filesystem::path& path) { return parse_instance(read_file(path)); }

std::string dump_instance(const Instance& inst, bool with_travel) {
  json doc;
  doc["horizon"] = inst.horizon;
  doc["profit_scale"] = inst.profit_scale;
  doc["tasks"] = json::array();
  for (const auto& t : inst.tasks) {
    doc["tasks"].push_back({{"id", t.id},
                            {"x", t.location.x()},
                            {"y", t.location.y()},
                            {"profit", t.profit},
                            {"duration", t.duration},
                            {"open", t.window_open},
                            {"close", t.window_close},
                            {"release", t.release}});
  }
  doc["workers"] = json::array();
  for (const auto& w : inst.workers) {
    doc["workers"].push_back({{"id", w.id},
                              {"sx", w.origin.x()},
                              {"sy", w.origin.y()},
                              {"dx", w.destination.x()},
                              {"dy", w.destination.y()},
                              {"start", w.shift_start},
                              {"end", w.shift_end}});
  }
  if (with_travel || !is_euclidean(inst)) {
    const auto& m = inst.travel.shared();
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    doc["travel"] = std::move(rows);
  }
  return doc.dump(2);
}

void save_instance(const Instance& inst, const std::filesystem::path& path, bool with_travel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_instance(inst, with_travel) << '\n';
}

std::vector<Point> parse_coordinates(std::istream& in) {
  std::vector<Point> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x = 0, y = 0;
    if (!(ls >> x)) continue;
    if (!(ls >> y)) throw std::runtime_error("coordinate line " + std::to_string(lineno) + " needs two values");
    pts.emplace_back(x, y);
  }
  return pts;
}

std::vector<Point> load_coordinates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_coordinates(in);
}

}  // namespace dtopsc
