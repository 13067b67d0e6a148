#include "dtopsc/alns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dtopsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProfitEps = 1e-9;
// Keeps every operator selectable after a run of unrewarded segments.
constexpr double kMinWeight = 1e-6;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct SlotCost {
  double cost = kInf;
  std::size_t position = 0;
  bool feasible = false;
};

template <class CostFn>
SlotCost best_slot(const Instance& inst, const Route& route, int task, CostFn&& cost) {
  SlotCost best;
  if (!route.feasible()) return best;
  for (std::size_t pos = 1; pos < route.nodes.size(); ++pos) {
    const auto ev = evaluate_insertion(inst, route, task, pos);
    if (!ev.feasible) continue;
    const double c = cost(ev);
    if (!best.feasible || c < best.cost) best = {c, pos, true};
  }
  return best;
}

enum class Choice { Cheapest, Regret2, Regret3 };

// Insertion loop shared by construction and repair. Keeps a (task x route)
// table of best slots and refreshes only the column of the route touched by
// the previous insertion.
template <class CostFn>
Plan insert_until_stuck(Plan plan, const Instance& inst, Choice choice, double penalty, CostFn&& cost) {
  std::vector<int> pool = plan.unrouted();
  const std::size_t R = plan.routes.size();
  std::vector<std::vector<SlotCost>> table(pool.size(), std::vector<SlotCost>(R));
  for (std::size_t u = 0; u < pool.size(); ++u) {
    for (std::size_t r = 0; r < R; ++r) table[u][r] = best_slot(inst, plan.routes[r], pool[u], cost);
  }
  const int k = choice == Choice::Regret3 ? 3 : 2;
  std::vector<double> ranked;
  ranked.reserve(R);

  while (!pool.empty()) {
    std::ptrdiff_t pick = -1;
    std::size_t pick_route = 0;
    double pick_key = 0.0;
    double pick_cost = 0.0;
    for (std::size_t u = 0; u < pool.size(); ++u) {
      ranked.clear();
      std::size_t best_r = 0;
      double best_c = kInf;
      for (std::size_t r = 0; r < R; ++r) {
        if (!table[u][r].feasible) continue;
        ranked.push_back(table[u][r].cost);
        if (table[u][r].cost < best_c) {
          best_c = table[u][r].cost;
          best_r = r;
        }
      }
      if (ranked.empty()) continue;
      if (choice == Choice::Cheapest) {
        if (pick < 0 || best_c < pick_cost) {
          pick = static_cast<std::ptrdiff_t>(u);
          pick_route = best_r;
          pick_cost = best_c;
        }
        continue;
      }
      std::sort(ranked.begin(), ranked.end());
      double regret = 0.0;
      for (int rank = 1; rank < k; ++rank) {
        const double alt = static_cast<std::size_t>(rank) < ranked.size() ? ranked[rank] : penalty;
        regret += alt - ranked[0];
      }
      if (pick < 0 || regret > pick_key || (regret == pick_key && best_c < pick_cost)) {
        pick = static_cast<std::ptrdiff_t>(u);
        pick_route = best_r;
        pick_key = regret;
        pick_cost = best_c;
      }
    }
    if (pick < 0) break;

    const int task = pool[pick];
    insert_task(plan, inst, task, static_cast<int>(pick_route), table[pick][pick_route].position);
    pool.erase(pool.begin() + pick);
    table.erase(table.begin() + pick);
    for (std::size_t u = 0; u < pool.size(); ++u) {
      table[u][pick_route] = best_slot(inst, plan.routes[pick_route], pool[u], cost);
    }
  }
  return plan;
}

std::vector<std::pair<int, std::size_t>> routed_positions(const Plan& plan) {
  std::vector<std::pair<int, std::size_t>> out;
  for (std::size_t r = 0; r < plan.routes.size(); ++r) {
    for (std::size_t g = 1; g + 1 < plan.routes[r].nodes.size(); ++g) out.emplace_back(static_cast<int>(r), g);
  }
  return out;
}

}  // namespace

void AlnsConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(destroy_fraction_lo > 0.0) || destroy_fraction_hi > 1.0 || destroy_fraction_lo > destroy_fraction_hi) {
    throw std::invalid_argument("destroy fraction range must satisfy 0 < lo <= hi <= 1");
  }
  if (segment_length < 1) throw std::invalid_argument("segment_length must be >= 1");
  if (reaction_factor < 0.0 || reaction_factor > 1.0) throw std::invalid_argument("reaction_factor must be in [0,1]");
  if (!(sa_initial_acceptance > 0.0 && sa_initial_acceptance < 1.0)) {
    throw std::invalid_argument("sa_initial_acceptance must be in (0,1)");
  }
  if (!(sa_cooling > 0.0 && sa_cooling < 1.0)) throw std::invalid_argument("sa_cooling must be in (0,1)");
  if (!(sa_reference_fraction > 0.0)) throw std::invalid_argument("sa_reference_fraction must be positive");
  if (local_search_cadence < 1) throw std::invalid_argument("local_search_cadence must be >= 1");
  if (!(insertion_noise >= 0.0)) throw std::invalid_argument("insertion_noise must be >= 0");
}

AlnsConfig parse_alns_config(std::istream& in, AlnsConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto fail = [&] { return std::invalid_argument("line " + std::to_string(lineno) + ": bad value for '" + key + "'"); };
    const auto real = [&] {
      try {
        return std::stod(value);
      } catch (const std::logic_error&) {
        throw fail();
      }
    };
    const auto integer = [&] {
      try {
        return std::stoll(value);
      } catch (const std::logic_error&) {
        throw fail();
      }
    };
    if (key == "iterations") cfg.iterations = static_cast<int>(integer());
    else if (key == "destroy_fraction_lo") cfg.destroy_fraction_lo = real();
    else if (key == "destroy_fraction_hi") cfg.destroy_fraction_hi = real();
    else if (key == "segment_length") cfg.segment_length = static_cast<int>(integer());
    else if (key == "reaction_factor") cfg.reaction_factor = real();
    else if (key == "score_best") cfg.score_best = real();
    else if (key == "score_improve") cfg.score_improve = real();
    else if (key == "score_accept") cfg.score_accept = real();
    else if (key == "sa_initial_acceptance") cfg.sa_initial_acceptance = real();
    else if (key == "sa_reference_fraction") cfg.sa_reference_fraction = real();
    else if (key == "sa_cooling") cfg.sa_cooling = real();
    else if (key == "local_search_cadence") cfg.local_search_cadence = static_cast<int>(integer());
    else if (key == "profit_weight") cfg.profit_weight = real();
    else if (key == "insertion_noise") cfg.insertion_noise = real();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(integer());
    else throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

AlnsConfig load_alns_config(const std::filesystem::path& path, AlnsConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_alns_config(in, base);
}

int select_operator(const OperatorFamily& family, Rng& rng) {
  double total = 0.0;
  for (const auto& op : family) total += op.weight;
  std::uniform_real_distribution<double> u(0.0, total);
  double x = u(rng);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].weight <= 0.0) continue;
    if (x < family[i].weight) return static_cast<int>(i);
    x -= family[i].weight;
  }
  for (std::size_t i = family.size(); i-- > 0;) {
    if (family[i].weight > 0.0) return static_cast<int>(i);
  }
  return 0;
}

void update_weights(OperatorFamily& family, double reaction_factor) {
  for (auto& op : family) {
    if (op.uses >= 1) {
      op.weight = (1.0 - reaction_factor) * op.weight + reaction_factor * (op.score / op.uses);
      op.weight = std::max(op.weight, kMinWeight);
    }
    op.score = 0.0;
    op.uses = 0;
  }
}

InsertionCosting make_costing(const Instance& instance, const AlnsConfig& config) {
  return {config.profit_weight, 10.0 * big_m(instance), config.insertion_noise * instance.travel.max_time()};
}

Plan greedy_construct(const Instance& inst) {
  return insert_until_stuck(empty_plan(inst), inst, Choice::Cheapest, 0.0, [&](const InsertionEval& ev) {
    return ev.detour_cost / std::max(ev.profit_delta, 1e-12);
  });
}

double worst_removal_score(const Instance& inst, const Route& route, std::size_t position) {
  return removal_saving(inst, route, position) - inst.tasks[route.nodes[position]].profit;
}

double shaw_relatedness(const Instance& inst, int a, double start_a, int b, double start_b, double max_travel) {
  const double spatial = max_travel > 0.0 ? inst.travel(a, b) / max_travel : 0.0;
  const double temporal = inst.horizon > 0.0 ? std::abs(start_a - start_b) / inst.horizon : 0.0;
  return spatial + temporal;
}

Plan destroy(Plan plan, const Instance& inst, DestroyOp op, std::size_t count, Rng& rng) {
  const std::size_t routed = plan.routed_count();
  if (count > routed) throw std::invalid_argument("destroy count exceeds routed tasks");
  if (count == 0) return plan;

  switch (op) {
    case DestroyOp::Random: {
      std::vector<int> tasks;
      for (const auto& r : plan.routes) tasks.insert(tasks.end(), r.tasks().begin(), r.tasks().end());
      std::sort(tasks.begin(), tasks.end());
      std::shuffle(tasks.begin(), tasks.end(), rng);
      for (std::size_t i = 0; i < count; ++i) remove_task(plan, inst, tasks[i]);
      break;
    }
    case DestroyOp::Worst: {
      for (std::size_t n = 0; n < count; ++n) {
        double best = -kInf;
        int victim = -1;
        for (const auto& [r, g] : routed_positions(plan)) {
          const double s = worst_removal_score(inst, plan.routes[r], g);
          const int t = plan.routes[r].nodes[g];
          if (s > best || (s == best && t < victim)) {
            best = s;
            victim = t;
          }
        }
        remove_task(plan, inst, victim);
      }
      break;
    }
    case DestroyOp::Shaw: {
      std::vector<int> tasks;
      std::vector<double> starts(inst.tasks.size(), 0.0);
      for (const auto& r : plan.routes) {
        for (std::size_t g = 1; g + 1 < r.nodes.size(); ++g) {
          tasks.push_back(r.nodes[g]);
          starts[r.nodes[g]] = r.start_times[g];
        }
      }
      std::sort(tasks.begin(), tasks.end());
      const double max_t = inst.travel.max_time();
      std::vector<int> removed{tasks[std::uniform_int_distribution<std::size_t>(0, tasks.size() - 1)(rng)]};
      std::vector<char> taken(inst.tasks.size(), 0);
      taken[removed[0]] = 1;
      while (removed.size() < count) {
        const int ref = removed[std::uniform_int_distribution<std::size_t>(0, removed.size() - 1)(rng)];
        double best = kInf;
        int next = -1;
        for (const int t : tasks) {
          if (taken[t]) continue;
          const double rel = shaw_relatedness(inst, ref, starts[ref], t, starts[t], max_t);
          if (rel < best) {
            best = rel;
            next = t;
          }
        }
        taken[next] = 1;
        removed.push_back(next);
      }
      for (const int t : removed) remove_task(plan, inst, t);
      break;
    }
  }
  return plan;
}

Plan repair(Plan plan, const Instance& inst, RepairOp op, const InsertionCosting& costing, Rng* rng) {
  std::uniform_real_distribution<double> jitter(-costing.noise, costing.noise);
  const bool noisy = rng && costing.noise > 0.0;
  const auto cost = [&](const InsertionEval& ev) {
    const double c = ev.detour_cost - costing.profit_weight * ev.profit_delta;
    return noisy ? c + jitter(*rng) : c;
  };
  switch (op) {
    case RepairOp::Greedy:
      return insert_until_stuck(std::move(plan), inst, Choice::Cheapest, costing.missing_penalty, cost);
    case RepairOp::Regret2:
      return insert_until_stuck(std::move(plan), inst, Choice::Regret2, costing.missing_penalty, cost);
    case RepairOp::Regret3:
      return insert_until_stuck(std::move(plan), inst, Choice::Regret3, costing.missing_penalty, cost);
  }
  return plan;
}

bool two_opt(Plan& plan, const Instance& inst, int route) {
  bool any = false;
  bool improved = true;
  while (improved) {
    improved = false;
    const auto& r = plan.routes[route];
    const std::size_t last = r.nodes.size() - 2;  // last task position
    const int w = r.worker;
    for (std::size_t i = 1; i < last && !improved; ++i) {
      for (std::size_t j = i + 1; j <= last && !improved; ++j) {
        const auto& n = r.nodes;
        const double delta = inst.travel(w, n[i - 1], n[j]) + inst.travel(w, n[i], n[j + 1]) -
                             inst.travel(w, n[i - 1], n[i]) - inst.travel(w, n[j], n[j + 1]);
        if (delta > -1e-9) continue;
        auto nodes = n;
        std::reverse(nodes.begin() + static_cast<std::ptrdiff_t>(i), nodes.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        auto candidate = retime_route(inst, w, std::move(nodes), r.start_time);
        if (candidate.feasible() && candidate.travel < r.travel - 1e-9) {
          plan.routes[route] = std::move(candidate);
          improved = any = true;
        }
      }
    }
  }
  return any;
}

std::optional<RelocateMove> best_relocate(const Plan& plan, const Instance& inst) {
  std::vector<RelocateMove> moves;
  for (std::size_t a = 0; a < plan.routes.size(); ++a) {
    const auto& ra = plan.routes[a];
    for (std::size_t g = 1; g + 1 < ra.nodes.size(); ++g) {
      const int task = ra.nodes[g];
      const double saving = removal_saving(inst, ra, g);
      for (std::size_t b = 0; b < plan.routes.size(); ++b) {
        if (b == a) continue;
        const auto& rb = plan.routes[b];
        for (std::size_t q = 1; q < rb.nodes.size(); ++q) {
          const auto ev = evaluate_insertion(inst, rb, task, q);
          if (!ev.feasible) continue;
          // Worker-specific matrices make the removal saving route-dependent;
          // the gain below is exact for the shared matrix and re-verified on apply.
          const double gain = saving - ev.detour_cost;
          if (gain > 1e-9) moves.push_back({task, static_cast<int>(b), q, gain});
        }
      }
    }
  }
  std::stable_sort(moves.begin(), moves.end(), [](const auto& x, const auto& y) { return x.gain > y.gain; });
  for (const auto& m : moves) {
    const auto& ra = plan.routes[plan.owner[m.task]];
    auto nodes = ra.nodes;
    std::erase(nodes, m.task);
    if (retime_route(inst, ra.worker, std::move(nodes), ra.start_time).feasible()) return m;
  }
  return std::nullopt;
}

void apply_relocate(Plan& plan, const Instance& inst, const RelocateMove& m) {
  const int from = plan.owner[m.task];
  auto src = plan.routes[from].nodes;
  std::erase(src, m.task);
  auto dst = plan.routes[m.to_route].nodes;
  dst.insert(dst.begin() + static_cast<std::ptrdiff_t>(m.position), m.task);
  replace_route(plan, inst, from, std::move(src));
  replace_route(plan, inst, m.to_route, std::move(dst));
}

std::optional<SwapMove> best_swap(const Plan& plan, const Instance& inst) {
  struct Cand {
    int ra, rb;
    std::size_t ga, gb;
    double gain;
  };
  std::vector<Cand> cands;
  for (std::size_t a = 0; a < plan.routes.size(); ++a) {
    const auto& A = plan.routes[a];
    const int wa = A.worker;
    for (std::size_t b = a + 1; b < plan.routes.size(); ++b) {
      const auto& B = plan.routes[b];
      const int wb = B.worker;
      for (std::size_t ga = 1; ga + 1 < A.nodes.size(); ++ga) {
        const int x = A.nodes[ga], ap = A.nodes[ga - 1], an = A.nodes[ga + 1];
        for (std::size_t gb = 1; gb + 1 < B.nodes.size(); ++gb) {
          const int y = B.nodes[gb], bp = B.nodes[gb - 1], bn = B.nodes[gb + 1];
          const double gain = inst.travel(wa, ap, x) + inst.travel(wa, x, an) - inst.travel(wa, ap, y) -
                              inst.travel(wa, y, an) + inst.travel(wb, bp, y) + inst.travel(wb, y, bn) -
                              inst.travel(wb, bp, x) - inst.travel(wb, x, bn);
          if (gain > 1e-9) cands.push_back({static_cast<int>(a), static_cast<int>(b), ga, gb, gain});
        }
      }
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) { return x.gain > y.gain; });
  for (const auto& c : cands) {
    const auto& A = plan.routes[c.ra];
    const auto& B = plan.routes[c.rb];
    auto na = A.nodes;
    auto nb = B.nodes;
    std::swap(na[c.ga], nb[c.gb]);
    if (!retime_route(inst, A.worker, std::move(na), A.start_time).feasible()) continue;
    if (!retime_route(inst, B.worker, std::move(nb), B.start_time).feasible()) continue;
    return SwapMove{A.nodes[c.ga], B.nodes[c.gb], c.gain};
  }
  return std::nullopt;
}

void apply_swap(Plan& plan, const Instance& inst, const SwapMove& m) {
  const int ra = plan.owner[m.task_a];
  const int rb = plan.owner[m.task_b];
  auto na = plan.routes[ra].nodes;
  auto nb = plan.routes[rb].nodes;
  std::replace(na.begin(), na.end(), m.task_a, m.task_b);
  std::replace(nb.begin(), nb.end(), m.task_b, m.task_a);
  replace_route(plan, inst, ra, std::move(na));
  replace_route(plan, inst, rb, std::move(nb));
}

Plan local_search(Plan plan, const Instance& inst, int iteration, const AlnsConfig& config) {
  for (std::size_t r = 0; r < plan.routes.size(); ++r) two_opt(plan, inst, static_cast<int>(r));
  if (iteration % config.local_search_cadence != 0 || plan.routes.size() < 2) return plan;

  // Every accepted move strictly lowers total travel, so the loop terminates;
  // the cap only bounds pathological float cycling.
  for (int guard = 0; guard < 10000; ++guard) {
    if (auto m = best_relocate(plan, inst)) {
      apply_relocate(plan, inst, *m);
      continue;
    }
    if (auto s = best_swap(plan, inst)) {
      apply_swap(plan, inst, *s);
      continue;
    }
    break;
  }
  for (std::size_t r = 0; r < plan.routes.size(); ++r) two_opt(plan, inst, static_cast<int>(r));
  return plan;
}

bool accept(double candidate_profit, double current_profit, double temperature, Rng& rng) {
  if (candidate_profit >= current_profit) return true;
  const double p = std::exp((candidate_profit - current_profit) / temperature);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

bool better_plan(const Plan& a, const Plan& b) {
  if (a.profit > b.profit + kProfitEps) return true;
  if (a.profit < b.profit - kProfitEps) return false;
  return plan_travel(a) < plan_travel(b) - 1e-9;
}

Plan alns_solve(const Instance& inst, const AlnsConfig& config, AlnsTrace* trace) {
  config.validate();
  Rng rng(config.seed);
  const auto costing = make_costing(inst, config);

  Plan current = greedy_construct(inst);
  Plan best = current;
  OperatorBank bank;
  if (trace) trace->best_profit.clear();

  double reference = current.profit;
  if (!(reference > 0.0)) {
    reference = 0.0;
    for (const auto& t : inst.tasks) reference += t.profit;
    reference = inst.tasks.empty() ? 1.0 : reference / static_cast<double>(inst.tasks.size());
    if (!(reference > 0.0)) reference = 1.0;
  }
  double temperature = config.sa_reference_fraction * reference / -std::log(config.sa_initial_acceptance);

  std::uniform_real_distribution<double> fraction(config.destroy_fraction_lo, config.destroy_fraction_hi);
  for (int it = 1; it <= config.iterations; ++it) {
    const int d = select_operator(bank.destroy, rng);
    const int r = select_operator(bank.repair, rng);
    const std::size_t routed = current.routed_count();
    std::size_t count = 0;
    if (routed > 0) {
      // At least two removals whenever possible; a single removal is usually refilled as it was.
      const auto n = static_cast<std::size_t>(std::lround(fraction(rng) * static_cast<double>(routed)));
      count = std::clamp<std::size_t>(n, std::min<std::size_t>(2, routed), routed);
    }

    Plan candidate = destroy(current, inst, static_cast<DestroyOp>(d), count, rng);
    const bool noisy = std::bernoulli_distribution(0.5)(rng);
    candidate = repair(std::move(candidate), inst, static_cast<RepairOp>(r), costing, noisy ? &rng : nullptr);
    candidate = local_search(std::move(candidate), inst, it, config);

    double score = 0.0;
    const bool improves_current = candidate.profit > current.profit + kProfitEps;
    if (better_plan(candidate, best)) {
      best = candidate;
      score = config.score_best;
    } else if (improves_current) {
      score = config.score_improve;
    }
    if (accept(candidate.profit, current.profit, temperature, rng)) {
      if (score == 0.0) score = config.score_accept;
      current = std::move(candidate);
    }

    bank.destroy[d].score += score;
    bank.destroy[d].uses += 1;
    bank.repair[r].score += score;
    bank.repair[r].uses += 1;
    if (it % config.segment_length == 0) {
      update_weights(bank.destroy, config.reaction_factor);
      update_weights(bank.repair, config.reaction_factor);
    }
    temperature *= config.sa_cooling;
    if (trace) trace->best_profit.push_back(best.profit);
  }
  if (trace) trace->final_bank = bank;
  return best;
}

}  // namespace dtopsc
