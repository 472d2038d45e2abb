#include "dfdse/ilp_sched.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace dfdse {

int MilpModel::add_variable(std::string name, double lower, double upper, bool binary) {
  variables.push_back(MilpVariable{std::move(name), lower, upper, binary});
  return static_cast<int>(variables.size()) - 1;
}

void MilpModel::add_row(std::string name, std::vector<std::pair<int, double>> terms, RowSense sense, double rhs) {
  rows.push_back(MilpRow{std::move(name), std::move(terms), sense, rhs});
}

namespace {

// OUT(a): the actor's writes, or the actor itself for sinks. IN(a): reads, or the actor for sources.
std::vector<int> out_tasks(const TaskSet& ts, int a) {
  return ts.writes_of_actor[a].empty() ? std::vector<int>{a} : ts.writes_of_actor[a];
}

std::vector<int> in_tasks(const TaskSet& ts, int a) {
  return ts.reads_of_actor[a].empty() ? std::vector<int>{a} : ts.reads_of_actor[a];
}

std::vector<int> actors_on(const TaskSet& ts, int r) {
  std::vector<int> out;
  for (int t : ts.on_resource[r])
    if (ts.tasks[t].kind == TaskKind::Actor) out.push_back(t);
  return out;
}

}  // namespace

MilpModel build_ilp(const TaskSet& ts) {
  MilpModel m;
  const double sum = static_cast<double>(ts.total_duration());
  const double D = 2 * sum + 1;
  m.big_m = D;
  m.period = m.add_variable("P", 0, std::max(sum, 1.0));
  m.objective = {{m.period, 1.0}};
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < ts.tasks.size(); ++t) m.start.push_back(m.add_variable("s_" + std::to_string(t), 0, inf));
  auto s = [&](int t) { return m.start[t]; };
  auto tau = [&](int t) { return static_cast<double>(ts.tasks[t].duration); };

  for (std::size_t c = 0; c < ts.write_of_channel.size(); ++c) {
    const int w = ts.write_of_channel[c];
    for (int r : ts.reads_of_channel[c])
      m.add_row("eq16_" + std::to_string(w) + "_" + std::to_string(r),
                {{s(w), 1}, {s(r), -1}, {m.period, -static_cast<double>(ts.channel_delay[c])}}, RowSense::LessEqual,
                -tau(w));
  }
  for (int a = 0; a < ts.actor_count(); ++a) {
    for (int r : ts.reads_of_actor[a])
      m.add_row("eq17_" + std::to_string(r), {{s(r), 1}, {s(a), -1}}, RowSense::LessEqual, -tau(r));
    for (int w : ts.writes_of_actor[a])
      m.add_row("eq18_" + std::to_string(w), {{s(a), 1}, {s(w), -1}}, RowSense::LessEqual, -tau(a));
  }
  for (std::size_t r = 0; r < ts.on_resource.size(); ++r)
    for (int t : ts.on_resource[r])
      for (int u : ts.on_resource[r]) {
        std::string name = "eq19_" + std::to_string(r) + "_" + std::to_string(t) + "_" + std::to_string(u);
        if (t == u)
          m.add_row(std::move(name), {{m.period, -1}}, RowSense::LessEqual, -tau(t));
        else
          m.add_row(std::move(name), {{s(t), 1}, {s(u), -1}, {m.period, -1}}, RowSense::LessEqual, -tau(t));
      }

  auto pair_vars = [&](int t, int u) {
    auto it = m.order.find({t, u});
    if (it != m.order.end()) return false;
    int e1 = m.add_variable("e_" + std::to_string(t) + "_" + std::to_string(u), 0, 1, true);
    int e2 = m.add_variable("e_" + std::to_string(u) + "_" + std::to_string(t), 0, 1, true);
    m.order[{t, u}] = e1;
    m.order[{u, t}] = e2;
    m.add_row("eq21_" + std::to_string(t) + "_" + std::to_string(u), {{e1, 1}, {e2, 1}}, RowSense::Equal, 1);
    return true;
  };
  for (int r = ts.core_count; r < static_cast<int>(ts.on_resource.size()); ++r) {
    const auto& on = ts.on_resource[r];
    for (std::size_t i = 0; i < on.size(); ++i)
      for (std::size_t j = i + 1; j < on.size(); ++j) {
        const int t = std::min(on[i], on[j]);
        const int u = std::max(on[i], on[j]);
        if (!pair_vars(t, u)) continue;
        for (auto [x, y] : {std::pair{t, u}, std::pair{u, t}})
          m.add_row("eq22_" + std::to_string(x) + "_" + std::to_string(y),
                    {{s(x), 1}, {s(y), -1}, {m.order.at({x, y}), D}}, RowSense::LessEqual, D - tau(x));
      }
  }
  for (int p = 0; p < ts.core_count; ++p) {
    auto on = actors_on(ts, p);
    for (std::size_t i = 0; i < on.size(); ++i)
      for (std::size_t j = i + 1; j < on.size(); ++j) {
        const int a = std::min(on[i], on[j]);
        const int b = std::max(on[i], on[j]);
        pair_vars(a, b);
        for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}})
          for (int o : out_tasks(ts, x))
            for (int in : in_tasks(ts, y))
              m.add_row("eq23_" + std::to_string(o) + "_" + std::to_string(in),
                        {{s(o), 1}, {s(in), -1}, {m.order.at({x, y}), D}}, RowSense::LessEqual, D - tau(o));
      }
  }
  return m;
}

std::string write_lp(const MilpModel& m) {
  std::ostringstream os;
  os << std::setprecision(15);
  auto terms = [&](const std::vector<std::pair<int, double>>& ts) {
    int n = 0;
    for (const auto& [v, c] : ts) {
      if (c == 0) continue;
      if (n > 0 && n % 6 == 0) os << "\n  ";
      os << (c < 0 ? " - " : " + ") << std::abs(c) << ' ' << m.variables[v].name;
      ++n;
    }
    if (n == 0) os << " 0 " << m.variables.front().name;
  };
  os << "\\ modulo scheduling model\nMinimize\n obj:";
  terms(m.objective);
  os << "\nSubject To\n";
  for (const auto& r : m.rows) {
    os << ' ' << r.name << ':';
    terms(r.terms);
    os << (r.sense == RowSense::LessEqual ? " <= " : r.sense == RowSense::GreaterEqual ? " >= " : " = ") << r.rhs
       << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.variables) {
    if (v.binary) continue;
    if (std::isinf(v.upper)) {
      if (v.lower != 0) os << ' ' << v.name << " >= " << v.lower << '\n';
    } else {
      os << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
    }
  }
  os << "Binaries\n";
  for (const auto& v : m.variables)
    if (v.binary) os << ' ' << v.name << '\n';
  os << "End\n";
  return os.str();
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleIncumbent: return "feasible-incumbent";
    case SolveStatus::TimeoutNoSolution: return "timeout-no-solution";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

SolverConfig solver_from_environment(double timeout_seconds) {
  SolverConfig c;
  c.timeout_seconds = timeout_seconds;
  if (const char* e = std::getenv("DFDSE_MILP_SOLVER")) c.executable = e;
  return c;
}

SolveOutcome solve(const MilpModel& model, const SolverConfig& config) {
  if (config.executable.empty()) return solve_internal(model, config.timeout_seconds, config.internal_node_limit);
  return solve_external(model, config.executable, config.timeout_seconds);
}

Schedule schedule_from_solution(const TaskSet& ts, const MilpModel& m, const SolveOutcome& out) {
  if (out.values.size() != m.variables.size()) throw SolverError("solution does not cover the model");
  Schedule sched;
  sched.period = std::max<Ticks>(1, static_cast<Ticks>(std::ceil(out.values[m.period] - 1e-6)));
  std::vector<int> task_of(m.variables.size(), -1);
  for (std::size_t t = 0; t < m.start.size(); ++t) task_of[m.start[t]] = static_cast<int>(t);
  auto fixed = [&](int v) -> double {
    if (v == m.period) return static_cast<double>(sched.period);
    return std::round(out.values[v]);
  };
  struct Arc {
    int from;
    int to;
    Ticks w;
  };
  std::vector<Arc> arcs;
  for (const auto& r : m.rows) {
    double k = r.rhs;
    int plus = -1;
    int minus = -1;
    for (const auto& [v, c] : r.terms) {
      if (task_of[v] < 0) {
        k -= c * fixed(v);
      } else if (c > 0) {
        plus = task_of[v];
      } else {
        minus = task_of[v];
      }
    }
    if (r.sense != RowSense::LessEqual || (plus < 0 && minus < 0)) continue;
    if (plus < 0 || minus < 0) throw SolverError("unexpected row shape in " + r.name);
    // s_plus - s_minus <= k  =>  s_minus >= s_plus - k
    arcs.push_back({plus, minus, static_cast<Ticks>(std::llround(-k))});
  }
  std::vector<Ticks> s(ts.tasks.size(), 0);
  bool changed = true;
  for (std::size_t it = 0; changed; ++it) {
    if (it > ts.tasks.size() + 1) throw SolverError("solution orderings are inconsistent at the rounded period");
    changed = false;
    for (const auto& a : arcs)
      if (s[a.from] + a.w > s[a.to]) {
        s[a.to] = s[a.from] + a.w;
        changed = true;
      }
  }
  sched.start = std::move(s);
  return sched;
}

Decoded decode_via_ilp(const IndexedGraph& g, const std::vector<ChannelDecision>& decisions,
                       const std::vector<int>& actor_core, const ArchitectureGraph& arch, const SolverConfig& config) {
  Decoded d;
  d.capacity = g.capacity;
  d.binding = determine_channel_bindings(g, decisions, d.capacity, actor_core, arch);
  while (true) {
    d.tasks = task_durations(g, actor_core, d.binding.memory, arch);
    MilpModel model = build_ilp(d.tasks);
    SolveOutcome out = solve(model, config);
    if (out.status == SolveStatus::Infeasible) throw SolverError("scheduling model reported infeasible");
    if (out.status == SolveStatus::TimeoutNoSolution) {
      d.infeasible_at_budget = true;
      d.proven_optimal = false;
      d.schedule = Schedule{};
      return d;
    }
    d.schedule = schedule_from_solution(d.tasks, model, out);
    d.proven_optimal = out.status == SolveStatus::Optimal;
    for (int c = 0; c < g.channel_count(); ++c)
      d.capacity[c] = std::max(d.capacity[c], required_capacity(d.tasks, d.schedule, c));
    if (bindings_fit(g, d.binding, d.capacity, arch)) break;
    d.binding = determine_channel_bindings(g, decisions, d.capacity, actor_core, arch);
    ++d.rebinds;
  }
  return d;
}

namespace {

constexpr Ticks kNone = std::numeric_limits<Ticks>::min() / 4;

// Longest-path closure over difference constraints s_v >= s_u + w.
class Closure {
 public:
  explicit Closure(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, kNone) {
    for (int i = 0; i < n; ++i) at(i, i) = 0;
  }

  // False when the new constraint closes a positive cycle.
  bool add(int u, int v, Ticks w) {
    if (at(v, u) != kNone && w + at(v, u) > 0) return false;
    if (at(u, v) != kNone && at(u, v) >= w) return true;
    for (int i = 0; i < n_; ++i) {
      if (at(i, u) == kNone) continue;
      const Ticks iu = at(i, u) + w;
      for (int j = 0; j < n_; ++j) {
        if (at(v, j) == kNone) continue;
        const Ticks cand = iu + at(v, j);
        if (cand > at(i, j)) at(i, j) = cand;
      }
    }
    for (int i = 0; i < n_; ++i)
      if (at(i, i) > 0) return false;
    return true;
  }

  Ticks get(int u, int v) const { return d_[static_cast<std::size_t>(u) * n_ + v]; }

 private:
  Ticks& at(int u, int v) { return d_[static_cast<std::size_t>(u) * n_ + v]; }
  int n_;
  std::vector<Ticks> d_;
};

struct Choice {
  std::vector<std::array<Ticks, 3>> first;   // (u, v, w) arcs for one orientation
  std::vector<std::array<Ticks, 3>> second;  // arcs for the other
};

bool apply(Closure& c, const std::vector<std::array<Ticks, 3>>& arcs) {
  for (const auto& a : arcs)
    if (!c.add(static_cast<int>(a[0]), static_cast<int>(a[1]), a[2])) return false;
  return true;
}

bool search(const Closure& base, const std::vector<Choice>& choices, std::size_t k) {
  if (k == choices.size()) return true;
  for (const auto* arcs : {&choices[k].first, &choices[k].second}) {
    Closure c = base;
    if (apply(c, *arcs) && search(c, choices, k + 1)) return true;
  }
  return false;
}

}  // namespace

Ticks exact_min_period(const TaskSet& ts, int max_pairs) {
  const int n = static_cast<int>(ts.tasks.size());
  auto tau = [&](int t) { return ts.tasks[t].duration; };

  // Resource-sharing pairs whose order must be decided.
  std::vector<std::pair<int, int>> comm_pairs;
  std::set<std::pair<int, int>> seen;
  for (int r = ts.core_count; r < static_cast<int>(ts.on_resource.size()); ++r) {
    const auto& on = ts.on_resource[r];
    for (std::size_t i = 0; i < on.size(); ++i)
      for (std::size_t j = i + 1; j < on.size(); ++j) {
        auto key = std::minmax(on[i], on[j]);
        if (seen.insert({key.first, key.second}).second) comm_pairs.push_back({key.first, key.second});
      }
  }
  std::vector<std::pair<int, int>> actor_pairs;
  for (int p = 0; p < ts.core_count; ++p) {
    std::vector<int> on;
    for (int t : ts.on_resource[p])
      if (ts.tasks[t].kind == TaskKind::Actor) on.push_back(t);
    for (std::size_t i = 0; i < on.size(); ++i)
      for (std::size_t j = i + 1; j < on.size(); ++j) actor_pairs.push_back({on[i], on[j]});
  }
  if (static_cast<int>(comm_pairs.size() + actor_pairs.size()) > max_pairs)
    throw OracleTooLarge("too many resource-sharing pairs for exhaustive ordering search");

  std::vector<Choice> choices;
  for (auto [t, u] : comm_pairs)
    choices.push_back(Choice{{{t, u, tau(t)}}, {{u, t, tau(u)}}});
  for (auto [a, b] : actor_pairs) {
    Choice c;
    auto outs = [&](int x) { return ts.writes_of_actor[x].empty() ? std::vector<int>{x} : ts.writes_of_actor[x]; };
    auto ins = [&](int x) { return ts.reads_of_actor[x].empty() ? std::vector<int>{x} : ts.reads_of_actor[x]; };
    for (int o : outs(a))
      for (int i : ins(b)) c.first.push_back({o, i, tau(o)});
    for (int o : outs(b))
      for (int i : ins(a)) c.second.push_back({o, i, tau(o)});
    choices.push_back(std::move(c));
  }

  Ticks lo = std::max<Ticks>(1, period_lower_bound(ts));
  for (const auto& t : ts.tasks) lo = std::max(lo, t.duration);
  const Ticks hi = std::max<Ticks>(1, ts.total_duration());
  for (Ticks P = lo; P <= hi; ++P) {
    Closure base(n);
    bool ok = true;
    for (std::size_t c = 0; c < ts.write_of_channel.size() && ok; ++c) {
      const int w = ts.write_of_channel[c];
      for (int r : ts.reads_of_channel[c]) ok = ok && base.add(w, r, tau(w) - P * ts.channel_delay[c]);
    }
    for (int a = 0; a < ts.actor_count() && ok; ++a) {
      for (int r : ts.reads_of_actor[a]) ok = ok && base.add(r, a, tau(r));
      for (int w : ts.writes_of_actor[a]) ok = ok && base.add(a, w, tau(a));
    }
    for (std::size_t r = 0; r < ts.on_resource.size() && ok; ++r)
      for (int t : ts.on_resource[r])
        for (int u : ts.on_resource[r])
          if (t != u) ok = ok && base.add(t, u, tau(t) - P);
    if (ok && search(base, choices, 0)) return P;
  }
  throw std::logic_error("no period up to the serial bound satisfies the ordering model");
}

}  // namespace dfdse
