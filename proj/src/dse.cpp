#include "dfdse/dse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace dfdse {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Reference: return "reference";
    case Strategy::MrbAlways: return "mrb-always";
    case Strategy::MrbExplore: return "mrb-explore";
  }
  return "?";
}

std::string_view to_string(DecoderKind d) { return d == DecoderKind::Heuristic ? "heuristic" : "ilp"; }

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (auto v : {Strategy::Reference, Strategy::MrbAlways, Strategy::MrbExplore})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<DecoderKind> parse_decoder(std::string_view s) {
  for (auto v : {DecoderKind::Heuristic, DecoderKind::Ilp})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

bool Genotype::operator<(const Genotype& o) const {
  return std::tie(xi, decisions, binding) < std::tie(o.xi, o.decisions, o.binding);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % n;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Problem::Problem(SpecificationGraph spec, ProblemOptions options) : spec_(std::move(spec)), options_(std::move(options)) {
  for (const auto& a : detect_multicast(spec_.app)) multicast_.push_back(a);
  for (const auto& [id, c] : spec_.app.channels()) channels_.push_back(id);
  for (const auto& [id, a] : spec_.app.actors()) {
    actors_.push_back(id);
    feasible_.push_back(spec_.mapping_options(id));
    if (feasible_.back().empty()) throw ModelError("actor " + id + " has no feasible core");
  }
}

Genotype Problem::random_genotype(std::mt19937_64& rng) const {
  Genotype g;
  for (std::size_t i = 0; i < multicast_.size(); ++i) g.xi.push_back(uniform_below(rng, 2) == 1);
  for (std::size_t i = 0; i < channels_.size(); ++i)
    g.decisions.push_back(static_cast<ChannelDecision>(uniform_below(rng, kDecisionCount)));
  for (const auto& f : feasible_) g.binding.push_back(f[uniform_below(rng, f.size())]);
  return g;
}

std::vector<bool> Problem::effective_xi(const Genotype& g) const {
  switch (options_.strategy) {
    case Strategy::Reference: return std::vector<bool>(multicast_.size(), false);
    case Strategy::MrbAlways: return std::vector<bool>(multicast_.size(), true);
    case Strategy::MrbExplore: return g.xi;
  }
  return g.xi;
}

const TransformedSpec& Problem::transformed(const std::vector<bool>& xi) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(xi);
  if (it != cache_.end()) return *it->second;
  if (xi.size() != multicast_.size()) throw std::invalid_argument("replacement vector has the wrong length");
  ReplacementFunction f;
  for (std::size_t i = 0; i < multicast_.size(); ++i) f[multicast_[i]] = xi[i];
  auto t = std::make_unique<TransformedSpec>();
  t->app = substitute_mrbs(spec_.app, f);
  if (options_.add_initial_tokens)
    for (auto& [id, c] : t->app.channels()) {
      c.delay = std::max(c.delay, 1);
      c.capacity = std::max(c.capacity, c.delay);
    }
  t->graph = index_graph(t->app, spec_.arch);
  for (const auto& id : t->graph.channel_ids) {
    const auto& c = t->app.channel(id);
    const std::string& src = c.decision_from.empty() ? id : c.decision_from;
    auto pos = std::find(channels_.begin(), channels_.end(), src);
    if (pos == channels_.end()) throw std::logic_error("channel " + id + " has no original decision");
    t->decision_source.push_back(static_cast<int>(pos - channels_.begin()));
  }
  for (const auto& id : t->graph.actor_ids)
    t->actor_source.push_back(static_cast<int>(std::find(actors_.begin(), actors_.end(), id) - actors_.begin()));
  return *cache_.emplace(xi, std::move(t)).first->second;
}

void Problem::check(const Genotype& g) const {
  if (g.xi.size() != multicast_.size() || g.decisions.size() != channels_.size() || g.binding.size() != actors_.size())
    throw std::invalid_argument("genotype does not match the specification");
  for (std::size_t a = 0; a < actors_.size(); ++a)
    if (std::find(feasible_[a].begin(), feasible_[a].end(), g.binding[a]) == feasible_[a].end())
      throw std::invalid_argument("actor " + actors_[a] + " bound to an infeasible core");
}

Phenotype Problem::decode(const Genotype& g) const {
  check(g);
  const TransformedSpec& t = transformed(effective_xi(g));
  std::vector<ChannelDecision> decisions;
  for (int src : t.decision_source) decisions.push_back(g.decisions[src]);
  std::vector<int> actor_core;
  for (int src : t.actor_source) actor_core.push_back(g.binding[src]);
  Phenotype ph;
  ph.decoded = options_.decoder == DecoderKind::Heuristic
                   ? decode_via_heuristic(t.graph, decisions, actor_core, spec_.arch)
                   : decode_via_ilp(t.graph, decisions, actor_core, spec_.arch, options_.solver);
  const Decoded& d = ph.decoded;
  ph.footprint = memory_footprint(t.graph, d.capacity);
  if (d.infeasible_at_budget) {
    ph.penalty = true;
    ph.period = serial_bound(d.tasks);
    IdMap<int> all;
    for (const auto& [type, cost] : spec_.arch.core_type_costs()) all[type] = 0;
    for (const auto& c : spec_.arch.cores()) ++all[c.type];
    ph.cost = core_cost(all, spec_.arch.core_type_costs());
    return ph;
  }
  ph.period = d.schedule.period;
  ph.proven_optimal = d.proven_optimal;
  ph.cost = core_cost(allocation(actor_core, spec_.arch), spec_.arch.core_type_costs());
  return ph;
}

bool dominates(const Objectives& a, const Objectives& b) {
  bool better = false;
  for (int i = 0; i < 3; ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) better = true;
  }
  return better;
}

bool ParetoArchive::offer(const ArchiveEntry& e) {
  for (const auto& x : entries_)
    if (x.objectives == e.objectives || dominates(x.objectives, e.objectives)) return false;
  std::erase_if(entries_, [&](const ArchiveEntry& x) { return dominates(e.objectives, x.objectives); });
  auto pos = std::lower_bound(entries_.begin(), entries_.end(), e,
                              [](const ArchiveEntry& a, const ArchiveEntry& b) { return a.objectives < b.objectives; });
  entries_.insert(pos, e);
  return true;
}

std::vector<Objectives> ParetoArchive::points() const {
  std::vector<Objectives> p;
  for (const auto& e : entries_) p.push_back(e.objectives);
  return p;
}

std::vector<int> nondominated_ranks(const std::vector<Objectives>& pts) {
  const std::size_t n = pts.size();
  std::vector<int> rank(n, -1);
  std::vector<int> count(n, 0);
  std::vector<std::vector<int>> dominated(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (dominates(pts[i], pts[j])) dominated[i].push_back(static_cast<int>(j));
      else if (dominates(pts[j], pts[i])) ++count[i];
    }
  std::vector<int> front;
  for (std::size_t i = 0; i < n; ++i)
    if (count[i] == 0) front.push_back(static_cast<int>(i));
  for (int r = 0; !front.empty(); ++r) {
    std::vector<int> next;
    for (int i : front) {
      rank[i] = r;
      for (int j : dominated[i])
        if (--count[j] == 0) next.push_back(j);
    }
    std::sort(next.begin(), next.end());
    front = std::move(next);
  }
  return rank;
}

std::vector<double> crowding_distance(const std::vector<Objectives>& pts, const std::vector<int>& members) {
  const std::size_t n = members.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  std::vector<std::size_t> order(n);
  for (int k = 0; k < 3; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pts[members[a]][k] < pts[members[b]][k]; });
    const double lo = pts[members[order.front()]][k];
    const double hi = pts[members[order.back()]][k];
    dist[order.front()] = dist[order.back()] = std::numeric_limits<double>::infinity();
    if (hi == lo) continue;
    for (std::size_t i = 1; i + 1 < n; ++i)
      dist[order[i]] += (pts[members[order[i + 1]]][k] - pts[members[order[i - 1]]][k]) / (hi - lo);
  }
  return dist;
}

namespace {

struct Individual {
  Genotype genotype;
  Phenotype phenotype;
};

std::vector<Phenotype> decode_all(const Problem& problem, const std::vector<Genotype>& gs, int threads) {
  std::vector<Phenotype> out(gs.size());
  const int n = static_cast<int>(gs.size());
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) out[i] = problem.decode(gs[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) {
        try {
          out[i] = problem.decode(gs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Genotype vary(const Problem& problem, const Genotype& a, const Genotype& b, double crossover_rate,
              std::mt19937_64& rng) {
  Genotype child = a;
  auto cross = [&](auto& mine, const auto& theirs) {
    if (uniform01(rng) >= crossover_rate) return;
    for (std::size_t i = 0; i < mine.size(); ++i)
      if (uniform_below(rng, 2) == 1) mine[i] = theirs[i];
  };
  cross(child.xi, b.xi);
  cross(child.decisions, b.decisions);
  cross(child.binding, b.binding);
  for (std::size_t i = 0; i < child.xi.size(); ++i)
    if (uniform01(rng) < 1.0 / child.xi.size()) child.xi[i] = !child.xi[i];
  for (std::size_t i = 0; i < child.decisions.size(); ++i)
    if (uniform01(rng) < 1.0 / child.decisions.size())
      child.decisions[i] = static_cast<ChannelDecision>(uniform_below(rng, kDecisionCount));
  const auto& feasible = problem.feasible_cores();
  for (std::size_t i = 0; i < child.binding.size(); ++i)
    if (uniform01(rng) < 1.0 / child.binding.size())
      child.binding[i] = feasible[i][uniform_below(rng, feasible[i].size())];
  return child;
}

void offer_all(ParetoArchive& archive, const std::vector<Individual>& inds, std::size_t from, int generation) {
  for (std::size_t i = from; i < inds.size(); ++i) {
    const auto& ph = inds[i].phenotype;
    if (ph.penalty) continue;
    archive.offer(ArchiveEntry{inds[i].genotype, ph.objectives(), ph.proven_optimal, generation});
  }
}

}  // namespace

RunLog evolve(const Problem& problem, const EvolveParams& params) {
  if (params.population < 1 || params.offspring < 1 || params.generations < 0)
    throw std::invalid_argument("population and offspring must be positive");
  if (!(params.crossover_rate >= 0 && params.crossover_rate <= 1))
    throw std::invalid_argument("crossover rate outside [0,1]");
  std::mt19937_64 rng(params.seed);
  RunLog log;
  std::vector<Genotype> initial;
  for (int i = 0; i < params.population; ++i) initial.push_back(problem.random_genotype(rng));
  auto phen = decode_all(problem, initial, params.threads);
  log.evaluations += static_cast<long>(initial.size());
  std::vector<Individual> pop;
  for (std::size_t i = 0; i < initial.size(); ++i) pop.push_back({initial[i], std::move(phen[i])});
  offer_all(log.archive, pop, 0, 0);
  log.fronts.push_back(log.archive.points());

  auto fitness = [](const std::vector<Individual>& inds, std::vector<int>& rank, std::vector<double>& crowd) {
    std::vector<Objectives> pts;
    for (const auto& x : inds) pts.push_back(x.phenotype.objectives());
    rank = nondominated_ranks(pts);
    crowd.assign(inds.size(), 0.0);
    const int maxr = rank.empty() ? -1 : *std::max_element(rank.begin(), rank.end());
    for (int r = 0; r <= maxr; ++r) {
      std::vector<int> members;
      for (std::size_t i = 0; i < rank.size(); ++i)
        if (rank[i] == r) members.push_back(static_cast<int>(i));
      auto d = crowding_distance(pts, members);
      for (std::size_t k = 0; k < members.size(); ++k) crowd[members[k]] = d[k];
    }
  };

  std::vector<int> rank;
  std::vector<double> crowd;
  fitness(pop, rank, crowd);
  for (int gen = 1; gen <= params.generations; ++gen) {
    auto better = [&](std::size_t i, std::size_t j) {
      if (rank[i] != rank[j]) return rank[i] < rank[j];
      return crowd[i] > crowd[j];
    };
    auto tournament = [&] {
      const std::size_t i = uniform_below(rng, pop.size());
      const std::size_t j = uniform_below(rng, pop.size());
      return better(j, i) ? j : i;
    };
    std::vector<Genotype> kids;
    for (int k = 0; k < params.offspring; ++k) {
      const auto& a = pop[tournament()].genotype;
      const auto& b = pop[tournament()].genotype;
      kids.push_back(vary(problem, a, b, params.crossover_rate, rng));
    }
    auto kp = decode_all(problem, kids, params.threads);
    log.evaluations += static_cast<long>(kids.size());
    const std::size_t first_kid = pop.size();
    for (std::size_t k = 0; k < kids.size(); ++k) pop.push_back({std::move(kids[k]), std::move(kp[k])});
    offer_all(log.archive, pop, first_kid, gen);
    log.fronts.push_back(log.archive.points());

    fitness(pop, rank, crowd);
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return better(i, j); });
    order.resize(std::min<std::size_t>(order.size(), params.population));
    std::sort(order.begin(), order.end());
    std::vector<Individual> next;
    for (std::size_t i : order) next.push_back(std::move(pop[i]));
    pop = std::move(next);
    fitness(pop, rank, crowd);
  }
  return log;
}

namespace {

double area2d(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  double area = 0;
  double best_y = 1;
  for (const auto& [x, y] : pts) {
    if (y < best_y) {
      area += (1 - x) * (best_y - y);
      best_y = y;
    }
  }
  return area;
}

}  // namespace

double hypervolume(const std::vector<Objectives>& pts) {
  std::vector<Objectives> in;
  for (const auto& p : pts) {
    for (double v : p)
      if (!(v >= 0 && v <= 1)) throw std::invalid_argument("hypervolume point outside the unit cube");
    in.push_back(p);
  }
  std::sort(in.begin(), in.end(), [](const Objectives& a, const Objectives& b) { return a[2] < b[2]; });
  double volume = 0;
  std::vector<std::pair<double, double>> slice;
  for (std::size_t i = 0; i < in.size(); ++i) {
    slice.push_back({in[i][0], in[i][1]});
    const double top = i + 1 < in.size() ? in[i + 1][2] : 1.0;
    if (top > in[i][2]) volume += area2d(slice) * (top - in[i][2]);
  }
  return volume;
}

Bounds bounds_of(const std::vector<std::vector<Objectives>>& fronts) {
  Bounds b;
  b.lo.fill(std::numeric_limits<double>::infinity());
  b.hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& f : fronts)
    for (const auto& p : f)
      for (int k = 0; k < 3; ++k) {
        b.lo[k] = std::min(b.lo[k], p[k]);
        b.hi[k] = std::max(b.hi[k], p[k]);
      }
  return b;
}

std::vector<Objectives> normalize(const std::vector<Objectives>& pts, const Bounds& b) {
  std::vector<Objectives> out;
  for (const auto& p : pts) {
    Objectives q{};
    for (int k = 0; k < 3; ++k) {
      if (b.hi[k] <= b.lo[k]) {
        q[k] = 0;
      } else {
        q[k] = std::clamp((p[k] - b.lo[k]) / (b.hi[k] - b.lo[k]), 0.0, 1.0);
      }
    }
    out.push_back(q);
  }
  return out;
}

std::vector<Objectives> nondominated(std::vector<Objectives> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Objectives> out;
  for (const auto& p : pts) {
    bool dom = false;
    for (const auto& q : pts)
      if (dominates(q, p)) dom = true;
    if (!dom) out.push_back(p);
  }
  return out;
}

std::vector<double> relative_avg_hypervolume(const std::vector<std::vector<std::vector<Objectives>>>& runs,
                                             const std::vector<Objectives>& reference) {
  const double ref = hypervolume(reference);
  if (!(ref > 0)) throw std::domain_error("reference front has zero hypervolume; relative curve is undefined");
  if (runs.empty()) throw std::invalid_argument("no runs");
  std::size_t gens = 0;
  for (const auto& r : runs) gens = std::max(gens, r.size());
  std::vector<double> curve(gens, 0.0);
  for (std::size_t i = 0; i < gens; ++i) {
    double sum = 0;
    for (const auto& r : runs) {
      if (r.empty()) continue;
      sum += hypervolume(r[std::min(i, r.size() - 1)]) / ref;
    }
    curve[i] = sum / static_cast<double>(runs.size());
  }
  return curve;
}

}  // namespace dfdse
