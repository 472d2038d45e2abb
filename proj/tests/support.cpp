#include "support.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

namespace testing {

std::string fixture(const std::string& name) { return std::string(DFDSE_FIXTURES) + "/" + name; }

SpecificationGraph fixture_spec(const std::string& app) {
  return load_spec(fixture(app), fixture("arch24.json"));
}

Genotype fixture_genotype(const Problem& p, const std::string& name) {
  return genotype_from_json(read_json_file(fixture(name)), p);
}

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) { return lo + static_cast<int>(uniform_below(rng, hi - lo + 1)); }

}  // namespace

Bound random_instance(std::mt19937_64& rng, int max_actors, int max_channels, int max_tiles, int min_delay) {
  ArchitectureGraph arch;
  arch.add_core_type("t1", 1.0);
  arch.add_core_type("t2", 0.5);
  const double bw[] = {8e9, 4e9, 2e9};
  arch.set_noc("h_NoC", bw[uniform_below(rng, 3)]);
  const int tiles = pick(rng, 1, max_tiles);
  int core_no = 0;
  for (int t = 0; t < tiles; ++t) {
    int ti = arch.add_tile("T" + std::to_string(t + 1), 1 << 30, bw[uniform_below(rng, 3)]);
    const int cores = pick(rng, 1, 3);
    for (int k = 0; k < cores; ++k)
      arch.add_core(ti, "p" + std::to_string(++core_no), uniform_below(rng, 2) ? "t1" : "t2", 1 << 24);
  }

  ApplicationGraph app;
  const int actors = pick(rng, 2, max_actors);
  for (int a = 0; a < actors; ++a) {
    Actor x;
    x.id = "a" + std::to_string(a + 1);
    const int bottom = static_cast<int>(uniform_below(rng, 4));  // 0: t1 missing, 1: t2 missing, else both
    if (bottom != 0) x.exec_times["t1"] = pick(rng, 1, 6);
    if (bottom != 1) x.exec_times["t2"] = pick(rng, 1, 6);
    app.add_actor(std::move(x));
  }
  const int channels = pick(rng, 1, max_channels);
  for (int c = 0; c < channels; ++c) {
    Channel ch;
    ch.id = "c" + std::to_string(c + 1);
    ch.delay = pick(rng, min_delay, std::max(min_delay, 2));
    ch.capacity = std::max(ch.delay, 1) + pick(rng, 0, 2);
    ch.token_bytes = pick(rng, 1, 20000);
    int prod = pick(rng, 0, actors - 1);
    std::set<int> cons;
    const int n_cons = uniform_below(rng, 4) == 0 ? 2 : 1;
    while (static_cast<int>(cons.size()) < std::min(n_cons, actors)) cons.insert(pick(rng, 0, actors - 1));
    if (ch.delay == 0) {
      // zero-delay edges only go forward, so no zero-delay cycle can form
      std::set<int> fwd;
      for (int x : cons)
        if (x > prod) fwd.insert(x);
      if (fwd.empty()) {
        if (prod == actors - 1) prod = 0;
        fwd.insert(pick(rng, prod + 1, actors - 1));
      }
      cons = fwd;
    }
    ch.is_mrb = cons.size() > 1;
    app.add_channel(ch);
    app.add_write("a" + std::to_string(prod + 1), ch.id);
    for (int x : cons) app.add_read(ch.id, "a" + std::to_string(x + 1));
  }

  Bound b;
  b.arch = arch;
  b.graph = index_graph(app, arch);
  for (int a = 0; a < b.graph.actor_count(); ++a) {
    std::vector<int> ok;
    for (int p = 0; p < static_cast<int>(arch.cores().size()); ++p)
      if (b.graph.exec_on_core[a][p] >= 0) ok.push_back(p);
    if (ok.empty()) {
      // every actor needs a core; give it the type of core 0
      b.graph.exec_on_core[a][0] = pick(rng, 1, 6);
      for (int p = 0; p < static_cast<int>(arch.cores().size()); ++p)
        if (arch.cores()[p].type == arch.cores()[0].type) b.graph.exec_on_core[a][p] = b.graph.exec_on_core[a][0];
      ok.push_back(0);
    }
    b.actor_core.push_back(ok[uniform_below(rng, ok.size())]);
  }
  for (int c = 0; c < b.graph.channel_count(); ++c)
    b.decisions.push_back(static_cast<ChannelDecision>(uniform_below(rng, kDecisionCount)));
  return b;
}

TaskSet bound_tasks(const Bound& b) {
  auto cb = determine_channel_bindings(b.graph, b.decisions, b.graph.capacity, b.actor_core, b.arch);
  return task_durations(b.graph, b.actor_core, cb.memory, b.arch);
}

IdSet brute_force_multicast(const ApplicationGraph& app) {
  IdSet out;
  for (const auto& [a, actor] : app.actors()) {
    std::vector<std::string> in;
    std::vector<std::string> outs;
    for (const auto& [c, x] : app.reads())
      if (x == a) in.push_back(c);
    for (const auto& [x, c] : app.writes())
      if (x == a) outs.push_back(c);
    bool eq1 = in.size() == 1 && !outs.empty();
    if (!eq1) continue;
    bool eq2 = true;
    bool eq3 = true;
    for (const auto& o : outs) {
      eq2 = eq2 && app.channel(o).token_bytes == app.channel(in[0]).token_bytes;
      eq3 = eq3 && app.channel(o).delay == 0;
      for (const auto& o2 : outs) eq3 = eq3 && app.channel(o).capacity == app.channel(o2).capacity;
    }
    if (eq2 && eq3) out.insert(a);
  }
  return out;
}

int overlap_capacity(Ticks s_w, Ticks s_r, Ticks tau_r, Ticks P, int delay) {
  // scan one period of instants against enough iterations on both sides
  const Ticks len = s_r + tau_r + static_cast<Ticks>(delay) * P - s_w;
  int best = 0;
  for (Ticks t = 0; t < P; ++t) {
    int n = 0;
    for (Ticks k = -100; k <= 100; ++k) {
      const Ticks b = k * P;
      if (b <= t && t <= b + len) ++n;
    }
    best = std::max(best, n);
  }
  return std::max({best, delay, 1});
}

double hypervolume_inclusion_exclusion(const std::vector<Objectives>& pts) {
  const std::size_t n = pts.size();
  double v = 0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    Objectives lo{0, 0, 0};
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) {
        ++bits;
        for (int k = 0; k < 3; ++k) lo[k] = std::max(lo[k], pts[i][k]);
      }
    const double box = (1 - lo[0]) * (1 - lo[1]) * (1 - lo[2]);
    v += (bits % 2 ? 1 : -1) * box;
  }
  return v;
}

double hypervolume_monte_carlo(const std::vector<Objectives>& pts, long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  long hit = 0;
  for (long i = 0; i < samples; ++i) {
    Objectives x{uniform01(rng), uniform01(rng), uniform01(rng)};
    for (const auto& p : pts)
      if (p[0] <= x[0] && p[1] <= x[1] && p[2] <= x[2]) {
        ++hit;
        break;
      }
  }
  return static_cast<double>(hit) / static_cast<double>(samples);
}

CosimResult mrb_fifo_cosim(std::mt19937_64& rng, int readers, int gamma_in, int gamma_out, long steps) {
  std::vector<std::string> names;
  for (int i = 0; i < readers; ++i) names.push_back("r" + std::to_string(i + 1));
  const int gamma = gamma_in + gamma_out;
  MrbState mrb(gamma, names);
  std::vector<long> slot(gamma, -1);
  std::deque<long> cin;
  std::vector<std::deque<long>> outs(readers);
  auto multicast = [&] {
    while (!cin.empty()) {
      for (const auto& q : outs)
        if (static_cast<int>(q.size()) >= gamma_out) return;
      for (auto& q : outs) q.push_back(cin.front());
      cin.pop_front();
    }
  };
  CosimResult res;
  long next = 0;
  for (long s = 0; s < steps; ++s) {
    const bool w_mrb = free_places(mrb) >= 1;
    const bool w_fifo = static_cast<int>(cin.size()) < gamma_in;
    if (w_mrb != w_fifo) ++res.enable_mismatches;
    std::vector<int> enabled;
    if (w_mrb && w_fifo) enabled.push_back(-1);
    for (int i = 0; i < readers; ++i) {
      const int t = available_tokens(mrb, names[i]);
      if (t != static_cast<int>(cin.size() + outs[i].size())) ++res.enable_mismatches;
      if (t >= 1 && !outs[i].empty()) enabled.push_back(i);
    }
    if (enabled.empty()) break;
    const int who = enabled[uniform_below(rng, enabled.size())];
    ++res.steps;
    if (who < 0) {
      slot[mrb.write_index()] = next;
      mrb = fire_writer(mrb, 1);
      cin.push_back(next);
      ++next;
      multicast();
    } else {
      const long got = slot[mrb.read_index(names[who])];
      mrb = fire_reader(mrb, names[who], 1);
      const long want = outs[who].front();
      outs[who].pop_front();
      multicast();
      ++res.reads;
      if (got != want) ++res.mismatches;
    }
  }
  return res;
}

namespace {

// Cores grouped as [tile][type] -> core indices, for architectures made of identical tiles.
struct CoreClasses {
  std::vector<std::string> types;
  std::vector<std::vector<std::vector<int>>> cores;  // [tile][type]
};

CoreClasses core_classes(const ArchitectureGraph& arch) {
  CoreClasses cc;
  for (const auto& [t, cost] : arch.core_type_costs()) cc.types.push_back(t);
  for (const auto& tile : arch.tiles()) {
    std::vector<std::vector<int>> by(cc.types.size());
    for (int p : tile.cores) {
      auto it = std::find(cc.types.begin(), cc.types.end(), arch.cores()[p].type);
      by[it - cc.types.begin()].push_back(p);
    }
    cc.cores.push_back(std::move(by));
  }
  const auto& t0 = arch.tiles().front();
  for (std::size_t t = 0; t < arch.tiles().size(); ++t) {
    const auto& tile = arch.tiles()[t];
    bool same = arch.memories()[tile.memory].capacity == arch.memories()[t0.memory].capacity &&
                arch.interconnects()[tile.crossbar].bytes_per_second ==
                    arch.interconnects()[t0.crossbar].bytes_per_second;
    for (std::size_t k = 0; k < cc.types.size(); ++k) {
      same = same && cc.cores[t][k].size() == cc.cores[0][k].size();
      for (std::size_t i = 0; i < cc.cores[t][k].size() && same; ++i)
        same = arch.memories()[arch.cores()[cc.cores[t][k][i]].memory].capacity ==
               arch.memories()[arch.cores()[cc.cores[0][k][i]].memory].capacity;
    }
    if (!same) throw std::logic_error("tiles are not interchangeable");
  }
  return cc;
}

// Calls f for every binding of `actors` that is canonical under tile and same-type core relabelling.
void canonical_bindings(const IndexedGraph& g, const ArchitectureGraph& arch,
                        const std::function<void(const std::vector<int>&)>& f) {
  const CoreClasses cc = core_classes(arch);
  const int n = g.actor_count();
  std::vector<int> binding(n, -1);
  std::vector<std::vector<int>> used(cc.cores.size(), std::vector<int>(cc.types.size(), 0));
  int tiles_used = 0;
  std::function<void(int)> rec = [&](int a) {
    if (a == n) {
      f(binding);
      return;
    }
    std::set<int> seen;
    for (int b = 0; b < a; ++b) {
      const int p = binding[b];
      if (g.exec_on_core[a][p] >= 0 && seen.insert(p).second) {
        binding[a] = p;
        rec(a + 1);
      }
    }
    for (int t = 0; t <= tiles_used && t < static_cast<int>(cc.cores.size()); ++t)
      for (std::size_t k = 0; k < cc.types.size(); ++k) {
        const auto& pool = cc.cores[t][k];
        if (used[t][k] >= static_cast<int>(pool.size())) continue;
        const int p = pool[used[t][k]];
        if (g.exec_on_core[a][p] < 0) continue;
        binding[a] = p;
        ++used[t][k];
        const int saved = tiles_used;
        if (t == tiles_used) ++tiles_used;
        rec(a + 1);
        tiles_used = saved;
        --used[t][k];
      }
    binding[a] = -1;
  };
  rec(0);
}

}  // namespace

Enumeration exhaustive_front(const Problem& problem) {
  Enumeration out;
  ParetoArchive archive;
  const auto& arch = problem.spec().arch;
  const std::size_t xi_count = std::size_t{1} << problem.multicast_actors().size();
  for (std::size_t mask = 0; mask < xi_count; ++mask) {
    std::vector<bool> xi;
    for (std::size_t i = 0; i < problem.multicast_actors().size(); ++i) xi.push_back((mask >> i) & 1);
    if (problem.options().strategy != Strategy::MrbExplore && xi != problem.effective_xi(Genotype{xi, {}, {}}))
      continue;
    const TransformedSpec& t = problem.transformed(xi);
    canonical_bindings(t.graph, arch, [&](const std::vector<int>& tb) {
      Genotype g;
      g.xi = xi;
      g.binding.assign(problem.actor_ids().size(), -1);
      for (std::size_t a = 0; a < tb.size(); ++a) g.binding[t.actor_source[a]] = tb[a];
      for (std::size_t a = 0; a < g.binding.size(); ++a)
        if (g.binding[a] < 0) g.binding[a] = problem.feasible_cores()[a].front();
      g.decisions.assign(problem.channel_ids().size(), ChannelDecision::Global);
      // per transformed channel, one representative decision per distinct target memory
      std::vector<std::vector<ChannelDecision>> reps;
      for (int c = 0; c < t.graph.channel_count(); ++c) {
        const Core& pc = arch.cores()[tb[t.graph.producer[c]]];
        const Core& cc = arch.cores()[tb[t.graph.consumers[c].front()]];
        std::set<int> targets;
        std::vector<ChannelDecision> r;
        const std::pair<ChannelDecision, int> all[] = {
            {ChannelDecision::Global, arch.global_memory()},
            {ChannelDecision::TileProd, arch.tiles()[pc.tile].memory},
            {ChannelDecision::TileCons, arch.tiles()[cc.tile].memory},
            {ChannelDecision::Prod, pc.memory},
            {ChannelDecision::Cons, cc.memory}};
        for (const auto& [d, q] : all)
          if (targets.insert(q).second) r.push_back(d);
        reps.push_back(std::move(r));
      }
      std::vector<std::size_t> idx(reps.size(), 0);
      while (true) {
        for (std::size_t c = 0; c < reps.size(); ++c) g.decisions[t.decision_source[c]] = reps[c][idx[c]];
        Phenotype ph = problem.decode(g);
        ++out.decodes;
        out.rebinds += ph.decoded.rebinds;
        if (!ph.penalty) archive.offer(ArchiveEntry{g, ph.objectives(), ph.proven_optimal, 0});
        std::size_t c = 0;
        while (c < idx.size() && ++idx[c] == reps[c].size()) idx[c++] = 0;
        if (c == idx.size()) break;
      }
    });
  }
  out.front = archive.points();
  return out;
}

}  // namespace testing
