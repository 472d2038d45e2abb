#include "dfdse/binding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace dfdse {

std::string_view to_string(ChannelDecision d) {
  switch (d) {
    case ChannelDecision::Global: return "GLOBAL";
    case ChannelDecision::TileProd: return "TILE-PROD";
    case ChannelDecision::TileCons: return "TILE-CONS";
    case ChannelDecision::Prod: return "PROD";
    case ChannelDecision::Cons: return "CONS";
  }
  return "?";
}

std::optional<ChannelDecision> parse_decision(std::string_view s) {
  for (int i = 0; i < kDecisionCount; ++i) {
    auto d = static_cast<ChannelDecision>(i);
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

int IndexedGraph::actor_index(std::string_view id) const {
  for (std::size_t i = 0; i < actor_ids.size(); ++i)
    if (actor_ids[i] == id) return static_cast<int>(i);
  throw BindingError("unknown actor: " + std::string(id));
}

int IndexedGraph::channel_index(std::string_view id) const {
  for (std::size_t i = 0; i < channel_ids.size(); ++i)
    if (channel_ids[i] == id) return static_cast<int>(i);
  throw BindingError("unknown channel: " + std::string(id));
}

IndexedGraph index_graph(const ApplicationGraph& app, const ArchitectureGraph& arch) {
  IndexedGraph g;
  IdMap<int> aidx;
  IdMap<int> cidx;
  for (const auto& [id, a] : app.actors()) {
    aidx[id] = g.actor_count();
    g.actor_ids.push_back(id);
    std::vector<Ticks> row;
    for (const auto& core : arch.cores()) {
      auto it = a.exec_times.find(core.type);
      row.push_back(it == a.exec_times.end() ? -1 : it->second);
    }
    g.exec_on_core.push_back(std::move(row));
  }
  for (const auto& [id, c] : app.channels()) {
    cidx[id] = g.channel_count();
    g.channel_ids.push_back(id);
    g.delay.push_back(c.delay);
    g.capacity.push_back(c.capacity);
    g.token_bytes.push_back(c.token_bytes);
    g.mrb.push_back(c.is_mrb);
  }
  g.producer.assign(g.channel_ids.size(), -1);
  g.consumers.assign(g.channel_ids.size(), {});
  g.inputs.assign(g.actor_ids.size(), {});
  g.outputs.assign(g.actor_ids.size(), {});
  for (const auto& [id, ci] : cidx) {
    auto prod = app.producers(id);
    if (prod.size() != 1) throw BindingError("channel " + id + " needs exactly one producer");
    g.producer[ci] = aidx.at(prod.front());
    for (const auto& a : app.consumers(id)) g.consumers[ci].push_back(aidx.at(a));
    if (g.consumers[ci].empty()) throw BindingError("channel " + id + " has no consumer");
  }
  for (int c = 0; c < g.channel_count(); ++c) {
    g.outputs[g.producer[c]].push_back(c);
    for (int a : g.consumers[c]) g.inputs[a].push_back(c);
  }
  return g;
}

ChannelBinding determine_channel_bindings(const IndexedGraph& g, const std::vector<ChannelDecision>& decisions,
                                          const std::vector<int>& capacity, const std::vector<int>& actor_core,
                                          const ArchitectureGraph& arch) {
  if (static_cast<int>(decisions.size()) != g.channel_count() || static_cast<int>(capacity.size()) != g.channel_count())
    throw BindingError("channel decisions or capacities do not cover the channels");
  if (static_cast<int>(actor_core.size()) != g.actor_count()) throw BindingError("actor binding is not total");
  ChannelBinding b;
  b.memory.assign(g.channel_ids.size(), -1);
  b.used.assign(arch.memories().size(), 0);
  const int global = arch.global_memory();
  for (int c = 0; c < g.channel_count(); ++c) {
    const Bytes need = static_cast<Bytes>(capacity[c]) * g.token_bytes[c];
    auto fits = [&](int q) {
      const auto& cap = arch.memories()[q].capacity;
      return !cap || b.used[q] + need <= *cap;
    };
    const Core& prod = arch.cores().at(actor_core[g.producer[c]]);
    const Core& cons = arch.cores().at(actor_core[g.consumers[c].front()]);
    int q = global;
    switch (decisions[c]) {
      case ChannelDecision::Global: break;
      case ChannelDecision::Prod:
        if (fits(prod.memory)) {
          q = prod.memory;
          break;
        }
        [[fallthrough]];
      case ChannelDecision::TileProd:
        if (fits(arch.tiles()[prod.tile].memory)) q = arch.tiles()[prod.tile].memory;
        break;
      case ChannelDecision::Cons:
        if (fits(cons.memory)) {
          q = cons.memory;
          break;
        }
        [[fallthrough]];
      case ChannelDecision::TileCons:
        if (fits(arch.tiles()[cons.tile].memory)) q = arch.tiles()[cons.tile].memory;
        break;
    }
    b.memory[c] = q;
    b.used[q] += need;
  }
  return b;
}

bool bindings_fit(const IndexedGraph& g, const ChannelBinding& b, const std::vector<int>& capacity,
                  const ArchitectureGraph& arch) {
  std::vector<Bytes> used(arch.memories().size(), 0);
  for (int c = 0; c < g.channel_count(); ++c) used[b.memory[c]] += static_cast<Bytes>(capacity[c]) * g.token_bytes[c];
  for (std::size_t q = 0; q < used.size(); ++q) {
    const auto& cap = arch.memories()[q].capacity;
    if (cap && used[q] > *cap) return false;
  }
  return true;
}

IdMap<int> allocation(const std::vector<int>& actor_core, const ArchitectureGraph& arch) {
  IdMap<int> alpha;
  for (const auto& [type, cost] : arch.core_type_costs()) alpha[type] = 0;
  std::set<int> used(actor_core.begin(), actor_core.end());
  for (int p : used)
    if (p >= 0) ++alpha[arch.cores().at(p).type];
  return alpha;
}

double core_cost(const IdMap<int>& alpha, const IdMap<double>& costs) {
  double k = 0;
  for (const auto& [type, n] : alpha) {
    auto it = costs.find(type);
    if (it == costs.end()) throw BindingError("no cost for core type " + type);
    k += n * it->second;
  }
  return k;
}

Bytes memory_footprint(const ApplicationGraph& app) {
  Bytes m = 0;
  for (const auto& [id, c] : app.channels()) m += static_cast<Bytes>(c.capacity) * c.token_bytes;
  return m;
}

Bytes memory_footprint(const IndexedGraph& g, const std::vector<int>& capacity) {
  Bytes m = 0;
  for (int c = 0; c < g.channel_count(); ++c) m += static_cast<Bytes>(capacity[c]) * g.token_bytes[c];
  return m;
}

Ticks TaskSet::total_duration() const {
  Ticks s = 0;
  for (const auto& t : tasks) s += t.duration;
  return s;
}

void TaskSet::rebuild_indices(int channel_count) {
  on_resource.assign(resource_names.size(), {});
  int actors = 0;
  for (const auto& t : tasks)
    if (t.kind == TaskKind::Actor) actors = std::max(actors, t.actor + 1);
  reads_of_actor.assign(actors, {});
  writes_of_actor.assign(actors, {});
  write_of_channel.assign(channel_count, -1);
  reads_of_channel.assign(channel_count, {});
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const int ti = static_cast<int>(i);
    for (int r : t.resources) on_resource.at(r).push_back(ti);
    if (t.kind == TaskKind::Write) {
      write_of_channel.at(t.channel) = ti;
      writes_of_actor.at(t.actor).push_back(ti);
    } else if (t.kind == TaskKind::Read) {
      reads_of_channel.at(t.channel).push_back(ti);
      reads_of_actor.at(t.actor).push_back(ti);
    }
  }
  auto by_channel = [&](int x, int y) { return tasks[x].channel < tasks[y].channel; };
  for (auto& v : reads_of_actor) std::stable_sort(v.begin(), v.end(), by_channel);
  for (auto& v : writes_of_actor) std::stable_sort(v.begin(), v.end(), by_channel);
}

TaskSet task_durations(const IndexedGraph& g, const std::vector<int>& actor_core, const std::vector<int>& channel_memory,
                       const ArchitectureGraph& arch) {
  if (static_cast<int>(actor_core.size()) != g.actor_count()) throw BindingError("actor binding is not total");
  if (static_cast<int>(channel_memory.size()) != g.channel_count()) throw BindingError("channel binding is not total");
  TaskSet ts;
  ts.core_count = static_cast<int>(arch.cores().size());
  for (const auto& c : arch.cores()) ts.resource_names.push_back(c.id);
  for (const auto& h : arch.interconnects()) ts.resource_names.push_back(h.id);
  ts.channel_names = g.channel_ids;
  ts.channel_delay = g.delay;

  for (int a = 0; a < g.actor_count(); ++a) {
    const int p = actor_core[a];
    if (p < 0 || p >= ts.core_count) throw BindingError("actor " + g.actor_ids[a] + " is not bound");
    const Ticks t = g.exec_on_core[a][p];
    if (t < 0)
      throw BindingError("actor " + g.actor_ids[a] + " cannot execute on core " + arch.cores()[p].id);
    ts.tasks.push_back(Task{TaskKind::Actor, a, -1, t, {p}, g.actor_ids[a]});
  }
  auto comm = [&](TaskKind kind, int a, int c) {
    const int p = actor_core[a];
    Task t{kind, a, c, 0, {p}, {}};
    double bw = std::numeric_limits<double>::infinity();
    for (const auto& r : route(arch, p, channel_memory[c])) {
      if (r.kind != ResourceKind::Interconnect) continue;
      t.resources.push_back(ts.core_count + r.index);
      bw = std::min(bw, arch.bytes_per_tick(r.index));
    }
    if (t.resources.size() > 1) {
      if (!(bw > 0)) throw BindingError("route without bandwidth");
      t.duration = static_cast<Ticks>(std::ceil(static_cast<double>(g.token_bytes[c]) / bw - 1e-9));
    }
    t.name = kind == TaskKind::Write ? "(" + g.actor_ids[a] + "," + g.channel_ids[c] + ")"
                                     : "(" + g.channel_ids[c] + "," + g.actor_ids[a] + ")";
    ts.tasks.push_back(std::move(t));
  };
  for (int c = 0; c < g.channel_count(); ++c) comm(TaskKind::Write, g.producer[c], c);
  for (int c = 0; c < g.channel_count(); ++c)
    for (int a : g.consumers[c]) comm(TaskKind::Read, a, c);
  ts.rebuild_indices(g.channel_count());
  return ts;
}

Ticks floor_div(Ticks a, Ticks b) {
  Ticks q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int required_capacity(const TaskSet& tasks, const Schedule& schedule, int channel) {
  const int delta = tasks.channel_delay.at(channel);
  const int w = tasks.write_of_channel.at(channel);
  const Ticks P = schedule.period;
  if (P < 1) throw BindingError("period must be positive");
  Ticks need = std::max(delta, 1);
  for (int r : tasks.reads_of_channel.at(channel)) {
    const Ticks span = schedule.start[r] + tasks.tasks[r].duration - schedule.start[w];
    need = std::max(need, delta + floor_div(span, P) + 1);
  }
  return static_cast<int>(need);
}

}  // namespace dfdse
