#include "dfdse/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <queue>

namespace dfdse {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

int natural_compare(std::string_view a, std::string_view b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      std::size_t ia = i;
      std::size_t jb = j;
      while (ia + 1 < ie && a[ia] == '0') ++ia;
      while (jb + 1 < je && b[jb] == '0') ++jb;
      if (ie - ia != je - jb) return ie - ia < je - jb ? -1 : 1;
      int c = a.substr(ia, ie - ia).compare(b.substr(jb, je - jb));
      if (c != 0) return c < 0 ? -1 : 1;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]) ? -1 : 1;
      ++i;
      ++j;
    }
  }
  if (i < a.size()) return 1;
  if (j < b.size()) return -1;
  return 0;
}

template <class Range>
std::vector<std::string> sorted_ids(Range&& r) {
  std::vector<std::string> out(r.begin(), r.end());
  std::sort(out.begin(), out.end(), IdLess{});
  return out;
}

}  // namespace

bool IdLess::operator()(std::string_view a, std::string_view b) const {
  int c = natural_compare(a, b);
  if (c != 0) return c < 0;
  return a < b;
}

void ApplicationGraph::add_actor(Actor a) {
  if (a.id.empty()) throw ModelError("actor with empty id");
  if (actors_.count(a.id) || channels_.count(a.id)) throw ModelError("duplicate id: " + a.id);
  std::string id = a.id;
  actors_.emplace(std::move(id), std::move(a));
}

void ApplicationGraph::add_channel(Channel c) {
  if (c.id.empty()) throw ModelError("channel with empty id");
  if (actors_.count(c.id) || channels_.count(c.id)) throw ModelError("duplicate id: " + c.id);
  std::string id = c.id;
  channels_.emplace(std::move(id), std::move(c));
}

void ApplicationGraph::add_write(const std::string& actor, const std::string& channel) {
  if (!actors_.count(actor)) throw ModelError("edge references unknown actor: " + actor);
  if (!channels_.count(channel)) throw ModelError("edge references unknown channel: " + channel);
  writes_.emplace(actor, channel);
}

void ApplicationGraph::add_read(const std::string& channel, const std::string& actor) {
  if (!actors_.count(actor)) throw ModelError("edge references unknown actor: " + actor);
  if (!channels_.count(channel)) throw ModelError("edge references unknown channel: " + channel);
  reads_.emplace(channel, actor);
}

void ApplicationGraph::remove_actor(const std::string& id) {
  actors_.erase(id);
  std::erase_if(writes_, [&](const auto& e) { return e.first == id; });
  std::erase_if(reads_, [&](const auto& e) { return e.second == id; });
}

void ApplicationGraph::remove_channel(const std::string& id) {
  channels_.erase(id);
  std::erase_if(writes_, [&](const auto& e) { return e.second == id; });
  std::erase_if(reads_, [&](const auto& e) { return e.first == id; });
}

const Actor& ApplicationGraph::actor(const std::string& id) const {
  auto it = actors_.find(id);
  if (it == actors_.end()) throw ModelError("unknown actor: " + id);
  return it->second;
}

const Channel& ApplicationGraph::channel(const std::string& id) const {
  auto it = channels_.find(id);
  if (it == channels_.end()) throw ModelError("unknown channel: " + id);
  return it->second;
}

std::vector<std::string> ApplicationGraph::producers(const std::string& channel) const {
  std::vector<std::string> out;
  for (const auto& [a, c] : writes_)
    if (c == channel) out.push_back(a);
  return sorted_ids(out);
}

std::vector<std::string> ApplicationGraph::consumers(const std::string& channel) const {
  std::vector<std::string> out;
  for (auto it = reads_.lower_bound(std::pair<std::string, std::string>(channel, ""));
       it != reads_.end() && it->first == channel; ++it)
    out.push_back(it->second);
  return sorted_ids(out);
}

std::vector<std::string> ApplicationGraph::inputs(const std::string& actor) const {
  std::vector<std::string> out;
  for (const auto& [c, a] : reads_)
    if (a == actor) out.push_back(c);
  return sorted_ids(out);
}

std::vector<std::string> ApplicationGraph::outputs(const std::string& actor) const {
  std::vector<std::string> out;
  for (auto it = writes_.lower_bound(std::pair<std::string, std::string>(actor, ""));
       it != writes_.end() && it->first == actor; ++it)
    out.push_back(it->second);
  return sorted_ids(out);
}

ArchitectureGraph::ArchitectureGraph() {
  memories_.push_back(Memory{"q_global", MemoryKind::Global, std::nullopt, -1, -1});
  global_ = 0;
  interconnects_.push_back(Interconnect{"h_NoC", true, -1, 0});
  noc_ = 0;
}

void ArchitectureGraph::add_core_type(const std::string& type, double cost) { costs_[type] = cost; }

int ArchitectureGraph::add_tile(const std::string& id, std::optional<Bytes> memory_bytes,
                                double crossbar_bytes_per_second, const std::string& memory_id,
                                const std::string& crossbar_id) {
  for (const auto& t : tiles_)
    if (t.id == id) throw ModelError("duplicate tile id: " + id);
  Tile t;
  t.id = id;
  int index = static_cast<int>(tiles_.size());
  t.memory = static_cast<int>(memories_.size());
  memories_.push_back(Memory{memory_id.empty() ? "q_" + id : memory_id, MemoryKind::TileLocal, memory_bytes, index, -1});
  t.crossbar = static_cast<int>(interconnects_.size());
  interconnects_.push_back(
      Interconnect{crossbar_id.empty() ? "h_" + id : crossbar_id, false, index, crossbar_bytes_per_second});
  tiles_.push_back(std::move(t));
  return index;
}

int ArchitectureGraph::add_core(int tile, const std::string& id, const std::string& type,
                                std::optional<Bytes> memory_bytes, const std::string& memory_id) {
  if (tile < 0 || tile >= static_cast<int>(tiles_.size())) throw ModelError("core " + id + " has no tile");
  if (find_core(id)) throw ModelError("duplicate core id: " + id);
  Core c{id, type, tile, static_cast<int>(memories_.size())};
  int index = static_cast<int>(cores_.size());
  memories_.push_back(Memory{memory_id.empty() ? "q_" + id : memory_id, MemoryKind::CoreLocal, memory_bytes, tile, index});
  cores_.push_back(std::move(c));
  tiles_[tile].cores.push_back(index);
  return index;
}

void ArchitectureGraph::set_noc(const std::string& id, double bytes_per_second) {
  interconnects_[noc_].id = id;
  interconnects_[noc_].bytes_per_second = bytes_per_second;
}

void ArchitectureGraph::set_global_memory(const std::string& id) { memories_[global_].id = id; }

void ArchitectureGraph::set_tick_seconds(double seconds) {
  if (!(seconds > 0)) throw ModelError("tick length must be positive");
  tick_seconds_ = seconds;
}

double ArchitectureGraph::bytes_per_tick(int interconnect) const {
  return interconnects_.at(interconnect).bytes_per_second * tick_seconds_;
}

std::optional<int> ArchitectureGraph::find_core(std::string_view id) const {
  for (std::size_t i = 0; i < cores_.size(); ++i)
    if (cores_[i].id == id) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> ArchitectureGraph::find_memory(std::string_view id) const {
  for (std::size_t i = 0; i < memories_.size(); ++i)
    if (memories_[i].id == id) return static_cast<int>(i);
  return std::nullopt;
}

std::string ArchitectureGraph::resource_name(ResourceRef r) const {
  switch (r.kind) {
    case ResourceKind::Core: return cores_.at(r.index).id;
    case ResourceKind::Memory: return memories_.at(r.index).id;
    case ResourceKind::Interconnect: return interconnects_.at(r.index).id;
  }
  return {};
}

std::vector<int> SpecificationGraph::mapping_options(const std::string& actor) const {
  const Actor& a = app.actor(actor);
  std::vector<int> out;
  for (std::size_t p = 0; p < arch.cores().size(); ++p)
    if (a.exec_times.count(arch.cores()[p].type)) out.push_back(static_cast<int>(p));
  std::sort(out.begin(), out.end(),
            [&](int x, int y) { return IdLess{}(arch.cores()[x].id, arch.cores()[y].id); });
  return out;
}

ValidationReport validate_application(const ApplicationGraph& app) {
  ValidationReport r;
  if (app.actors().empty()) r.push_back({"no-actors", "", "application graph has no actors"});
  for (const auto& [id, a] : app.actors()) {
    if (a.exec_times.empty()) r.push_back({"unmappable-actor", id, "actor has no core type with an execution time"});
    for (const auto& [type, t] : a.exec_times)
      if (t < 1) r.push_back({"bad-exec-time", id, "execution time on " + type + " must be at least one tick"});
  }
  for (const auto& [id, c] : app.channels()) {
    if (c.delay < 0) r.push_back({"bad-delay", id, "delay must be non-negative"});
    if (c.capacity < 1) r.push_back({"bad-capacity", id, "capacity must be at least one token"});
    if (c.token_bytes < 1) r.push_back({"bad-token-size", id, "token size must be at least one byte"});
    if (c.capacity >= 1 && c.delay > c.capacity)
      r.push_back({"delay-exceeds-capacity", id, "initial tokens do not fit the capacity"});
    auto prod = app.producers(id);
    auto cons = app.consumers(id);
    if (prod.size() != 1)
      r.push_back({"producer-count", id, "channel has " + std::to_string(prod.size()) + " producer edges"});
    if (c.is_mrb ? cons.empty() : cons.size() != 1)
      r.push_back({"consumer-count", id, "channel has " + std::to_string(cons.size()) + " consumer edges"});
  }
  // Marked-graph liveness: every cycle must carry a token.
  IdMap<int> indeg;
  IdMap<std::vector<std::string>> succ;
  for (const auto& [id, a] : app.actors()) indeg[id] = 0;
  for (const auto& [a, c] : app.writes()) {
    if (app.channel(c).delay != 0) continue;
    for (const auto& b : app.consumers(c)) {
      succ[a].push_back(b);
      ++indeg[b];
    }
  }
  std::queue<std::string> q;
  for (const auto& [id, d] : indeg)
    if (d == 0) q.push(id);
  std::size_t seen = 0;
  while (!q.empty()) {
    auto a = q.front();
    q.pop();
    ++seen;
    for (const auto& b : succ[a])
      if (--indeg[b] == 0) q.push(b);
  }
  if (seen != indeg.size()) {
    for (const auto& [id, d] : indeg)
      if (d > 0) {
        r.push_back({"zero-delay-cycle", id, "actor lies on a cycle without initial tokens"});
        break;
      }
  }
  return r;
}

ValidationReport validate_architecture(const ArchitectureGraph& arch) {
  ValidationReport r;
  if (arch.cores().empty()) r.push_back({"no-cores", "", "architecture has no cores"});
  for (const auto& t : arch.tiles())
    if (t.cores.empty()) r.push_back({"empty-tile", t.id, "tile has no cores"});
  for (const auto& c : arch.cores())
    if (!arch.core_type_costs().count(c.type))
      r.push_back({"unknown-core-type", c.id, "core type " + c.type + " is not declared"});
  for (const auto& [type, cost] : arch.core_type_costs())
    if (!(cost >= 0)) r.push_back({"bad-cost", type, "core type cost must be non-negative"});
  for (const auto& m : arch.memories())
    if (m.capacity && *m.capacity < 1) r.push_back({"bad-memory-capacity", m.id, "memory capacity must be positive"});
  for (std::size_t h = 0; h < arch.interconnects().size(); ++h) {
    const auto& ic = arch.interconnects()[h];
    if (!(ic.bytes_per_second > 0)) r.push_back({"bad-bandwidth", ic.id, "bandwidth must be positive"});
  }
  IdSet ids;
  auto check = [&](const std::string& id) {
    if (!ids.insert(id).second) r.push_back({"duplicate-id", id, "resource id used twice"});
  };
  for (const auto& c : arch.cores()) check(c.id);
  for (const auto& m : arch.memories()) check(m.id);
  for (const auto& h : arch.interconnects()) check(h.id);
  return r;
}

ValidationReport validate(const SpecificationGraph& spec) {
  ValidationReport r = validate_application(spec.app);
  auto ra = validate_architecture(spec.arch);
  r.insert(r.end(), ra.begin(), ra.end());
  for (const auto& [id, a] : spec.app.actors()) {
    bool unknown = false;
    for (const auto& [type, t] : a.exec_times)
      if (!spec.arch.core_type_costs().count(type)) {
        r.push_back({"unknown-core-type", id, "execution time given for undeclared core type " + type});
        unknown = true;
      }
    if (!unknown && !a.exec_times.empty() && spec.mapping_options(id).empty())
      r.push_back({"no-mapping-option", id, "no core of a type that can execute the actor"});
  }
  return r;
}

IdSet detect_multicast(const ApplicationGraph& app) {
  IdSet out;
  for (const auto& [id, a] : app.actors()) {
    auto in = app.inputs(id);
    auto outs = app.outputs(id);
    if (in.size() != 1 || outs.empty()) continue;
    const Channel& cin = app.channel(in.front());
    bool ok = true;
    for (const auto& o : outs) {
      const Channel& co = app.channel(o);
      if (co.token_bytes != cin.token_bytes || co.delay != 0 || co.capacity != app.channel(outs.front()).capacity)
        ok = false;
    }
    if (ok) out.insert(id);
  }
  return out;
}

std::vector<ResourceRef> route(const ArchitectureGraph& arch, int core, int memory) {
  if (core < 0 || core >= static_cast<int>(arch.cores().size())) throw ModelError("unknown core index");
  if (memory < 0 || memory >= static_cast<int>(arch.memories().size())) throw ModelError("unknown memory index");
  const Core& p = arch.cores()[core];
  const Memory& q = arch.memories()[memory];
  std::vector<ResourceRef> r{{ResourceKind::Core, core}};
  int home = arch.tiles()[p.tile].crossbar;
  if (p.memory == memory) {
  } else if (q.kind == MemoryKind::Global) {
    r.push_back({ResourceKind::Interconnect, home});
    r.push_back({ResourceKind::Interconnect, arch.noc()});
  } else if (q.tile == p.tile) {
    r.push_back({ResourceKind::Interconnect, home});
  } else {
    r.push_back({ResourceKind::Interconnect, home});
    r.push_back({ResourceKind::Interconnect, arch.noc()});
    r.push_back({ResourceKind::Interconnect, arch.tiles()[q.tile].crossbar});
  }
  r.push_back({ResourceKind::Memory, memory});
  return r;
}

std::vector<std::string> route(const ArchitectureGraph& arch, std::string_view core, std::string_view memory) {
  auto p = arch.find_core(core);
  if (!p) throw ModelError("unknown core: " + std::string(core));
  auto q = arch.find_memory(memory);
  if (!q) throw ModelError("unknown memory: " + std::string(memory));
  std::vector<std::string> out;
  for (const auto& r : route(arch, *p, *q)) out.push_back(arch.resource_name(r));
  return out;
}

}  // namespace dfdse
