#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dfdse {

using Ticks = std::int64_t;
using Bytes = std::int64_t;

/// Natural ordering of identifiers: digit runs compare numerically, so "p2" < "p10".
/// Ties between numerically equal runs ("a01", "a1") fall back to plain comparison.
struct IdLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

template <class T>
using IdMap = std::map<std::string, T, IdLess>;
using IdSet = std::set<std::string, IdLess>;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Actor {
  std::string id;
  IdMap<Ticks> exec_times;  // core type -> ticks; a missing type is unmappable

  bool operator==(const Actor&) const = default;
};

struct Channel {
  std::string id;
  int delay = 0;
  int capacity = 1;
  Bytes token_bytes = 1;
  bool is_mrb = false;
  // Original channel whose binding decision this channel follows. Empty means itself.
  std::string decision_from;

  bool operator==(const Channel&) const = default;
};

using EdgeSet = std::set<std::pair<std::string, std::string>, std::less<>>;

/// Bipartite actor/channel graph. Writes are (actor, channel), reads are (channel, actor).
class ApplicationGraph {
 public:
  void add_actor(Actor a);
  void add_channel(Channel c);
  void add_write(const std::string& actor, const std::string& channel);
  void add_read(const std::string& channel, const std::string& actor);
  void remove_actor(const std::string& id);
  void remove_channel(const std::string& id);

  const IdMap<Actor>& actors() const { return actors_; }
  const IdMap<Channel>& channels() const { return channels_; }
  IdMap<Channel>& channels() { return channels_; }
  const EdgeSet& writes() const { return writes_; }
  const EdgeSet& reads() const { return reads_; }

  const Actor& actor(const std::string& id) const;
  const Channel& channel(const std::string& id) const;

  std::vector<std::string> producers(const std::string& channel) const;
  std::vector<std::string> consumers(const std::string& channel) const;
  std::vector<std::string> inputs(const std::string& actor) const;
  std::vector<std::string> outputs(const std::string& actor) const;

  bool operator==(const ApplicationGraph&) const = default;

 private:
  IdMap<Actor> actors_;
  IdMap<Channel> channels_;
  EdgeSet writes_;
  EdgeSet reads_;
};

enum class MemoryKind { CoreLocal, TileLocal, Global };

struct Core {
  std::string id;
  std::string type;
  int tile = -1;
  int memory = -1;
};

struct Memory {
  std::string id;
  MemoryKind kind = MemoryKind::Global;
  std::optional<Bytes> capacity;  // nullopt: unbounded
  int tile = -1;
  int core = -1;
};

struct Interconnect {
  std::string id;
  bool noc = false;
  int tile = -1;
  double bytes_per_second = 0;
};

struct Tile {
  std::string id;
  std::vector<int> cores;
  int memory = -1;
  int crossbar = -1;
};

enum class ResourceKind { Core, Memory, Interconnect };

struct ResourceRef {
  ResourceKind kind;
  int index;
  bool operator==(const ResourceRef&) const = default;
};

class ArchitectureGraph {
 public:
  ArchitectureGraph();

  void add_core_type(const std::string& type, double cost);
  int add_tile(const std::string& id, std::optional<Bytes> memory_bytes, double crossbar_bytes_per_second,
               const std::string& memory_id = {}, const std::string& crossbar_id = {});
  int add_core(int tile, const std::string& id, const std::string& type, std::optional<Bytes> memory_bytes,
               const std::string& memory_id = {});
  void set_noc(const std::string& id, double bytes_per_second);
  void set_global_memory(const std::string& id);
  void set_tick_seconds(double seconds);

  const std::vector<Tile>& tiles() const { return tiles_; }
  const std::vector<Core>& cores() const { return cores_; }
  const std::vector<Memory>& memories() const { return memories_; }
  const std::vector<Interconnect>& interconnects() const { return interconnects_; }
  const IdMap<double>& core_type_costs() const { return costs_; }
  int noc() const { return noc_; }
  int global_memory() const { return global_; }
  double tick_seconds() const { return tick_seconds_; }
  double bytes_per_tick(int interconnect) const;

  std::optional<int> find_core(std::string_view id) const;
  std::optional<int> find_memory(std::string_view id) const;
  std::string resource_name(ResourceRef r) const;

 private:
  std::vector<Tile> tiles_;
  std::vector<Core> cores_;
  std::vector<Memory> memories_;
  std::vector<Interconnect> interconnects_;
  IdMap<double> costs_;
  int noc_ = -1;
  int global_ = -1;
  double tick_seconds_ = 1e-6;
};

struct SpecificationGraph {
  ApplicationGraph app;
  ArchitectureGraph arch;

  /// Cores an actor may be bound to, in core-id order.
  std::vector<int> mapping_options(const std::string& actor) const;
};

struct Violation {
  std::string code;
  std::string element;
  std::string message;
  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate(const SpecificationGraph& spec);
ValidationReport validate_application(const ApplicationGraph& app);
ValidationReport validate_architecture(const ArchitectureGraph& arch);

IdSet detect_multicast(const ApplicationGraph& app);

std::vector<ResourceRef> route(const ArchitectureGraph& arch, int core, int memory);
std::vector<std::string> route(const ArchitectureGraph& arch, std::string_view core, std::string_view memory);

}  // namespace dfdse
