#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dfdse/model.hpp"

namespace dfdse {

class BindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ChannelDecision : std::uint8_t { Global, TileProd, TileCons, Prod, Cons };

inline constexpr int kDecisionCount = 5;

std::string_view to_string(ChannelDecision d);
std::optional<ChannelDecision> parse_decision(std::string_view s);

/// Application graph with integer indices in id order, resolved against one architecture.
struct IndexedGraph {
  std::vector<std::string> actor_ids;
  std::vector<std::vector<Ticks>> exec_on_core;  // [actor][core], -1 when the core type cannot run it
  std::vector<std::string> channel_ids;
  std::vector<int> delay;
  std::vector<int> capacity;
  std::vector<Bytes> token_bytes;
  std::vector<bool> mrb;
  std::vector<int> producer;
  std::vector<std::vector<int>> consumers;  // actor-id order
  std::vector<std::vector<int>> inputs;     // channel-id order
  std::vector<std::vector<int>> outputs;

  int actor_count() const { return static_cast<int>(actor_ids.size()); }
  int channel_count() const { return static_cast<int>(channel_ids.size()); }
  int actor_index(std::string_view id) const;
  int channel_index(std::string_view id) const;
};

IndexedGraph index_graph(const ApplicationGraph& app, const ArchitectureGraph& arch);

struct ChannelBinding {
  std::vector<int> memory;  // per channel
  std::vector<Bytes> used;  // per memory, w_q
};

ChannelBinding determine_channel_bindings(const IndexedGraph& g, const std::vector<ChannelDecision>& decisions,
                                          const std::vector<int>& capacity, const std::vector<int>& actor_core,
                                          const ArchitectureGraph& arch);

/// True when every bounded memory holds its bound channels at the given capacities.
bool bindings_fit(const IndexedGraph& g, const ChannelBinding& b, const std::vector<int>& capacity,
                  const ArchitectureGraph& arch);

IdMap<int> allocation(const std::vector<int>& actor_core, const ArchitectureGraph& arch);
double core_cost(const IdMap<int>& alpha, const IdMap<double>& costs);

Bytes memory_footprint(const ApplicationGraph& app);
Bytes memory_footprint(const IndexedGraph& g, const std::vector<int>& capacity);

enum class TaskKind : std::uint8_t { Actor, Write, Read };

struct Task {
  TaskKind kind = TaskKind::Actor;
  int actor = -1;
  int channel = -1;
  Ticks duration = 0;
  std::vector<int> resources;  // the core first, then traversed interconnects in route order
  std::string name;
};

/// Tasks of a bound graph. Actor tasks come first (task index == actor index).
/// Resources are numbered cores first, then interconnects.
struct TaskSet {
  std::vector<Task> tasks;
  std::vector<std::string> resource_names;
  int core_count = 0;
  std::vector<std::vector<int>> on_resource;  // T_r
  std::vector<std::string> channel_names;
  std::vector<int> channel_delay;
  std::vector<int> write_of_channel;               // task index
  std::vector<std::vector<int>> reads_of_channel;  // task indices, consumer order
  std::vector<std::vector<int>> reads_of_actor;    // channel-id order
  std::vector<std::vector<int>> writes_of_actor;

  int actor_count() const { return static_cast<int>(reads_of_actor.size()); }
  Ticks total_duration() const;
  /// Rebuilds on_resource and the per-actor/per-channel lists from tasks.
  void rebuild_indices(int channel_count);
};

TaskSet task_durations(const IndexedGraph& g, const std::vector<int>& actor_core, const std::vector<int>& channel_memory,
                       const ArchitectureGraph& arch);

struct Schedule {
  Ticks period = 0;
  std::vector<Ticks> start;  // per task
  bool operator==(const Schedule&) const = default;
};

/// Smallest capacity that never runs out of slots under the periodic schedule.
int required_capacity(const TaskSet& tasks, const Schedule& schedule, int channel);

Ticks floor_div(Ticks a, Ticks b);

}  // namespace dfdse
