#pragma once

#include <optional>
#include <vector>

#include "dfdse/binding.hpp"
#include "dfdse/model.hpp"

namespace dfdse {

struct Interval {
  Ticks begin = 0;
  Ticks end = 0;  // exclusive
  bool operator==(const Interval&) const = default;
};

/// Time region of [s, s+tau) folded into [0, P): zero, one or two intervals.
std::vector<Interval> f_wrap(Ticks P, Ticks s, Ticks tau);

/// Occupied regions of one resource within [0, P).
class UtilizationSet {
 public:
  bool is_free(const std::vector<Interval>& region) const;
  void occupy(const std::vector<Interval>& region);
  const std::vector<Interval>& intervals() const { return intervals_; }

 private:
  std::vector<Interval> intervals_;  // sorted, disjoint
};

Ticks period_lower_bound(const TaskSet& tasks);

/// Sum of all task durations; a serial schedule always exists at this period.
Ticks serial_bound(const TaskSet& tasks);

/// Greedy modulo scheduler. nullopt means no placement at this period.
std::optional<Schedule> caps_hms(const TaskSet& tasks, Ticks P);

ValidationReport verify_schedule(const TaskSet& tasks, const Schedule& schedule);

/// Outcome of a decoder run on one genotype.
struct Decoded {
  Schedule schedule;
  TaskSet tasks;
  ChannelBinding binding;
  std::vector<int> capacity;
  int rebinds = 0;
  bool proven_optimal = false;
  bool infeasible_at_budget = false;
};

Decoded decode_via_heuristic(const IndexedGraph& g, const std::vector<ChannelDecision>& decisions,
                             const std::vector<int>& actor_core, const ArchitectureGraph& arch);

}  // namespace dfdse
