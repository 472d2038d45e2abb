#include "dfdse/caps_hms.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace dfdse {

std::vector<Interval> f_wrap(Ticks P, Ticks s, Ticks tau) {
  if (P < 1) throw std::invalid_argument("period must be positive");
  if (tau < 0) throw std::invalid_argument("negative duration");
  if (tau > P) throw std::invalid_argument("duration exceeds period");
  if (tau == 0) return {};
  Ticks b = ((s % P) + P) % P;
  if (b + tau <= P) return {{b, b + tau}};
  return {{b, P}, {0, b + tau - P}};
}

bool UtilizationSet::is_free(const std::vector<Interval>& region) const {
  for (const auto& x : region)
    for (const auto& y : intervals_) {
      if (y.begin >= x.end) break;
      if (x.begin < y.end && y.begin < x.end) return false;
    }
  return true;
}

void UtilizationSet::occupy(const std::vector<Interval>& region) {
  for (const auto& x : region) {
    auto it = std::lower_bound(intervals_.begin(), intervals_.end(), x,
                               [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
    intervals_.insert(it, x);
  }
  std::vector<Interval> merged;
  for (const auto& x : intervals_) {
    if (!merged.empty() && merged.back().end == x.begin)
      merged.back().end = x.end;
    else
      merged.push_back(x);
  }
  intervals_ = std::move(merged);
}

Ticks period_lower_bound(const TaskSet& tasks) {
  Ticks lb = 0;
  for (const auto& on : tasks.on_resource) {
    Ticks sum = 0;
    for (int t : on) sum += tasks.tasks[t].duration;
    lb = std::max(lb, sum);
  }
  return lb;
}

Ticks serial_bound(const TaskSet& tasks) { return tasks.total_duration(); }

namespace {

struct Block {
  std::vector<int> reads;
  std::vector<int> writes;
  Ticks read_time = 0;
  Ticks length = 0;
};

// Topological order over zero-delay channels; among ready actors the lowest index goes first.
std::vector<int> topological_rank(const TaskSet& ts) {
  const int n = ts.actor_count();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (std::size_t c = 0; c < ts.write_of_channel.size(); ++c) {
    if (ts.channel_delay[c] != 0) continue;
    int from = ts.tasks[ts.write_of_channel[c]].actor;
    for (int r : ts.reads_of_channel[c]) {
      succ[from].push_back(ts.tasks[r].actor);
      ++indeg[ts.tasks[r].actor];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int a = 0; a < n; ++a)
    if (indeg[a] == 0) ready.push(a);
  std::vector<int> rank(n, n);
  int next = 0;
  while (!ready.empty()) {
    int a = ready.top();
    ready.pop();
    rank[a] = next++;
    for (int b : succ[a])
      if (--indeg[b] == 0) ready.push(b);
  }
  return rank;
}

}  // namespace

std::optional<Schedule> caps_hms(const TaskSet& ts, Ticks P) {
  if (P < 1) return std::nullopt;
  const int n = ts.actor_count();
  const auto rank = topological_rank(ts);
  std::vector<UtilizationSet> U(ts.resource_names.size());
  Schedule sched{P, std::vector<Ticks>(ts.tasks.size(), 0)};
  std::vector<Ticks> earliest(n, 0);
  std::vector<bool> placed(ts.tasks.size(), false);
  std::vector<bool> done(n, false);
  std::vector<int> waiting(n, 0);  // unscheduled producers over zero-delay inputs
  for (int a = 0; a < n; ++a)
    for (int r : ts.reads_of_actor[a])
      if (ts.channel_delay[ts.tasks[r].channel] == 0) ++waiting[a];

  std::vector<int> ready;
  for (int a = 0; a < n; ++a)
    if (waiting[a] == 0) ready.push_back(a);

  int scheduled = 0;
  std::vector<Ticks> trial(ts.tasks.size(), 0);
  while (!ready.empty()) {
    auto best = std::min_element(ready.begin(), ready.end(), [&](int x, int y) { return rank[x] < rank[y]; });
    const int a = *best;
    ready.erase(best);
    const int p = ts.tasks[a].resources.front();

    Block blk;
    blk.reads = ts.reads_of_actor[a];
    blk.writes = ts.writes_of_actor[a];
    for (int r : blk.reads) blk.read_time += ts.tasks[r].duration;
    Ticks write_time = 0;
    for (int w : blk.writes) write_time += ts.tasks[w].duration;
    blk.length = blk.read_time + ts.tasks[a].duration + write_time;
    if (blk.length > P) return std::nullopt;

    // Reads of tokens produced by an already placed writer in an earlier iteration.
    Ticks s_a = earliest[a];
    {
      Ticks offset = 0;
      for (int r : blk.reads) {
        const int c = ts.tasks[r].channel;
        const int w = ts.write_of_channel[c];
        if (ts.channel_delay[c] > 0 && placed[w])
          s_a = std::max(s_a, sched.start[w] + ts.tasks[w].duration - P * ts.channel_delay[c] - offset);
        offset += ts.tasks[r].duration;
      }
    }

    bool ok = false;
    for (Ticks s = s_a; s < s_a + P && !ok; ++s) {
      if (!U[p].is_free(f_wrap(P, s, blk.length))) continue;
      Ticks t = s;
      for (int r : blk.reads) {
        trial[r] = t;
        t += ts.tasks[r].duration;
      }
      trial[a] = t;
      t += ts.tasks[a].duration;
      for (int w : blk.writes) {
        trial[w] = t;
        t += ts.tasks[w].duration;
      }
      bool fits = true;
      auto check_comm = [&](int task) {
        const Task& tk = ts.tasks[task];
        if (tk.duration == 0) return;
        auto region = f_wrap(P, trial[task], tk.duration);
        for (std::size_t i = 1; i < tk.resources.size() && fits; ++i)
          if (!U[tk.resources[i]].is_free(region)) fits = false;
      };
      for (int r : blk.reads) check_comm(r);
      for (int w : blk.writes) check_comm(w);
      if (!fits) continue;
      // Writes into channels with initial tokens must not overtake reads placed earlier.
      for (int w : blk.writes) {
        const int c = ts.tasks[w].channel;
        const int delta = ts.channel_delay[c];
        if (delta == 0) continue;
        for (int r : ts.reads_of_channel[c]) {
          const bool own = ts.tasks[r].actor == a;
          if (!own && !placed[r]) continue;
          const Ticks sr = own ? trial[r] : sched.start[r];
          if (trial[w] + ts.tasks[w].duration - P * delta > sr) fits = false;
        }
      }
      if (!fits) continue;

      ok = true;
      U[p].occupy(f_wrap(P, s, blk.length));
      auto commit = [&](int task) {
        sched.start[task] = trial[task];
        placed[task] = true;
        const Task& tk = ts.tasks[task];
        if (task == a || tk.duration == 0) return;
        auto region = f_wrap(P, trial[task], tk.duration);
        for (std::size_t i = 1; i < tk.resources.size(); ++i) U[tk.resources[i]].occupy(region);
      };
      for (int r : blk.reads) commit(r);
      commit(a);
      for (int w : blk.writes) commit(w);
      done[a] = true;
      ++scheduled;
      for (int w : blk.writes) {
        const int c = ts.tasks[w].channel;
        if (ts.channel_delay[c] != 0) continue;
        for (int r : ts.reads_of_channel[c]) {
          const int b = ts.tasks[r].actor;
          earliest[b] = std::max(earliest[b], s + blk.length);
          if (--waiting[b] == 0 && !done[b]) ready.push_back(b);
        }
      }
    }
    if (!ok) return std::nullopt;
  }
  if (scheduled != n) return std::nullopt;
  return sched;
}

ValidationReport verify_schedule(const TaskSet& ts, const Schedule& s) {
  ValidationReport rep;
  const Ticks P = s.period;
  if (P < 1) {
    rep.push_back({"bad-period", "", "period must be positive"});
    return rep;
  }
  if (s.start.size() != ts.tasks.size()) {
    rep.push_back({"missing-start", "", "schedule does not cover every task"});
    return rep;
  }
  for (std::size_t i = 0; i < ts.tasks.size(); ++i) {
    if (s.start[i] < 0) rep.push_back({"negative-start", ts.tasks[i].name, "start time is negative"});
    if (ts.tasks[i].duration > P)
      rep.push_back({"task-exceeds-period", ts.tasks[i].name, "task does not fit a window of length P"});
  }
  for (std::size_t r = 0; r < ts.on_resource.size(); ++r) {
    const auto& on = ts.on_resource[r];
    for (std::size_t i = 0; i < on.size(); ++i) {
      const Task& ti = ts.tasks[on[i]];
      if (ti.duration == 0 || ti.duration > P) continue;
      auto wi = f_wrap(P, s.start[on[i]], ti.duration);
      for (std::size_t j = i + 1; j < on.size(); ++j) {
        const Task& tj = ts.tasks[on[j]];
        if (tj.duration == 0 || tj.duration > P) continue;
        auto wj = f_wrap(P, s.start[on[j]], tj.duration);
        bool clash = false;
        for (const auto& x : wi)
          for (const auto& y : wj)
            if (x.begin < y.end && y.begin < x.end) clash = true;
        if (clash)
          rep.push_back({"resource-overlap", ts.resource_names[r], ti.name + " overlaps " + tj.name});
      }
    }
  }
  for (std::size_t c = 0; c < ts.write_of_channel.size(); ++c) {
    const int w = ts.write_of_channel[c];
    if (w < 0) continue;
    for (int r : ts.reads_of_channel[c])
      if (s.start[w] + ts.tasks[w].duration - P * ts.channel_delay[c] > s.start[r])
        rep.push_back({"read-before-write", ts.tasks[r].name, "token read before it is written"});
  }
  for (int a = 0; a < ts.actor_count(); ++a) {
    for (int r : ts.reads_of_actor[a])
      if (s.start[r] + ts.tasks[r].duration > s.start[a])
        rep.push_back({"actor-before-read", ts.tasks[a].name, "actor starts before " + ts.tasks[r].name + " ends"});
    for (int w : ts.writes_of_actor[a])
      if (s.start[a] + ts.tasks[a].duration > s.start[w])
        rep.push_back({"write-before-actor", ts.tasks[w].name, "write starts before the actor ends"});
  }
  return rep;
}

Decoded decode_via_heuristic(const IndexedGraph& g, const std::vector<ChannelDecision>& decisions,
                             const std::vector<int>& actor_core, const ArchitectureGraph& arch) {
  Decoded d;
  d.capacity = g.capacity;
  d.binding = determine_channel_bindings(g, decisions, d.capacity, actor_core, arch);
  d.tasks = task_durations(g, actor_core, d.binding.memory, arch);
  Ticks P = std::max<Ticks>(1, period_lower_bound(d.tasks));
  // Far beyond any makespan every block is placed without wrapping, so the search always ends.
  const Ticks limit = 4 * (d.tasks.total_duration() + 1) * (g.channel_count() + 2);
  while (true) {
    std::optional<Schedule> s;
    while (!(s = caps_hms(d.tasks, P))) {
      if (++P > limit) throw std::logic_error("heuristic found no schedule below the period limit");
    }
    d.schedule = *s;
    for (int c = 0; c < g.channel_count(); ++c)
      d.capacity[c] = std::max(d.capacity[c], required_capacity(d.tasks, d.schedule, c));
    if (bindings_fit(g, d.binding, d.capacity, arch)) break;
    d.binding = determine_channel_bindings(g, decisions, d.capacity, actor_core, arch);
    d.tasks = task_durations(g, actor_core, d.binding.memory, arch);
    ++d.rebinds;
  }
  return d;
}

}  // namespace dfdse
