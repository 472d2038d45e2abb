#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dfdse/binding.hpp"
#include "dfdse/caps_hms.hpp"

namespace dfdse {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct MilpVariable {
  std::string name;
  double lower = 0;
  double upper = 0;  // +inf allowed
  bool binary = false;
};

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct MilpRow {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0;
};

struct MilpModel {
  std::vector<MilpVariable> variables;
  std::vector<MilpRow> rows;
  std::vector<std::pair<int, double>> objective;  // minimized
  int period = -1;
  std::vector<int> start;                      // per task
  std::map<std::pair<int, int>, int> order;    // (t, t') -> e_{t,t'}; actor pairs use actor task indices
  double big_m = 0;

  int add_variable(std::string name, double lower, double upper, bool binary = false);
  void add_row(std::string name, std::vector<std::pair<int, double>> terms, RowSense sense, double rhs);
};

MilpModel build_ilp(const TaskSet& tasks);

/// CPLEX LP text of the model.
std::string write_lp(const MilpModel& model);

enum class SolveStatus { Optimal, FeasibleIncumbent, TimeoutNoSolution, Infeasible };

std::string_view to_string(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::TimeoutNoSolution;
  std::vector<double> values;  // per variable, present iff optimal or feasible-incumbent
  double objective = 0;
};

struct SolverConfig {
  std::string executable;  // CBC-compatible command line; empty selects the internal solver
  double timeout_seconds = 3.0;
  long internal_node_limit = 200000;
};

/// Reads DFDSE_MILP_SOLVER; an unset or empty variable selects the internal solver.
SolverConfig solver_from_environment(double timeout_seconds = 3.0);

SolveOutcome solve(const MilpModel& model, const SolverConfig& config);
SolveOutcome solve_internal(const MilpModel& model, double timeout_seconds, long node_limit);
SolveOutcome solve_external(const MilpModel& model, const std::string& executable, double timeout_seconds);

/// Integer schedule from a solution: period rounded up to a tick, start times recomputed as the
/// earliest ones consistent with the solution's orderings at that period.
Schedule schedule_from_solution(const TaskSet& tasks, const MilpModel& model, const SolveOutcome& outcome);

Decoded decode_via_ilp(const IndexedGraph& g, const std::vector<ChannelDecision>& decisions,
                       const std::vector<int>& actor_core, const ArchitectureGraph& arch, const SolverConfig& config);

/// Smallest integer period of the ordering-based model, found by enumerating resource orderings
/// and checking each difference-constraint system. Throws OracleTooLarge on big instances.
Ticks exact_min_period(const TaskSet& tasks, int max_pairs = 48);

}  // namespace dfdse
