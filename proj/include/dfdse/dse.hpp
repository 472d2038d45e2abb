#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "dfdse/binding.hpp"
#include "dfdse/caps_hms.hpp"
#include "dfdse/ilp_sched.hpp"
#include "dfdse/model.hpp"
#include "dfdse/transform.hpp"

namespace dfdse {

enum class Strategy { Reference, MrbAlways, MrbExplore };
enum class DecoderKind { Heuristic, Ilp };

std::string_view to_string(Strategy s);
std::string_view to_string(DecoderKind d);
std::optional<Strategy> parse_strategy(std::string_view s);
std::optional<DecoderKind> parse_decoder(std::string_view s);

using Objectives = std::array<double, 3>;  // (P, M_F, K), all minimized

/// xi over multi-cast actors, decisions over original channels, binding over original actors (core indices).
struct Genotype {
  std::vector<bool> xi;
  std::vector<ChannelDecision> decisions;
  std::vector<int> binding;
  bool operator==(const Genotype&) const = default;
  bool operator<(const Genotype& o) const;
};

struct Phenotype {
  Ticks period = 0;
  Bytes footprint = 0;
  double cost = 0;
  bool proven_optimal = false;
  bool penalty = false;  // decoder gave up; values are a dominated stand-in
  Decoded decoded;
  Objectives objectives() const { return {static_cast<double>(period), static_cast<double>(footprint), cost}; }
};

/// Uniform integer in [0, n) from raw 64-bit draws, identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);
double uniform01(std::mt19937_64& rng);

struct ProblemOptions {
  Strategy strategy = Strategy::MrbExplore;
  DecoderKind decoder = DecoderKind::Heuristic;
  SolverConfig solver;
  bool add_initial_tokens = false;
};

/// Transformed graph for one replacement vector, plus the maps back to the original graph.
struct TransformedSpec {
  ApplicationGraph app;
  IndexedGraph graph;
  std::vector<int> decision_source;  // transformed channel -> original channel
  std::vector<int> actor_source;     // transformed actor -> original actor
};

class Problem {
 public:
  Problem(SpecificationGraph spec, ProblemOptions options);

  const SpecificationGraph& spec() const { return spec_; }
  const ProblemOptions& options() const { return options_; }
  const std::vector<std::string>& multicast_actors() const { return multicast_; }
  const std::vector<std::string>& channel_ids() const { return channels_; }
  const std::vector<std::string>& actor_ids() const { return actors_; }
  const std::vector<std::vector<int>>& feasible_cores() const { return feasible_; }

  Genotype random_genotype(std::mt19937_64& rng) const;
  /// Replacement vector the strategy applies to this genotype.
  std::vector<bool> effective_xi(const Genotype& g) const;
  const TransformedSpec& transformed(const std::vector<bool>& xi) const;
  /// Thread-safe.
  Phenotype decode(const Genotype& g) const;
  void check(const Genotype& g) const;

 private:
  SpecificationGraph spec_;
  ProblemOptions options_;
  std::vector<std::string> multicast_;
  std::vector<std::string> channels_;
  std::vector<std::string> actors_;
  std::vector<std::vector<int>> feasible_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<bool>, std::unique_ptr<TransformedSpec>> cache_;
};

/// Pareto dominance for minimization: a is no worse everywhere and better somewhere.
bool dominates(const Objectives& a, const Objectives& b);

struct ArchiveEntry {
  Genotype genotype;
  Objectives objectives{};
  bool proven_optimal = false;
  int generation = 0;
};

class ParetoArchive {
 public:
  /// Inserts unless weakly dominated; drops members the new point dominates. Returns true when inserted.
  bool offer(const ArchiveEntry& e);
  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  std::vector<Objectives> points() const;

 private:
  std::vector<ArchiveEntry> entries_;  // sorted by objectives
};

struct EvolveParams {
  int population = 100;
  int offspring = 25;
  double crossover_rate = 0.95;
  int generations = 2500;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
};

struct RunLog {
  std::vector<std::vector<Objectives>> fronts;  // archive snapshot after each generation, [0] = initial population
  ParetoArchive archive;
  long evaluations = 0;
};

RunLog evolve(const Problem& problem, const EvolveParams& params);

/// Non-dominated sorting ranks (0 = first front).
std::vector<int> nondominated_ranks(const std::vector<Objectives>& pts);
std::vector<double> crowding_distance(const std::vector<Objectives>& pts, const std::vector<int>& members);

/// Volume of [0,1]^3 weakly dominated by the points (minimization, reference corner 1).
double hypervolume(const std::vector<Objectives>& pts);

struct Bounds {
  Objectives lo{};
  Objectives hi{};
};

Bounds bounds_of(const std::vector<std::vector<Objectives>>& fronts);
/// Per objective to [0,1]; a constant objective maps to 0.
std::vector<Objectives> normalize(const std::vector<Objectives>& pts, const Bounds& b);
std::vector<Objectives> nondominated(std::vector<Objectives> pts);

/// Mean over runs of HV(run front at generation i) / HV(reference), all already normalized.
/// runs[r][i] is run r's accumulated front after generation i; shorter runs hold their last front.
std::vector<double> relative_avg_hypervolume(const std::vector<std::vector<std::vector<Objectives>>>& runs,
                                             const std::vector<Objectives>& reference);

}  // namespace dfdse
