#pragma once

#include <random>
#include <string>
#include <vector>

#include "dfdse/binding.hpp"
#include "dfdse/caps_hms.hpp"
#include "dfdse/dse.hpp"
#include "dfdse/ilp_sched.hpp"
#include "dfdse/io.hpp"
#include "dfdse/model.hpp"
#include "dfdse/mrb.hpp"
#include "dfdse/transform.hpp"

namespace testing {

using namespace dfdse;

std::string fixture(const std::string& name);
SpecificationGraph fixture_spec(const std::string& app);
Genotype fixture_genotype(const Problem& p, const std::string& name);

// Plain decode of one bound graph, bypassing the genotype plumbing.
struct Bound {
  IndexedGraph graph;
  std::vector<ChannelDecision> decisions;
  std::vector<int> actor_core;
  ArchitectureGraph arch;
};

// Random small instance: <= max_actors actors, <= max_channels channels, <= max_tiles tiles,
// every channel carrying at least min_delay initial tokens.
Bound random_instance(std::mt19937_64& rng, int max_actors, int max_channels, int max_tiles, int min_delay);
TaskSet bound_tasks(const Bound& b);

// Eqs. 1-3 checked straight from the edge sets.
IdSet brute_force_multicast(const ApplicationGraph& app);

// Largest number of closed token lifetimes [s_w + kP, s_r + tau_r + (k + delay)P] covering one instant.
int overlap_capacity(Ticks s_w, Ticks s_r, Ticks tau_r, Ticks P, int delay);

double hypervolume_inclusion_exclusion(const std::vector<Objectives>& pts);
double hypervolume_monte_carlo(const std::vector<Objectives>& pts, long samples, std::uint64_t seed);

// Writer, a multi-cast actor and one FIFO per reader, run with eager multi-cast firing,
// side by side with an MRB holding payloads. Returns the number of mismatching reads.
struct CosimResult {
  long steps = 0;
  long reads = 0;
  long mismatches = 0;
  long enable_mismatches = 0;
};
CosimResult mrb_fifo_cosim(std::mt19937_64& rng, int readers, int gamma_in, int gamma_out, long steps);

// Fig. 1 genotype space up to core relabelling and equivalent channel decisions.
struct Enumeration {
  std::vector<Objectives> front;
  long decodes = 0;
  long rebinds = 0;
};
Enumeration exhaustive_front(const Problem& problem);

}  // namespace testing
