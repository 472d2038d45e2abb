#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace dfdse;
using namespace testing;

namespace {

Problem fig1_problem(Strategy s) {
  ProblemOptions o;
  o.strategy = s;
  return Problem(fixture_spec("fig1.json"), o);
}

std::vector<Objectives> random_points(std::mt19937_64& rng, int n) {
  std::vector<Objectives> pts;
  for (int i = 0; i < n; ++i) pts.push_back({uniform01(rng), uniform01(rng), uniform01(rng)});
  return pts;
}

}  // namespace

TEST_CASE("strategy and decoder names") {
  for (auto s : {Strategy::Reference, Strategy::MrbAlways, Strategy::MrbExplore})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK(parse_decoder("ilp") == DecoderKind::Ilp);
  CHECK(parse_decoder("heuristic") == DecoderKind::Heuristic);
  CHECK_FALSE(parse_strategy("always").has_value());
}

TEST_CASE("uniform draws stay in range and spread evenly") {
  std::mt19937_64 rng(1);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[uniform_below(rng, 7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 600);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK_THROWS(uniform_below(rng, 0));
}

TEST_CASE("strategies fix or expose the replacement vector") {
  auto ref = fig1_problem(Strategy::Reference);
  auto always = fig1_problem(Strategy::MrbAlways);
  auto explore = fig1_problem(Strategy::MrbExplore);
  Genotype g = fixture_genotype(explore, "fig4_genotype.json");
  CHECK(g.xi == std::vector<bool>{true});
  CHECK(ref.effective_xi(g) == std::vector<bool>{false});
  CHECK(always.effective_xi(g) == std::vector<bool>{true});
  CHECK(explore.effective_xi(g) == std::vector<bool>{true});

  // a strategy that ignores xi decodes both values alike
  Genotype h = g;
  h.xi = {false};
  CHECK(ref.decode(g).objectives() == ref.decode(h).objectives());
  CHECK(always.decode(g).objectives() == always.decode(h).objectives());
  CHECK(explore.decode(g).objectives() == always.decode(g).objectives());
  CHECK(explore.decode(h).objectives() == ref.decode(h).objectives());
}

TEST_CASE("Fig. 4 and Fig. 5 phenotypes") {
  auto p = fig1_problem(Strategy::MrbExplore);
  const Phenotype f4 = p.decode(fixture_genotype(p, "fig4_genotype.json"));
  const Phenotype f5 = p.decode(fixture_genotype(p, "fig5_genotype.json"));
  CHECK(f4.cost == doctest::Approx(4.0));
  CHECK(f5.cost == doctest::Approx(4.0));
  CHECK_FALSE(f4.penalty);
  CHECK_FALSE(f5.penalty);
  CHECK(f4.footprint < f5.footprint);
  CHECK(verify_schedule(f4.decoded.tasks, f4.decoded.schedule).empty());
  CHECK(verify_schedule(f5.decoded.tasks, f5.decoded.schedule).empty());
}

TEST_CASE("relabelling to an identical tile keeps the objectives") {
  auto p = fig1_problem(Strategy::MrbExplore);
  const auto& arch = p.spec().arch;
  for (const char* f : {"fig4_genotype.json", "fig5_genotype.json"}) {
    const Genotype g = fixture_genotype(p, f);
    Genotype moved = g;
    for (auto& core : moved.binding) core += 6;
    for (std::size_t a = 0; a < g.binding.size(); ++a)
      REQUIRE(arch.cores()[moved.binding[a]].type == arch.cores()[g.binding[a]].type);
    CHECK(p.decode(moved).objectives() == p.decode(g).objectives());
  }
}

TEST_CASE("genotype checks") {
  auto p = fig1_problem(Strategy::MrbExplore);
  Genotype g = fixture_genotype(p, "fig5_genotype.json");
  Genotype bad = g;
  bad.binding[p.actor_ids().size() - 1] = 1000;
  CHECK_THROWS(p.check(bad));
  bad = g;
  bad.decisions.pop_back();
  CHECK_THROWS(p.check(bad));
  const int a3 = static_cast<int>(std::find(p.actor_ids().begin(), p.actor_ids().end(), "a3") - p.actor_ids().begin());
  bad = g;
  bad.binding[a3] = *p.spec().arch.find_core("p2");
  CHECK_THROWS(p.check(bad));
}

TEST_CASE("dominance and the archive") {
  CHECK(dominates({1, 1, 1}, {1, 1, 2}));
  CHECK_FALSE(dominates({1, 1, 1}, {1, 1, 1}));
  CHECK_FALSE(dominates({0, 2, 1}, {1, 1, 1}));

  ParetoArchive a;
  CHECK(a.offer({{}, {3, 3, 3}, false, 0}));
  CHECK_FALSE(a.offer({{}, {3, 3, 3}, false, 1}));
  CHECK_FALSE(a.offer({{}, {4, 3, 3}, false, 1}));
  CHECK(a.offer({{}, {1, 5, 3}, false, 1}));
  CHECK(a.offer({{}, {2, 2, 2}, false, 2}));
  CHECK(a.points() == std::vector<Objectives>{{1, 5, 3}, {2, 2, 2}});

  std::mt19937_64 rng(6);
  for (int it = 0; it < 50; ++it) {
    ParetoArchive r;
    auto pts = random_points(rng, 40);
    for (auto& p : pts)
      for (auto& v : p) v = std::round(v * 4);
    for (const auto& p : pts) r.offer({{}, p, false, 0});
    CHECK(r.points() == nondominated(pts));
  }
}

TEST_CASE("non-dominated ranks and crowding") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 30; ++it) {
    auto pts = random_points(rng, 25);
    for (auto& p : pts)
      for (auto& v : p) v = std::round(v * 3);
    const auto rank = nondominated_ranks(pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      int deepest = -1;
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (dominates(pts[j], pts[i])) deepest = std::max(deepest, rank[j]);
      CHECK(rank[i] == deepest + 1);
    }
  }
  const std::vector<Objectives> line{{0, 4, 0}, {1, 3, 0}, {2, 2, 0}, {4, 0, 0}};
  const auto d = crowding_distance(line, {0, 1, 2, 3});
  CHECK(std::isinf(d[0]));
  CHECK(std::isinf(d[3]));
  CHECK(d[1] == doctest::Approx(0.5 + 0.5));
  CHECK(d[2] == doctest::Approx(0.75 + 0.75));
}

TEST_CASE("hypervolume") {
  CHECK(hypervolume({}) == 0.0);
  CHECK(hypervolume({{0, 0, 0}}) == doctest::Approx(1.0));
  CHECK(hypervolume({{0.5, 0.5, 0.5}}) == doctest::Approx(0.125));
  CHECK(hypervolume({{0.5, 0, 0}, {0, 0.5, 0}}) == doctest::Approx(0.75));
  CHECK(hypervolume({{1, 1, 1}}) == 0.0);
  CHECK_THROWS(hypervolume({{1.5, 0, 0}}));
  CHECK_THROWS(hypervolume({{-0.1, 0, 0}}));

  std::mt19937_64 rng(17);
  for (int it = 0; it < 200; ++it) {
    const auto pts = random_points(rng, 1 + static_cast<int>(uniform_below(rng, 10)));
    CHECK(hypervolume(pts) == doctest::Approx(hypervolume_inclusion_exclusion(pts)).epsilon(1e-9));
  }
  const auto pts = random_points(rng, 30);
  CHECK(hypervolume(pts) == doctest::Approx(hypervolume_monte_carlo(pts, 400000, 5)).epsilon(0.01));
}

TEST_CASE("normalization and the relative hypervolume curve") {
  const std::vector<Objectives> raw{{7, 100, 4}, {8, 50, 4}, {10, 50, 2}, {8, 75, 3}};
  const Bounds b = bounds_of({raw});
  const auto n = normalize(raw, b);
  CHECK(n[0] == Objectives{0, 1, 1});
  CHECK(n[1][0] == doctest::Approx(1.0 / 3));
  CHECK(n[2] == Objectives{1, 0, 0});
  CHECK(hypervolume({n[3]}) == doctest::Approx(2.0 / 3 * 0.5 * 0.5));
  CHECK(normalize({{3, 3, 3}}, bounds_of({{{3, 3, 3}}})) == std::vector<Objectives>{{0, 0, 0}});

  const auto ref = nondominated(n);
  const auto curve = relative_avg_hypervolume({{{n[0]}, n}, {n}}, ref);
  REQUIRE(curve.size() == 2);
  CHECK(curve[1] == doctest::Approx(1.0));
  CHECK(curve[0] == doctest::Approx((hypervolume({n[0]}) / hypervolume(ref) + 1.0) / 2));
  CHECK_THROWS_AS(relative_avg_hypervolume({{n}}, {{1, 1, 1}}), std::domain_error);
}

TEST_CASE("evolution is deterministic and its archive is sound") {
  auto p = fig1_problem(Strategy::MrbExplore);
  EvolveParams e;
  e.population = 12;
  e.offspring = 6;
  e.generations = 15;
  e.seed = 9;
  e.threads = 1;
  const RunLog a = evolve(p, e);
  e.threads = 4;
  const RunLog b = evolve(p, e);
  CHECK(a.archive.points() == b.archive.points());
  CHECK(a.fronts == b.fronts);
  CHECK(a.fronts.size() == 16);
  CHECK(a.evaluations == 12 + 15 * 6);

  const auto pts = a.archive.points();
  for (const auto& x : pts)
    for (const auto& y : pts) CHECK_FALSE(dominates(x, y));
  for (const auto& entry : a.archive.entries()) CHECK(p.decode(entry.genotype).objectives() == entry.objectives);
  // archive snapshots only improve
  for (std::size_t i = 1; i < a.fronts.size(); ++i)
    for (const auto& old : a.fronts[i - 1]) {
      bool covered = false;
      for (const auto& now : a.fronts[i]) covered = covered || now == old || dominates(now, old);
      CHECK(covered);
    }

  e.seed = 10;
  CHECK(evolve(p, e).fronts != a.fronts);
}

TEST_CASE("zero generations evaluate only the initial population") {
  auto p = fig1_problem(Strategy::Reference);
  EvolveParams e;
  e.population = 5;
  e.offspring = 3;
  e.generations = 0;
  e.threads = 1;
  const RunLog r = evolve(p, e);
  CHECK(r.fronts.size() == 1);
  CHECK(r.evaluations == 5);
  CHECK_FALSE(r.archive.entries().empty());
  e.population = 0;
  CHECK_THROWS(evolve(p, e));
}
