#include "doctest.h"
#include "support.hpp"

using namespace dfdse;
using namespace testing;

namespace {

bool has_code(const ValidationReport& r, const std::string& code, const std::string& element = {}) {
  for (const auto& v : r)
    if (v.code == code && (element.empty() || v.element == element)) return true;
  return false;
}

ApplicationGraph pipeline() {
  ApplicationGraph g;
  g.add_actor({"a", {{"t1", 1}}});
  g.add_actor({"b", {{"t1", 1}}});
  g.add_channel({"c", 0, 1, 4, false, ""});
  g.add_write("a", "c");
  g.add_read("c", "b");
  return g;
}

}  // namespace

TEST_CASE("natural id order") {
  IdLess less;
  CHECK(less("p2", "p10"));
  CHECK_FALSE(less("p10", "p2"));
  CHECK(less("a1", "b0"));
  CHECK(less("c1+c2", "c1+c3"));
  IdSet s{"p10", "p1", "p2", "T1"};
  CHECK(std::vector<std::string>(s.begin(), s.end()) == std::vector<std::string>{"T1", "p1", "p2", "p10"});
}

TEST_CASE("bundled fixtures validate") {
  for (const char* f : {"fig1.json", "fig2a.json", "fig7.json"}) {
    CAPTURE(f);
    CHECK(validate(fixture_spec(f)).empty());
  }
}

TEST_CASE("validation reports broken inputs") {
  SpecificationGraph s = fixture_spec("fig1.json");
  s.app = ApplicationGraph{};
  CHECK(has_code(validate(s), "no-actors"));

  ApplicationGraph g = pipeline();
  g.add_actor({"x", {{"t1", 1}}});
  g.add_write("x", "c");
  CHECK(has_code(validate_application(g), "producer-count", "c"));

  ApplicationGraph cyc;
  cyc.add_actor({"a", {{"t1", 1}}});
  cyc.add_actor({"b", {{"t1", 1}}});
  cyc.add_channel({"c1", 0, 1, 1, false, ""});
  cyc.add_channel({"c2", 0, 1, 1, false, ""});
  cyc.add_write("a", "c1");
  cyc.add_read("c1", "b");
  cyc.add_write("b", "c2");
  cyc.add_read("c2", "a");
  CHECK(has_code(validate_application(cyc), "zero-delay-cycle"));
  cyc.channels().at("c2").delay = 1;
  CHECK(validate_application(cyc).empty());
  cyc.channels().at("c2").capacity = 0;
  CHECK(has_code(validate_application(cyc), "bad-capacity", "c2"));

  SpecificationGraph u = fixture_spec("fig1.json");
  ApplicationGraph app = u.app;
  Actor a = app.actor("a1");
  app.remove_actor("a1");
  a.exec_times["t9"] = 3;
  app.add_actor(a);
  app.add_write("a1", "c1");
  u.app = app;
  CHECK(has_code(validate(u), "unknown-core-type", "a1"));
}

TEST_CASE("multicast detection") {
  CHECK(detect_multicast(fixture_spec("fig2a.json").app) == IdSet{"a2"});
  CHECK(detect_multicast(fixture_spec("fig1.json").app) == IdSet{"a2"});
  CHECK(detect_multicast(pipeline()).empty());
}

TEST_CASE("multicast detection agrees with the edge-set predicate on random graphs") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 300; ++it) {
    ApplicationGraph g;
    const int n = 2 + static_cast<int>(uniform_below(rng, 7));
    for (int a = 0; a < n; ++a) g.add_actor({"a" + std::to_string(a), {{"t1", 1}}});
    const int m = 1 + static_cast<int>(uniform_below(rng, 10));
    for (int c = 0; c < m; ++c) {
      const std::string id = "c" + std::to_string(c);
      g.add_channel({id, static_cast<int>(uniform_below(rng, 2)), 1 + static_cast<int>(uniform_below(rng, 2)),
                     1 + static_cast<Bytes>(uniform_below(rng, 2)), false, ""});
      g.add_write("a" + std::to_string(uniform_below(rng, n)), id);
      g.add_read(id, "a" + std::to_string(uniform_below(rng, n)));
    }
    const IdSet got = detect_multicast(g);
    CHECK(got == brute_force_multicast(g));
    CHECK(detect_multicast(g) == got);
  }
}

TEST_CASE("routes through the hierarchy") {
  const auto arch = fixture_spec("fig1.json").arch;
  CHECK(route(arch, "p1", "q_p1") == std::vector<std::string>{"p1", "q_p1"});
  CHECK(route(arch, "p1", "q_p4") == std::vector<std::string>{"p1", "h_T1", "q_p4"});
  CHECK(route(arch, "p1", "q_T1") == std::vector<std::string>{"p1", "h_T1", "q_T1"});
  CHECK(route(arch, "p1", "q_global") == std::vector<std::string>{"p1", "h_T1", "h_NoC", "q_global"});
  CHECK(route(arch, "p1", "q_p7") == std::vector<std::string>{"p1", "h_T1", "h_NoC", "h_T2", "q_p7"});
  CHECK(route(arch, "p1", "q_T2") == std::vector<std::string>{"p1", "h_T1", "h_NoC", "h_T2", "q_T2"});
}

TEST_CASE("every route starts at the core, ends at the memory, and crosses 0 to 3 interconnects") {
  const auto arch = fixture_spec("fig1.json").arch;
  for (int p = 0; p < static_cast<int>(arch.cores().size()); ++p)
    for (int q = 0; q < static_cast<int>(arch.memories().size()); ++q) {
      auto r = route(arch, p, q);
      REQUIRE(r.size() >= 2);
      CHECK(r.front() == ResourceRef{ResourceKind::Core, p});
      CHECK(r.back() == ResourceRef{ResourceKind::Memory, q});
      int links = 0;
      for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        CHECK(r[i].kind == ResourceKind::Interconnect);
        ++links;
      }
      CHECK(links <= 3);
    }
}

TEST_CASE("architecture fixture carries the 24-core constants") {
  const auto arch = fixture_spec("fig1.json").arch;
  CHECK(arch.cores().size() == 24);
  CHECK(arch.tiles().size() == 4);
  CHECK(arch.core_type_costs().at("t1") == 1.5);
  CHECK(arch.memories()[arch.cores()[0].memory].capacity == Bytes{2621440});
  CHECK(arch.memories()[arch.tiles()[0].memory].capacity == Bytes{52428800});
  CHECK(arch.interconnects()[arch.tiles()[0].crossbar].bytes_per_second == doctest::Approx(8.0 * (1 << 30)));
  CHECK(arch.interconnects()[arch.noc()].bytes_per_second == doctest::Approx(4.0 * (1 << 30)));
  CHECK_FALSE(arch.memories()[arch.global_memory()].capacity.has_value());
}

TEST_CASE("mapping options follow core types") {
  const auto s = fixture_spec("fig1.json");
  CHECK(s.mapping_options("a1").size() == 24);
  CHECK(s.mapping_options("a3").size() == 8);
  CHECK(s.mapping_options("a4").size() == 16);
}
