#include "doctest.h"
#include "support.hpp"

using namespace dfdse;
using namespace testing;

TEST_CASE("Fig. 3 firing sequence") {
  MrbState s(4, {"a3", "a4"});
  CHECK(s.write_index() == 0);
  CHECK(s.read_index("a3") == -1);
  CHECK(s.read_index("a4") == -1);
  CHECK(available_tokens(s, "a3") == 0);
  CHECK(free_places(s) == 4);

  for (int i = 0; i < 3; ++i) s = fire_writer(s, 1);
  CHECK(s.write_index() == 3);
  CHECK(s.read_index("a3") == 0);
  CHECK(s.read_index("a4") == 0);
  CHECK(available_tokens(s, "a3") == 3);
  CHECK(free_places(s) == 1);

  for (int i = 0; i < 3; ++i) s = fire_reader(s, "a3", 1);
  s = fire_writer(s, 1);
  CHECK(s.write_index() == 0);
  CHECK(s.read_index("a3") == 3);
  CHECK(s.read_index("a4") == 0);
  CHECK(available_tokens(s, "a3") == 1);
  CHECK(available_tokens(s, "a4") == 4);
  CHECK(free_places(s) == 0);

  s = fire_reader(s, "a4", 1);
  s = fire_reader(s, "a3", 1);
  CHECK(s.write_index() == 0);
  CHECK(s.read_index("a3") == -1);
  CHECK(s.read_index("a4") == 1);
  CHECK(available_tokens(s, "a3") == 0);
  CHECK(available_tokens(s, "a4") == 3);
  CHECK(free_places(s) == 1);
}

TEST_CASE("firing guards") {
  MrbState s(4, {"r"});
  CHECK(fire_writer(s, 0) == s);
  CHECK(fire_reader(s, "r", 0) == s);
  CHECK_THROWS_AS(fire_reader(s, "r", 1), MrbError);
  CHECK_THROWS_AS(fire_writer(s, 5), MrbError);
  CHECK_THROWS_AS(fire_writer(s, -1), MrbError);
  s = fire_writer(s, 4);
  CHECK(free_places(s) == 0);
  CHECK_THROWS_AS(fire_writer(s, 1), MrbError);
  CHECK_THROWS_AS(fire_reader(s, "nobody", 1), MrbError);
  s = fire_reader(s, "r", 3);
  CHECK(available_tokens(s, "r") == 1);
  CHECK_THROWS_AS(fire_reader(s, "r", 2), MrbError);
}

TEST_CASE("multi-rate firings keep index invariants") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 200; ++it) {
    const int gamma = 1 + static_cast<int>(uniform_below(rng, 6));
    MrbState s(gamma, {"x", "y", "z"});
    for (int step = 0; step < 60; ++step) {
      if (uniform_below(rng, 2) == 0) {
        const int f = free_places(s);
        if (f > 0) s = fire_writer(s, 1 + static_cast<int>(uniform_below(rng, f)));
      } else {
        const std::string r = std::string(1, static_cast<char>('x' + uniform_below(rng, 3)));
        const int t = available_tokens(s, r);
        if (t > 0) s = fire_reader(s, r, 1 + static_cast<int>(uniform_below(rng, t)));
      }
      CHECK(s.write_index() >= 0);
      CHECK(s.write_index() < gamma);
      int most = 0;
      for (const auto& [r, rho] : s.read_indices()) {
        CHECK(rho >= -1);
        CHECK(rho < gamma);
        const int t = available_tokens(s, r);
        CHECK(t >= 0);
        CHECK(t <= gamma);
        CHECK((rho == -1) == (t == 0));
        most = std::max(most, t);
      }
      CHECK(free_places(s) == gamma - most);
    }
  }
}

TEST_CASE("MRB reads match multi-cast FIFOs") {
  std::mt19937_64 rng(99);
  for (int it = 0; it < 50; ++it) {
    const int readers = 1 + static_cast<int>(uniform_below(rng, 4));
    const int gin = 1 + static_cast<int>(uniform_below(rng, 3));
    const int gout = 1 + static_cast<int>(uniform_below(rng, 3));
    auto r = mrb_fifo_cosim(rng, readers, gin, gout, 400);
    CHECK(r.mismatches == 0);
    CHECK(r.enable_mismatches == 0);
    CHECK(r.reads > 0);
  }
}
