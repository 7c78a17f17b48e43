#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "ttkit/generators.hpp"
#include "ttkit/io.hpp"
#include "ttkit/track.hpp"

using namespace ttkit;

namespace {

const char* kCatalogNames[] = {"S05A", "S12A", "S20A", "pants_S05",
                               "pants_S20"};

}  // namespace

TEST_CASE("catalog tracks validate with all flags") {
  for (const char* name : kCatalogNames) {
    CAPTURE(name);
    TrainTrack t = catalog(name);
    ValidationReport r = validate(t);
    CHECK(r.slot_consistent);
    CHECK(r.generic);
    CHECK(r.connected);
    CHECK(r.maximal);
    CHECK(r.ok());
    CHECK(r.problems.empty());
  }
}

TEST_CASE("duplicated branch end raises MalformedSlots") {
  TrainTrack t = catalog("S05A");
  // make one branch end occur twice across slots
  t.switches[0].small_left = t.switches[0].small_right;
  CHECK_THROWS_WITH_AS(validate(t), doctest::Contains("MalformedSlots"),
                       Error);
}

TEST_CASE("exchanging small slots keeps genericity, can break maximality") {
  TrainTrack t = catalog("S05A");
  std::swap(t.switches[0].small_left, t.switches[0].small_right);
  ValidationReport r = validate(t);
  CHECK(r.slot_consistent);
  CHECK(r.generic);
  CHECK(r.connected);
  // maximality is whatever region tracing now says; rerun the oracle
  bool max = true;
  for (const RegionBoundary& reg : trace_regions(t))
    max = max && ((reg.cusps == 3 && !reg.punctured) ||
                  (reg.cusps == 1 && reg.punctured));
  CHECK(r.maximal == max);
}

TEST_CASE("classify_branch agrees with an independent slot scan") {
  for (const char* name : kCatalogNames) {
    CAPTURE(name);
    TrainTrack t = catalog(name);
    int large_count = 0;
    for (int b : t.branch_ids()) {
      auto [s0, sl0] = t.locate({b, 0});
      auto [s1, sl1] = t.locate({b, 1});
      bool l0 = sl0 == Slot::Large, l1 = sl1 == Slot::Large;
      BranchClass expect = l0 && l1   ? BranchClass::Large
                           : l0 || l1 ? BranchClass::Mixed
                                      : BranchClass::Small;
      CHECK(classify_branch(t, b) == expect);
      if (expect == BranchClass::Large) ++large_count;
    }
    std::vector<int> lg = large_branches(t);
    CHECK((int)lg.size() == large_count);
  }
}

TEST_CASE("complementary regions of the catalog tracks") {
  struct Expect {
    const char* name;
    int trigons, punctured_monogons;
  };
  // trigon count from the Euler-characteristic oracle: every switch carries
  // one cusp, a trigon absorbs three, a punctured monogon one.
  for (Expect e : {Expect{"S05A", 1, 5}, Expect{"S12A", 2, 2},
                   Expect{"S20A", 4, 0}}) {
    CAPTURE(e.name);
    TrainTrack t = catalog(e.name);
    int trigons = 0, monogons = 0;
    for (const RegionBoundary& r : trace_regions(t)) {
      if (r.cusps == 3 && !r.punctured) ++trigons;
      if (r.cusps == 1 && r.punctured) ++monogons;
    }
    CHECK(trigons == e.trigons);
    CHECK(monogons == e.punctured_monogons);
    CHECK(3 * trigons + monogons == t.num_switches());
  }
}

TEST_CASE("surface signatures match the catalog names") {
  std::map<std::string, SurfaceSignature> expect = {
      {"S05A", {0, 5}},      {"S12A", {1, 2}},      {"S20A", {2, 0}},
      {"pants_S05", {0, 5}}, {"pants_S20", {2, 0}},
  };
  for (auto& [name, sig] : expect) {
    CAPTURE(name);
    CHECK(surface_signature(catalog(name)) == sig);
  }
}

TEST_CASE("maximal generic dimension count 6g-6+2k") {
  for (const char* name : kCatalogNames) {
    CAPTURE(name);
    TrainTrack t = catalog(name);
    SurfaceSignature sig = surface_signature(t);
    CHECK(t.num_branches() - t.num_switches() ==
          6 * sig.genus - 6 + 2 * sig.punctures);
    // cross-check against the nullspace rank of the switch conditions
    CHECK((int)measure_space(t).size() ==
          6 * sig.genus - 6 + 2 * sig.punctures);
  }
}

TEST_CASE("recurrence witnesses are strictly positive measures") {
  for (const char* name : kCatalogNames) {
    CAPTURE(name);
    TrainTrack t = catalog(name);
    auto mu = is_recurrent(t);
    REQUIRE(mu.has_value());
    CHECK(check_measure(t, *mu).empty());
    Rational min = -1;
    for (auto& [b, q] : mu->weights) {
      CHECK(q > 0);
      if (min < 0 || q < min) min = q;
    }
    CHECK(min == 1);
  }
}

TEST_CASE("serialize/parse round trip") {
  std::mt19937 rng(5);
  for (const char* name : kCatalogNames) {
    CAPTURE(name);
    TrainTrack t = catalog(name);
    CHECK(parse_track_string(serialize_track(t)) == t);
    TrainTrack r = relabel_random(t, rng);
    CHECK(parse_track_string(serialize_track(r)) == r);
  }
}

TEST_CASE("parse rejects malformed input") {
  for (const char* bad :
       {"", "tt v2\n", "tt v1\nsw 0\n", "tt v1\nsurface g=9 k=9\n"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS((void)parse_track_string(bad), Error);
  }
}

TEST_CASE("shipped catalog files equal the built-in entries") {
  for (const char* name : {"S05A", "S12A", "S20A", "pants_S05", "pants_S20"}) {
    CAPTURE(name);
    CHECK(load_track(std::string(TTKIT_DATA_DIR "/") + name + ".tt") ==
          catalog(name));
  }
}
