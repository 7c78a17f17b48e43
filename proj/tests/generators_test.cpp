#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>

#include "doctest.h"
#include "test_util.hpp"
#include "ttkit/generators.hpp"
#include "ttkit/io.hpp"
#include "ttkit/orbit.hpp"

using namespace ttkit;

TEST_CASE("pants standard tracks have one large branch per curve") {
  struct Case {
    const char* name;
    int curves;
  };
  for (Case c : {Case{"pants_S05", 2}, Case{"pants_S20", 3}}) {
    CAPTURE(c.name);
    PantsTrack p = catalog_pants(c.name);
    CHECK((int)p.curve_paths.size() == c.curves);
    CHECK((int)large_branches(p.track).size() == c.curves);
    CHECK(validate(p.track).ok());
    CHECK(is_recurrent(p.track).has_value());
    for (auto& [curve, path] : p.curve_paths) {
      // an embedded length-2 trainpath: a large branch and a small branch
      CHECK(classify_branch(p.track, path.large) == BranchClass::Large);
      CHECK(classify_branch(p.track, path.small) == BranchClass::Small);
      auto [v, sv] = p.track.locate({path.large, 0});
      auto [w, sw] = p.track.locate({path.large, 1});
      auto [a, sa] = p.track.locate({path.small, 0});
      auto [b, sb] = p.track.locate({path.small, 1});
      CHECK(((a->id == v->id && b->id == w->id) ||
             (a->id == w->id && b->id == v->id)));
    }
  }
}

TEST_CASE("pants constructor rejects one-sided spiraling") {
  PantsData bad = pants_data_S05();
  // both sides of curve 0 now spiral with the same orientation
  for (PantsPiece& piece : bad.pieces)
    for (PantsBoundary& bd : piece.boundaries)
      if (bd.is_curve && bd.curve == 0) bd.spiral = +1;
  CHECK_THROWS_AS((void)pants_standard_track(bad), Error);
  try {
    (void)pants_standard_track(bad);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidGluing);
  }
}

TEST_CASE("twist words have length 2 and commute") {
  for (const char* name : {"pants_S05", "pants_S20"}) {
    CAPTURE(name);
    PantsTrack p = catalog_pants(name);
    std::vector<int> curves;
    for (auto& [c, path] : p.curve_paths) curves.push_back(c);
    for (int c : curves) {
      std::vector<Move> w = twist_word(p, c);
      CHECK(w.size() == 2);
      TrainTrack out = apply_sequence(p.track, w).track;
      CHECK(same_orbit(p.track, out));
    }
    for (std::size_t i = 0; i < curves.size(); ++i)
      for (std::size_t j = i + 1; j < curves.size(); ++j) {
        std::vector<Move> wi = twist_word(p, curves[i]);
        std::vector<Move> wj = twist_word(p, curves[j]);
        std::vector<Move> ij = wi, ji = wj;
        ij.insert(ij.end(), wj.begin(), wj.end());
        ji.insert(ji.end(), wi.begin(), wi.end());
        CHECK(apply_sequence(p.track, ij).track ==
              apply_sequence(p.track, ji).track);
      }
    CHECK_THROWS_AS((void)twist_word(p, 999), Error);
  }
}

TEST_CASE("catalog counts") {
  struct Case {
    const char* name;
    int switches, branches;
  };
  for (Case c : {Case{"S05A", 8, 12}, Case{"S12A", 8, 12},
                 Case{"S20A", 12, 18}}) {
    CAPTURE(c.name);
    TrainTrack t = catalog(c.name);
    CHECK(t.num_switches() == c.switches);
    CHECK(t.num_branches() == c.branches);
  }
  CHECK_THROWS_AS((void)catalog("S99Z"), Error);
  try {
    (void)catalog("S99Z");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownName);
  }
}

TEST_CASE("n-fold twist iteration reaches the expected Phi mass") {
  // each twist contributes one split at the loop's large branch and one at
  // its small branch, so n twists give two entries of n and |Phi|_1 = 2n
  PantsTrack p = catalog_pants("pants_S05");
  int curve = p.curve_paths.begin()->first;
  CurvePath path = p.curve_paths.begin()->second;
  for (int n = 1; n <= 10; ++n) {
    std::vector<Move> word;
    std::vector<Move> w = twist_word(p, curve);
    for (int i = 0; i < n; ++i) word.insert(word.end(), w.begin(), w.end());
    std::map<int, int> counts;
    for (const Move& m : word) ++counts[m.at];
    CHECK((int)word.size() == 2 * n);
    CHECK(counts[path.large] == n);
    CHECK(counts[path.small] == n);
    CHECK(apply_sequence(p.track, word).track == p.track);
  }
}
