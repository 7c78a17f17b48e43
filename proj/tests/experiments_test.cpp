#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "ttkit/experiments.hpp"
#include "ttkit/generators.hpp"
#include "ttkit/io.hpp"

using namespace ttkit;

TEST_CASE("ambient balls grow monotonically and nest") {
  TrainTrack t = catalog("S05A");
  BallReport undirected = tt_ball(t, 4, false, false);
  BallReport directed = tt_ball(t, 4, false, true);
  BallReport shifted = tt_ball(t, 4, true, false);
  CHECK(undirected.level_sizes.size() == 5);
  CHECK(undirected.level_sizes[0] == 1);
  // directed (splits only) reaches a subset; shifts only add tracks
  CHECK(directed.total <= undirected.total);
  CHECK(undirected.total <= shifted.total);
  std::size_t cum = 0;
  for (std::size_t s : undirected.level_sizes) cum += s;
  CHECK(cum == undirected.total);
  // a smaller radius is a prefix of the larger one
  BallReport smaller = tt_ball(t, 2, false, false);
  for (int d = 0; d <= 2; ++d)
    CHECK(smaller.level_sizes[d] == undirected.level_sizes[d]);
}

TEST_CASE("ambient distance matches hand-checked small cases") {
  TrainTrack t = catalog("S05A");
  CHECK(ambient_distance(t, t, 0) == 0);
  int e = large_branches(t).front();
  TrainTrack s = split(t, SplitMove{e, Direction::Right}).track;
  CHECK(ambient_distance(t, s, 3) == 1);
  CHECK(ambient_distance(s, t, 3) == 1);  // collapse edge back
  CHECK(ambient_distance(t, s, 0) == -1);
}

TEST_CASE("distortion ratio is finite and at least one") {
  std::mt19937 rng(3);
  for (const char* name : {"S05A", "S12A", "S20A"}) {
    CAPTURE(name);
    TrainTrack t = catalog(name);
    auto mu = random_measure(t, rng);
    REQUIRE(mu.has_value());
    DistortionReport rep = distortion_probe(t, *mu, 4);
    CHECK(rep.cone_vertices >= 2);
    CHECK(rep.pairs > 0);
    CHECK(rep.max_ratio_den > 0);
    // the cone embeds 1-Lipschitz into the ambient graph, so the ambient
    // distance never exceeds the cone distance
    CHECK(rep.max_ratio_num >= rep.max_ratio_den);
  }
}

TEST_CASE("pants loops are recovered from a bare track") {
  for (const char* name : {"pants_S05", "pants_S20"}) {
    CAPTURE(name);
    PantsTrack p = catalog_pants(name);
    PantsTrack q = pants_track_from_track(p.track);
    CHECK(q.curve_paths.size() == p.curve_paths.size());
    std::set<std::pair<int, int>> a, b;
    for (auto& [c, cp] : p.curve_paths) a.insert({cp.large, cp.small});
    for (auto& [c, cp] : q.curve_paths) b.insert({cp.large, cp.small});
    CHECK(a == b);
  }
  CHECK_THROWS_AS((void)pants_track_from_track(catalog("S05A")), Error);
}

TEST_CASE("twist growth table: norm 2*sum, commuting, Phi-injective") {
  PantsTrack p = catalog_pants("pants_S05");
  TwistGrowthReport rep = twist_growth(p, 10);
  CHECK(rep.commute_ok);
  CHECK(rep.injective);
  CHECK(!rep.rows.empty());
  for (const TwistGrowthRow& row : rep.rows) {
    int total = 0;
    for (int l : row.twists) total += l;
    CHECK(row.word_len == 2 * total);
    CHECK(row.phi_l1 == 2 * total);
    CHECK(row.returns_to_base);
    CHECK(row.phi_distinct);
  }
}

TEST_CASE("reports render deterministically") {
  TrainTrack t = catalog("S05A");
  CHECK(render(tt_ball(t, 3, false, false)) ==
        render(tt_ball(t, 3, false, false)));
  PantsTrack p = catalog_pants("pants_S05");
  CHECK(render(twist_growth(p, 3)) == render(twist_growth(p, 3)));
}
