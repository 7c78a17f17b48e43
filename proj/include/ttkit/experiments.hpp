#pragma once

#include <string>
#include <vector>

#include "ttkit/cone.hpp"
#include "ttkit/generators.hpp"
#include "ttkit/track.hpp"

namespace ttkit {

// Ball of the ambient track graph TT around a basepoint: vertices are
// tracks, edges are splits and collapses (of length one), optionally shifts.
// `directed` restricts to splitting-only reachability.
struct BallReport {
  int radius = 0;
  bool with_shifts = false;
  bool directed = false;
  std::vector<std::size_t> level_sizes;  // new tracks found at each depth
  std::size_t total = 0;
};

BallReport tt_ball(const TrainTrack& base, int radius, bool with_shifts,
                   bool directed);
std::string render(const BallReport& r);

// Exact BFS distance in the ambient (undirected split+collapse) graph, or -1
// when the distance exceeds `cap`.
int ambient_distance(const TrainTrack& a, const TrainTrack& b, int cap);

// Compares the flat-cone metric d_E against ambient BFS distance for all
// cone-vertex pairs of the radius-`radius` ball; the max ratio
// d_E / d_ambient is the desk-scale distortion probe. Parallelises over
// source vertices; TTKIT_THREADS caps the worker count.
struct DistortionReport {
  int radius = 0;
  std::size_t cone_vertices = 0;
  std::size_t pairs = 0;
  bool truncated = false;
  // max over pairs of d_E / d_ambient, as (num, den); 1/1 when no pairs.
  int max_ratio_num = 1;
  int max_ratio_den = 1;
  int cone_d_at_max = 0;
  int ambient_d_at_max = 0;
};

DistortionReport distortion_probe(const TrainTrack& base,
                                  const TransverseMeasure& mu, int radius);
std::string render(const DistortionReport& r);

// Recovers the pants-curve loops of a standard-form track: every large
// branch must sit in a unique embedded length-2 closed trainpath (large
// branch + small branch). InvalidGluing when the track is not of this form.
PantsTrack pants_track_from_track(const TrainTrack& track);

// Multi-twist experiment: every twist tuple (l_1, ..., l_d) with
// sum l_i <= n, replayed as a splitting word from the standard track, has
// word norm = |Phi|_1 = 2 sum l_i, returns to the basepoint track exactly
// (a Dehn twist fixes the track), twist words commute, and distinct tuples
// reach distinct Phi-coordinates (the semigroup embedding is injective into
// the flat cone, not into the set of endpoint tracks).
struct TwistGrowthRow {
  std::vector<int> twists;  // per curve, in report.curves order
  int word_len = 0;
  int phi_l1 = 0;
  bool phi_distinct = true;
  bool returns_to_base = true;
};

struct TwistGrowthReport {
  std::vector<int> curves;
  std::vector<TwistGrowthRow> rows;
  bool commute_ok = true;
  bool injective = true;  // on Phi-coordinates
};

TwistGrowthReport twist_growth(const PantsTrack& pants, int n);
std::string render(const TwistGrowthReport& r);

}  // namespace ttkit
