#pragma once

#include <map>
#include <string>
#include <vector>

#include "ttkit/moves.hpp"
#include "ttkit/track.hpp"

namespace ttkit {

// One boundary of a pair of pants: either a pants curve (with the spiraling
// orientation of the leaves approaching it from this side, +1 or -1) or a
// puncture of the surface.
struct PantsBoundary {
  bool is_curve = false;
  int curve = -1;   // index into PantsData::curves
  int spiral = +1;  // +1 / -1; the two sides of a curve must disagree
};

struct PantsPiece {
  std::vector<PantsBoundary> boundaries;  // exactly three
};

struct PantsData {
  std::vector<int> curves;  // curve identifiers, used in the pants map
  std::vector<PantsPiece> pieces;
};

// The length-2 closed trainpath carrying a pants curve: a large branch
// followed by a small branch.
struct CurvePath {
  int large = -1;
  int small = -1;
};

struct PantsTrack {
  TrainTrack track;
  std::map<int, CurvePath> curve_paths;  // curve id -> its loop
};

PantsTrack pants_standard_track(const PantsData& data);

// Two right (or two left) splits along the curve's loop; replaying the word
// returns to the same MCG orbit (a Dehn twist about the curve).
std::vector<Move> twist_word(const PantsTrack& pants, int curve);

TrainTrack catalog(const std::string& name);
PantsTrack catalog_pants(const std::string& name);  // pants_S05, pants_S20

PantsData pants_data_S05();
PantsData pants_data_S20();

}  // namespace ttkit
