#pragma once

#include <string>

#include "ttkit/track.hpp"

namespace ttkit {

// The colored trivalent graph is the same combinatorial object as the
// switch-record list: red = large slot, yellow = small_left, green =
// small_right, plus the marked (punctured) regions. It is kept as a wrapper
// so orbit-level code cannot be fed a track where slots still mean largeness
// by accident.
struct ColoredGraph {
  TrainTrack structure;
};

ColoredGraph colored_graph(const TrainTrack& track);

// Canonical byte string; equal iff the graphs are color-isomorphic
// (preserving puncture marks). Mirror images are distinct.
std::string canonical_form(const ColoredGraph& g);

std::string hex_encode(const std::string& bytes);

bool same_orbit(const TrainTrack& a, const TrainTrack& b);

std::vector<RegionBoundary> regions_from_colors(const ColoredGraph& g);

// The relabeled structure underlying the certificate (canonical vertex,
// edge and orientation numbering).
TrainTrack canonical_relabel(const TrainTrack& track);

}  // namespace ttkit
