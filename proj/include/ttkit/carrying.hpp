#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ttkit/moves.hpp"
#include "ttkit/track.hpp"

namespace ttkit {

// One strand crossing a tie of a base branch. `dir` is +1 when the carried
// branch's 0->1 orientation agrees with the base branch's 0->1 orientation
// at this crossing, -1 otherwise.
struct Elem {
  int branch = -1;  // sigma-branch id
  int dir = +1;

  auto operator<=>(const Elem&) const = default;
};

// A sigma-switch lying over the interior of a base branch, recorded in the
// base branch's 0->1 direction. A fork turns one strand into two (reading
// 0->1), a merge turns two adjacent strands into one. `index` addresses the
// section just before the event. For a fork, out0/out1 are the two produced
// strands in natural (left-to-right for a 0->1 traveler) order; for a merge
// only out0 is used.
struct SigmaEvent {
  bool fork = true;
  int index = 0;
  Elem out0, out1;

  auto operator<=>(const SigmaEvent&) const = default;
};

// The full tie-transverse picture over one base branch: the section at the
// end-0 tie plus the ordered interior events. All later sections are
// determined by folding the events.
struct BranchWeave {
  std::vector<Elem> start;
  std::vector<SigmaEvent> events;

  auto operator<=>(const BranchWeave&) const = default;
};

struct CarriedPosition {
  TrainTrack base;     // tau
  TrainTrack carried;  // sigma
  std::map<int, BranchWeave> weaves;  // base branch -> weave

  bool operator==(const CarriedPosition&) const = default;
};

using NuProfile = std::map<int, int>;  // base branch -> nu(b, sigma)

// Throws (Internal with details) when the strand data is not a valid
// carrying picture: every section must match its neighbors across base
// switches frame-by-frame, every event must realize exactly one
// sigma-switch, every sigma half-branch must appear at exactly one event
// port, and every section must be nonempty.
void validate_position(const CarriedPosition& pos);

CarriedPosition identity_position(const TrainTrack& track);

NuProfile nu_profile(const CarriedPosition& pos);

// M[s][b] = number of strands of sigma-branch s in the first minimal section
// of base branch b. The pushforward of a sigma-measure is mu_tau = M^T
// mu_sigma (implemented by pushforward_measure) and satisfies the base
// switch conditions.
std::map<int, std::map<int, long long>> transition_matrix(
    const CarriedPosition& pos);
TransverseMeasure pushforward_measure(const CarriedPosition& pos,
                                      const TransverseMeasure& mu_sigma);

bool carried_by_split(const CarriedPosition& pos, int e, Direction direction);

// The embedded trainpath in sigma over e joining the two cutting-arc
// switches, as the ordered list of sigma-branches it traverses; nullopt when
// some split at e carries sigma.
std::optional<std::vector<int>> cutting_connector(const CarriedPosition& pos,
                                                  int e);

CarriedPosition split_carried(const CarriedPosition& pos, int at,
                              Direction direction);
CarriedPosition shift_carried(const CarriedPosition& pos, int at);
CarriedPosition collapse_carried(const CarriedPosition& pos, int at,
                                 Direction direction);

CarriedPosition transport_through_base_split(const CarriedPosition& pos,
                                             const SplitMove& move);

struct NormalizeResult {
  CarriedPosition pos;
  std::vector<Move> carried_moves;  // shifts applied to sigma
};

// Rearranges the picture over large base branch e so that the only
// sigma-switches over e are those of the cutting connector; other strands
// cross e without switches. CarriedBySplit when a split at e carries sigma.
NormalizeResult normalize_over(const CarriedPosition& pos, int e);

std::optional<std::vector<Move>> shift_equivalent(const TrainTrack& a,
                                                  const TrainTrack& b);

struct AgreeResult {
  std::vector<Move> base_word;     // splits applied to the base
  std::vector<Move> carried_word;  // splits/shifts/collapses applied to sigma
  TrainTrack final_base;
  TrainTrack final_carried;
  std::vector<Move> shift_certificate;  // final_base -> final_carried
  int phases = 0;
};

AgreeResult agree(const CarriedPosition& pos, const LaminationProxy& lambda);

// Direction of the base split at e that keeps sigma carried; NeitherCarries
// or Ambiguous when zero or two directions qualify.
Direction carried_split_direction(const CarriedPosition& pos, int e);

std::string serialize_position(const CarriedPosition& pos);
CarriedPosition parse_position_string(const std::string& text);
CarriedPosition load_position(const std::string& path);

}  // namespace ttkit
