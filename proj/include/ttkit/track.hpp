#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttkit/errors.hpp"

namespace ttkit {

using Rational = boost::multiprecision::cpp_rational;

// One end of a branch. end is 0 or 1; a branch is oriented from end 0 to
// end 1 purely as a bookkeeping device (orientation carries no meaning).
struct HalfBranch {
  int branch = -1;
  int end = 0;

  auto operator<=>(const HalfBranch&) const = default;
};

std::string to_string(const HalfBranch& h);

// A trivalent switch. Slot membership defines largeness: the half-branch in
// `large` is the large one, the other two are small. `small_left` is the
// small half-branch to the left of the inward-pointing large direction with
// respect to the surface orientation.
struct SwitchRecord {
  int id = -1;
  HalfBranch large;
  HalfBranch small_left;
  HalfBranch small_right;

  auto operator<=>(const SwitchRecord&) const = default;
};

enum class Slot { Large, SmallLeft, SmallRight };

// A side of a branch traversed by a region boundary. `end` is the end the
// traversal starts from; `left_side` says whether the region lies on the
// left of the branch's 0->1 orientation. On an oriented surface the left
// side is always traversed starting at end 0 and the right side starting at
// end 1, so keys are "b.0.L" or "b.1.R".
struct RegionSide {
  int branch = -1;
  int end = 0;
  bool left_side = true;

  auto operator<=>(const RegionSide&) const = default;
};

std::string to_string(const RegionSide& s);
RegionSide parse_region_key(const std::string& key);

struct RegionBoundary {
  std::vector<RegionSide> sides;  // cyclic, in traversal order
  // cusp_after[i] is true when a cusp separates sides[i] and sides[i+1].
  std::vector<bool> cusp_after;
  int cusps = 0;
  bool punctured = false;
  std::string key;  // lexicographically minimal side, serialized
};

struct TrainTrack {
  std::vector<SwitchRecord> switches;     // kept sorted by id
  std::set<std::string> punctured_regions;  // region keys

  std::vector<int> branch_ids() const;
  std::vector<int> switch_ids() const;
  int num_branches() const { return (int)branch_ids().size(); }
  int num_switches() const { return (int)switches.size(); }

  // Which switch/slot owns a given half-branch. Throws MalformedSlots if the
  // half-branch is missing or duplicated.
  std::pair<const SwitchRecord*, Slot> locate(HalfBranch h) const;
  const SwitchRecord& switch_by_id(int id) const;

  void sort_switches();
  bool operator==(const TrainTrack&) const = default;
};

struct ValidationReport {
  bool slot_consistent = false;
  bool generic = false;
  bool connected = false;
  bool maximal = false;
  std::vector<std::string> problems;

  bool ok() const { return slot_consistent && generic && connected && maximal; }
};

struct TransverseMeasure {
  std::map<int, Rational> weights;

  const Rational& at(int branch) const;
};

struct SurfaceSignature {
  int genus = 0;
  int punctures = 0;

  auto operator<=>(const SurfaceSignature&) const = default;
  int complexity() const { return 3 * genus - 3 + punctures; }
};

enum class BranchClass { Large, Mixed, Small };

// Core operations ------------------------------------------------------------

// Throws MalformedSlots when a branch end is missing or duplicated; all other
// violations are reported through flags.
ValidationReport validate(const TrainTrack& track);

BranchClass classify_branch(const TrainTrack& track, int branch);

std::vector<RegionBoundary> trace_regions(const TrainTrack& track);

SurfaceSignature surface_signature(const TrainTrack& track);

// Returns a strictly positive measure (min weight 1) iff one exists.
std::optional<TransverseMeasure> is_recurrent(const TrainTrack& track);

// Ids of switches whose condition fails under mu.
std::vector<int> check_measure(const TrainTrack& track,
                               const TransverseMeasure& mu);

std::vector<int> large_branches(const TrainTrack& track);
std::vector<int> mixed_branches(const TrainTrack& track);

}  // namespace ttkit
