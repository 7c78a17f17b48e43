#include "ttkit/track.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace ttkit {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedSlots: return "MalformedSlots";
    case ErrorCode::UnknownBranch: return "UnknownBranch";
    case ErrorCode::UnknownCurve: return "UnknownCurve";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::NotLargeBranch: return "NotLargeBranch";
    case ErrorCode::NotMixedBranch: return "NotMixedBranch";
    case ErrorCode::NotCollapsible: return "NotCollapsible";
    case ErrorCode::TieCollision: return "TieCollision";
    case ErrorCode::MeasureNotCarried: return "MeasureNotCarried";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::NeitherCarries: return "NeitherCarries";
    case ErrorCode::NotCarried: return "NotCarried";
    case ErrorCode::NotCarriedBySplit: return "NotCarriedBySplit";
    case ErrorCode::CarriedBySplit: return "CarriedBySplit";
    case ErrorCode::IncompatibleLocalPicture: return "IncompatibleLocalPicture";
    case ErrorCode::NotInCone: return "NotInCone";
    case ErrorCode::RadiusExceeded: return "RadiusExceeded";
    case ErrorCode::ExceptionalSurface: return "ExceptionalSurface";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::InvalidGluing: return "InvalidGluing";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadMoveSequence: return "BadMoveSequence";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

std::string to_string(const HalfBranch& h) {
  return std::to_string(h.branch) + "." + std::to_string(h.end);
}

std::string to_string(const RegionSide& s) {
  return std::to_string(s.branch) + "." + std::to_string(s.end) + "." +
         (s.left_side ? "L" : "R");
}

RegionSide parse_region_key(const std::string& key) {
  RegionSide s;
  size_t d1 = key.find('.');
  size_t d2 = key.find('.', d1 == std::string::npos ? d1 : d1 + 1);
  if (d1 == std::string::npos || d2 == std::string::npos)
    fail(ErrorCode::ParseError, "bad region key '" + key + "'");
  try {
    s.branch = std::stoi(key.substr(0, d1));
    s.end = std::stoi(key.substr(d1 + 1, d2 - d1 - 1));
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "bad region key '" + key + "'");
  }
  std::string side = key.substr(d2 + 1);
  if ((side != "L" && side != "R") || (s.end != 0 && s.end != 1))
    fail(ErrorCode::ParseError, "bad region key '" + key + "'");
  s.left_side = side == "L";
  return s;
}

std::vector<int> TrainTrack::branch_ids() const {
  std::set<int> ids;
  for (const auto& sw : switches) {
    ids.insert(sw.large.branch);
    ids.insert(sw.small_left.branch);
    ids.insert(sw.small_right.branch);
  }
  return {ids.begin(), ids.end()};
}

std::vector<int> TrainTrack::switch_ids() const {
  std::vector<int> ids;
  ids.reserve(switches.size());
  for (const auto& sw : switches) ids.push_back(sw.id);
  return ids;
}

std::pair<const SwitchRecord*, Slot> TrainTrack::locate(HalfBranch h) const {
  const SwitchRecord* found = nullptr;
  Slot slot = Slot::Large;
  for (const auto& sw : switches) {
    for (auto [ref, s] : {std::pair{&sw.large, Slot::Large},
                          std::pair{&sw.small_left, Slot::SmallLeft},
                          std::pair{&sw.small_right, Slot::SmallRight}}) {
      if (*ref == h) {
        if (found)
          fail(ErrorCode::MalformedSlots,
               "half-branch " + to_string(h) + " occurs twice");
        found = &sw;
        slot = s;
      }
    }
  }
  if (!found)
    fail(ErrorCode::MalformedSlots,
         "half-branch " + to_string(h) + " missing");
  return {found, slot};
}

const SwitchRecord& TrainTrack::switch_by_id(int id) const {
  for (const auto& sw : switches)
    if (sw.id == id) return sw;
  fail(ErrorCode::Internal, "no switch with id " + std::to_string(id));
}

void TrainTrack::sort_switches() {
  std::sort(switches.begin(), switches.end(),
            [](const SwitchRecord& a, const SwitchRecord& b) {
              return a.id < b.id;
            });
}

const Rational& TransverseMeasure::at(int branch) const {
  auto it = weights.find(branch);
  if (it == weights.end())
    fail(ErrorCode::UnknownBranch,
         "measure missing branch " + std::to_string(branch));
  return it->second;
}

namespace {

// Throws MalformedSlots unless every branch end occurs exactly once.
void check_slots(const TrainTrack& track) {
  std::map<HalfBranch, int> count;
  std::set<int> switch_ids;
  for (const auto& sw : track.switches) {
    if (!switch_ids.insert(sw.id).second)
      fail(ErrorCode::MalformedSlots,
           "duplicate switch id " + std::to_string(sw.id));
    for (const HalfBranch* h : {&sw.large, &sw.small_left, &sw.small_right}) {
      if (h->end != 0 && h->end != 1)
        fail(ErrorCode::MalformedSlots, "bad end in " + to_string(*h));
      ++count[*h];
    }
  }
  for (auto& [h, c] : count) {
    if (c != 1)
      fail(ErrorCode::MalformedSlots,
           "half-branch " + to_string(h) + " occurs " + std::to_string(c) +
               " times");
    HalfBranch other{h.branch, 1 - h.end};
    if (!count.count(other))
      fail(ErrorCode::MalformedSlots,
           "half-branch " + to_string(other) + " missing");
  }
}

bool is_connected(const TrainTrack& track) {
  if (track.switches.empty()) return false;
  std::map<int, std::vector<int>> adj;  // branch -> incident switch ids
  for (const auto& sw : track.switches)
    for (const HalfBranch* h : {&sw.large, &sw.small_left, &sw.small_right})
      adj[h->branch].push_back(sw.id);
  std::set<int> seen;
  std::queue<int> q;
  q.push(track.switches.front().id);
  seen.insert(track.switches.front().id);
  while (!q.empty()) {
    int id = q.front();
    q.pop();
    const SwitchRecord& sw = track.switch_by_id(id);
    for (const HalfBranch* h : {&sw.large, &sw.small_left, &sw.small_right})
      for (int nb : adj[h->branch])
        if (seen.insert(nb).second) q.push(nb);
  }
  return seen.size() == track.switches.size();
}

}  // namespace

ValidationReport validate(const TrainTrack& track) {
  ValidationReport rep;
  check_slots(track);  // throws on malformed input
  rep.slot_consistent = true;
  rep.generic = true;  // the record shape only expresses trivalent switches
  rep.connected = is_connected(track);
  if (!rep.connected) rep.problems.push_back("track is not connected");

  rep.maximal = true;
  auto regions = trace_regions(track);
  std::set<std::string> monogon_keys;
  for (const auto& r : regions) {
    if (r.cusps == 1) monogon_keys.insert(r.key);
    if (r.cusps == 3) continue;
    if (r.cusps == 1 && track.punctured_regions.count(r.key)) continue;
    rep.maximal = false;
    rep.problems.push_back("region " + r.key + " has " +
                           std::to_string(r.cusps) +
                           " cusps and is not a marked punctured monogon");
  }
  for (const auto& key : track.punctured_regions) {
    parse_region_key(key);
    if (!monogon_keys.count(key)) {
      rep.maximal = false;
      rep.problems.push_back("puncture mark " + key +
                             " does not name a monogon region");
    }
  }
  return rep;
}

BranchClass classify_branch(const TrainTrack& track, int branch) {
  bool found = false;
  for (const auto& sw : track.switches)
    for (const HalfBranch* h : {&sw.large, &sw.small_left, &sw.small_right})
      if (h->branch == branch) found = true;
  if (!found)
    fail(ErrorCode::UnknownBranch, "no branch " + std::to_string(branch));
  int large_ends = 0;
  for (int end : {0, 1}) {
    auto [sw, slot] = track.locate({branch, end});
    (void)sw;
    if (slot == Slot::Large) ++large_ends;
  }
  if (large_ends == 2) return BranchClass::Large;
  if (large_ends == 0) return BranchClass::Small;
  return BranchClass::Mixed;
}

std::vector<RegionBoundary> trace_regions(const TrainTrack& track) {
  check_slots(track);
  // A dart is the half-branch a traversal exits through: leaving via (b,e)
  // travels from end e to end 1-e with the region on the travel-left side.
  std::set<HalfBranch> unused;
  for (const auto& sw : track.switches)
    for (const HalfBranch* h : {&sw.large, &sw.small_left, &sw.small_right})
      unused.insert(*h);

  std::vector<RegionBoundary> regions;
  while (!unused.empty()) {
    HalfBranch start = *unused.begin();
    RegionBoundary region;
    HalfBranch exit = start;
    do {
      unused.erase(exit);
      region.sides.push_back(
          RegionSide{exit.branch, exit.end, exit.end == 0});
      HalfBranch arrival{exit.branch, 1 - exit.end};
      auto [sw, slot] = track.locate(arrival);
      bool cusp = false;
      switch (slot) {
        case Slot::Large: exit = sw->small_left; break;
        case Slot::SmallRight: exit = sw->large; break;
        case Slot::SmallLeft:
          cusp = true;
          exit = sw->small_right;
          break;
      }
      region.cusp_after.push_back(cusp);
      if (cusp) ++region.cusps;
    } while (exit != start);
    RegionSide min_side = *std::min_element(region.sides.begin(),
                                            region.sides.end());
    region.key = to_string(min_side);
    region.punctured = track.punctured_regions.count(region.key) > 0;
    regions.push_back(std::move(region));
  }
  std::sort(regions.begin(), regions.end(),
            [](const RegionBoundary& a, const RegionBoundary& b) {
              return a.key < b.key;
            });
  return regions;
}

SurfaceSignature surface_signature(const TrainTrack& track) {
  auto regions = trace_regions(track);
  int V = (int)track.switches.size();
  int E = (int)track.branch_ids().size();
  int F = (int)regions.size();
  int chi = V - E + F;
  if ((2 - chi) % 2 != 0)
    fail(ErrorCode::Internal, "odd Euler characteristic defect");
  SurfaceSignature sig;
  sig.genus = (2 - chi) / 2;
  sig.punctures = (int)track.punctured_regions.size();
  if (sig.genus < 0)
    fail(ErrorCode::Internal, "negative genus");
  if (3 * sig.genus - 3 + sig.punctures < 2)
    fail(ErrorCode::ExceptionalSurface,
         "3g-3+k = " + std::to_string(3 * sig.genus - 3 + sig.punctures) +
             " < 2");
  return sig;
}

std::vector<int> check_measure(const TrainTrack& track,
                               const TransverseMeasure& mu) {
  std::vector<int> branches = track.branch_ids();
  std::set<int> branch_set(branches.begin(), branches.end());
  for (const auto& [b, w] : mu.weights) {
    if (!branch_set.count(b))
      fail(ErrorCode::UnknownBranch,
           "measure has stray branch " + std::to_string(b));
    if (w < 0)
      fail(ErrorCode::ParseError,
           "negative weight on branch " + std::to_string(b));
  }
  std::vector<int> violated;
  for (const auto& sw : track.switches) {
    Rational lhs = mu.at(sw.large.branch);
    Rational rhs = mu.at(sw.small_left.branch) + mu.at(sw.small_right.branch);
    if (lhs != rhs) violated.push_back(sw.id);
  }
  return violated;
}

std::vector<int> large_branches(const TrainTrack& track) {
  std::vector<int> out;
  for (int b : track.branch_ids())
    if (classify_branch(track, b) == BranchClass::Large) out.push_back(b);
  return out;
}

std::vector<int> mixed_branches(const TrainTrack& track) {
  std::vector<int> out;
  for (int b : track.branch_ids())
    if (classify_branch(track, b) == BranchClass::Mixed) out.push_back(b);
  return out;
}

}  // namespace ttkit
