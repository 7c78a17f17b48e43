#pragma once

#include <map>
#include <set>
#include <vector>

#include "ttkit/moves.hpp"
#include "ttkit/track.hpp"

namespace ttkit {

struct LatticePoint {
  std::vector<int> coords;  // indexed by the basepoint branch order

  auto operator<=>(const LatticePoint&) const = default;
  int l1() const;
};

struct ConeVertex {
  TrainTrack track;
  LatticePoint phi;
  std::vector<Move> witness_word;      // one lambda-splitting word from base
  TransverseMeasure measure;           // transported proxy measure
};

struct FlatCone {
  TrainTrack basepoint;
  TransverseMeasure proxy_measure;
  int radius = 0;
  std::vector<int> branch_order;  // basepoint branch ids, ascending
  std::map<LatticePoint, ConeVertex> vertices;
  // directed lambda-split edges u -> u + e_i, labelled by coordinate index
  std::map<LatticePoint, std::vector<std::pair<int, LatticePoint>>> edges;
  bool truncated = false;
  std::vector<std::string> truncation_notes;

  int coord_index(int basepoint_branch) const;
  const ConeVertex& at(const LatticePoint& p) const;  // NotInCone if absent
  bool contains(const LatticePoint& p) const { return vertices.count(p) > 0; }
};

// BFS over lambda-splits to the given radius (measure proxy only: it is the
// one proxy that determines a split direction at every reachable vertex).
// TieCollision truncates the offending edge and is reported on the cone.
FlatCone cone_ball(const TrainTrack& basepoint, const TransverseMeasure& mu,
                   int radius);

LatticePoint phi(const FlatCone& cone, const std::vector<Move>& word);

LatticePoint theta_minus(const FlatCone& cone, const LatticePoint& sigma,
                         const LatticePoint& eta);
// RadiusExceeded when the join lies outside the enumerated ball.
LatticePoint theta_plus(const FlatCone& cone, const LatticePoint& sigma,
                        const LatticePoint& eta);
int distance(const FlatCone& cone, const LatticePoint& sigma,
             const LatticePoint& eta);

// Brute-force oracles over the enumerated ball.
bool splittable_to(const FlatCone& cone, const LatticePoint& from,
                   const LatticePoint& to);
int bfs_distance(const FlatCone& cone, const LatticePoint& a,
                 const LatticePoint& b);
std::set<LatticePoint> subcone(const FlatCone& cone, const LatticePoint& s);

struct ConvexityReport {
  bool convex = true;
  bool hausdorff_ok = true;
  std::vector<std::string> violations;
};

ConvexityReport subcone_convexity_check(const FlatCone& cone,
                                        const LatticePoint& sigma);

std::string cone_to_json(const FlatCone& cone);
std::string cone_to_dot(const FlatCone& cone);

}  // namespace ttkit
