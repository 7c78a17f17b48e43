#include "ttkit/cone.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "ttkit/io.hpp"

namespace ttkit {

namespace {

std::string point_str(const LatticePoint& p) {
  std::string s = "(";
  for (size_t i = 0; i < p.coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p.coords[i]);
  }
  return s + ")";
}

}  // namespace

int LatticePoint::l1() const {
  return std::accumulate(coords.begin(), coords.end(), 0);
}

int FlatCone::coord_index(int basepoint_branch) const {
  auto it = std::lower_bound(branch_order.begin(), branch_order.end(),
                             basepoint_branch);
  if (it == branch_order.end() || *it != basepoint_branch)
    fail(ErrorCode::UnknownBranch,
         "branch " + std::to_string(basepoint_branch) +
             " is not a basepoint branch");
  return (int)(it - branch_order.begin());
}

const ConeVertex& FlatCone::at(const LatticePoint& p) const {
  auto it = vertices.find(p);
  if (it == vertices.end())
    fail(ErrorCode::NotInCone, "lattice point is not a vertex of this cone");
  return it->second;
}

FlatCone cone_ball(const TrainTrack& basepoint, const TransverseMeasure& mu,
                   int radius) {
  if (!check_measure(basepoint, mu).empty())
    fail(ErrorCode::MeasureNotCarried,
         "the proxy measure fails the switch conditions on the basepoint");
  FlatCone cone;
  cone.basepoint = basepoint;
  cone.proxy_measure = mu;
  cone.radius = radius;
  cone.branch_order = basepoint.branch_ids();

  ConeVertex base;
  base.track = basepoint;
  base.phi.coords.assign(cone.branch_order.size(), 0);
  base.measure = mu;
  cone.vertices[base.phi] = base;

  std::deque<LatticePoint> frontier{base.phi};
  while (!frontier.empty()) {
    LatticePoint key = frontier.front();
    frontier.pop_front();
    const ConeVertex& v = cone.vertices.at(key);
    if (v.phi.l1() >= radius) continue;
    // Branch ids are preserved by the split correspondences along every
    // witness word, so the current large branch ids are basepoint ids.
    TrainTrack track = v.track;
    TransverseMeasure measure = v.measure;
    std::vector<Move> word = v.witness_word;
    for (int b : large_branches(track)) {
      LatticePoint next = key;
      next.coords[cone.coord_index(b)] += 1;
      Direction dir;
      try {
        dir = lambda_split_direction(track, b, measure);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::TieCollision) throw;
        cone.truncated = true;
        cone.truncation_notes.push_back(
            "edge " + point_str(key) + " -> " + point_str(next) +
            " suppressed: the transported measure vanishes on the diagonal");
        continue;
      }
      cone.edges[key].emplace_back(cone.coord_index(b), next);
      if (cone.vertices.count(next)) {
        // Well-definedness of the coordinate: two splitting words reaching
        // the same lattice point must reach the same track.
        const ConeVertex& seen = cone.vertices.at(next);
        MoveOutcome out = split(track, SplitMove{b, dir});
        if (!(out.track == seen.track))
          fail(ErrorCode::Internal,
               "two splitting words with equal coordinates reached distinct "
               "tracks");
        continue;
      }
      MoveOutcome out = split(track, SplitMove{b, dir});
      ConeVertex nv;
      nv.track = out.track;
      nv.phi = next;
      nv.witness_word = word;
      nv.witness_word.push_back(Move{MoveKind::Split, b, dir});
      nv.measure = measure_after_split(measure, track, SplitMove{b, dir},
                                       out.correspondence);
      cone.vertices[next] = std::move(nv);
      frontier.push_back(next);
    }
  }
  return cone;
}

LatticePoint phi(const FlatCone& cone, const std::vector<Move>& word) {
  LatticePoint p;
  p.coords.assign(cone.branch_order.size(), 0);
  TrainTrack track = cone.basepoint;
  for (size_t i = 0; i < word.size(); ++i) {
    if (word[i].kind != MoveKind::Split)
      fail(ErrorCode::BadMoveSequence,
           "a coordinate is only defined for splitting words (move #" +
               std::to_string(i + 1) + " is not a split)");
    p.coords[cone.coord_index(word[i].at)] += 1;
    track = split(track, SplitMove{word[i].at, word[i].direction}).track;
  }
  return p;
}

LatticePoint theta_minus(const FlatCone& cone, const LatticePoint& sigma,
                         const LatticePoint& eta) {
  cone.at(sigma);
  cone.at(eta);
  LatticePoint out;
  out.coords.resize(sigma.coords.size());
  for (size_t i = 0; i < out.coords.size(); ++i)
    out.coords[i] = std::min(sigma.coords[i], eta.coords[i]);
  cone.at(out);  // the meet of two cone vertices is a cone vertex
  return out;
}

LatticePoint theta_plus(const FlatCone& cone, const LatticePoint& sigma,
                        const LatticePoint& eta) {
  LatticePoint meet = theta_minus(cone, sigma, eta);
  LatticePoint out;
  out.coords.resize(meet.coords.size());
  for (size_t i = 0; i < out.coords.size(); ++i)
    out.coords[i] = sigma.coords[i] + eta.coords[i] - meet.coords[i];
  if (out.l1() > cone.radius || !cone.contains(out))
    fail(ErrorCode::RadiusExceeded,
         "the join lies outside the enumerated ball");
  return out;
}

int distance(const FlatCone& cone, const LatticePoint& sigma,
             const LatticePoint& eta) {
  cone.at(sigma);
  cone.at(eta);
  int d = 0;
  for (size_t i = 0; i < sigma.coords.size(); ++i)
    d += std::abs(sigma.coords[i] - eta.coords[i]);
  return d;
}

bool splittable_to(const FlatCone& cone, const LatticePoint& from,
                   const LatticePoint& to) {
  std::set<LatticePoint> seen{from};
  std::deque<LatticePoint> q{from};
  while (!q.empty()) {
    LatticePoint u = q.front();
    q.pop_front();
    if (u == to) return true;
    auto it = cone.edges.find(u);
    if (it == cone.edges.end()) continue;
    for (const auto& [label, v] : it->second) {
      (void)label;
      if (seen.insert(v).second) q.push_back(v);
    }
  }
  return false;
}

int bfs_distance(const FlatCone& cone, const LatticePoint& a,
                 const LatticePoint& b) {
  // undirected shortest path in the lambda-split graph
  std::map<LatticePoint, std::vector<LatticePoint>> adj;
  for (const auto& [u, outs] : cone.edges)
    for (const auto& [label, v] : outs) {
      (void)label;
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
  std::map<LatticePoint, int> dist{{a, 0}};
  std::deque<LatticePoint> q{a};
  while (!q.empty()) {
    LatticePoint u = q.front();
    q.pop_front();
    if (u == b) return dist.at(u);
    for (const auto& v : adj[u])
      if (!dist.count(v)) {
        dist[v] = dist.at(u) + 1;
        q.push_back(v);
      }
  }
  fail(ErrorCode::NotInCone, "no path between the two vertices in this ball");
}

std::set<LatticePoint> subcone(const FlatCone& cone, const LatticePoint& s) {
  cone.at(s);
  std::set<LatticePoint> seen{s};
  std::deque<LatticePoint> q{s};
  while (!q.empty()) {
    LatticePoint u = q.front();
    q.pop_front();
    auto it = cone.edges.find(u);
    if (it == cone.edges.end()) continue;
    for (const auto& [label, v] : it->second) {
      (void)label;
      if (seen.insert(v).second) q.push_back(v);
    }
  }
  return seen;
}

ConvexityReport subcone_convexity_check(const FlatCone& cone,
                                        const LatticePoint& sigma) {
  ConvexityReport report;
  std::set<LatticePoint> sub = subcone(cone, sigma);
  std::vector<LatticePoint> inside(sub.begin(), sub.end());

  // Convexity: no vertex outside the subcone lies on a geodesic between two
  // subcone vertices. Restrict to interior pairs whose geodesics stay in the
  // ball (both endpoints within the radius budget around the outside point).
  for (size_t i = 0; i < inside.size() && report.convex; ++i)
    for (size_t j = i + 1; j < inside.size() && report.convex; ++j) {
      int duv = bfs_distance(cone, inside[i], inside[j]);
      for (const auto& [x, vx] : cone.vertices) {
        (void)vx;
        if (sub.count(x)) continue;
        int dux = distance(cone, inside[i], x);
        int dxv = distance(cone, x, inside[j]);
        if (dux + dxv == duv) {
          // L1 distance lower-bounds path length; confirm with real paths.
          if (bfs_distance(cone, inside[i], x) + bfs_distance(cone, x, inside[j])
              == duv) {
            report.convex = false;
            report.violations.push_back(
                "vertex " + point_str(x) + " lies between " +
                point_str(inside[i]) + " and " + point_str(inside[j]) +
                " but is not in the subcone");
            break;
          }
        }
      }
    }

  // Hausdorff bound: every ball vertex is within d(base, sigma) of the
  // subcone (the subcone is coarsely dense at that scale).
  LatticePoint base;
  base.coords.assign(cone.branch_order.size(), 0);
  int bound = distance(cone, base, sigma);
  for (const auto& [x, vx] : cone.vertices) {
    (void)vx;
    // The nearest subcone point to x is its join with sigma; when that join
    // falls outside the enumerated ball the in-ball distance overshoots, so
    // such boundary vertices are excluded from the truncated check.
    LatticePoint join;
    join.coords.resize(x.coords.size());
    for (size_t c = 0; c < x.coords.size(); ++c)
      join.coords[c] = std::max(x.coords[c], sigma.coords[c]);
    if (join.l1() > cone.radius || !cone.contains(join)) continue;
    int best = -1;
    for (const auto& s : inside) {
      int d = distance(cone, x, s);
      if (best < 0 || d < best) best = d;
    }
    if (best > bound) {
      report.hausdorff_ok = false;
      report.violations.push_back("vertex " + point_str(x) + " is at L1 " +
                                  "distance " + std::to_string(best) +
                                  " > " + std::to_string(bound) +
                                  " from the subcone");
    }
  }
  return report;
}

std::string cone_to_json(const FlatCone& cone) {
  std::ostringstream out;
  out << "{\n  \"schema\": \"ttkit-1\",\n";
  out << "  \"radius\": " << cone.radius << ",\n";
  out << "  \"truncated\": " << (cone.truncated ? "true" : "false") << ",\n";
  out << "  \"branch_order\": [";
  for (size_t i = 0; i < cone.branch_order.size(); ++i)
    out << (i ? ", " : "") << cone.branch_order[i];
  out << "],\n  \"vertices\": [\n";
  bool first = true;
  for (const auto& [p, v] : cone.vertices) {
    out << (first ? "" : ",\n") << "    {\"phi\": " << point_str(p)
        << ", \"word\": \"";
    for (size_t i = 0; i < v.witness_word.size(); ++i)
      out << (i ? "; " : "") << to_string(v.witness_word[i]);
    out << "\"}";
    first = false;
  }
  out << "\n  ],\n  \"edges\": [\n";
  first = true;
  for (const auto& [u, outs] : cone.edges)
    for (const auto& [label, v] : outs) {
      out << (first ? "" : ",\n") << "    {\"from\": " << point_str(u)
          << ", \"to\": " << point_str(v) << ", \"branch\": "
          << cone.branch_order[label] << "}";
      first = false;
    }
  out << "\n  ]\n}\n";
  // point_str uses parentheses; JSON wants arrays
  std::string s = out.str();
  for (char& c : s) {
    if (c == '(') c = '[';
    if (c == ')') c = ']';
  }
  return s;
}

std::string cone_to_dot(const FlatCone& cone) {
  std::ostringstream out;
  out << "digraph cone {\n  rankdir=BT;\n";
  for (const auto& [p, v] : cone.vertices) {
    (void)v;
    out << "  \"" << point_str(p) << "\";\n";
  }
  for (const auto& [u, outs] : cone.edges)
    for (const auto& [label, v] : outs)
      out << "  \"" << point_str(u) << "\" -> \"" << point_str(v)
          << "\" [label=\"" << cone.branch_order[label] << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace ttkit
