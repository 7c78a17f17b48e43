#include "ttkit/experiments.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "ttkit/errors.hpp"
#include "ttkit/io.hpp"
#include "ttkit/moves.hpp"

namespace ttkit {

namespace {

int thread_cap() {
  int hw = (int)std::thread::hardware_concurrency();
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("TTKIT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1 && n < hw) hw = n;
  }
  return hw;
}

std::vector<TrainTrack> neighbors(const TrainTrack& t, bool with_shifts,
                                  bool directed) {
  std::vector<TrainTrack> out;
  for (int e : large_branches(t))
    for (Direction d : {Direction::Right, Direction::Left})
      out.push_back(split(t, SplitMove{e, d}).track);
  if (directed) return out;
  for (int b : t.branch_ids())
    for (Direction d : {Direction::Right, Direction::Left}) {
      try {
        out.push_back(collapse(t, b, d).track);
      } catch (const Error&) {
        // not a collapsible local picture at b
      }
    }
  if (with_shifts)
    for (int b : mixed_branches(t)) out.push_back(shift(t, b).track);
  return out;
}

}  // namespace

BallReport tt_ball(const TrainTrack& base, int radius, bool with_shifts,
                   bool directed) {
  BallReport rep;
  rep.radius = radius;
  rep.with_shifts = with_shifts;
  rep.directed = directed;
  std::set<std::string> seen{serialize_track(base)};
  std::vector<TrainTrack> frontier{base};
  rep.level_sizes.push_back(1);
  for (int d = 1; d <= radius; ++d) {
    std::vector<TrainTrack> next;
    for (const TrainTrack& u : frontier)
      for (TrainTrack& v : neighbors(u, with_shifts, directed))
        if (seen.insert(serialize_track(v)).second)
          next.push_back(std::move(v));
    rep.level_sizes.push_back(next.size());
    frontier = std::move(next);
  }
  rep.total = seen.size();
  return rep;
}

std::string render(const BallReport& r) {
  std::ostringstream out;
  out << "ambient ball radius " << r.radius
      << (r.directed ? ", splits only (directed)" : ", splits + collapses")
      << (r.with_shifts ? " + shifts" : "") << "\n";
  std::size_t cum = 0;
  for (std::size_t d = 0; d < r.level_sizes.size(); ++d) {
    cum += r.level_sizes[d];
    out << "  r=" << d << "  new " << r.level_sizes[d] << "  total " << cum
        << "\n";
  }
  out << "total tracks: " << r.total << "\n";
  return out.str();
}

int ambient_distance(const TrainTrack& a, const TrainTrack& b, int cap) {
  std::string goal = serialize_track(b);
  if (serialize_track(a) == goal) return 0;
  std::set<std::string> seen{serialize_track(a)};
  std::vector<TrainTrack> frontier{a};
  for (int d = 1; d <= cap; ++d) {
    std::vector<TrainTrack> next;
    for (const TrainTrack& u : frontier)
      for (TrainTrack& v : neighbors(u, false, false)) {
        std::string key = serialize_track(v);
        if (key == goal) return d;
        if (seen.insert(key).second) next.push_back(std::move(v));
      }
    if (next.empty()) return -1;
    frontier = std::move(next);
  }
  return -1;
}

DistortionReport distortion_probe(const TrainTrack& base,
                                  const TransverseMeasure& mu, int radius) {
  FlatCone cone = cone_ball(base, mu, radius);
  DistortionReport rep;
  rep.radius = radius;
  rep.cone_vertices = cone.vertices.size();
  rep.truncated = cone.truncated;

  std::vector<const ConeVertex*> verts;
  std::vector<LatticePoint> points;
  for (const auto& [p, v] : cone.vertices) {
    points.push_back(p);
    verts.push_back(&v);
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < verts.size(); ++i)
    index[serialize_track(verts[i]->track)] = (int)i;

  struct Best {
    long long num = 1, den = 1;
    int cone_d = 0, amb_d = 0;
    std::size_t pairs = 0;
    bool any = false;
  };
  int nthreads = std::min<int>(thread_cap(), (int)verts.size());
  if (nthreads < 1) nthreads = 1;
  std::vector<Best> best(nthreads);

  auto work = [&](int tid) {
    Best& b = best[tid];
    for (std::size_t i = tid; i < verts.size(); i += nthreads) {
      // one BFS from source i, reporting every cone vertex it meets
      int cap = 0;
      for (std::size_t j = 0; j < points.size(); ++j)
        cap = std::max(cap, distance(cone, points[i], points[j]));
      std::set<std::string> seen{serialize_track(verts[i]->track)};
      std::vector<TrainTrack> frontier{verts[i]->track};
      std::vector<int> amb(verts.size(), -1);
      amb[i] = 0;
      for (int d = 1; d <= cap && !frontier.empty(); ++d) {
        std::vector<TrainTrack> next;
        for (const TrainTrack& u : frontier)
          for (TrainTrack& v : neighbors(u, false, false)) {
            std::string key = serialize_track(v);
            if (!seen.insert(key).second) continue;
            auto it = index.find(key);
            if (it != index.end() && amb[it->second] < 0)
              amb[it->second] = d;
            next.push_back(std::move(v));
          }
        frontier = std::move(next);
      }
      for (std::size_t j = i + 1; j < verts.size(); ++j) {
        int dc = distance(cone, points[i], points[j]);
        int da = amb[j];
        if (da < 0)
          fail(ErrorCode::Internal,
               "cone pair unreachable in the ambient graph within the cone "
               "distance");
        ++b.pairs;
        if (!b.any || (long long)dc * b.den > b.num * da) {
          b.any = true;
          b.num = dc;
          b.den = da;
          b.cone_d = dc;
          b.amb_d = da;
        }
      }
    }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < nthreads; ++tid) pool.emplace_back(work, tid);
    for (auto& th : pool) th.join();
  }
  bool have = false;
  for (const Best& b : best) {
    rep.pairs += b.pairs;
    if (!b.any) continue;
    if (!have || b.num * (long long)rep.max_ratio_den >
                     (long long)rep.max_ratio_num * b.den) {
      have = true;
      rep.max_ratio_num = (int)b.num;
      rep.max_ratio_den = (int)b.den;
      rep.cone_d_at_max = b.cone_d;
      rep.ambient_d_at_max = b.amb_d;
    }
  }
  return rep;
}

std::string render(const DistortionReport& r) {
  std::ostringstream out;
  out << "distortion probe, cone radius " << r.radius << "\n";
  out << "cone vertices: " << r.cone_vertices
      << (r.truncated ? " (ball truncated at a tie)" : "") << "\n";
  out << "pairs compared: " << r.pairs << "\n";
  out << "max d_cone / d_ambient = " << r.max_ratio_num << "/"
      << r.max_ratio_den << " = "
      << (double)r.max_ratio_num / (double)r.max_ratio_den << " (cone "
      << r.cone_d_at_max << ", ambient " << r.ambient_d_at_max << ")\n";
  return out.str();
}

PantsTrack pants_track_from_track(const TrainTrack& track) {
  PantsTrack out;
  out.track = track;
  int next_curve = 0;
  for (int e : large_branches(track)) {
    auto [v, sv] = track.locate({e, 0});
    auto [w, sw] = track.locate({e, 1});
    if (sv != Slot::Large || sw != Slot::Large)
      fail(ErrorCode::Internal, "large branch with a small end");
    std::vector<int> loops;
    for (int s : track.branch_ids()) {
      if (s == e) continue;
      auto [a, sa] = track.locate({s, 0});
      auto [b, sb] = track.locate({s, 1});
      bool joins = (a->id == v->id && b->id == w->id) ||
                   (a->id == w->id && b->id == v->id);
      if (joins && sa == sb && sa != Slot::Large) loops.push_back(s);
    }
    if (loops.size() != 1)
      fail(ErrorCode::InvalidGluing,
           "large branch " + std::to_string(e) +
               " is not in a unique embedded length-2 loop; not a "
               "standard-form pants track");
    out.curve_paths[next_curve++] = CurvePath{e, loops[0]};
  }
  if (out.curve_paths.empty())
    fail(ErrorCode::InvalidGluing, "track has no large branches");
  return out;
}

namespace {

void enumerate_tuples(int d, int budget, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if ((int)cur.size() == d) {
    out.push_back(cur);
    return;
  }
  for (int l = 0; l <= budget; ++l) {
    cur.push_back(l);
    enumerate_tuples(d, budget - l, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TwistGrowthReport twist_growth(const PantsTrack& pants, int n) {
  TwistGrowthReport rep;
  for (const auto& [c, path] : pants.curve_paths) rep.curves.push_back(c);
  int d = (int)rep.curves.size();

  // pairwise commutation, checked once per curve pair
  for (int i = 0; i < d && rep.commute_ok; ++i)
    for (int j = i + 1; j < d && rep.commute_ok; ++j) {
      std::vector<Move> wi = twist_word(pants, rep.curves[i]);
      std::vector<Move> wj = twist_word(pants, rep.curves[j]);
      std::vector<Move> ij = wi, ji = wj;
      ij.insert(ij.end(), wj.begin(), wj.end());
      ji.insert(ji.end(), wi.begin(), wi.end());
      rep.commute_ok = apply_sequence(pants.track, ij).track ==
                       apply_sequence(pants.track, ji).track;
    }

  std::vector<std::vector<int>> tuples;
  std::vector<int> cur;
  enumerate_tuples(d, n, cur, tuples);

  std::set<std::map<int, int>> phis;
  for (const std::vector<int>& tup : tuples) {
    int total = 0;
    for (int l : tup) total += l;
    if (total == 0) continue;
    std::vector<Move> word;
    for (int i = 0; i < d; ++i) {
      std::vector<Move> w = twist_word(pants, rep.curves[i]);
      for (int rep_count = 0; rep_count < tup[i]; ++rep_count)
        word.insert(word.end(), w.begin(), w.end());
    }
    TrainTrack end = apply_sequence(pants.track, word).track;
    std::map<int, int> split_counts;
    for (const Move& m : word)
      if (m.kind == MoveKind::Split) ++split_counts[m.at];
    int l1 = 0;
    for (const auto& [b, c] : split_counts) l1 += c;
    TwistGrowthRow row;
    row.twists = tup;
    row.word_len = (int)word.size();
    row.phi_l1 = l1;
    row.returns_to_base = end == pants.track;
    row.phi_distinct = phis.insert(split_counts).second;
    if (!row.phi_distinct) rep.injective = false;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string render(const TwistGrowthReport& r) {
  std::ostringstream out;
  out << "twist growth on " << r.curves.size() << " pants curves\n";
  out << "twist words commute: " << (r.commute_ok ? "yes" : "NO") << "\n";
  out << "tuple -> Phi injective: " << (r.injective ? "yes" : "NO") << "\n";
  out << "twists | word norm | |Phi|_1 | returns to base\n";
  for (const TwistGrowthRow& row : r.rows) {
    out << "  (";
    for (std::size_t i = 0; i < row.twists.size(); ++i)
      out << (i ? "," : "") << row.twists[i];
    out << ")  " << row.word_len << "  " << row.phi_l1 << "  "
        << (row.returns_to_base ? "yes" : "NO")
        << (row.phi_distinct ? "" : "  [Phi collision]") << "\n";
  }
  return out.str();
}

}  // namespace ttkit
