#include "ttkit/carrying.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "ttkit/io.hpp"
#include "ttkit/orbit.hpp"

namespace ttkit {

namespace {

// ---------------------------------------------------------------------------
// Expanded view: fold every weave into explicit sections of segment ids, link
// segments across base switches, and resolve every event to a sigma-switch.
// All position operations work on this view.
// ---------------------------------------------------------------------------

struct Seg {
  Elem elem;
  int base = -1;      // base branch this segment lies over
  int birth_ev = -1;  // global event index, -1 = born at a tie
  int death_ev = -1;  // global event index, -1 = dies at a tie
};

struct EventInfo {
  int base = -1;       // base branch
  int pos = -1;        // index in that branch's event list
  bool fork = true;
  int index = 0;       // section index the event acts at
  std::vector<int> in, out;  // consumed / produced segment ids
  HalfBranch large, small_a, small_b;  // the realized sigma-switch slots
  int sigma_switch = -1;
};

struct Expanded {
  const CarriedPosition* pos = nullptr;
  std::vector<Seg> segs;
  std::vector<EventInfo> events;                      // global order: by branch
  std::map<int, std::vector<std::vector<int>>> sections;  // branch -> sections
  std::map<int, std::vector<int>> branch_events;      // branch -> global ids
  // (seg id, base-branch end it crosses) -> seg id across the base switch
  std::map<std::pair<int, int>, int> tie_link;
  std::map<int, int> switch_event;  // sigma switch id -> global event id
};

[[noreturn]] void bad(const std::string& msg) {
  fail(ErrorCode::Internal, "carried position: " + msg);
}

// Section at end `end` of branch b, in the frame of a traveler crossing the
// tie while moving in base direction `dir` (+1 = toward end 1).
std::vector<int> framed_section(const Expanded& ex, int b, int end, int dir) {
  const auto& secs = ex.sections.at(b);
  std::vector<int> sec = end == 0 ? secs.front() : secs.back();
  if (dir == -1) std::reverse(sec.begin(), sec.end());
  return sec;
}

Expanded expand(const CarriedPosition& pos) {
  Expanded ex;
  ex.pos = &pos;
  std::vector<int> base_branches = pos.base.branch_ids();
  if (base_branches.size() != pos.weaves.size())
    bad("weave count differs from base branch count");

  for (int b : base_branches) {
    auto it = pos.weaves.find(b);
    if (it == pos.weaves.end())
      bad("no weave for base branch " + std::to_string(b));
    const BranchWeave& w = it->second;
    std::vector<int> cur;
    for (const Elem& e : w.start) {
      cur.push_back((int)ex.segs.size());
      ex.segs.push_back(Seg{e, b, -1, -1});
    }
    std::vector<std::vector<int>> secs{cur};
    for (size_t k = 0; k < w.events.size(); ++k) {
      const SigmaEvent& ev = w.events[k];
      EventInfo info;
      info.base = b;
      info.pos = (int)k;
      info.fork = ev.fork;
      info.index = ev.index;
      int gid = (int)ex.events.size();
      if (ev.fork) {
        if (ev.index < 0 || ev.index >= (int)cur.size())
          bad("fork index out of range over branch " + std::to_string(b));
        int in = cur[ev.index];
        int o0 = (int)ex.segs.size();
        ex.segs.push_back(Seg{ev.out0, b, gid, -1});
        int o1 = (int)ex.segs.size();
        ex.segs.push_back(Seg{ev.out1, b, gid, -1});
        ex.segs[in].death_ev = gid;
        info.in = {in};
        info.out = {o0, o1};
        cur[ev.index] = o0;
        cur.insert(cur.begin() + ev.index + 1, o1);
        // single approaches moving 0->1; its switch end is 1 iff dir=+1
        const Elem& se = ex.segs[in].elem;
        info.large = {se.branch, se.dir == +1 ? 1 : 0};
        info.small_a = {ev.out0.branch, ev.out0.dir == +1 ? 0 : 1};
        info.small_b = {ev.out1.branch, ev.out1.dir == +1 ? 0 : 1};
      } else {
        if (ev.index < 0 || ev.index + 1 >= (int)cur.size())
          bad("merge index out of range over branch " + std::to_string(b));
        int i0 = cur[ev.index], i1 = cur[ev.index + 1];
        int o = (int)ex.segs.size();
        ex.segs.push_back(Seg{ev.out0, b, gid, -1});
        ex.segs[i0].death_ev = gid;
        ex.segs[i1].death_ev = gid;
        info.in = {i0, i1};
        info.out = {o};
        cur[ev.index] = o;
        cur.erase(cur.begin() + ev.index + 1);
        const Elem &e0 = ex.segs[i0].elem, &e1 = ex.segs[i1].elem;
        info.large = {ev.out0.branch, ev.out0.dir == +1 ? 0 : 1};
        info.small_a = {e1.branch, e1.dir == +1 ? 1 : 0};
        info.small_b = {e0.branch, e0.dir == +1 ? 1 : 0};
      }
      ex.events.push_back(info);
      ex.branch_events[b].push_back(gid);
      secs.push_back(cur);
    }
    ex.sections[b] = std::move(secs);
  }

  // Link segments across base switches and check frame matching.
  for (const SwitchRecord& sw : pos.base.switches) {
    int dl = sw.large.end == 1 ? +1 : -1;   // traveler moving toward switch
    int da = sw.small_left.end == 0 ? +1 : -1;   // traveler moving away
    int db = sw.small_right.end == 0 ? +1 : -1;
    std::vector<int> lg =
        framed_section(ex, sw.large.branch, sw.large.end, dl);
    std::vector<int> sa =
        framed_section(ex, sw.small_left.branch, sw.small_left.end, da);
    std::vector<int> sb =
        framed_section(ex, sw.small_right.branch, sw.small_right.end, db);
    if (lg.size() != sa.size() + sb.size())
      bad("section sizes disagree at base switch " + std::to_string(sw.id));
    std::vector<int> smalls = sa;
    smalls.insert(smalls.end(), sb.begin(), sb.end());
    for (size_t i = 0; i < lg.size(); ++i) {
      const Seg& gl = ex.segs[lg[i]];
      const Seg& gs = ex.segs[smalls[i]];
      int ds = i < sa.size() ? da : db;
      if (gl.elem.branch != gs.elem.branch ||
          gs.elem.dir != gl.elem.dir * dl * ds)
        bad("strand mismatch across base switch " + std::to_string(sw.id));
      int se = i < sa.size() ? sw.small_left.end : sw.small_right.end;
      ex.tie_link[{lg[i], sw.large.end}] = smalls[i];
      ex.tie_link[{smalls[i], se}] = lg[i];
    }
  }

  // Resolve events to sigma-switches.
  std::map<HalfBranch, int> port_count;
  for (size_t g = 0; g < ex.events.size(); ++g) {
    EventInfo& info = ex.events[g];
    int found = -1;
    for (const SwitchRecord& sw : pos.carried.switches)
      if (sw.large == info.large && sw.small_left == info.small_a &&
          sw.small_right == info.small_b) {
        found = sw.id;
        break;
      }
    if (found < 0)
      bad("event over branch " + std::to_string(info.base) +
          " realizes no sigma-switch (L=" + to_string(info.large) +
          " A=" + to_string(info.small_a) + " B=" + to_string(info.small_b) +
          ")");
    if (ex.switch_event.count(found))
      bad("sigma-switch " + std::to_string(found) + " realized twice");
    ex.switch_event[found] = (int)g;
    info.sigma_switch = found;
    for (const HalfBranch& h : {info.large, info.small_a, info.small_b})
      ++port_count[h];
  }
  if ((int)ex.events.size() != pos.carried.num_switches())
    bad("event count differs from sigma-switch count");
  for (const auto& [h, n] : port_count)
    if (n != 1) bad("sigma half-branch " + to_string(h) + " at " +
                    std::to_string(n) + " ports");

  for (const auto& [b, secs] : ex.sections)
    for (const auto& s : secs)
      if (s.empty())
        bad("empty section over branch " + std::to_string(b) +
            " (carrying not surjective)");
  return ex;
}

// The segment attached to a given port of an event.
int port_seg(const Expanded& ex, const EventInfo& info, const HalfBranch& h) {
  if (h == info.large) return info.fork ? info.in[0] : info.out[0];
  if (h == info.small_a) return info.fork ? info.out[0] : info.in[1];
  if (h == info.small_b) return info.fork ? info.out[1] : info.in[0];
  bad("half-branch is not a port of this event");
}

// Walk along sigma-branch s starting from its end-0 port; returns visited
// segment ids in order. Must terminate at the end-1 port's event.
std::vector<int> branch_walk(const Expanded& ex, int s) {
  const TrainTrack& sig = ex.pos->carried;
  auto [sw0, slot0] = sig.locate({s, 0});
  (void)slot0;
  auto [sw1, slot1] = sig.locate({s, 1});
  (void)slot1;
  const EventInfo& e0 = ex.events.at(ex.switch_event.at(sw0->id));
  int ev1 = ex.switch_event.at(sw1->id);
  int seg = port_seg(ex, e0, {s, 0});
  std::vector<int> out;
  while (true) {
    out.push_back(seg);
    const Seg& sg = ex.segs[seg];
    if (sg.elem.branch != s) bad("branch walk strayed off its sigma-branch");
    // moving along s 0->1: exit via death end when dir=+1, birth when -1
    int exit_ev = sg.elem.dir == +1 ? sg.death_ev : sg.birth_ev;
    if (exit_ev >= 0) {
      if (exit_ev != ev1) bad("branch walk ended at the wrong sigma-switch");
      return out;
    }
    auto it = ex.tie_link.find({seg, sg.elem.dir == +1 ? 1 : 0});
    if (it == ex.tie_link.end()) bad("branch walk fell off an unlinked tie");
    seg = it->second;
    if (out.size() > ex.segs.size()) bad("branch walk does not terminate");
  }
}

void check_paths(const Expanded& ex) {
  std::map<int, int> seg_count;
  for (const Seg& s : ex.segs) ++seg_count[s.elem.branch];
  for (int s : ex.pos->carried.branch_ids()) {
    std::vector<int> walk = branch_walk(ex, s);
    if ((int)walk.size() != seg_count[s])
      bad("sigma-branch " + std::to_string(s) + " has stray segments");
  }
}

}  // namespace

void validate_position(const CarriedPosition& pos) {
  if (!validate(pos.base).ok()) bad("base track invalid");
  if (!validate(pos.carried).ok()) bad("carried track invalid");
  Expanded ex = expand(pos);
  check_paths(ex);
}

CarriedPosition identity_position(const TrainTrack& track) {
  ValidationReport rep = validate(track);
  if (!rep.ok()) fail(ErrorCode::Internal, "identity_position: invalid track");
  CarriedPosition pos;
  pos.base = track;
  pos.carried = track;
  for (int b : track.branch_ids()) {
    BranchWeave w;
    auto [sw0, slot0] = track.locate({b, 0});
    auto [sw1, slot1] = track.locate({b, 1});
    if (slot0 == Slot::Large) {
      // natural start = [B', A'] with dir = +1 iff the small's end here is 1
      const HalfBranch &a = sw0->small_left, &bb = sw0->small_right;
      w.start = {Elem{bb.branch, bb.end == 1 ? +1 : -1},
                 Elem{a.branch, a.end == 1 ? +1 : -1}};
      w.events.push_back(SigmaEvent{false, 0, Elem{b, +1}, Elem{}});
    } else {
      w.start = {Elem{b, +1}};
    }
    if (slot1 == Slot::Large) {
      const HalfBranch &a = sw1->small_left, &bb = sw1->small_right;
      w.events.push_back(SigmaEvent{true, 0,
                                    Elem{a.branch, a.end == 0 ? +1 : -1},
                                    Elem{bb.branch, bb.end == 0 ? +1 : -1}});
    }
    pos.weaves[b] = std::move(w);
  }
  validate_position(pos);
  return pos;
}

NuProfile nu_profile(const CarriedPosition& pos) {
  Expanded ex = expand(pos);
  NuProfile nu;
  for (const auto& [b, secs] : ex.sections) {
    size_t m = secs.front().size();
    for (const auto& s : secs) m = std::min(m, s.size());
    nu[b] = (int)m;
  }
  return nu;
}

std::map<int, std::map<int, long long>> transition_matrix(
    const CarriedPosition& pos) {
  Expanded ex = expand(pos);
  std::map<int, std::map<int, long long>> m;
  for (int s : pos.carried.branch_ids()) m[s] = {};
  for (const auto& [b, secs] : ex.sections) {
    size_t best = 0;
    for (size_t i = 1; i < secs.size(); ++i)
      if (secs[i].size() < secs[best].size()) best = i;
    for (int seg : secs[best]) ++m[ex.segs[seg].elem.branch][b];
  }
  return m;
}

TransverseMeasure pushforward_measure(const CarriedPosition& pos,
                                      const TransverseMeasure& mu_sigma) {
  auto m = transition_matrix(pos);
  TransverseMeasure out;
  for (int b : pos.base.branch_ids()) out.weights[b] = 0;
  for (const auto& [s, row] : m)
    for (const auto& [b, n] : row) out.weights[b] += n * mu_sigma.at(s);
  return out;
}

// ---------------------------------------------------------------------------
// Reachability over a large branch: entry blocks at the end-0 tie, exit
// blocks at the end-1 tie, forward flow through events.
// ---------------------------------------------------------------------------

namespace {

struct OverBranch {
  // segment ids over e partitioned at entry/exit
  std::vector<int> entry_a, entry_b;  // A(v)/B(v) blocks at the end-0 tie
  std::vector<int> exit_a, exit_b;    // A(w)/B(w) blocks at the end-1 tie
};

OverBranch over_blocks(const Expanded& ex, int e) {
  const TrainTrack& base = ex.pos->base;
  auto [v, sv] = base.locate({e, 0});
  auto [w, sw_] = base.locate({e, 1});
  if (sv != Slot::Large || sw_ != Slot::Large)
    fail(ErrorCode::NotLargeBranch,
         "branch " + std::to_string(e) + " is not large in the base");
  OverBranch ob;
  const auto& secs = ex.sections.at(e);
  // toward-frame at end 0 (traveler dir -1) = A-block ++ B-block
  std::vector<int> s0 = secs.front();
  std::reverse(s0.begin(), s0.end());
  size_t na = ex.sections.at(v->small_left.branch).front().size();
  if (v->small_left.end == 1)
    na = ex.sections.at(v->small_left.branch).back().size();
  ob.entry_a.assign(s0.begin(), s0.begin() + na);
  ob.entry_b.assign(s0.begin() + na, s0.end());
  // toward-frame at end 1 (traveler dir +1) = A-block ++ B-block
  std::vector<int> s1 = secs.back();
  size_t nwa = ex.sections.at(w->small_left.branch).front().size();
  if (w->small_left.end == 1)
    nwa = ex.sections.at(w->small_left.branch).back().size();
  ob.exit_a.assign(s1.begin(), s1.begin() + nwa);
  ob.exit_b.assign(s1.begin() + nwa, s1.end());
  return ob;
}

// Forward-reachable segments over e starting from the given segments,
// flowing through the events over e.
std::set<int> flow_forward(const Expanded& ex, int e,
                           const std::vector<int>& from) {
  std::set<int> seen(from.begin(), from.end());
  for (int g : ex.branch_events.count(e) ? ex.branch_events.at(e)
                                         : std::vector<int>{}) {
    const EventInfo& info = ex.events[g];
    bool hit = false;
    for (int s : info.in) hit = hit || seen.count(s);
    if (hit)
      for (int s : info.out) seen.insert(s);
  }
  return seen;
}

}  // namespace

bool carried_by_split(const CarriedPosition& pos, int e, Direction direction) {
  Expanded ex = expand(pos);
  OverBranch ob = over_blocks(ex, e);
  // A right split severs A(v)->A(w) routes, a left split severs B(v)->B(w).
  const std::vector<int>& from =
      direction == Direction::Right ? ob.entry_a : ob.entry_b;
  const std::vector<int>& to =
      direction == Direction::Right ? ob.exit_a : ob.exit_b;
  std::set<int> reach = flow_forward(ex, e, from);
  for (int s : to)
    if (reach.count(s)) return false;
  return true;
}

Direction carried_split_direction(const CarriedPosition& pos, int e) {
  bool r = carried_by_split(pos, e, Direction::Right);
  bool l = carried_by_split(pos, e, Direction::Left);
  if (r && l)
    fail(ErrorCode::Ambiguous,
         "both splits at branch " + std::to_string(e) + " carry sigma");
  if (!r && !l)
    fail(ErrorCode::NeitherCarries,
         "no split at branch " + std::to_string(e) + " carries sigma");
  return r ? Direction::Right : Direction::Left;
}

namespace {

// Trace the cusp gap of the end-0 switch forward through the events over e.
// Returns the global id of the straddling merge it terminates at.
int gap_trace_forward(const Expanded& ex, int e, int p0) {
  int p = p0;
  if (ex.branch_events.count(e))
    for (int g : ex.branch_events.at(e)) {
      const EventInfo& info = ex.events[g];
      if (info.fork) {
        if (info.index < p) ++p;
      } else {
        if (info.index == p - 1) return g;  // straddling merge
        if (info.index + 1 <= p - 1) --p;
      }
    }
  bad("cusp gap reached the far tie although no split carries");
}

int gap_trace_backward(const Expanded& ex, int e, int p0) {
  int p = p0;
  if (ex.branch_events.count(e)) {
    const auto& gids = ex.branch_events.at(e);
    for (auto it = gids.rbegin(); it != gids.rend(); ++it) {
      const EventInfo& info = ex.events[*it];
      if (info.fork) {
        if (info.index == p - 1) return *it;  // straddling fork
        if (info.index + 1 <= p - 1) --p;
      } else {
        if (info.index <= p - 1) ++p;
      }
    }
  }
  bad("cusp gap reached the near tie although no split carries");
}

// Which port of the event a segment occupies: 0 = large, 1 = A, 2 = B.
int seg_port(const EventInfo& info, int seg) {
  if (info.fork) {
    if (seg == info.in[0]) return 0;
    if (seg == info.out[0]) return 1;
    if (seg == info.out[1]) return 2;
  } else {
    if (seg == info.out[0]) return 0;
    if (seg == info.in[1]) return 1;
    if (seg == info.in[0]) return 2;
  }
  bad("segment is not attached to this event");
}

// The connector trainpath over e: its segments in path order plus the set
// of event gids it passes through (terminals included). Only meaningful
// when no split at e carries sigma.
struct ConnectorData {
  std::vector<int> segs;
  std::set<int> events;
};

ConnectorData connector_path(const Expanded& ex, int e) {
  OverBranch ob = over_blocks(ex, e);
  // natural start section = [B-block, A-block]; the cusp sits between them
  int from = gap_trace_forward(ex, e, (int)ob.entry_b.size());
  // natural end section = [A-block, B-block]
  int to = gap_trace_backward(ex, e, (int)ob.exit_a.size());

  // Edges: segments over e bounded by events at both ends.
  std::map<int, std::vector<int>> edges;  // event gid -> seg ids
  for (size_t sid = 0; sid < ex.segs.size(); ++sid) {
    const Seg& sg = ex.segs[sid];
    if (sg.base == e && sg.birth_ev >= 0 && sg.death_ev >= 0) {
      edges[sg.birth_ev].push_back((int)sid);
      edges[sg.death_ev].push_back((int)sid);
    }
  }

  // All embedded trainpaths from `from` to `to`: consecutive edges at an
  // interior switch must use the large port plus one small port.
  std::vector<std::vector<int>> found;
  std::vector<int> path;     // seg ids
  std::set<int> visited;     // event gids
  auto dfs = [&](auto&& self, int at_ev, int in_seg) -> void {
    visited.insert(at_ev);
    for (int seg : edges.count(at_ev) ? edges.at(at_ev) : std::vector<int>{}) {
      if (seg == in_seg) continue;
      const EventInfo& info = ex.events[at_ev];
      int out_port = seg_port(info, seg);
      if (in_seg < 0) {
        // the path leaves `from` along its large half-branch
        if (out_port != 0) continue;
      } else {
        int a = seg_port(info, in_seg);
        if (a != 0 && out_port != 0) continue;  // cusp: two smalls
      }
      const Seg& sg = ex.segs[seg];
      int other = sg.birth_ev == at_ev ? sg.death_ev : sg.birth_ev;
      if (other == to) {
        // terminal: the path must arrive along `to`'s large half-branch,
        // and an embedded path cannot pass through a terminal switch
        if (seg_port(ex.events[to], seg) == 0) {
          path.push_back(seg);
          found.push_back(path);
          path.pop_back();
        }
        continue;
      }
      if (visited.count(other)) continue;
      path.push_back(seg);
      self(self, other, seg);
      path.pop_back();
    }
    visited.erase(at_ev);
  };
  dfs(dfs, from, -1);
  if (found.empty())
    bad("no connector trainpath although no split carries");
  if (found.size() > 1) bad("connector is not unique (embedded bigon)");
  ConnectorData cd;
  cd.segs = found[0];
  cd.events.insert(from);
  cd.events.insert(to);
  for (int seg : cd.segs) {
    cd.events.insert(ex.segs[seg].birth_ev);
    cd.events.insert(ex.segs[seg].death_ev);
  }
  return cd;
}

}  // namespace

std::optional<std::vector<int>> cutting_connector(const CarriedPosition& pos,
                                                  int e) {
  if (carried_by_split(pos, e, Direction::Right) ||
      carried_by_split(pos, e, Direction::Left))
    return std::nullopt;
  Expanded ex = expand(pos);
  ConnectorData cd = connector_path(ex, e);
  std::vector<int> branches;
  for (int seg : cd.segs) branches.push_back(ex.segs[seg].elem.branch);
  return branches;
}
namespace {

// A strand line threaded through a corridor: flag on a corridor branch is
// rel * (flag of the old corridor strand on that branch).
struct LineElem {
  int branch = -1;
  int rel = +1;
};

Elem line_elem(const LineElem& le, int c) { return Elem{le.branch, le.rel * c}; }

}  // namespace

CarriedPosition split_carried(const CarriedPosition& pos, int at,
                              Direction direction) {
  if (classify_branch(pos.carried, at) != BranchClass::Large)
    fail(ErrorCode::NotLargeBranch,
         "sigma-branch " + std::to_string(at) + " is not large");
  Expanded ex = expand(pos);
  MoveOutcome out = split(pos.carried, SplitMove{at, direction});

  auto [x, sx] = pos.carried.locate({at, 0});
  auto [y, sy] = pos.carried.locate({at, 1});
  (void)sx;
  (void)sy;
  HalfBranch p = x->small_left, q = x->small_right;
  HalfBranch r = y->small_left, s = y->small_right;
  int gx = ex.switch_event.at(x->id), gy = ex.switch_event.at(y->id);

  std::vector<int> corridor = branch_walk(ex, at);
  std::set<int> corridor_set(corridor.begin(), corridor.end());

  // Corridor content and endpoint events, in corridor left-to-right order
  // (left = left of a traveler moving along `at` from end 0 to end 1).
  std::array<LineElem, 3> triple;  // [left line, diagonal, right line]
  HalfBranch single_x, single_y;   // the large of the new endpoint switches
  std::array<LineElem, 2> pair_x, pair_y;  // corridor order
  if (direction == Direction::Right) {
    // nx={x,L=q,A=r,B=(at,0)} at the x end, ny={y,L=s,A=p,B=(at,1)} at the
    // y end; the r and p lines run the corridor in parallel.
    LineElem rl{r.branch, r.end == 0 ? +1 : -1};
    LineElem pl{p.branch, p.end == 1 ? +1 : -1};
    LineElem dg{at, +1};
    triple = {rl, dg, pl};
    single_x = q;
    pair_x = {rl, dg};
    single_y = s;
    pair_y = {dg, pl};
  } else {
    // nw={y,L=p,A=(at,1),B=s} at the x end, nv={x,L=r,A=(at,0),B=q} at the
    // y end; the diagonal runs against the corridor direction.
    LineElem ql{q.branch, q.end == 1 ? +1 : -1};
    LineElem sl{s.branch, s.end == 0 ? +1 : -1};
    LineElem dg{at, -1};
    triple = {ql, dg, sl};
    single_x = p;
    pair_x = {dg, sl};
    single_y = r;
    pair_y = {ql, dg};
  }

  CarriedPosition res;
  res.base = pos.base;
  res.carried = out.track;

  for (int b : pos.base.branch_ids()) {
    const BranchWeave& w = pos.weaves.at(b);
    const auto& secs = ex.sections.at(b);
    std::vector<int> cur = secs.front();
    auto expsize = [&](int seg) { return corridor_set.count(seg) ? 3 : 1; };
    auto newpos = [&](int k) {
      int n = 0;
      for (int j = 0; j < k; ++j) n += expsize(cur[j]);
      return n;
    };
    auto expand_elem = [&](int seg) {
      std::vector<Elem> v;
      if (!corridor_set.count(seg)) {
        v.push_back(ex.segs[seg].elem);
      } else {
        int c = ex.segs[seg].elem.dir;
        for (int t = 0; t < 3; ++t) v.push_back(line_elem(triple[t], c));
        if (c == -1) std::reverse(v.begin(), v.end());
      }
      return v;
    };

    BranchWeave nw;
    for (int seg : cur)
      for (const Elem& e : expand_elem(seg)) nw.start.push_back(e);

    const auto& gids = ex.branch_events.count(b)
                           ? ex.branch_events.at(b)
                           : std::vector<int>{};
    for (size_t k = 0; k < w.events.size(); ++k) {
      int gid = gids[k];
      const EventInfo& info = ex.events[gid];
      if (gid == gx || gid == gy) {
        bool at_x = gid == gx;
        int at_seg = port_seg(ex, info, {at, at_x ? 0 : 1});
        int c = ex.segs[at_seg].elem.dir;
        int single_seg = port_seg(ex, info, at_x ? single_x : single_y);
        Elem single_el = ex.segs[single_seg].elem;
        const auto& pr = at_x ? pair_x : pair_y;
        std::array<Elem, 2> pair_nat = {line_elem(pr[0], c),
                                        line_elem(pr[1], c)};
        if (c == -1) std::swap(pair_nat[0], pair_nat[1]);
        bool fork = at_x ? c == +1 : c == -1;  // at-strand on the end-1 side
        SigmaEvent ev;
        if (fork) {
          ev.fork = true;
          int si = (int)(std::find(cur.begin(), cur.end(), single_seg) -
                         cur.begin());
          ev.index = newpos(si);
          ev.out0 = pair_nat[0];
          ev.out1 = pair_nat[1];
        } else {
          ev.fork = false;
          int ai = (int)(std::find(cur.begin(), cur.end(), at_seg) -
                         cur.begin());
          int np = newpos(ai);
          // the natural triple always has the diagonal in the middle; the
          // merge consumes the diagonal plus its paired neighbor
          Elem diag_el = line_elem(triple[1], c);
          ev.index = pair_nat[0] == diag_el ? np + 1 : np;
          ev.out0 = single_el;
        }
        nw.events.push_back(ev);
      } else {
        SigmaEvent ev = w.events[k];
        ev.index = newpos(ev.index);
        nw.events.push_back(ev);
      }
      cur = secs[k + 1];
    }
    res.weaves[b] = std::move(nw);
  }

  validate_position(res);
  return res;
}
CarriedPosition shift_carried(const CarriedPosition& pos, int at) {
  MoveOutcome out = shift(pos.carried, at);  // rejects non-mixed branches
  Expanded ex = expand(pos);

  auto [e0sw, e0slot] = pos.carried.locate({at, 0});
  const SwitchRecord& V = e0slot == Slot::Large ? *pos.carried.locate({at, 1}).first
                                                : *e0sw;
  const SwitchRecord& W = e0slot == Slot::Large ? *e0sw
                                                : *pos.carried.locate({at, 1}).first;
  HalfBranch bV = e0slot == Slot::Large ? HalfBranch{at, 1} : HalfBranch{at, 0};
  HalfBranch f = V.large, cu = W.small_left, cd = W.small_right;
  bool case1 = V.small_left == bV;
  HalfBranch g = case1 ? V.small_right : V.small_left;
  int gV = ex.switch_event.at(V.id), gW = ex.switch_event.at(W.id);

  std::vector<int> corridor = branch_walk(ex, at);
  std::set<int> corridor_set(corridor.begin(), corridor.end());

  // After the shift the branch `at` is short (it joins the two rearranged
  // switches, both kept at the old small-end locale) and the far switch's
  // two small branches run the old corridor side by side instead: cu on the
  // left, cd on the right of a traveler heading from V to W.
  int side = bV.end == 0 ? +1 : -1;  // V->W travel vs `at` 0->1
  LineElem cul{cu.branch, (cu.end == 0 ? +1 : -1) * side};
  LineElem cdl{cd.branch, (cd.end == 0 ? +1 : -1) * side};
  // pair in `at`-natural left-to-right order
  std::array<LineElem, 2> pair =
      bV.end == 0 ? std::array<LineElem, 2>{cul, cdl}
                  : std::array<LineElem, 2>{cdl, cul};

  CarriedPosition res;
  res.base = pos.base;
  res.carried = out.track;

  for (int b : pos.base.branch_ids()) {
    const BranchWeave& w = pos.weaves.at(b);
    const auto& secs = ex.sections.at(b);
    std::vector<int> cur = secs.front();
    auto expsize = [&](int seg) { return corridor_set.count(seg) ? 2 : 1; };
    auto newpos = [&](int k) {
      int n = 0;
      for (int j = 0; j < k; ++j) n += expsize(cur[j]);
      return n;
    };
    auto expand_elem = [&](int seg) {
      std::vector<Elem> v;
      if (!corridor_set.count(seg)) {
        v.push_back(ex.segs[seg].elem);
      } else {
        int c = ex.segs[seg].elem.dir;
        v = {line_elem(pair[0], c), line_elem(pair[1], c)};
        if (c == -1) std::reverse(v.begin(), v.end());
      }
      return v;
    };

    BranchWeave nw;
    for (int seg : cur)
      for (const Elem& e : expand_elem(seg)) nw.start.push_back(e);

    const auto& gids = ex.branch_events.count(b)
                           ? ex.branch_events.at(b)
                           : std::vector<int>{};
    for (size_t k = 0; k < w.events.size(); ++k) {
      int gid = gids[k];
      if (gid == gW) {
        // the far switch dissolves; the cu/cd lines run straight through
        cur = secs[k + 1];
        continue;
      }
      if (gid == gV) {
        const EventInfo& info = ex.events[gid];
        int sb = port_seg(ex, info, bV);
        int c = ex.segs[sb].elem.dir;
        int dvw = c * side;  // V->W travel vs this base branch's 0->1
        Elem f_el = ex.segs[port_seg(ex, info, f)].elem;
        Elem g_el = ex.segs[port_seg(ex, info, g)].elem;
        Elem cu_el = line_elem(cul, c), cd_el = line_elem(cdl, c);
        Elem bp_el{at, c};  // the shortened branch between the two events
        if (info.fork != (dvw == +1)) bad("shift corridor frame mismatch");
        int np = newpos(info.index);
        SigmaEvent eV, eW;  // realizing the new V-side / W-side switches
        if (dvw == +1) {
          eV.fork = eW.fork = true;
          if (case1) {
            eV.index = np;
            eV.out0 = cu_el;
            eV.out1 = bp_el;
            eW.index = np + 1;
            eW.out0 = cd_el;
            eW.out1 = g_el;
          } else {
            eV.index = np;
            eV.out0 = bp_el;
            eV.out1 = cd_el;
            eW.index = np;
            eW.out0 = g_el;
            eW.out1 = cu_el;
          }
          nw.events.push_back(eV);
          nw.events.push_back(eW);
        } else {
          eV.fork = eW.fork = false;
          if (case1) {
            // old [g, at] becomes [g, cd, cu]
            eW.index = np;
            eW.out0 = bp_el;
            eV.index = np;
            eV.out0 = f_el;
          } else {
            // old [at, g] becomes [cd, cu, g]
            eW.index = np + 1;
            eW.out0 = bp_el;
            eV.index = np;
            eV.out0 = f_el;
          }
          nw.events.push_back(eW);
          nw.events.push_back(eV);
        }
      } else {
        SigmaEvent ev = w.events[k];
        ev.index = newpos(ev.index);
        nw.events.push_back(ev);
      }
      cur = secs[k + 1];
    }
    res.weaves[b] = std::move(nw);
  }

  validate_position(res);
  return res;
}
CarriedPosition collapse_carried(const CarriedPosition& pos, int at,
                                 Direction direction) {
  MoveOutcome out = collapse(pos.carried, at, direction);  // NotCollapsible
  Expanded ex = expand(pos);
  bool right = direction == Direction::Right;

  [[maybe_unused]] auto badpat = [&](const std::string& msg) -> void {
    fail(ErrorCode::IncompatibleLocalPicture,
         "collapse at sigma-branch " + std::to_string(at) + ": " + msg);
  };

  // x = the end whose strands fed the split that made `at` the diagonal.
  auto [tp, st_] = pos.carried.locate({at, 0});
  auto [up, su_] = pos.carried.locate({at, 1});
  (void)st_;
  (void)su_;
  const SwitchRecord& xsw = right ? *tp : *up;
  const SwitchRecord& ysw = right ? *up : *tp;
  HalfBranch hax{at, right ? 0 : 1}, hay{at, right ? 1 : 0};
  // the line attached at the x end, and the one attached at the y end
  HalfBranch lx = right ? xsw.small_left : xsw.small_right;
  HalfBranch ly = right ? ysw.small_left : ysw.small_right;
  HalfBranch wx = xsw.large, wy = ysw.large;
  int gx = ex.switch_event.at(xsw.id), gy = ex.switch_event.at(ysw.id);

  std::vector<int> cor = branch_walk(ex, at);
  std::set<int> cor_set(cor.begin(), cor.end());
  // Expected flank flags, given the at-seg's flag c in base-natural frame:
  // arrangement is [lx-line, at, ly-line] when c = +1, reversed when c = -1.
  auto flank_flag_x = [&](int c) {
    return right ? (lx.end == 0 ? +1 : -1) * c : (lx.end == 0 ? +1 : -1) * -c;
  };
  auto flank_flag_y = [&](int c) {
    return right ? (ly.end == 1 ? +1 : -1) * c : (ly.end == 1 ? +1 : -1) * -c;
  };

  std::set<int> fx, fy;  // flank segments on the lx / ly side
  for (const auto& [b, secs] : ex.sections) {
    (void)b;
    for (const auto& sec : secs)
      for (size_t i = 0; i < sec.size(); ++i) {
        if (!cor_set.count(sec[i])) continue;
        int c = ex.segs[sec[i]].elem.dir;
        int ixl = c == +1 ? (int)i - 1 : (int)i + 1;  // lx side
        int ixr = c == +1 ? (int)i + 1 : (int)i - 1;  // ly side
        if (ixl < 0 || ixr < 0 || ixl >= (int)sec.size() ||
            ixr >= (int)sec.size())
          badpat("the diagonal reaches the edge of a section unflanked");
        const Elem& el = ex.segs[sec[ixl]].elem;
        const Elem& er = ex.segs[sec[ixr]].elem;
        if (el.branch != lx.branch || el.dir != flank_flag_x(c) ||
            er.branch != ly.branch || er.dir != flank_flag_y(c))
          badpat("the strands beside the diagonal do not run the corridor");
        fx.insert(sec[ixl]);
        fy.insert(sec[ixr]);
      }
  }

  // Survivors: the flank segments crossing the endpoint locales keep their
  // far halves and become ports of the rebuilt switches.
  auto neighbor_of = [&](int corseg, bool ly_side) {
    const auto& secs = ex.sections.at(ex.segs[corseg].base);
    for (const auto& sec : secs)
      for (size_t i = 0; i < sec.size(); ++i)
        if (sec[i] == corseg) {
          int c = ex.segs[corseg].elem.dir;
          int off = (ly_side == (c == +1)) ? 1 : -1;
          return sec[(int)i + off];
        }
    bad("corridor segment missing from its own sections");
  };
  int cor_x = port_seg(ex, ex.events[gx], hax);
  int cor_y = port_seg(ex, ex.events[gy], hay);
  int surv_x = neighbor_of(cor_x, true);   // ly line survives past x
  int surv_y = neighbor_of(cor_y, false);  // lx line survives past y
  for (size_t g = 0; g < ex.events.size(); ++g) {
    if ((int)g == gx || (int)g == gy) continue;
    for (const auto& ports : {ex.events[g].in, ex.events[g].out})
      for (int s : ports)
        if ((fx.count(s) || fy.count(s)) && s != surv_x && s != surv_y)
          badpat("a corridor line meets a sigma-switch inside the corridor");
  }

  // Section side bookkeeping for the survivors.
  const EventInfo& evx = ex.events[gx];
  const EventInfo& evy = ex.events[gy];
  bool cor_after_x =
      std::find(evx.out.begin(), evx.out.end(), cor_x) != evx.out.end();
  bool cor_after_y =
      std::find(evy.out.begin(), evy.out.end(), cor_y) != evy.out.end();

  CarriedPosition res;
  res.base = pos.base;
  res.carried = out.track;

  for (int b : pos.base.branch_ids()) {
    const BranchWeave& w = pos.weaves.at(b);
    const auto& secs = ex.sections.at(b);
    const auto& gids = ex.branch_events.count(b)
                           ? ex.branch_events.at(b)
                           : std::vector<int>{};
    auto dropped = [&](int seg, int si) {
      if (!fx.count(seg) && !fy.count(seg)) return false;
      if (seg == surv_x && b == evx.base)
        return cor_after_x ? si > evx.pos : si <= evx.pos;
      if (seg == surv_y && b == evy.base)
        return cor_after_y ? si > evy.pos : si <= evy.pos;
      return seg != surv_x && seg != surv_y;
    };
    auto new_elem = [&](int seg) {
      Elem e = ex.segs[seg].elem;
      if (cor_set.count(seg) && !right) e.dir = -e.dir;
      return e;
    };
    auto transformed = [&](int si) {
      std::vector<std::pair<int, Elem>> v;  // (old seg, new elem)
      for (int seg : secs[si])
        if (!dropped(seg, si)) v.emplace_back(seg, new_elem(seg));
      return v;
    };
    auto pos_of = [&](const std::vector<std::pair<int, Elem>>& sec, int seg) {
      for (size_t i = 0; i < sec.size(); ++i)
        if (sec[i].first == seg) return (int)i;
      bad("segment missing from transformed section");
    };

    BranchWeave nw;
    for (const auto& [seg, e] : transformed(0)) {
      (void)seg;
      nw.start.push_back(e);
    }
    for (size_t k = 0; k < w.events.size(); ++k) {
      int gid = gids[k];
      auto pre = transformed((int)k);
      auto post = transformed((int)k + 1);
      SigmaEvent ev;
      if (gid == gx || gid == gy) {
        bool at_x = gid == gx;
        int corseg = at_x ? cor_x : cor_y;
        int surv = at_x ? surv_x : surv_y;
        int wseg = port_seg(ex, ex.events[gid], at_x ? wx : wy);
        bool cor_after = at_x ? cor_after_x : cor_after_y;
        if (cor_after) {
          // large `at` departs reading 0->1: the rebuilt switch is a merge
          ev.fork = false;
          int iw = pos_of(pre, wseg), is = pos_of(pre, surv);
          if (std::abs(iw - is) != 1)
            badpat("rebuilt switch strands are not adjacent");
          ev.index = std::min(iw, is);
          ev.out0 = new_elem(corseg);
        } else {
          ev.fork = true;
          ev.index = pos_of(pre, corseg);
          int iw = pos_of(post, wseg), is = pos_of(post, surv);
          if (std::abs(iw - is) != 1 || std::min(iw, is) != ev.index)
            badpat("rebuilt switch strands are not adjacent");
          ev.out0 = post[ev.index].second;
          ev.out1 = post[ev.index + 1].second;
        }
      } else {
        ev = w.events[k];
        ev.index = pos_of(pre, ex.events[gid].fork ? ex.events[gid].in[0]
                                                   : ex.events[gid].in[0]);
      }
      nw.events.push_back(ev);
    }
    res.weaves[b] = std::move(nw);
  }

  validate_position(res);
  return res;
}
namespace {

// A weave fragment over a stretch of a base branch, sections in the frame of
// a fixed traversal direction.
struct Frag {
  std::vector<Elem> start;
  std::vector<SigmaEvent> events;
};

std::vector<Elem> fold_frag(const Frag& f) {
  std::vector<Elem> cur = f.start;
  for (const SigmaEvent& ev : f.events) {
    if (ev.fork) {
      cur[ev.index] = ev.out0;
      cur.insert(cur.begin() + ev.index + 1, ev.out1);
    } else {
      cur[ev.index] = ev.out0;
      cur.erase(cur.begin() + ev.index + 1);
    }
  }
  return cur;
}

Elem flip(const Elem& e) { return Elem{e.branch, -e.dir}; }

// The same fragment read in the opposite traversal direction.
Frag reverse_frag(const Frag& f) {
  Frag out;
  std::vector<Elem> cur = f.start;
  std::vector<SigmaEvent> rev;
  for (const SigmaEvent& ev : f.events) {
    int n = (int)cur.size();
    SigmaEvent r;
    if (ev.fork) {
      r.fork = false;
      r.index = n - ev.index - 1;
      r.out0 = flip(cur[ev.index]);
      cur[ev.index] = ev.out0;
      cur.insert(cur.begin() + ev.index + 1, ev.out1);
    } else {
      r.fork = true;
      r.index = n - ev.index - 2;
      r.out0 = flip(cur[ev.index + 1]);
      r.out1 = flip(cur[ev.index]);
      cur[ev.index] = ev.out0;
      cur.erase(cur.begin() + ev.index + 1);
    }
    rev.push_back(r);
  }
  out.start.assign(cur.rbegin(), cur.rend());
  for (auto& e : out.start) e = flip(e);
  out.events.assign(rev.rbegin(), rev.rend());
  return out;
}

// Splice a fragment onto a branch weave at the given end. The fragment must
// already be expressed in the branch's natural orientation.
BranchWeave attach_frag(const BranchWeave& old, const Frag& frag, int end) {
  BranchWeave w;
  if (end == 1) {
    w.start = old.start;
    w.events = old.events;
    for (const SigmaEvent& ev : frag.events) w.events.push_back(ev);
  } else {
    w.start = frag.start;
    w.events = frag.events;
    for (const SigmaEvent& ev : old.events) w.events.push_back(ev);
  }
  return w;
}

}  // namespace

CarriedPosition transport_through_base_split(const CarriedPosition& pos,
                                             const SplitMove& move) {
  if (!carried_by_split(pos, move.at, move.direction))
    fail(ErrorCode::NotCarriedBySplit,
         "the requested base split does not carry sigma");
  Expanded ex = expand(pos);
  int e = move.at;
  const TrainTrack& base = pos.base;
  auto [v, sv] = base.locate({e, 0});
  auto [w, sw_] = base.locate({e, 1});
  (void)sv;
  (void)sw_;
  MoveOutcome out = split(base, move);

  // Role assignment. X feeds both exits and ends at the first new switch,
  // Y feeds only T1 and ends at the second; routes X->S1, X->diag->T1,
  // Y->T1 survive the split.
  bool right = move.direction == Direction::Right;
  HalfBranch hx = right ? v->small_right : v->small_left;
  HalfBranch hy = right ? v->small_left : v->small_right;
  HalfBranch hs1 = right ? w->small_left : w->small_right;
  HalfBranch ht1 = right ? w->small_right : w->small_left;

  OverBranch ob = over_blocks(ex, e);
  const std::vector<int>& x_entry = right ? ob.entry_b : ob.entry_a;
  const std::vector<int>& y_entry = right ? ob.entry_a : ob.entry_b;
  const std::vector<int>& s1_exit = right ? ob.exit_a : ob.exit_b;
  const std::vector<int>& t1_exit = right ? ob.exit_b : ob.exit_a;

  const std::vector<int> no_events;
  const std::vector<int>& gids =
      ex.branch_events.count(e) ? ex.branch_events.at(e) : no_events;

  // Origin (bit 1 = X, bit 2 = Y) flows forward; destination (bit 1 = S1,
  // bit 2 = T1) flows backward.
  std::map<int, int> origin, dest;
  for (int s : x_entry) origin[s] |= 1;
  for (int s : y_entry) origin[s] |= 2;
  for (int g : gids) {
    const EventInfo& info = ex.events[g];
    int m = 0;
    for (int s : info.in) m |= origin[s];
    for (int s : info.out) origin[s] |= m;
  }
  for (int s : s1_exit) dest[s] |= 1;
  for (int s : t1_exit) dest[s] |= 2;
  for (auto it = gids.rbegin(); it != gids.rend(); ++it) {
    const EventInfo& info = ex.events[*it];
    int m = 0;
    for (int s : info.out) m |= dest[s];
    for (int s : info.in) dest[s] |= m;
  }
  for (const auto& [s, o] : origin)
    if (o != 1 && dest[s] != 2)
      bad("a strand with Y in its origin heads for S1 despite the carried "
          "split");

  // Rectangles: 0 = X-ext, 1 = Y-ext, 2 = S1-ext, 3 = diagonal, 4 = T1-ext.
  auto event_rect = [&](const EventInfo& info) {
    bool has_x = false, has_y = false, has_m = false, has_join = false;
    bool all_s1 = true, all_t1 = true;
    for (int s : info.in) {
      int o = origin[s];
      has_x |= o == 1;
      has_y |= o == 2;
      has_m |= o == 3;
    }
    if (has_x && has_y) has_join = true;
    for (int s : info.in) {
      if (dest[s] == 3) all_s1 = all_t1 = false;
      if (dest[s] == 1) all_t1 = false;
      if (dest[s] == 2) all_s1 = false;
    }
    for (int s : info.out) {
      if (dest[s] == 3) all_s1 = all_t1 = false;
      if (dest[s] == 1) all_t1 = false;
      if (dest[s] == 2) all_s1 = false;
    }
    if (has_m || has_join) return 4;
    if (has_y) return 1;
    // pure X ancestry
    if (all_s1) return 2;
    if (all_t1) return 3;
    return 0;
  };

  // Simulate each rectangle independently, in corridor (= e natural) frame.
  const auto& e_secs = ex.sections.at(e);
  std::array<std::vector<int>, 5> rect_cur;
  std::array<Frag, 5> frag;
  auto natural_filter = [&](const std::vector<int>& sec, auto&& pred) {
    std::vector<int> out2;
    for (int s : sec)
      if (pred(s)) out2.push_back(s);
    return out2;
  };
  rect_cur[0] = natural_filter(e_secs.front(),
                               [&](int s) { return origin[s] == 1; });
  rect_cur[1] = natural_filter(e_secs.front(),
                               [&](int s) { return origin[s] == 2; });
  std::array<std::vector<int>, 5> rect_order;  // event gids per rectangle
  for (int g : gids) rect_order[event_rect(ex.events[g])].push_back(g);

  auto run_rect = [&](int rect) {
    frag[rect].start.clear();
    for (int s : rect_cur[rect])
      frag[rect].start.push_back(ex.segs[s].elem);
    for (int g : rect_order[rect]) {
      const EventInfo& info = ex.events[g];
      auto& cur = rect_cur[rect];
      SigmaEvent ev;
      ev.fork = info.fork;
      auto at0 = std::find(cur.begin(), cur.end(), info.in[0]);
      if (at0 == cur.end()) bad("rectangle simulation lost a strand");
      ev.index = (int)(at0 - cur.begin());
      if (info.fork) {
        ev.out0 = ex.segs[info.out[0]].elem;
        ev.out1 = ex.segs[info.out[1]].elem;
        cur[ev.index] = info.out[0];
        cur.insert(cur.begin() + ev.index + 1, info.out[1]);
      } else {
        if (ev.index + 1 >= (int)cur.size() || cur[ev.index + 1] != info.in[1])
          bad("merge strands are not adjacent in their rectangle");
        ev.out0 = ex.segs[info.out[0]].elem;
        cur[ev.index] = info.out[0];
        cur.erase(cur.begin() + ev.index + 1);
      }
      frag[rect].events.push_back(ev);
    }
  };
  run_rect(0);
  run_rect(1);
  // X splits into the S1 block and the diagonal block; for a right split the
  // S1 block is on the corridor left, for a left split on the right.
  {
    std::vector<int> s1_part = natural_filter(
        rect_cur[0], [&](int s) { return dest[s] == 1; });
    std::vector<int> dg_part = natural_filter(
        rect_cur[0], [&](int s) { return dest[s] != 1; });
    std::vector<int> expect = right ? s1_part : dg_part;
    for (size_t i = 0; i < expect.size(); ++i)
      if (rect_cur[0][i] != expect[i])
        bad("X strands do not separate into contiguous blocks at the new "
            "switch");
    rect_cur[2] = s1_part;
    rect_cur[3] = dg_part;
  }
  run_rect(3);
  run_rect(2);
  // T1 receives the diagonal block and the Y block; for a right split the
  // diagonal block is on the corridor left.
  rect_cur[4] = right ? rect_cur[3] : rect_cur[1];
  {
    const std::vector<int>& second = right ? rect_cur[1] : rect_cur[3];
    rect_cur[4].insert(rect_cur[4].end(), second.begin(), second.end());
  }
  run_rect(4);

  // Attach fragments. Entry-side branches extend beyond their end at v;
  // exit-side branches gain the stretch before their end at w.
  CarriedPosition res;
  res.base = out.track;
  res.carried = pos.carried;
  res.weaves = pos.weaves;
  auto attach = [&](const HalfBranch& h, int rect, bool entry_side) {
    bool natural = entry_side ? h.end == 1 : h.end == 0;
    Frag f = natural ? frag[rect] : reverse_frag(frag[rect]);
    // read back from res so a branch serving two roles keeps both fragments
    res.weaves[h.branch] = attach_frag(res.weaves.at(h.branch), f, h.end);
  };
  attach(hx, 0, true);
  attach(hy, 1, true);
  attach(hs1, 2, false);
  attach(ht1, 4, false);
  // Diagonal: for a right split its 0->1 runs with the corridor, for a left
  // split against it.
  {
    Frag f = right ? frag[3] : reverse_frag(frag[3]);
    BranchWeave dw;
    dw.start = f.start;
    dw.events = f.events;
    res.weaves[e] = dw;
  }

  validate_position(res);
  return res;
}
namespace {

std::vector<Elem> fold_elems(std::vector<Elem> cur,
                             const std::vector<SigmaEvent>& evs, size_t upto) {
  for (size_t k = 0; k < upto && k < evs.size(); ++k) {
    const SigmaEvent& ev = evs[k];
    if (ev.fork) {
      cur[ev.index] = ev.out0;
      cur.insert(cur.begin() + ev.index + 1, ev.out1);
    } else {
      cur[ev.index] = ev.out0;
      cur.erase(cur.begin() + ev.index + 1);
    }
  }
  return cur;
}

// Swap adjacent events k and k+1 over one branch. Only legal when the second
// event's consumed strands are disjoint from the first event's produced
// strands; returns false otherwise.
bool commute_events(BranchWeave& w, size_t k) {
  SigmaEvent a = w.events[k], b = w.events[k + 1];
  int pa = a.fork ? 2 : 1, ca = a.fork ? 1 : 2;
  int cb = b.fork ? 1 : 2, pb = b.fork ? 2 : 1;
  if (b.index >= a.index + pa) {
    b.index -= pa - ca;
  } else if (b.index + cb <= a.index) {
    a.index += pb - cb;
  } else {
    return false;
  }
  w.events[k] = b;
  w.events[k + 1] = a;
  return true;
}

// Slide the first (end 0) or last (end 1) event of large branch e across the
// tie there, onto the adjacent small branch of the base switch. Returns
// false when the event's tie-side strands straddle the cusp, which happens
// exactly at the connector terminals.
bool slide_event_off(CarriedPosition& p, int e, int end) {
  BranchWeave& we = p.weaves.at(e);
  if (we.events.empty()) bad("slide with no event over the branch");
  SigmaEvent E = end == 0 ? we.events.front() : we.events.back();
  std::vector<Elem> pre, tie_sec;
  if (end == 0) {
    tie_sec = we.start;
  } else {
    pre = fold_elems(we.start, we.events, we.events.size() - 1);
    tie_sec = fold_elems(pre, {E}, 1);
  }

  // The strands of E crossing the tie before the slide, and the strands on
  // its far side which cross it afterwards, both in e-natural order.
  std::vector<int> tiepos;
  std::vector<Elem> tie_el, far_el;
  if (end == 0) {
    if (E.fork) {
      tiepos = {E.index};
      far_el = {E.out0, E.out1};
    } else {
      tiepos = {E.index, E.index + 1};
      far_el = {E.out0};
    }
  } else {
    if (E.fork) {
      tiepos = {E.index, E.index + 1};
      far_el = {pre[E.index]};
    } else {
      tiepos = {E.index};
      far_el = {pre[E.index], pre[E.index + 1]};
    }
  }
  for (int i : tiepos) tie_el.push_back(tie_sec[i]);

  auto [vp, slot] = p.base.locate({e, end});
  if (slot != Slot::Large) bad("slide across the tie of a non-large end");
  int n = (int)tie_sec.size();
  auto tie_side_size = [&](const HalfBranch& h) {
    const BranchWeave& w = p.weaves.at(h.branch);
    return (int)(h.end == 0
                     ? w.start.size()
                     : fold_elems(w.start, w.events, w.events.size()).size());
  };
  // Toward-frame over e = [A-block, B-block] of the base switch.
  int na = tie_side_size(vp->small_left);
  bool in_a = true, in_b = true;
  for (int i : tiepos) {
    int it = end == 0 ? n - 1 - i : i;
    (it < na ? in_b : in_a) = false;
  }
  if (!in_a && !in_b) return false;  // straddles the cusp
  HalfBranch hb = in_a ? vp->small_left : vp->small_right;
  int off = in_a ? 0 : na;
  int dl = end == 1 ? +1 : -1;        // toward the switch along e
  int daw = hb.end == 0 ? +1 : -1;    // away from the switch along hb
  BranchWeave& wb = p.weaves.at(hb.branch);
  int m = tie_side_size(hb);
  auto bmap = [&](int i) {
    int j = (end == 0 ? n - 1 - i : i) - off;
    return daw == +1 ? j : m - 1 - j;
  };
  auto tr = [&](const Elem& el) { return Elem{el.branch, el.dir * dl * daw}; };
  bool rev = end == 0 ? daw == +1 : daw == -1;
  auto ord = [&](std::vector<Elem> g) {
    for (Elem& x : g) x = tr(x);
    if (g.size() == 2 && rev) std::swap(g[0], g[1]);
    return g;
  };
  std::vector<int> bpos;
  for (int i : tiepos) bpos.push_back(bmap(i));
  std::sort(bpos.begin(), bpos.end());
  if (bpos.size() == 2 && bpos[1] != bpos[0] + 1)
    bad("tie block is not contiguous on the slide target");
  std::vector<Elem> tie_b = ord(tie_el), far_b = ord(far_el);

  if (hb.end == 1) {
    // Appended event: consumes the old crossing strands at the final
    // section, produces the new ones.
    std::vector<Elem> bfin = fold_elems(wb.start, wb.events, wb.events.size());
    for (size_t t = 0; t < tie_b.size(); ++t)
      if (bfin[bpos[0] + t] != tie_b[t])
        bad("tie strands disagree across the slide");
    SigmaEvent ne;
    ne.fork = tie_b.size() == 1;
    ne.index = bpos[0];
    ne.out0 = far_b[0];
    if (ne.fork) ne.out1 = far_b[1];
    wb.events.push_back(ne);
  } else {
    // Prepended event: the start section now holds the new crossing
    // strands; the event restores the old ones, so later indices keep.
    for (size_t t = 0; t < tie_b.size(); ++t)
      if (wb.start[bpos[0] + t] != tie_b[t])
        bad("tie strands disagree across the slide");
    SigmaEvent ne;
    ne.fork = far_b.size() == 1;
    ne.index = bpos[0];
    ne.out0 = tie_b[0];
    if (ne.fork) ne.out1 = tie_b[1];
    wb.start.erase(wb.start.begin() + bpos[0],
                   wb.start.begin() + bpos[0] + (int)tie_b.size());
    wb.start.insert(wb.start.begin() + bpos[0], far_b.begin(), far_b.end());
    wb.events.insert(wb.events.begin(), ne);
  }

  if (end == 0) {
    we.start = fold_elems(we.start, {E}, 1);
    we.events.erase(we.events.begin());
  } else {
    we.events.pop_back();
  }
  return true;
}

}  // namespace

NormalizeResult normalize_over(const CarriedPosition& pos, int e) {
  if (carried_by_split(pos, e, Direction::Right) ||
      carried_by_split(pos, e, Direction::Left))
    fail(ErrorCode::CarriedBySplit,
         "a split at branch " + std::to_string(e) + " carries sigma");
  NormalizeResult res;
  res.pos = pos;
  // Every round slides one non-connector event off e, so the round count is
  // bounded by the number of sigma-switches.
  for (int round = 0; round <= pos.carried.num_switches() + 1; ++round) {
    Expanded ex = expand(res.pos);
    ConnectorData cd = connector_path(ex, e);
    const std::vector<int> no_events;
    const auto& gids =
        ex.branch_events.count(e) ? ex.branch_events.at(e) : no_events;
    std::vector<int> extra;
    for (size_t k = 0; k < gids.size(); ++k)
      if (!cd.events.count(gids[k])) extra.push_back((int)k);
    if (extra.empty()) {
      validate_position(res.pos);
      return res;
    }
    bool moved = false;
    for (int end = 0; end < 2 && !moved; ++end) {
      for (int k : extra) {
        CarriedPosition trial = res.pos;
        BranchWeave& we = trial.weaves.at(e);
        bool ok = true;
        if (end == 0)
          for (int j = k; j > 0 && ok; --j) ok = commute_events(we, j - 1);
        else
          for (int j = k; j + 1 < (int)we.events.size() && ok; ++j)
            ok = commute_events(we, j);
        if (!ok || !slide_event_off(trial, e, end)) continue;
        res.pos = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved)
      fail(ErrorCode::IncompatibleLocalPicture,
           "sigma-switches over branch " + std::to_string(e) +
               " are pinned between the connector terminals");
  }
  fail(ErrorCode::NonTermination, "normalization does not terminate");
}

std::optional<std::vector<Move>> shift_equivalent(const TrainTrack& a,
                                                  const TrainTrack& b) {
  if (a.num_switches() != b.num_switches() ||
      a.num_branches() != b.num_branches())
    return std::nullopt;
  auto canon = [](const TrainTrack& t) {
    return canonical_form(colored_graph(t));
  };
  const std::string target = canon(b);
  if (canon(a) == target) return std::vector<Move>{};
  struct Node {
    TrainTrack track;
    std::vector<Move> word;
  };
  std::deque<Node> queue;
  std::set<std::string> seen{canon(a)};
  queue.push_back(Node{a, {}});
  while (!queue.empty()) {
    Node cur = std::move(queue.front());
    queue.pop_front();
    for (int m : mixed_branches(cur.track)) {
      MoveOutcome o = shift(cur.track, m);
      std::string c = canon(o.track);
      if (!seen.insert(c).second) continue;
      std::vector<Move> w = cur.word;
      w.push_back(Move{MoveKind::Shift, m, Direction::Right});
      if (c == target) return w;
      queue.push_back(Node{std::move(o.track), std::move(w)});
    }
  }
  return std::nullopt;
}

AgreeResult agree(const CarriedPosition& pos0, const LaminationProxy& lambda) {
  if (lambda.kind == LaminationProxy::Kind::Carried)
    fail(ErrorCode::NotCarried, "agree requires a measure or word proxy");
  validate_position(pos0);
  CarriedPosition pos = pos0;
  LaminationProxy lam = lambda;
  std::vector<Move> word = lam.word;  // consumed as splits are matched
  if (lam.kind == LaminationProxy::Kind::Measure &&
      !check_measure(pos.carried, lam.measure).empty())
    fail(ErrorCode::NotCarried, "measure fails the sigma switch conditions");
  AgreeResult res;

  // The lambda direction of a sigma split at branch c.
  auto lambda_dir = [&](const TrainTrack& sig, int c) -> Direction {
    if (lam.kind == LaminationProxy::Kind::Measure)
      return lambda_split_direction(sig, c, lam.measure);
    for (auto it = word.begin(); it != word.end(); ++it)
      if (it->kind == MoveKind::Split && it->at == c) {
        Direction d = it->direction;
        word.erase(it);
        return d;
      }
    fail(ErrorCode::NotCarried,
         "recorded word does not split at branch " + std::to_string(c));
  };

  // Shift sigma at a mixed branch; the shifted branch spans a different
  // quad afterwards, so its measure weight becomes the sum of the smalls at
  // its new large end.
  auto shift_sigma = [&](int b) {
    pos = shift_carried(pos, b);
    res.carried_word.push_back(Move{MoveKind::Shift, b, Direction::Right});
    if (lam.kind != LaminationProxy::Kind::Measure) return;
    for (const SwitchRecord& sw : pos.carried.switches)
      if (sw.large.branch == b) {
        lam.measure.weights[b] = lam.measure.at(sw.small_left.branch) +
                                 lam.measure.at(sw.small_right.branch);
        return;
      }
    fail(ErrorCode::Internal, "shifted branch is large at no switch");
  };

  // Transport through base splits as long as one carries sigma.
  auto saturate = [&]() {
    for (int guard = 0;; ++guard) {
      if (guard > 100 * pos.base.num_branches() + 100)
        fail(ErrorCode::NonTermination,
             "base splits carry sigma without end");
      bool did = false;
      for (int e : large_branches(pos.base)) {
        for (Direction d : {Direction::Right, Direction::Left})
          if (carried_by_split(pos, e, d)) {
            pos = transport_through_base_split(pos, SplitMove{e, d});
            res.base_word.push_back(Move{MoveKind::Split, e, d});
            did = true;
            break;
          }
        if (did) break;
      }
      if (!did) return;
    }
  };

  saturate();
  int prev_ones = -1;
  while (true) {
    NuProfile np = nu_profile(pos);
    int estar = -1;
    for (int e : large_branches(pos.base))
      if (np.at(e) >= 2 && (estar < 0 || e < estar)) estar = e;
    if (estar < 0) {
      auto cert = shift_equivalent(pos.base, pos.carried);
      if (!cert)
        fail(ErrorCode::Internal,
             "nu = 1 at every large branch yet the tracks are not shift "
             "equivalent");
      res.shift_certificate = *cert;
      break;
    }
    int ones = 0;
    for (const auto& [b, nu] : np) ones += nu == 1;
    if (ones <= prev_ones)
      fail(ErrorCode::NonTermination,
           "a phase did not add a nu = 1 branch");
    prev_ones = ones;
    if (++res.phases > pos.base.num_branches())
      fail(ErrorCode::NonTermination, "phase budget exhausted");

    // Collapse the connector over estar down to a single large branch.
    NormalizeResult nr = normalize_over(pos, estar);
    pos = std::move(nr.pos);
    res.carried_word.insert(res.carried_word.end(), nr.carried_moves.begin(),
                            nr.carried_moves.end());
    auto conn = cutting_connector(pos, estar);
    if (!conn) fail(ErrorCode::Internal, "no connector after normalizing");
    for (int guard = 0; conn->size() > 1; ++guard) {
      if (guard > 10 * pos.carried.num_switches())
        fail(ErrorCode::NonTermination, "connector does not shorten");
      int at = (*conn)[1];
      auto [t0, s0] = pos.carried.locate({at, 0});
      auto [t1, s1] = pos.carried.locate({at, 1});
      if (s0 == Slot::SmallRight && s1 == Slot::SmallRight) {
        if (lam.kind == LaminationProxy::Kind::Measure)
          lam.measure.weights[at] = lam.measure.at(t1->small_left.branch) +
                                    lam.measure.at(t0->large.branch);
        pos = collapse_carried(pos, at, Direction::Right);
        res.carried_word.push_back(
            Move{MoveKind::Collapse, at, Direction::Right});
      } else if (s0 == Slot::SmallLeft && s1 == Slot::SmallLeft) {
        if (lam.kind == LaminationProxy::Kind::Measure)
          lam.measure.weights[at] = lam.measure.at(t1->large.branch) +
                                    lam.measure.at(t0->small_right.branch);
        pos = collapse_carried(pos, at, Direction::Left);
        res.carried_word.push_back(
            Move{MoveKind::Collapse, at, Direction::Left});
      } else if (classify_branch(pos.carried, (*conn)[0]) ==
                 BranchClass::Mixed) {
        // the first path branch is small at the interior switch: shift it
        // to move that switch backward past the terminal
        shift_sigma((*conn)[0]);
      } else if (classify_branch(pos.carried, at) == BranchClass::Mixed) {
        // a mixed connector branch: shift its switch backward along the
        // path, absorbing it into the terminal
        shift_sigma(at);
      } else {
        fail(ErrorCode::IncompatibleLocalPicture,
             "connector branch " + std::to_string(at) +
                 " is neither a split diagonal nor mixed");
      }
      if (lam.kind == LaminationProxy::Kind::Measure &&
          !check_measure(pos.carried, lam.measure).empty())
        fail(ErrorCode::Internal,
             "measure broke a switch condition while shortening the "
             "connector");
      NormalizeResult nr2 = normalize_over(pos, estar);
      pos = std::move(nr2.pos);
      res.carried_word.insert(res.carried_word.end(),
                              nr2.carried_moves.begin(),
                              nr2.carried_moves.end());
      conn = cutting_connector(pos, estar);
      if (!conn)
        fail(ErrorCode::Internal, "the connector vanished while shortening");
    }
    // The collapses may already have brought nu(estar) down to 1; only
    // split when divergence remains.
    if (nu_profile(pos).at(estar) >= 2) {
      int c = (*conn)[0];
      Direction dsig = lambda_dir(pos.carried, c);
      if (lam.kind == LaminationProxy::Kind::Measure) {
        MoveOutcome o = split(pos.carried, SplitMove{c, dsig});
        lam.measure = measure_after_split(lam.measure, pos.carried,
                                          SplitMove{c, dsig},
                                          o.correspondence);
      }
      pos = split_carried(pos, c, dsig);
      res.carried_word.push_back(Move{MoveKind::Split, c, dsig});
      if (lam.kind == LaminationProxy::Kind::Measure &&
          !check_measure(pos.carried, lam.measure).empty())
        fail(ErrorCode::Internal,
             "measure broke a switch condition at the matched split");
      saturate();
    }
  }
  if (lam.kind == LaminationProxy::Kind::Measure &&
      !check_measure(pos.carried, lam.measure).empty())
    fail(ErrorCode::Internal, "transported measure broke a switch condition");
  res.final_base = pos.base;
  res.final_carried = pos.carried;
  return res;
}

std::string serialize_position(const CarriedPosition& pos) {
  std::ostringstream out;
  out << "pos v1\n";
  out << "base-begin\n" << serialize_track(pos.base) << "base-end\n";
  out << "carried-begin\n"
      << serialize_track(pos.carried) << "carried-end\n";
  auto elem = [](const Elem& e) {
    return std::to_string(e.branch) + (e.dir > 0 ? "+" : "-");
  };
  for (const auto& [b, w] : pos.weaves) {
    out << "weave " << b;
    for (const Elem& e : w.start) out << " " << elem(e);
    out << "\n";
    for (const SigmaEvent& ev : w.events) {
      if (ev.fork)
        out << "ev " << b << " fork " << ev.index << " " << elem(ev.out0)
            << " " << elem(ev.out1) << "\n";
      else
        out << "ev " << b << " merge " << ev.index << " " << elem(ev.out0)
            << "\n";
    }
  }
  return out.str();
}

CarriedPosition parse_position_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  size_t i = 0;
  auto expect = [&](const std::string& want) {
    if (i >= lines.size() || lines[i] != want)
      fail(ErrorCode::ParseError, "position file: expected '" + want + "'");
    ++i;
  };
  auto block = [&](const std::string& tag) {
    expect(tag + "-begin");
    std::string body;
    while (i < lines.size() && lines[i] != tag + "-end")
      body += lines[i++] + "\n";
    expect(tag + "-end");
    return parse_track_string(body);
  };
  expect("pos v1");
  CarriedPosition pos;
  pos.base = block("base");
  pos.carried = block("carried");
  auto parse_elem = [](const std::string& tok) {
    if (tok.size() < 2 || (tok.back() != '+' && tok.back() != '-'))
      fail(ErrorCode::ParseError, "position file: bad strand '" + tok + "'");
    Elem e;
    try {
      e.branch = std::stoi(tok.substr(0, tok.size() - 1));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "position file: bad strand '" + tok + "'");
    }
    e.dir = tok.back() == '+' ? +1 : -1;
    return e;
  };
  for (; i < lines.size(); ++i) {
    std::istringstream ls(lines[i]);
    std::string kw;
    ls >> kw;
    int b;
    if (kw == "weave") {
      if (!(ls >> b))
        fail(ErrorCode::ParseError, "position file: bad weave line");
      if (pos.weaves.count(b))
        fail(ErrorCode::ParseError,
             "position file: duplicate weave for branch " + std::to_string(b));
      std::string tok;
      while (ls >> tok) pos.weaves[b].start.push_back(parse_elem(tok));
    } else if (kw == "ev") {
      std::string kind;
      SigmaEvent ev;
      std::string t0, t1;
      if (!(ls >> b >> kind >> ev.index >> t0))
        fail(ErrorCode::ParseError, "position file: bad event line");
      if (!pos.weaves.count(b))
        fail(ErrorCode::ParseError,
             "position file: event before weave for branch " +
                 std::to_string(b));
      ev.out0 = parse_elem(t0);
      if (kind == "fork") {
        ev.fork = true;
        if (!(ls >> t1))
          fail(ErrorCode::ParseError, "position file: fork needs two strands");
        ev.out1 = parse_elem(t1);
      } else if (kind == "merge") {
        ev.fork = false;
      } else {
        fail(ErrorCode::ParseError,
             "position file: unknown event kind '" + kind + "'");
      }
      pos.weaves[b].events.push_back(ev);
    } else {
      fail(ErrorCode::ParseError,
           "position file: unknown directive '" + kw + "'");
    }
  }
  try {
    validate_position(pos);
  } catch (const Error& err) {
    fail(ErrorCode::ParseError,
         std::string("position file: not a carrying picture: ") + err.what());
  }
  return pos;
}

CarriedPosition load_position(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_position_string(buf.str());
}

}  // namespace ttkit
